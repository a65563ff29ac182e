#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qwal/omega.hpp"

namespace qwal {

using LetterId = int;
using StateId = int;

/// Finite ordered set of letter names; letters are addressed by index.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(LetterId a) const { return names_.at(static_cast<std::size_t>(a)); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<LetterId> find(const std::string& name) const;
  /// Throws InputError for unknown letters.
  LetterId index(const std::string& name) const;
  LetterId add(const std::string& name);

  /// Maps letter names to indices; InputError on a letter outside the alphabet.
  LassoWord<LetterId> encode(const LassoWord<std::string>& w) const;
  LassoWord<std::string> decode(const LassoWord<LetterId>& w) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LetterId> index_;
};

}  // namespace qwal
