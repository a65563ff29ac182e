#include "qwal/alphabet.hpp"

namespace qwal {

Alphabet::Alphabet(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

std::optional<LetterId> Alphabet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LetterId Alphabet::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("letter '" + name + "' is not in the alphabet");
  return it->second;
}

LetterId Alphabet::add(const std::string& name) {
  if (name.empty()) throw InputError("empty letter name");
  if (index_.count(name)) throw InputError("duplicate letter '" + name + "'");
  auto id = static_cast<LetterId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

LassoWord<LetterId> Alphabet::encode(const LassoWord<std::string>& w) const {
  std::vector<LetterId> p, q;
  for (auto& s : w.prefix()) p.push_back(index(s));
  for (auto& s : w.loop()) q.push_back(index(s));
  return LassoWord<LetterId>(std::move(p), std::move(q));
}

LassoWord<std::string> Alphabet::decode(const LassoWord<LetterId>& w) const {
  std::vector<std::string> p, q;
  for (auto a : w.prefix()) p.push_back(name(a));
  for (auto a : w.loop()) q.push_back(name(a));
  return LassoWord<std::string>(std::move(p), std::move(q));
}

}  // namespace qwal
