#include "qwal/errors.hpp"

namespace qwal {

namespace {
std::string with_position(const std::string& msg, std::size_t pos) {
  if (pos == ParseError::npos) return msg;
  return msg + " (at offset " + std::to_string(pos) + ")";
}
}  // namespace

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : Error(with_position(msg, pos)), pos_(pos) {}

}  // namespace qwal
