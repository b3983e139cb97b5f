#include "deo/io.hpp"

#include <charconv>
#include <system_error>

namespace deo {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace deo
