#pragma once

#include <string>

namespace deo {

/// Shortest decimal string that round-trips to the same double
/// (std::to_chars). Locale-independent.
std::string format_double(double x);

}  // namespace deo
