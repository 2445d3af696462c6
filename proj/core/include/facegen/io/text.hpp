#pragma once

#include <string>

namespace facegen::io {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

}  // namespace facegen::io
