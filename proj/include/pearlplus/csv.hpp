#pragma once

#include <string>

namespace pearlplus {

// Shortest round-trip decimal form; byte-stable for identical doubles.
std::string format_double(double x);

}  // namespace pearlplus
