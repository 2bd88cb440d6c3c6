#pragma once

#include <string>

namespace geocp {

// Shortest decimal form (up to 17 significant digits) that parses back to
// exactly the same double. Output is locale-independent.
std::string fmt_double(double v);

// Fixed-point with the given number of decimals, e.g. for timing reports.
std::string fmt_fixed(double v, int decimals);

}  // namespace geocp
