#pragma once

#include <string>

namespace ueb {

// Reals in CSV output are printed at 17 significant digits so values
// round-trip exactly through text.
std::string csv_real(double v);

}  // namespace ueb
