#pragma once

namespace misstab {

// Upper tail P(X > x) of a chi-square with `df` degrees of freedom; df = 0
// yields 1 (saturated fits).
double chi_square_sf(double x, int df);

}  // namespace misstab
