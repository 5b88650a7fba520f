#include "misstab/chisq.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace misstab {

double chi_square_sf(double x, int df) {
  if (df < 0) throw std::invalid_argument("negative degrees of freedom");
  if (df == 0) return 1.0;
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace misstab
