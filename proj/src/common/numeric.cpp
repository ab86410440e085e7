#include "peelkit/numeric.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace peelkit::numeric {

std::vector<long double> h_down_table(long n_max) {
  std::vector<long double> h(static_cast<std::size_t>(n_max) + 1);
  h[0] = 1.0L;
  for (long n = 0; n < n_max; ++n) {
    h[n + 1] = h[n] * (2.0L * n + 1.0L) / (2.0L * n + 2.0L);
  }
  return h;
}

double h_down_real(double x) {
  if (x >= 100.0) {
    const double u = 1.0 / x;
    const double series =
        1.0 + u * (-1.0 / 8 + u * (1.0 / 128 + u * (5.0 / 1024 + u * (-21.0 / 32768 + u * (-399.0 / 262144)))));
    return series / std::sqrt(M_PI * x);
  }
  return boost::math::tgamma_delta_ratio(x + 0.5, 0.5) / std::sqrt(M_PI);
}

}  // namespace peelkit::numeric
