#include "geonet/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace geonet {

double basis_C(double mu, double s) {
  if (mu > 0.0) return std::cos(std::sqrt(mu) * s);
  if (mu < 0.0) return std::cosh(std::sqrt(-mu) * s);
  return 1.0;
}

double basis_S(double mu, double s) {
  if (mu > 0.0) {
    const double w = std::sqrt(mu);
    return std::sin(w * s) / w;
  }
  if (mu < 0.0) {
    const double w = std::sqrt(-mu);
    return std::sinh(w * s) / w;
  }
  return s;
}

double int_CC(double mu, double len) {
  return 0.5 * (len + basis_C(mu, len) * basis_S(mu, len));
}

double int_CS(double mu, double len) {
  const double s = basis_S(mu, len);
  return 0.5 * s * s;
}

double int_SS(double mu, double len) {
  const double x = mu * len * len;
  if (std::abs(x) < 0.5) {
    // sum_j (-1)^j 2^(2j+1) / ((2j+3) (2j+2)!) * mu^j len^(2j+3)
    double sum = 0.0;
    double term = len * len * len / 3.0;  // j = 0
    int j = 0;
    while (std::abs(term) > 1e-18 * std::abs(sum) + 1e-300) {
      sum += term;
      ++j;
      term *= -x * 4.0 / ((2.0 * j + 2.0) * (2.0 * j + 1.0));
      term *= (2.0 * j + 1.0) / (2.0 * j + 3.0);
      if (j > 60) break;
    }
    return sum;
  }
  return (len - basis_C(mu, len) * basis_S(mu, len)) / (2.0 * mu);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int k = 1; k < panels; ++k) {
    sum += f(a + k * h) * ((k % 2 == 1) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace geonet
