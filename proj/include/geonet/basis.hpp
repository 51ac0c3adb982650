#pragma once

#include <functional>

namespace geonet {

// Solutions of u'' = -mu * u normalized at s = 0:
//   C(mu, 0) = 1, C'(mu, 0) = 0,   S(mu, 0) = 0, S'(mu, 0) = 1.
// Trigonometric for mu > 0, linear for mu = 0, hyperbolic for mu < 0.
// Both are entire functions of mu, so matrices assembled from them have no
// poles or branch cuts anywhere on the real axis.
// Derivatives in s: C' = -mu * S, S' = C.
double basis_C(double mu, double s);
double basis_S(double mu, double s);

// Integrals over [0, len] of products of the basis pair at a common mu.
double int_CC(double mu, double len);   // = (len + C*S)/2
double int_CS(double mu, double len);   // = S^2/2
double int_SS(double mu, double len);   // series near mu = 0

// Composite Simpson rule; panels is rounded up to the next even count.
double simpson(const std::function<double(double)>& f, double a, double b,
               int panels);

}  // namespace geonet
