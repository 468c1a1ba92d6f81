#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "euler2c/kepler.hpp"
#include "euler2c/kmap.hpp"

namespace testsupport {

using namespace euler2c;

inline double rel_err(double a, double b, double floor = 1e-14) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

class Sampler {
 public:
  explicit Sampler(unsigned long seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double angle() { return uniform(0.0, kTwoPi); }
  int sign() { return uniform(0.0, 1.0) < 0.5 ? -1 : 1; }

  MassParams masses() {
    MassParams m;
    m.m = uniform(0.5, 2.0);
    m.M = uniform(0.5, 2.0);
    m.Mprime = uniform(0.1, 1.5);
    m.m0 = uniform(0.5, 2.0);
    return m;
  }

  /// Interior point of the spatial K domain, away from the guard bands.
  KCoords spatial() {
    KCoords k;
    k.L = uniform(0.6, 1.5);
    k.G = k.L * uniform(0.3, 0.9);
    k.Theta = k.G * uniform(-0.8, 0.8);
    k.C = std::max(std::abs(k.Theta), k.G) * uniform(1.1, 3.0);
    k.Z = k.C * uniform(-0.8, 0.8);
    k.R = uniform(-1.0, 1.0);
    k.zeta = angle();
    k.g = angle();
    k.theta = angle();
    k.gbar = angle();
    k.r = uniform(2.0, 6.0);
    k.ell = angle();
    return k;
  }

  PlanarKCoords planar() {
    PlanarKCoords k;
    k.L = uniform(0.6, 1.5);
    k.G = k.L * uniform(0.3, 0.9);
    k.C = k.G * uniform(1.2, 3.0);
    k.Z = k.C * uniform(-0.8, 0.8);
    k.R = uniform(-1.0, 1.0);
    k.zeta = angle();
    k.g = angle();
    k.gbar = angle();
    k.r = uniform(2.0, 6.0);
    k.ell = angle();
    return k;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
