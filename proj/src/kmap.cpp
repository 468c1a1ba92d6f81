#include "euler2c/kmap.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "euler2c/errors.hpp"

namespace euler2c {
namespace {

// Relative guard band for the boundary of the coordinate domain: inclination
// nodes, circular orbits and vanishing angular momentum.
constexpr double kGuard = 1e-9;
constexpr double kMinFdStep = 1e-10;

const Vec3 kI(1.0, 0.0, 0.0);
const Vec3 kJ(0.0, 1.0, 0.0);
const Vec3 kK(0.0, 0.0, 1.0);

void check_actions(double L, double G, double r) {
  if (!(r > 0.0)) throw DomainError("K-map: r = |x'| must be positive");
  if (!(L > 0.0) || !(G > 0.0) || G > L) {
    throw DomainError("K-map: need 0 < G <= L (G=" + std::to_string(G) +
                      ", L=" + std::to_string(L) + ")");
  }
}

void check_spatial(const KCoords& k) {
  check_actions(k.L, k.G, k.r);
  if (!(k.C > kGuard)) throw DomainError("K-map: total angular momentum C vanishes");
  if (std::abs(k.Z) >= k.C * (1.0 - kGuard)) {
    throw DomainError("K-map: node i1 = k x C vanishes (|Z| = C)");
  }
  if (std::abs(k.Theta) >= k.C * (1.0 - kGuard)) {
    throw DomainError("K-map: node i2 = C x x' vanishes (|Theta| = C)");
  }
  if (std::abs(k.Theta) >= k.G * (1.0 - kGuard)) {
    throw DomainError("K-map: node i3 = x' x M vanishes (|Theta| = G)");
  }
}

Eigen::Matrix<double, 12, 1> flatten(const CartesianState& s) {
  Eigen::Matrix<double, 12, 1> v;
  v << s.xprime, s.x, s.yprime, s.y;
  return v;
}

template <int N>
Eigen::Matrix<double, N, N> standard_symplectic() {
  constexpr int h = N / 2;
  Eigen::Matrix<double, N, N> omega = Eigen::Matrix<double, N, N>::Zero();
  omega.template block<h, h>(0, h) = Eigen::Matrix<double, h, h>::Identity();
  omega.template block<h, h>(h, 0) = -Eigen::Matrix<double, h, h>::Identity();
  return omega;
}

// Central-difference Jacobian of a map from N coordinates to the flattened
// Cartesian state. Any domain failure inside the stencil is reported as a
// numeric failure of the check, not of the point.
template <int N>
Eigen::Matrix<double, 12, N> fd_jacobian(
    const std::function<CartesianState(const std::array<double, N>&)>& map,
    const std::array<double, N>& point, double step) {
  Eigen::Matrix<double, 12, N> jac;
  for (int j = 0; j < N; ++j) {
    auto plus = point;
    auto minus = point;
    plus[j] += step;
    minus[j] -= step;
    try {
      jac.col(j) = (flatten(map(plus)) - flatten(map(minus))) / (2.0 * step);
    } catch (const DomainError& err) {
      throw NumericError(std::string("canonicity: finite-difference stencil leaves the domain: ") +
                         err.what());
    }
  }
  return jac;
}

}  // namespace

Mat3 rot1(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  m << 1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c;
  return m;
}

Mat3 rot3(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return m;
}

double oriented_angle(const Vec3& w, const Vec3& u, const Vec3& v) {
  const double wn = w.norm();
  if (!(wn > 0.0)) throw DomainError("oriented_angle: zero axis");
  const Vec3 axis = w / wn;
  const Vec3 up = u - axis * u.dot(axis);
  const Vec3 vp = v - axis * v.dot(axis);
  if (!(up.norm() > 0.0) || !(vp.norm() > 0.0)) {
    throw DomainError("oriented_angle: vector parallel to the axis");
  }
  return wrap_two_pi(std::atan2(axis.dot(up.cross(vp)), up.dot(vp)));
}

Inclinations inclinations(const KCoords& k) {
  auto acos_checked = [](double num, double den, const char* what) {
    const double c = num / den;
    if (!(std::abs(c) <= 1.0)) throw DomainError(std::string("inclinations: |") + what + "| > 1");
    return std::acos(c);
  };
  return {acos_checked(k.Z, k.C, "Z/C"), acos_checked(k.Theta, k.C, "Theta/C"),
          acos_checked(k.Theta, k.G, "Theta/G")};
}

KeplerFrameState kepler_frame_state(double L, double G, double ell, double gbar,
                                    const MassParams& masses) {
  const OrbitalElements el = elements_from_actions(L, G, ell, gbar, masses);
  const double eta = G / L;
  const double c = std::cos(el.xi);
  const double s = std::sin(el.xi);
  const Mat3 frame = rot3(gbar - 0.5 * std::numbers::pi);
  const double speed = masses.m * masses.m * masses.M / (L * el.rho);
  return {el.a * frame * Vec3(c - el.e, eta * s, 0.0), speed * frame * Vec3(-s, eta * c, 0.0)};
}

CartesianState k_to_cartesian(const KCoords& k, const MassParams& masses) {
  masses.validate();
  check_spatial(k);
  const Inclinations inc = inclinations(k);
  const Mat3 node = rot3(k.zeta) * rot1(inc.i);
  const Mat3 outer = node * rot3(k.g) * rot1(inc.i1);
  const Mat3 inner = outer * rot3(k.theta) * rot1(inc.i2);
  const KeplerFrameState kf = kepler_frame_state(k.L, k.G, k.ell, k.gbar, masses);

  CartesianState s;
  s.x = inner * kf.x;
  s.y = inner * kf.y;
  s.xprime = k.r * outer * kK;
  const Vec3 total = k.C * node * kK;
  const Vec3 inner_momentum = k.G * inner * kK;
  const Vec3 outer_momentum = total - inner_momentum;
  s.yprime = (k.R / k.r) * s.xprime + outer_momentum.cross(s.xprime) / (k.r * k.r);
  return s;
}

KCoords to_kcoords(const PlanarKCoords& k, PlanarSense sense) {
  KCoords out;
  out.Z = k.Z;
  out.C = k.C;
  out.Theta = 0.0;
  out.G = k.G;
  out.R = k.R;
  out.L = k.L;
  out.zeta = k.zeta;
  out.g = k.g;
  out.theta = sense == PlanarSense::kPrograde ? std::numbers::pi : 0.0;
  out.gbar = k.gbar;
  out.r = k.r;
  out.ell = k.ell;
  return out;
}

CartesianState k_to_cartesian_planar(const PlanarKCoords& k, PlanarSense sense,
                                     const MassParams& masses) {
  masses.validate();
  check_actions(k.L, k.G, k.r);
  const double sigma = static_cast<double>(static_cast<int>(sense));
  if (!(k.C > kGuard)) throw DomainError("planar K-map: total angular momentum C vanishes");
  if (std::abs(k.Z) > k.C) throw DomainError("planar K-map: |Z| > C");
  if (!(k.C - sigma * k.G > 0.0)) {
    throw DomainError("planar K-map: outer angular momentum C - sigma G must be positive");
  }

  // The general map at Theta = 0 (i1 = i2 = π/2) and theta = π or 0.
  const double half_pi = 0.5 * std::numbers::pi;
  const double theta = sense == PlanarSense::kPrograde ? std::numbers::pi : 0.0;
  const Mat3 frame = rot3(k.zeta) * rot1(std::acos(k.Z / k.C)) * rot3(k.g);
  const Mat3 inner = frame * rot1(half_pi) * rot3(theta) * rot1(half_pi);
  const KeplerFrameState kf = kepler_frame_state(k.L, k.G, k.ell, k.gbar, masses);

  CartesianState s;
  s.x = inner * kf.x;
  s.y = inner * kf.y;
  s.xprime = -k.r * frame * kJ;
  s.yprime = -k.R * frame * kJ + ((k.C - sigma * k.G) / k.r) * frame * kI;
  return s;
}

Vec3 angular_momentum(const Vec3& x, const Vec3& y) { return x.cross(y); }

Vec3 eccentricity_vector(const Vec3& x, const Vec3& y, const MassParams& masses) {
  const double xn = x.norm();
  if (!(xn > 0.0)) throw CollisionError("eccentricity_vector: x = 0");
  return y.cross(x.cross(y)) - masses.m * masses.m * masses.M * x / xn;
}

KCoords cartesian_to_k(const CartesianState& s, const MassParams& masses) {
  masses.validate();
  KCoords k;
  k.r = s.xprime.norm();
  const double xn = s.x.norm();
  if (!(k.r > 0.0)) throw DomainError("cartesian_to_k: x' = 0");
  if (!(xn > 0.0)) throw CollisionError("cartesian_to_k: x = 0");

  const Vec3 M = angular_momentum(s.x, s.y);
  const Vec3 C = s.xprime.cross(s.yprime) + M;
  k.G = M.norm();
  k.C = C.norm();
  k.Z = C.dot(kK);
  k.Theta = M.dot(s.xprime) / k.r;
  k.R = s.yprime.dot(s.xprime) / k.r;

  const double m = masses.m;
  const double mu = m * m * masses.M;
  const double kepler_energy = s.y.squaredNorm() / (2.0 * m) - m * masses.M / xn;
  if (!(kepler_energy < 0.0)) {
    throw DomainError("cartesian_to_k: Kepler energy of (y, x) is not negative");
  }
  k.L = std::sqrt(m * m * m * masses.M * masses.M / (-2.0 * kepler_energy));

  if (!(k.C > kGuard)) throw DomainError("cartesian_to_k: total angular momentum C vanishes");
  if (!(k.G > kGuard * k.L)) throw DomainError("cartesian_to_k: angular momentum M vanishes");
  if (std::abs(k.Z) >= k.C * (1.0 - kGuard)) {
    throw DomainError("cartesian_to_k: node i1 = k x C vanishes");
  }
  if (std::abs(k.Theta) >= k.C * (1.0 - kGuard)) {
    throw DomainError("cartesian_to_k: node i2 = C x x' vanishes");
  }
  if (std::abs(k.Theta) >= k.G * (1.0 - kGuard)) {
    throw DomainError("cartesian_to_k: node i3 = x' x M vanishes");
  }

  const Vec3 ecc = eccentricity_vector(s.x, s.y, masses);
  const double e = ecc.norm() / mu;
  if (!(e >= kGuard)) throw DomainError("cartesian_to_k: circular orbit, perihelion undefined");
  const Vec3 P = ecc.normalized();
  const Vec3 Q = M.cross(P) / k.G;
  const double a = semi_major_axis(k.L, masses);
  const double eta = k.G / k.L;
  const double xi = std::atan2(s.x.dot(Q) / (a * eta), s.x.dot(P) / a + e);
  k.ell = wrap_two_pi(xi - e * std::sin(xi));

  const Vec3 node1 = kK.cross(C);
  const Vec3 node2 = C.cross(s.xprime);
  const Vec3 node3 = s.xprime.cross(M);
  k.zeta = oriented_angle(kK, kI, node1);
  k.g = oriented_angle(C, node1, node2);
  k.theta = oriented_angle(s.xprime, node2, node3);
  k.gbar = oriented_angle(M, node3, M.cross(P));
  return k;
}

double canonicity_residual(const KCoords& k, const MassParams& masses, double fd_step) {
  (void)k_to_cartesian(k, masses);  // degenerate base point -> DomainError
  if (!(fd_step >= kMinFdStep)) throw NumericError("canonicity_residual: step underflow");

  using Point = std::array<double, 12>;
  const Point point{k.zeta, k.g, k.theta, k.gbar, k.r, k.ell,
                    k.Z,    k.C, k.Theta, k.G,    k.R, k.L};
  const std::function<CartesianState(const Point&)> map = [&](const Point& q) {
    KCoords kk{q[6], q[7], q[8], q[9], q[10], q[11], q[0], q[1], q[2], q[3], q[4], q[5]};
    return k_to_cartesian(kk, masses);
  };
  const Eigen::Matrix<double, 12, 12> jac = fd_jacobian<12>(map, point, fd_step);
  const auto omega = standard_symplectic<12>();
  return (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
}

double canonicity_residual_planar(const PlanarKCoords& k, PlanarSense sense,
                                  const MassParams& masses, double fd_step) {
  (void)k_to_cartesian_planar(k, sense, masses);
  if (!(fd_step >= kMinFdStep)) throw NumericError("canonicity_residual_planar: step underflow");

  using Point = std::array<double, 8>;
  const Point point{k.g, k.gbar, k.r, k.ell, k.C, k.G, k.R, k.L};
  const std::function<CartesianState(const Point&)> map = [&](const Point& q) {
    PlanarKCoords kk = k;
    kk.g = q[0];
    kk.gbar = q[1];
    kk.r = q[2];
    kk.ell = q[3];
    kk.C = q[4];
    kk.G = q[5];
    kk.R = q[6];
    kk.L = q[7];
    return k_to_cartesian_planar(kk, sense, masses);
  };
  const Eigen::Matrix<double, 12, 8> jac = fd_jacobian<8>(map, point, fd_step);
  return (jac.transpose() * standard_symplectic<12>() * jac - standard_symplectic<8>())
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace euler2c
