#pragma once

// Explicit Runge-Kutta 8(5,3) of Dormand and Prince with the step-size control
// of Hairer's DOP853. No dense output: intermediate values are obtained by
// re-stepping from a stored step start.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "euler2c/errors.hpp"

namespace euler2c {

namespace dop853_coef {
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;
}  // namespace dop853_coef

struct Dop853Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  ///< 0 picks a starting step automatically
  long max_steps = 100000000;
  /// Smallest step (relative to the span of the run) before giving up.
  double min_step_fraction = 1e-14;
};

enum class Dop853Status { kCompleted, kStopped, kGuardTrip, kStepUnderflow, kMaxSteps };

struct Dop853Result {
  Dop853Status status = Dop853Status::kCompleted;
  double t = 0.0;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  std::string reason;
};

template <std::size_t N>
class Dop853 {
 public:
  using State = std::array<double, N>;
  /// dy/dt = f(t, y). May throw DomainError when y leaves the domain; the
  /// integrator then shrinks the step.
  using Rhs = std::function<void(double, const State&, State&)>;

  Dop853(Rhs f, Dop853Options opt) : f_(std::move(f)), opt_(opt) {
    if (!(opt_.rel_tol > 0.0) || !(opt_.abs_tol > 0.0)) {
      throw DomainError("integrator tolerances must be positive");
    }
  }

  /// Marks component i as an angle: after every accepted step it is reduced to
  /// [0, 2π). Only valid when f is 2π-periodic in that component.
  void set_periodic(std::size_t i) { periodic_[i] = true; }

  /// One step of size h from (t, y) with f(t, y) = dy. Writes the 8th order
  /// solution to y1 and returns the scaled error norm (accept if <= 1).
  double step(double t, const State& y, const State& dy, double h, State& y1) {
    using namespace dop853_coef;
    const State& k1 = dy;
    State yt;
    auto stage = [&](auto&& combine, double c, State& out) {
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * combine(i);
      f_(t + c * h, yt, out);
      ++evaluations_;
    };
    stage([&](std::size_t i) { return a21 * k1[i]; }, c2, k2_);
    stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2_[i]; }, c3, k3_);
    stage([&](std::size_t i) { return a41 * k1[i] + a43 * k3_[i]; }, c4, k4_);
    stage([&](std::size_t i) { return a51 * k1[i] + a53 * k3_[i] + a54 * k4_[i]; }, c5, k5_);
    stage([&](std::size_t i) { return a61 * k1[i] + a64 * k4_[i] + a65 * k5_[i]; }, c6, k6_);
    stage([&](std::size_t i) { return a71 * k1[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]; },
          c7, k7_);
    stage(
        [&](std::size_t i) {
          return a81 * k1[i] + a84 * k4_[i] + a85 * k5_[i] + a86 * k6_[i] + a87 * k7_[i];
        },
        c8, k8_);
    stage(
        [&](std::size_t i) {
          return a91 * k1[i] + a94 * k4_[i] + a95 * k5_[i] + a96 * k6_[i] + a97 * k7_[i] +
                 a98 * k8_[i];
        },
        c9, k9_);
    stage(
        [&](std::size_t i) {
          return a101 * k1[i] + a104 * k4_[i] + a105 * k5_[i] + a106 * k6_[i] + a107 * k7_[i] +
                 a108 * k8_[i] + a109 * k9_[i];
        },
        c10, k10_);
    stage(
        [&](std::size_t i) {
          return a111 * k1[i] + a114 * k4_[i] + a115 * k5_[i] + a116 * k6_[i] + a117 * k7_[i] +
                 a118 * k8_[i] + a119 * k9_[i] + a1110 * k10_[i];
        },
        c11, k11_);
    stage(
        [&](std::size_t i) {
          return a121 * k1[i] + a124 * k4_[i] + a125 * k5_[i] + a126 * k6_[i] + a127 * k7_[i] +
                 a128 * k8_[i] + a129 * k9_[i] + a1210 * k10_[i] + a1211 * k11_[i];
        },
        1.0, k12_);

    double err = 0.0;
    double err2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double inc = b1 * k1[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] + b9 * k9_[i] +
                         b10 * k10_[i] + b11 * k11_[i] + b12 * k12_[i];
      y1[i] = y[i] + h * inc;
      const double sk = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      const double e3 = inc - bhh1 * k1[i] - bhh2 * k9_[i] - bhh3 * k12_[i];
      const double e5 = er1 * k1[i] + er6 * k6_[i] + er7 * k7_[i] + er8 * k8_[i] + er9 * k9_[i] +
                        er10 * k10_[i] + er11 * k11_[i] + er12 * k12_[i];
      err2 += (e3 / sk) * (e3 / sk);
      err += (e5 / sk) * (e5 / sk);
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err / std::sqrt(static_cast<double>(N) * deno);
  }

  /// Advances (t, y) by h without error control; used to evaluate the
  /// solution inside a step that has already been accepted.
  State advance(double t, const State& y, const State& dy, double h) {
    State y1;
    step(t, y, dy, h, y1);
    return y1;
  }

  /// Integrates from t0 to t_end. After every accepted step the observer is
  /// called as obs(t_prev, y_prev, dy_prev, t, y) and may return false to stop.
  /// If `next_stop` is given, next_stop(t) names the next time after t that a
  /// step must land on exactly (output sampling).
  template <class Observer>
  Dop853Result integrate(double t0, State& y, double t_end, Observer&& obs,
                         const std::function<double(double)>& next_stop = nullptr) {
    using namespace dop853_coef;
    Dop853Result res;
    evaluations_ = 0;
    const double span = t_end - t0;
    if (span == 0.0) {
      res.t = t0;
      return res;
    }
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const double h_min = opt_.min_step_fraction * std::abs(span);
    const double h_max = std::min(opt_.max_step, std::abs(span));

    double t = t0;
    State dy;
    f_(t, y, dy);
    ++evaluations_;
    double h = opt_.initial_step > 0.0 ? std::min(opt_.initial_step, h_max)
                                       : initial_step(t, y, dy, h_max);
    h *= dir;

    constexpr double kBeta = 0.04;
    constexpr double kExpo1 = 1.0 / 8.0 - kBeta * 0.2;
    constexpr double kFacc1 = 1.0 / 0.333;
    constexpr double kFacc2 = 1.0 / 6.0;
    constexpr double kSafe = 0.9;
    double facold = 1e-4;
    bool last_rejected = false;
    State y1;
    State dy1;

    while (true) {
      if (res.accepted + res.rejected >= opt_.max_steps) {
        res.status = Dop853Status::kMaxSteps;
        res.reason = "step budget exhausted";
        break;
      }
      double target = t_end;
      if (next_stop) {
        // Stops within a few ulps of t were already reached.
        const double s = next_stop(t);
        const double ulps = 64.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(t), std::abs(t_end));
        if (dir * (s - t) > ulps && dir * (s - t_end) < 0.0) target = s;
      }
      const double h_natural = h;
      bool clipped = false;
      if (dir * (t + h - target) >= 0.0) {
        h = target - t;
        clipped = true;
      }
      if (std::abs(h) < h_min && !clipped) {
        res.status = Dop853Status::kStepUnderflow;
        res.reason = "step size fell below " + std::to_string(h_min);
        break;
      }

      double err;
      try {
        err = step(t, y, dy, h, y1);
        if (std::isfinite(err)) {
          f_(t + h, y1, dy1);
          ++evaluations_;
        }
      } catch (const DomainError& ex) {
        // Guard band hit inside the step: halve and retry.
        ++res.rejected;
        h *= 0.5;
        last_rejected = true;
        if (std::abs(h) < h_min) {
          res.status = Dop853Status::kGuardTrip;
          res.reason = ex.what();
          break;
        }
        continue;
      }
      if (!std::isfinite(err)) {
        ++res.rejected;
        h *= 0.5;
        last_rejected = true;
        continue;
      }

      const double fac11 = std::pow(err, kExpo1);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::max(kFacc2, std::min(kFacc1, fac / kSafe));
        double h_new = h / fac;
        facold = std::max(err, 1e-4);
        ++res.accepted;
        const double t_prev = t;
        const State y_prev = y;
        const State dy_prev = dy;
        t = clipped ? target : t + h;
        y = y1;
        for (std::size_t i = 0; i < N; ++i) {
          if (periodic_[i]) {
            y[i] = std::fmod(y[i], kTwoPiDop);
            if (y[i] < 0.0) y[i] += kTwoPiDop;
          }
        }
        dy = dy1;
        if (std::abs(h_new) > h_max) h_new = dir * h_max;
        if (last_rejected && std::abs(h_new) > std::abs(h)) h_new = h;
        last_rejected = false;
        if (!obs(t_prev, y_prev, dy_prev, t, y)) {
          res.status = Dop853Status::kStopped;
          break;
        }
        if (clipped && target == t_end) break;
        // A clipped step says nothing about the natural step length.
        h = clipped ? std::max(std::abs(h_new), std::abs(h_natural)) * dir : h_new;
      } else {
        h = h / std::min(kFacc1, fac11 / kSafe);
        ++res.rejected;
        last_rejected = true;
      }
    }
    res.t = t;
    res.evaluations = evaluations_;
    return res;
  }

 private:
  double initial_step(double t, const State& y, const State& dy, double h_max) {
    double dnf = 0.0;
    double dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt_.abs_tol + opt_.rel_tol * std::abs(y[i]);
      dnf += (dy[i] / sk) * (dy[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_max);
    State y1;
    State dy1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h * dy[i];
    try {
      f_(t + h, y1, dy1);
    } catch (const DomainError&) {
      return h * 1e-3;
    }
    ++evaluations_;
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt_.abs_tol + opt_.rel_tol * std::abs(y[i]);
      der2 += ((dy1[i] - dy[i]) / sk) * ((dy1[i] - dy[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * std::abs(h), h1, h_max});
  }

  static constexpr double kTwoPiDop = 6.283185307179586476925286766559;

  Rhs f_;
  Dop853Options opt_;
  std::array<bool, N> periodic_{};
  long evaluations_ = 0;
  State k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{}, k8_{}, k9_{}, k10_{}, k11_{}, k12_{};
};

}  // namespace euler2c
