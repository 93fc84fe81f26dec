#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "affsphere/errors.hpp"

namespace affsphere::numerics {

template <std::size_t N>
using State = std::array<double, N>;

/// Hairer's continuous extension of one accepted Dormand-Prince step.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State<N> rc1{}, rc2{}, rc3{}, rc4{}, rc5{};

  double t1() const { return t0 + h; }

  State<N> operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = rc1[i] + th * (rc2[i] + th1 * (rc3[i] + th * (rc4[i] + th1 * rc5[i])));
    return y;
  }
};

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;   // 0 picks a starting step automatically
  double h_max = 0.0;    // 0 means |t_end - t0|
  int max_steps = 500000;
};

enum class StepAction { Continue, Stop };

/// Adaptive Dormand-Prince 5(4) with dense output. After each accepted step the
/// observer sees the dense segment and may edit the end state (projection) or
/// stop the integration. Integrates in either direction.
template <std::size_t N>
class Dopri5 {
 public:
  using Rhs = std::function<void(double, const State<N>&, State<N>&)>;
  using Observer = std::function<StepAction(const DenseStep<N>&, State<N>&)>;

  struct Result {
    double t = 0.0;
    State<N> y{};
    int steps = 0;
    int rejected = 0;
    bool stopped = false;
  };

  Dopri5(Rhs rhs, OdeOptions opts = {}) : rhs_(std::move(rhs)), opts_(opts) {}

  Result integrate(double t0, const State<N>& y0, double t_end, const Observer& observe = {}) const {
    Result res;
    res.t = t0;
    res.y = y0;
    if (t_end == t0) return res;
    const double dir = t_end > t0 ? 1.0 : -1.0;
    const double span = std::abs(t_end - t0);
    const double h_max = opts_.h_max > 0 ? opts_.h_max : span;

    State<N> k1, k2, k3, k4, k5, k6, k7, ytmp, y1;
    double t = t0;
    State<N> y = y0;
    rhs_(t, y, k1);
    double h = opts_.h_init > 0 ? opts_.h_init : initial_step(t, y, k1, dir, h_max);
    h = std::min(h, h_max);
    double err_old = 1e-4;

    while (dir * (t_end - t) > 0) {
      if (res.steps + res.rejected >= opts_.max_steps)
        fail(ErrorKind::Convergence, "dopri5: step budget exhausted");
      if (h < 1e-15 * std::max(1.0, std::abs(t)))
        fail(ErrorKind::Convergence, "dopri5: step size underflow");
      bool last = false;
      if (h >= dir * (t_end - t)) {
        h = dir * (t_end - t);
        last = true;
      }
      const double hs = dir * h;
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
      rhs_(t + c2 * hs, ytmp, k2);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      rhs_(t + c3 * hs, ytmp, k3);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs_(t + c4 * hs, ytmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs_(t + c5 * hs, ytmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs_(t + hs, ytmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      rhs_(t + hs, y1, k7);

      double err = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
        finite = finite && std::isfinite(y1[i]);
      }
      err = finite ? std::sqrt(err / N) : 1e10;

      if (err <= 1.0) {
        DenseStep<N> seg;
        seg.t0 = t;
        seg.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
          const double ydiff = y1[i] - y[i];
          const double bspl = hs * k1[i] - ydiff;
          seg.rc1[i] = y[i];
          seg.rc2[i] = ydiff;
          seg.rc3[i] = bspl;
          seg.rc4[i] = ydiff - hs * k7[i] - bspl;
          seg.rc5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        ++res.steps;
        t = last ? t_end : t + hs;
        StepAction act = StepAction::Continue;
        State<N> y_edit = y1;
        if (observe) act = observe(seg, y_edit);
        y = y_edit;
        if (y_edit != y1) rhs_(t, y, k1);
        else k1 = k7;
        res.t = t;
        res.y = y;
        if (act == StepAction::Stop) {
          res.stopped = true;
          return res;
        }
        const double fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(err_old, 0.04) / std::pow(std::max(err, 1e-10), 0.17)));
        err_old = std::max(err, 1e-4);
        h = std::min(h * fac, h_max);
      } else {
        ++res.rejected;
        h *= std::max(0.1, 0.9 / std::pow(err, 0.2));
      }
    }
    return res;
  }

 private:
  double initial_step(double t, const State<N>& y, const State<N>& f0, double dir, double h_max) const {
    double d0 = 0, d1n = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, h_max);
    State<N> y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * f0[i];
    rhs_(t + dir * h0, y1, f1);
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::abs(y[i]);
      d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100 * h0, h1, h_max});
  }

  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  static constexpr double a21 = 0.2;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs rhs_;
  OdeOptions opts_;
};

}  // namespace affsphere::numerics
