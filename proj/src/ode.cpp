#include "saddleflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace saddleflow {

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

OdeResult integrate_dopri5(const OdeRhs& rhs, double t0, Vec y0, double t_end,
                           const OdeOpts& opts, const OdeObserver& observer) {
  const int n = static_cast<int>(y0.size());
  OdeResult res;
  res.t = t0;
  res.y = std::move(y0);

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
  rhs(res.t, res.y, k1);

  double h = opts.h_init;
  if (h <= 0.0) {
    double scale = (1.0 + res.y.norm()) / (1.0 + k1.norm());
    h = std::min(0.01 * scale, t_end - t0);
  }
  h = std::max(h, opts.h_min);

  while (res.t < t_end) {
    if (res.accepted + res.rejected > opts.max_steps)
      throw StepFailure("integrate_dopri5: step budget exhausted at t=" + std::to_string(res.t));
    bool last = false;
    if (res.t + h >= t_end) {
      h = t_end - res.t;
      last = true;
    }

    ytmp = res.y + h * (a21 * k1);
    rhs(res.t + c2 * h, ytmp, k2);
    ytmp = res.y + h * (a31 * k1 + a32 * k2);
    rhs(res.t + c3 * h, ytmp, k3);
    ytmp = res.y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(res.t + c4 * h, ytmp, k4);
    ytmp = res.y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(res.t + c5 * h, ytmp, k5);
    ytmp = res.y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(res.t + h, ytmp, k6);
    ynew = res.y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(res.t + h, ynew, k7);  // FSAL
    yerr = ynew - (res.y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = opts.atol + opts.rtol * std::max(std::abs(res.y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(yerr[i]) / sc);
    }

    if (err <= 1.0) {
      res.t = last ? t_end : res.t + h;
      res.y.swap(ynew);
      k1.swap(k7);
      ++res.accepted;
      if (observer && !observer(res.t, res.y)) {
        res.stopped_by_observer = true;
        return res;
      }
    } else {
      ++res.rejected;
    }

    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < opts.h_min)
      throw StepFailure("integrate_dopri5: step size below h_min at t=" + std::to_string(res.t));
  }
  return res;
}

}  // namespace saddleflow
