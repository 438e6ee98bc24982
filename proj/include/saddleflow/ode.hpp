#pragma once

#include <functional>

#include "saddleflow/types.hpp"

namespace saddleflow {

struct OdeOpts {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h_min = 1e-12;
  double h_init = 0.0;  // 0: pick from the initial slope
  long max_steps = 4000000;
};

struct OdeResult {
  double t = 0.0;
  Vec y;
  long accepted = 0;
  long rejected = 0;
  bool stopped_by_observer = false;
};

using OdeRhs = std::function<void(double, const Vec&, Vec&)>;
// Called after every accepted step; return false to stop early.
using OdeObserver = std::function<bool(double, const Vec&)>;

// Adaptive embedded Dormand-Prince 4(5) pair with FSAL. Throws StepFailure
// when the controller drives the step below h_min.
OdeResult integrate_dopri5(const OdeRhs& rhs, double t0, Vec y0, double t_end,
                           const OdeOpts& opts = {}, const OdeObserver& observer = nullptr);

}  // namespace saddleflow
