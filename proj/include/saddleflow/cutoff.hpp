#pragma once

#include "saddleflow/functional.hpp"
#include "saddleflow/types.hpp"

namespace saddleflow {

// C-infinity descending step built from e^{-1/t}: 1 for t <= 0, 0 for
// t >= 1. smooth_step_derivs also fills the first two derivatives.
double smooth_step(double t);
void smooth_step_derivs(double t, double& s, double& s1, double& s2);

// Cutoff l freezing the flow near K = closed X_k ball of radius r_k union
// the X_k sphere of radius R_k: l = 1 on K^mu, l = 0 outside K^{2mu},
// realized as sigma((d(x) - mu)/mu) with the closed-form distance to K.
// Modes always_zero / always_one are test diagnostics (free flow / frozen).
struct Cutoff {
  enum class Mode { normal, always_zero, always_one };

  Mode mode = Mode::normal;
  int k = 1;
  double r_k = 0.0;
  double R_k = 0.0;
  double mu = 0.0;

  static Cutoff from_geometry(const GeometryReport& geo);
  static Cutoff disabled();  // l == 0 everywhere
  static Cutoff frozen();    // l == 1 everywhere

  double distance(const Vec& x) const;  // dist(x, K)
  double value(const Vec& x) const;     // l(x)
  Vec grad(const Vec& x) const;         // zero outside the active band
  Mat hess(const Vec& x) const;
};

}  // namespace saddleflow
