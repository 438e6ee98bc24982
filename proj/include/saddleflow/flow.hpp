#pragma once

#include <vector>

#include "saddleflow/cutoff.hpp"
#include "saddleflow/ode.hpp"
#include "saddleflow/types.hpp"

namespace saddleflow {

// Cutoff-modified descending field g(x) = -(1 - l(x)) J'(x) and its first
// and second derivatives, assembled from the functional and the cutoff.
struct FlowSystem {
  const Functional* J = nullptr;
  const Cutoff* cut = nullptr;

  Vec field(const Vec& x) const;
  // g'(x) = grad(x) * grad_l(x)^T - (1 - l) H(x)
  Mat field_jacobian(const Vec& x) const;
  // Matrix b -> g''(x)[a, b].
  Mat field_second_bilinear(const Vec& x, const Vec& a) const;
};

struct FlowOpts {
  double rtol = 1e-8;
  double h_min = 1e-12;
  double ps_tol = 0.0;  // > 0: request early exit once ||J'|| < ps_tol
  int store_every = 1;
};

struct TrajectoryState {
  double t = 0.0;
  Vec x;
  double energy = 0.0;
  double grad_norm = 0.0;   // ||J'(x)||_X
  double field_norm = 0.0;  // ||g(x)||_X = (1 - l) ||J'||
  double cutoff = 0.0;      // l(x)
  double jac_norm = 0.0;    // power-iteration estimate of ||g'(x)||
  Mat sensitivity;          // n x d when requested, else 0 x 0
};

struct TrajectoryRecord {
  std::vector<TrajectoryState> states;
  double C_traj = 0.0;  // max of jac_norm over stored states
  bool early_exit = false;

  const TrajectoryState& front() const { return states.front(); }
  const TrajectoryState& back() const { return states.back(); }
};

// Adaptive integration of the flow; states stored at every store_every-th
// accepted step plus the endpoint.
TrajectoryRecord integrate_flow(const Functional& J, const Cutoff& cut, const Vec& u0,
                                double T, const FlowOpts& opts = {});

// Co-integrates Psi' = g'(tau) Psi with Psi(0) = directions (n x d columns,
// usually the X_k coordinate axes).
TrajectoryRecord variational_integrate(const Functional& J, const Cutoff& cut, const Vec& u0,
                                       double T, const Mat& directions,
                                       const FlowOpts& opts = {});

struct SecondVariationState {
  double t = 0.0;
  Vec x;
  Mat Psi;  // full n x n sensitivity
  Mat Wv;   // n x n: second derivative of the flow applied to v
};

// Second variational equation along the flow for a fixed direction v.
std::vector<SecondVariationState> second_variational(const Functional& J, const Cutoff& cut,
                                                     const Vec& u0, double T, const Vec& v,
                                                     const FlowOpts& opts = {});

// Runtime certificates: speed bounds from the Gronwall estimate, smallest
// singular value of the sensitivity block against e^{-C t}, and non-arrival
// in finite time. Failures indicate integrator tolerances, not math.
struct CertificateReport {
  bool speed_ok = false;
  bool injectivity_ok = true;       // vacuous without sensitivities
  bool injectivity_vacuous = true;
  bool nonarrival_ok = true;
  bool nonarrival_vacuous = false;
  double C_traj = 0.0;
  double worst_speed_rel = 0.0;     // largest relative bound violation
  double worst_sv_margin = 0.0;     // min over states of sigma_min - bound
  int witness_state = -1;
};

CertificateReport certificates(const TrajectoryRecord& rec, double tol = 1e-6);

}  // namespace saddleflow
