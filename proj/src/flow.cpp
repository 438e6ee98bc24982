#include "saddleflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace saddleflow {

namespace {

// Spectral norm by power iteration on A^T A, deterministic start.
double operator_norm(const Mat& A) {
  const int n = static_cast<int>(A.cols());
  Vec v = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec w = A.transpose() * (A * v);
    double nn = w.norm();
    if (nn == 0.0) return 0.0;
    v = w / nn;
    double next = (A * v).norm();
    if (std::abs(next - est) <= 1e-12 * std::max(1.0, next) && it > 8) return next;
    est = next;
  }
  return est;
}

TrajectoryState make_state(const Functional& J, const Cutoff& cut, double t, const Vec& x,
                           const Mat* sensitivity) {
  TrajectoryState st;
  st.t = t;
  st.x = x;
  st.energy = J.value(x);
  Vec g = J.gradient(x);
  st.grad_norm = g.norm();
  st.cutoff = cut.value(x);
  st.field_norm = (1.0 - st.cutoff) * st.grad_norm;
  FlowSystem sys{&J, &cut};
  st.jac_norm = operator_norm(sys.field_jacobian(x));
  if (sensitivity) st.sensitivity = *sensitivity;
  return st;
}

}  // namespace

Vec FlowSystem::field(const Vec& x) const {
  double l = cut->value(x);
  if (l >= 1.0) return Vec::Zero(x.size());
  return -(1.0 - l) * J->gradient(x);
}

Mat FlowSystem::field_jacobian(const Vec& x) const {
  double l = cut->value(x);
  Vec gl = cut->grad(x);
  Mat out = Mat::Zero(x.size(), x.size());
  if (gl.squaredNorm() > 0.0) out += J->gradient(x) * gl.transpose();
  if (l < 1.0) out -= (1.0 - l) * J->hessian(x);
  return out;
}

Mat FlowSystem::field_second_bilinear(const Vec& x, const Vec& a) const {
  // g''(x)[a, b] = <hess_l a, b> J' + <grad_l, b> H a + <grad_l, a> H b
  //               - (1 - l) J'''(x)[a, b].
  const int n = static_cast<int>(x.size());
  double l = cut->value(x);
  Vec gl = cut->grad(x);
  Mat hl = cut->hess(x);
  Mat out = Mat::Zero(n, n);
  bool band = gl.squaredNorm() > 0.0 || hl.squaredNorm() > 0.0;
  if (band) {
    Vec grad = J->gradient(x);
    Mat H = J->hessian(x);
    out += grad * (hl * a).transpose();
    out += (H * a) * gl.transpose();
    out += gl.dot(a) * H;
  }
  if (l < 1.0) {
    if (!J->has_third())
      throw SolverError("field_second_bilinear: needs a C3 functional");
    Mat T(n, n);
    for (int j = 0; j < n; ++j) T.col(j) = J->third_directional(x, a, Vec::Unit(n, j));
    out -= (1.0 - l) * T;
  }
  return out;
}

TrajectoryRecord integrate_flow(const Functional& J, const Cutoff& cut, const Vec& u0,
                                double T, const FlowOpts& opts) {
  if (!(T > 0.0)) throw SolverError("integrate_flow: T must be positive");
  FlowSystem sys{&J, &cut};
  TrajectoryRecord rec;
  rec.states.push_back(make_state(J, cut, 0.0, u0, nullptr));

  OdeOpts ode;
  ode.rtol = opts.rtol;
  ode.atol = 1e-4 * opts.rtol;
  ode.h_min = opts.h_min;

  long count = 0;
  auto observer = [&](double t, const Vec& y) {
    ++count;
    bool store = (count % opts.store_every == 0);
    bool stop = false;
    if (opts.ps_tol > 0.0 && J.gradient(y).norm() < opts.ps_tol) {
      stop = true;
      store = true;
    }
    if (store) rec.states.push_back(make_state(J, cut, t, y, nullptr));
    return !stop;
  };

  OdeResult r = integrate_dopri5([&](double, const Vec& y, Vec& dy) { dy = sys.field(y); },
                                 0.0, u0, T, ode, observer);
  rec.early_exit = r.stopped_by_observer;
  if (rec.states.back().t != r.t) rec.states.push_back(make_state(J, cut, r.t, r.y, nullptr));
  for (const auto& st : rec.states) rec.C_traj = std::max(rec.C_traj, st.jac_norm);
  return rec;
}

TrajectoryRecord variational_integrate(const Functional& J, const Cutoff& cut, const Vec& u0,
                                       double T, const Mat& directions, const FlowOpts& opts) {
  const int n = J.dim();
  const int d = static_cast<int>(directions.cols());
  if (directions.rows() != n || d < 1)
    throw DimensionMismatch("variational_integrate: bad direction matrix");
  if (!(T > 0.0)) throw SolverError("variational_integrate: T must be positive");

  FlowSystem sys{&J, &cut};
  Vec y0(n + n * d);
  y0.head(n) = u0;
  Eigen::Map<Mat>(y0.data() + n, n, d) = directions;

  auto rhs = [&](double, const Vec& y, Vec& dy) {
    dy.resize(y.size());
    Vec x = y.head(n);
    Eigen::Map<const Mat> Psi(y.data() + n, n, d);
    dy.head(n) = sys.field(x);
    Eigen::Map<Mat>(dy.data() + n, n, d) = sys.field_jacobian(x) * Psi;
  };

  TrajectoryRecord rec;
  {
    Mat Psi0 = directions;
    rec.states.push_back(make_state(J, cut, 0.0, u0, &Psi0));
  }

  OdeOpts ode;
  ode.rtol = opts.rtol;
  ode.atol = 1e-4 * opts.rtol;
  ode.h_min = opts.h_min;

  long count = 0;
  auto observer = [&](double t, const Vec& y) {
    ++count;
    Vec x = y.head(n);
    bool store = (count % opts.store_every == 0);
    bool stop = false;
    if (opts.ps_tol > 0.0 && J.gradient(x).norm() < opts.ps_tol) {
      stop = true;
      store = true;
    }
    if (store) {
      Mat Psi = Eigen::Map<const Mat>(y.data() + n, n, d);
      rec.states.push_back(make_state(J, cut, t, x, &Psi));
    }
    return !stop;
  };

  OdeResult r = integrate_dopri5(rhs, 0.0, y0, T, ode, observer);
  rec.early_exit = r.stopped_by_observer;
  if (rec.states.back().t != r.t) {
    Vec x = r.y.head(n);
    Mat Psi = Eigen::Map<const Mat>(r.y.data() + n, n, d);
    rec.states.push_back(make_state(J, cut, r.t, x, &Psi));
  }
  for (const auto& st : rec.states) rec.C_traj = std::max(rec.C_traj, st.jac_norm);
  return rec;
}

std::vector<SecondVariationState> second_variational(const Functional& J, const Cutoff& cut,
                                                     const Vec& u0, double T, const Vec& v,
                                                     const FlowOpts& opts) {
  const int n = J.dim();
  if (!J.has_third())
    throw SolverError("second_variational: the nonlinearity needs two derivatives");
  if (v.size() != n) throw DimensionMismatch("second_variational: bad direction");

  FlowSystem sys{&J, &cut};
  Vec y0 = Vec::Zero(n + 2 * n * n);
  y0.head(n) = u0;
  Eigen::Map<Mat>(y0.data() + n, n, n) = Mat::Identity(n, n);

  auto rhs = [&](double, const Vec& y, Vec& dy) {
    dy.resize(y.size());
    Vec x = y.head(n);
    Eigen::Map<const Mat> Psi(y.data() + n, n, n);
    Eigen::Map<const Mat> W(y.data() + n + n * n, n, n);
    Mat Jac = sys.field_jacobian(x);
    Vec a = Psi * v;
    Mat Bil = sys.field_second_bilinear(x, a);
    dy.head(n) = sys.field(x);
    Eigen::Map<Mat>(dy.data() + n, n, n) = Jac * Psi;
    Eigen::Map<Mat>(dy.data() + n + n * n, n, n) = Bil * Psi + Jac * W;
  };

  std::vector<SecondVariationState> out;
  out.push_back({0.0, u0, Mat::Identity(n, n), Mat::Zero(n, n)});

  OdeOpts ode;
  ode.rtol = opts.rtol;
  ode.atol = 1e-4 * opts.rtol;
  ode.h_min = opts.h_min;

  long count = 0;
  auto observer = [&](double t, const Vec& y) {
    if (++count % opts.store_every == 0)
      out.push_back({t, y.head(n), Eigen::Map<const Mat>(y.data() + n, n, n),
                     Eigen::Map<const Mat>(y.data() + n + n * n, n, n)});
    return true;
  };

  OdeResult r = integrate_dopri5(rhs, 0.0, y0, T, ode, observer);
  if (out.back().t != r.t)
    out.push_back({r.t, r.y.head(n), Eigen::Map<const Mat>(r.y.data() + n, n, n),
                   Eigen::Map<const Mat>(r.y.data() + n + n * n, n, n)});
  return out;
}

CertificateReport certificates(const TrajectoryRecord& rec, double tol) {
  CertificateReport rep;
  rep.C_traj = rec.C_traj;
  if (rec.states.empty()) throw SolverError("certificates: empty trajectory");
  const double g0 = rec.states.front().field_norm;
  const double tiny = 1e-13;

  rep.speed_ok = true;
  rep.nonarrival_vacuous = g0 <= tiny;
  for (std::size_t i = 0; i < rec.states.size(); ++i) {
    const auto& st = rec.states[i];
    double lo = g0 * std::exp(-rec.C_traj * st.t);
    double hi = g0 * std::exp(rec.C_traj * st.t);
    double viol = 0.0;
    if (st.field_norm < lo) viol = (lo - st.field_norm) / std::max(lo, tiny);
    if (st.field_norm > hi) viol = std::max(viol, (st.field_norm - hi) / std::max(hi, tiny));
    if (viol > rep.worst_speed_rel) {
      rep.worst_speed_rel = viol;
      rep.witness_state = static_cast<int>(i);
    }
    if (viol > tol) rep.speed_ok = false;

    if (!rep.nonarrival_vacuous && st.field_norm <= 0.0) rep.nonarrival_ok = false;

    if (st.sensitivity.size() > 0) {
      Eigen::JacobiSVD<Mat> svd(st.sensitivity);
      double smin = svd.singularValues().minCoeff();
      double bound = std::exp(-rec.C_traj * st.t);
      double margin = smin - bound;
      if (rep.injectivity_vacuous || margin < rep.worst_sv_margin) rep.worst_sv_margin = margin;
      rep.injectivity_vacuous = false;
      if (smin < bound - tol) {
        rep.injectivity_ok = false;
        rep.witness_state = static_cast<int>(i);
      }
    }
  }
  return rep;
}

}  // namespace saddleflow
