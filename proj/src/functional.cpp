#include "saddleflow/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "saddleflow/parallel.hpp"

namespace saddleflow {

SourceFns source_fns(const Nonlinearity& nl) {
  SourceFns s;
  s.f = nl.f;
  s.ft = nl.ft;
  s.ftt = nl.ftt;
  s.F = nl.F;
  return s;
}

SourceFns source_fns(const SmoothedNonlinearity& sm) {
  const SmoothedNonlinearity* p = &sm;
  SourceFns s;
  s.f = [p](const Point& x, double t) { return p->deriv(x, t, 0); };
  s.ft = [p](const Point& x, double t) { return p->deriv(x, t, 1); };
  s.ftt = [p](const Point& x, double t) { return p->deriv(x, t, 2); };
  s.F = [p](const Point& x, double t) { return p->F_m(x, t); };
  return s;
}

EnergyModel::EnergyModel(const Domain* dom, const EigenBasis* basis, SourceFns nl)
    : dom_(dom), basis_(basis), nl_(std::move(nl)) {
  if (!dom_ || !basis_) throw SolverError("EnergyModel: null domain or basis");
  if (basis_->samples.rows() != dom_->num_points())
    throw DimensionMismatch("EnergyModel: basis grid does not match domain grid");
}

double EnergyModel::value(const Vec& u) const {
  if (u.size() != basis_->n) throw DimensionMismatch("EnergyModel::value: bad dimension");
  Vec pts = synth(*basis_, u);
  double bulk = 0.0;
  for (int q = 0; q < dom_->num_points(); ++q)
    bulk += dom_->w[q] * nl_.F(dom_->pts[q], pts[q]);
  return 0.5 * u.squaredNorm() - bulk;
}

Vec EnergyModel::gradient(const Vec& u) const {
  if (u.size() != basis_->n) throw DimensionMismatch("EnergyModel::gradient: bad dimension");
  Vec pts = synth(*basis_, u);
  Vec fw(dom_->num_points());
  for (int q = 0; q < dom_->num_points(); ++q)
    fw[q] = dom_->w[q] * nl_.f(dom_->pts[q], pts[q]);
  return u - basis_->synth_mat.transpose() * fw;
}

Mat EnergyModel::hessian(const Vec& u) const {
  if (u.size() != basis_->n) throw DimensionMismatch("EnergyModel::hessian: bad dimension");
  Vec pts = synth(*basis_, u);
  Vec dw(dom_->num_points());
  for (int q = 0; q < dom_->num_points(); ++q)
    dw[q] = dom_->w[q] * nl_.ft(dom_->pts[q], pts[q]);
  Mat H = Mat::Identity(basis_->n, basis_->n) -
          basis_->synth_mat.transpose() * dw.asDiagonal() * basis_->synth_mat;
  return 0.5 * (H + H.transpose());
}

Vec EnergyModel::third_directional(const Vec& u, const Vec& a, const Vec& b) const {
  if (!nl_.ftt) throw SolverError("EnergyModel: second derivative of the source unavailable");
  Vec pts = synth(*basis_, u);
  Vec ap = synth(*basis_, a);
  Vec bp = synth(*basis_, b);
  Vec dw(dom_->num_points());
  for (int q = 0; q < dom_->num_points(); ++q)
    dw[q] = -dom_->w[q] * nl_.ftt(dom_->pts[q], pts[q]) * ap[q] * bp[q];
  return basis_->synth_mat.transpose() * dw;
}

Vec gaussian_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  };
  Vec v(n);
  for (int i = 0; i < n; i += 2) {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < n) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  return v;
}

namespace {

// Unit vector supported on the first `sub` coordinates of an n-vector.
Vec random_direction(int n, int sub, std::uint64_t seed) {
  Vec g = gaussian_vector(sub, seed);
  double nn = g.norm();
  if (nn < 1e-300) g[0] = nn = 1.0;
  Vec v = Vec::Zero(n);
  v.head(sub) = g / nn;
  return v;
}

struct ExtremeResult {
  double value = 0.0;
  Vec point;
};

// Projected gradient extremization of J over the radius-sphere of the span
// of the first `sub` coordinates. sign = -1 minimizes, +1 maximizes.
ExtremeResult sphere_extremize(const Functional& J, int sub, double radius, int sign,
                               int starts, std::uint64_t seed, int iters) {
  const int n = J.dim();
  std::vector<ExtremeResult> results(starts);
  parallel_for(starts, [&](std::size_t s) {
    Vec x = radius * random_direction(n, sub, seed + 1000 * s + 17);
    double fx = J.value(x);
    double step = 0.2 * radius;
    for (int it = 0; it < iters; ++it) {
      Vec g = J.gradient(x);
      Vec gs = Vec::Zero(n);
      gs.head(sub) = g.head(sub);
      Vec xhat = x / radius;
      Vec gt = gs - gs.dot(xhat) * xhat;
      double gn = gt.norm();
      if (gn < 1e-12 * (1.0 + std::abs(fx))) break;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        Vec y = x + (sign * step) * gt;
        y = (radius / y.norm()) * y;
        double fy = J.value(y);
        if (sign * (fy - fx) > 1e-4 * step * gn * gn) {
          x = y;
          fx = fy;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      step = std::min(step * 1.8, 0.5 * radius);
    }
    results[s] = {fx, x};
  });
  ExtremeResult best = results[0];
  for (int s = 1; s < starts; ++s)
    if (sign * (results[s].value - best.value) > 0.0) best = results[s];
  return best;
}

// Ascent of J over the closed ball of the first `sub` coordinates.
ExtremeResult ball_max(const Functional& J, int sub, double radius, int starts,
                       std::uint64_t seed, int iters) {
  const int n = J.dim();
  std::vector<ExtremeResult> results(starts);
  parallel_for(starts, [&](std::size_t s) {
    double frac = (s + 1.0) / (starts + 1.0);
    Vec x = (frac * radius) * random_direction(n, sub, seed + 2000 * s + 3);
    double fx = J.value(x);
    double step = 0.2 * radius;
    for (int it = 0; it < iters; ++it) {
      Vec g = J.gradient(x);
      Vec gs = Vec::Zero(n);
      gs.head(sub) = g.head(sub);
      double gn = gs.norm();
      if (gn < 1e-12 * (1.0 + std::abs(fx))) break;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        Vec y = x + step * gs;
        double yn = y.norm();
        if (yn > radius) y *= radius / yn;
        double fy = J.value(y);
        if (fy > fx + 1e-6 * step * gn * gn) {
          x = y;
          fx = fy;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      step = std::min(step * 1.8, 0.5 * radius);
    }
    results[s] = {fx, x};
  });
  ExtremeResult best = results[0];
  for (int s = 1; s < starts; ++s)
    if (results[s].value > best.value) best = results[s];
  if (J.value(Vec::Zero(n)) > best.value) best = {J.value(Vec::Zero(n)), Vec::Zero(n)};
  return best;
}

}  // namespace

double sup_on_subspace(const Functional& J, int k, int starts, std::uint64_t seed, int iters) {
  const int n = J.dim();
  std::vector<double> vals(starts);
  parallel_for(starts, [&](std::size_t s) {
    Vec x = (0.5 + 0.2 * static_cast<double>(s % 7)) * random_direction(n, k, seed + 4000 * s + 5);
    double fx = J.value(x);
    double step = 0.25;
    for (int it = 0; it < iters; ++it) {
      Vec g = J.gradient(x);
      Vec gs = Vec::Zero(n);
      gs.head(k) = g.head(k);
      double gn = gs.norm();
      if (gn < 1e-13 * (1.0 + std::abs(fx))) break;
      bool accepted = false;
      for (int bt = 0; bt < 50; ++bt) {
        Vec y = x + step * gs;
        double fy = J.value(y);
        if (fy > fx + 1e-6 * step * gn * gn) {
          x = y;
          fx = fy;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      step = std::min(step * 2.0, 4.0);
    }
    vals[s] = fx;
  });
  double best = vals[0];
  for (double v : vals) best = std::max(best, v);
  return best;
}

GeometryReport geometry_probe(const Functional& J, int k, const GeometryOpts& opts) {
  const int n = J.dim();
  if (!(k >= 1 && k < n)) throw SolverError("geometry_probe: requires 1 <= k < n");

  // Stage 1: positivity sphere. Scan radii, keep the best sphere infimum.
  int quick_starts = std::max(4, opts.starts / 4);
  double best_inf = -std::numeric_limits<double>::infinity();
  double rho0 = 0.0;
  for (int i = 0; i < opts.rho_scan; ++i) {
    double rho = opts.rho_lo * std::pow(opts.rho_hi / opts.rho_lo, i / (opts.rho_scan - 1.0));
    double inf_est = sphere_extremize(J, n, rho, -1, quick_starts, opts.seed + 11 * i, 120).value;
    if (inf_est > best_inf) {
      best_inf = inf_est;
      rho0 = rho;
    }
  }
  if (!(best_inf > 0.0))
    throw GeometryFailure(
        "geometry_probe: no sphere with positive infimum of J (mountain-pass geometry absent)");
  double d0 = sphere_extremize(J, n, rho0, -1, opts.starts, opts.seed + 101, opts.iters).value;
  if (!(d0 > 0.0)) throw GeometryFailure("geometry_probe: refined sphere infimum not positive");

  GeometryReport rep;
  rep.k = k;
  rep.rho0 = rho0;
  rep.d0 = d0;

  // Stage 2: shrink r_k until the closed X_k ball stays below d0/2.
  double r = 0.5 * rho0;
  double sup_ball = 0.0;
  for (int it = 0;; ++it) {
    sup_ball = ball_max(J, k, r, opts.starts, opts.seed + 211, opts.iters).value;
    if (sup_ball < 0.5 * d0) break;
    r /= 1.5;
    if (it > 60) throw GeometryFailure("geometry_probe: could not find admissible r_k");
  }
  rep.r_k = r;

  // Stage 3: grow R_k until the X_k sphere drops below d0/2.
  double R = 2.0 * rho0;
  double sup_sphere = 0.0;
  for (int it = 0;; ++it) {
    sup_sphere = sphere_extremize(J, k, R, +1, opts.starts, opts.seed + 307, opts.iters).value;
    if (sup_sphere < 0.5 * d0) break;
    R *= 1.6;
    if (R > opts.R_cap_factor * rho0)
      throw GeometryFailure(
          "geometry_probe: no admissible outer radius R_k (J not superlinear on X_k)");
    (void)it;
  }
  rep.R_k = R;
  rep.sup_K = std::max(sup_ball, sup_sphere);

  // Stage 4: cutoff margin, verified on sampled K^{2mu}.
  double mu = std::min(rep.r_k, rep.R_k - rep.rho0) / 8.0;
  const int n_samples = 256;
  for (int attempt = 0;; ++attempt) {
    double sup2 = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(n_samples);
    parallel_for(n_samples, [&](std::size_t i) {
      std::uint64_t s = opts.seed + 523 + 7 * i + 100000 * attempt;
      Vec z;
      if (i % 2 == 0) {
        double frac = static_cast<double>(i) / n_samples;
        z = (frac * rep.r_k) * random_direction(n, k, s);
      } else {
        z = rep.R_k * random_direction(n, k, s);
      }
      Vec xi = random_direction(n, n, s + 13);
      double dist = 2.0 * mu * ((i % 5) + 1.0) / 5.0;
      vals[i] = J.value(z + dist * xi);
    });
    for (double v : vals) sup2 = std::max(sup2, v);
    if (sup2 < 0.5 * d0) {
      rep.sup_K2mu = sup2;
      break;
    }
    mu *= 0.5;
    if (attempt > 12)
      throw GeometryFailure("geometry_probe: could not certify a cutoff margin mu");
  }
  rep.mu = mu;

  if (!(rep.r_k < rep.rho0 && rep.rho0 < rep.R_k))
    throw GeometryFailure("geometry_probe: postcondition r_k < rho0 < R_k violated");
  return rep;
}

GrowthSplit fit_growth_split(const Nonlinearity& nl, double lambda1, double t_box, int nt) {
  GrowthSplit gs;
  gs.eps = 0.5 * lambda1;
  const Point x0{};
  // Fit on a coarse grid, validate on the fine one.
  double C = 0.0;
  int coarse = nt / 4 + 1;
  for (int i = 0; i < coarse; ++i) {
    double t = -t_box + 2.0 * t_box * i / (coarse - 1.0);
    if (t == 0.0) continue;
    double excess = std::abs(nl.f(x0, t)) - gs.eps * std::abs(t);
    if (excess > 0.0) C = std::max(C, excess / std::pow(std::abs(t), nl.p - 1.0));
  }
  gs.C_eps = 1.05 * C + 1e-12;
  gs.ok = true;
  for (int i = 0; i < nt; ++i) {
    double t = -t_box + 2.0 * t_box * i / (nt - 1.0);
    if (std::abs(nl.f(x0, t)) >
        gs.eps * std::abs(t) + gs.C_eps * std::pow(std::abs(t), nl.p - 1.0) + 1e-12)
      gs.ok = false;
  }
  return gs;
}

}  // namespace saddleflow
