#include "saddleflow/domain.hpp"

#include <algorithm>
#include <cmath>

namespace saddleflow {

namespace {

Vec trapezoid_axis(double L, int count, Vec& nodes) {
  nodes = Vec::LinSpaced(count, 0.0, L);
  Vec w = Vec::Constant(count, L / (count - 1));
  w[0] *= 0.5;
  w[count - 1] *= 0.5;
  return w;
}

}  // namespace

Domain Domain::interval(double L, int max_mode, int per_mode_factor) {
  if (L <= 0.0 || max_mode < 1) throw ConfigError("Domain::interval: bad parameters");
  Domain d;
  d.kind = Kind::interval;
  d.Lx = L;
  d.max_mode_x = max_mode;
  int count = per_mode_factor * max_mode + 1;
  Vec wx = trapezoid_axis(L, count, d.axis_x);
  d.pts.resize(count);
  d.w = wx;
  for (int i = 0; i < count; ++i) d.pts[i] = Point{d.axis_x[i], 0.0};
  return d;
}

Domain Domain::rectangle(double Lx, double Ly, int max_mode_x, int max_mode_y,
                         int per_mode_factor) {
  if (Lx <= 0.0 || Ly <= 0.0 || max_mode_x < 1 || max_mode_y < 1)
    throw ConfigError("Domain::rectangle: bad parameters");
  Domain d;
  d.kind = Kind::rectangle;
  d.Lx = Lx;
  d.Ly = Ly;
  d.max_mode_x = max_mode_x;
  d.max_mode_y = max_mode_y;
  int cx = per_mode_factor * max_mode_x + 1;
  int cy = per_mode_factor * max_mode_y + 1;
  Vec wx = trapezoid_axis(Lx, cx, d.axis_x);
  Vec wy = trapezoid_axis(Ly, cy, d.axis_y);
  d.pts.resize(static_cast<std::size_t>(cx) * cy);
  d.w = Vec::Zero(cx * cy);
  for (int j = 0; j < cy; ++j)
    for (int i = 0; i < cx; ++i) {
      int q = j * cx + i;
      d.pts[q] = Point{d.axis_x[i], d.axis_y[j]};
      d.w[q] = wx[i] * wy[j];
    }
  return d;
}

std::vector<std::array<int, 2>> smallest_modes(Domain::Kind kind, double Lx, double Ly, int n) {
  if (n < 1) throw ConfigError("smallest_modes: n must be >= 1");
  std::vector<std::array<int, 2>> modes;
  if (kind == Domain::Kind::interval) {
    for (int k = 1; k <= n; ++k) modes.push_back({k, 0});
    return modes;
  }
  struct Entry {
    double lam;
    int kx, ky;
  };
  std::vector<Entry> all;
  // n candidates per axis always cover the n smallest sums.
  for (int kx = 1; kx <= n; ++kx)
    for (int ky = 1; ky <= n; ++ky) {
      double lam = std::pow(kx * M_PI / Lx, 2) + std::pow(ky * M_PI / Ly, 2);
      all.push_back({lam, kx, ky});
    }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.lam != b.lam) return a.lam < b.lam;
    if (a.kx != b.kx) return a.kx < b.kx;
    return a.ky < b.ky;
  });
  for (int i = 0; i < n; ++i) modes.push_back({all[i].kx, all[i].ky});
  return modes;
}

EigenBasis eigenpairs(const Domain& dom, int n) {
  auto modes = smallest_modes(dom.kind, dom.Lx, dom.Ly, n);
  int need_x = 0, need_y = 0;
  for (auto& m : modes) {
    need_x = std::max(need_x, m[0]);
    need_y = std::max(need_y, m[1]);
  }
  if (need_x > dom.max_mode_x || (dom.kind == Domain::Kind::rectangle && need_y > dom.max_mode_y))
    throw DimensionMismatch("eigenpairs: domain grid does not resolve the requested modes");

  EigenBasis basis;
  basis.n = n;
  basis.modes = modes;
  basis.lambda = Vec::Zero(n);
  const int Q = dom.num_points();
  basis.samples = Mat::Zero(Q, n);
  basis.weights = dom.w;
  for (int i = 0; i < n; ++i) {
    int kx = modes[i][0], ky = modes[i][1];
    if (dom.kind == Domain::Kind::interval) {
      basis.lambda[i] = std::pow(kx * M_PI / dom.Lx, 2);
      double amp = std::sqrt(2.0 / dom.Lx);
      for (int q = 0; q < Q; ++q)
        basis.samples(q, i) = amp * std::sin(kx * M_PI * dom.pts[q].x / dom.Lx);
    } else {
      basis.lambda[i] = std::pow(kx * M_PI / dom.Lx, 2) + std::pow(ky * M_PI / dom.Ly, 2);
      double amp = std::sqrt(2.0 / dom.Lx) * std::sqrt(2.0 / dom.Ly);
      for (int q = 0; q < Q; ++q)
        basis.samples(q, i) = amp * std::sin(kx * M_PI * dom.pts[q].x / dom.Lx) *
                              std::sin(ky * M_PI * dom.pts[q].y / dom.Ly);
    }
  }
  basis.synth_mat = basis.samples * basis.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  return basis;
}

Vec synth(const EigenBasis& basis, const Vec& coeffs) {
  if (coeffs.size() != basis.n) throw DimensionMismatch("synth: coefficient size != basis.n");
  return basis.synth_mat * coeffs;
}

Vec analyze(const EigenBasis& basis, const Vec& grid_values) {
  if (grid_values.size() != basis.samples.rows())
    throw DimensionMismatch("analyze: grid values do not match the basis grid");
  return basis.samples.transpose() * basis.weights.cwiseProduct(grid_values);
}

SpectralSpace make_space(Domain::Kind kind, double Lx, double Ly, int n, int per_mode_factor) {
  auto modes = smallest_modes(kind, Lx, Ly, n);
  int mx = 1, my = 1;
  for (auto& m : modes) {
    mx = std::max(mx, m[0]);
    my = std::max(my, m[1]);
  }
  SpectralSpace space;
  space.domain = (kind == Domain::Kind::interval)
                     ? Domain::interval(Lx, mx, per_mode_factor)
                     : Domain::rectangle(Lx, Ly, mx, my, per_mode_factor);
  space.basis = eigenpairs(space.domain, n);
  return space;
}

}  // namespace saddleflow
