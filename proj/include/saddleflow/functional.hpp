#pragma once

#include <cstdint>
#include <functional>

#include "saddleflow/domain.hpp"
#include "saddleflow/mollifier.hpp"
#include "saddleflow/types.hpp"

namespace saddleflow {

// Scalar source bundle the energy model integrates against. ftt may be
// empty when only C^1 data is available.
struct SourceFns {
  std::function<double(const Point&, double)> f;
  std::function<double(const Point&, double)> ft;
  std::function<double(const Point&, double)> ftt;
  std::function<double(const Point&, double)> F;
};

// Bind a plain nonlinearity. The referenced object must outlive the model.
SourceFns source_fns(const Nonlinearity& nl);

// Bind the mollified nonlinearity: f_m, (f_m)', (f_m)'', F_m.
SourceFns source_fns(const SmoothedNonlinearity& sm);

// J(u) = 1/2 |u|_X^2 - int F(x, u) on the span of the basis, in
// X-orthonormal coordinates. Gradient coordinates are
// c_i - lambda_i^{-1/2} int f(x,u) e_i; the Hessian is
// I - lambda^{-1/2} int ft e_i e_j lambda^{-1/2}.
class EnergyModel : public Functional {
public:
  EnergyModel(const Domain* dom, const EigenBasis* basis, SourceFns nl);

  int dim() const override { return basis_->n; }
  double value(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Mat hessian(const Vec& u) const override;
  bool has_third() const override { return static_cast<bool>(nl_.ftt); }
  Vec third_directional(const Vec& u, const Vec& a, const Vec& b) const override;

  const Domain& domain() const { return *dom_; }
  const EigenBasis& basis() const { return *basis_; }
  const SourceFns& source() const { return nl_; }
  Vec point_values(const Vec& u) const { return synth(*basis_, u); }

private:
  const Domain* dom_;
  const EigenBasis* basis_;
  SourceFns nl_;
};

// Mountain-pass geometry data: positivity sphere (rho0, d0), annulus radii
// r_k < rho0 < R_k with sup_K < d0/2, and the cutoff margin mu.
struct GeometryReport {
  int k = 0;
  double rho0 = 0.0;
  double d0 = 0.0;   // estimated inf of J on the rho0 sphere (upper bound)
  double r_k = 0.0;
  double R_k = 0.0;
  double mu = 0.0;
  double sup_K = 0.0;
  double sup_K2mu = 0.0;
};

struct GeometryOpts {
  int starts = 32;
  std::uint64_t seed = 12345;
  double rho_lo = 0.05;
  double rho_hi = 3.0;
  int rho_scan = 25;
  int iters = 300;
  double R_cap_factor = 1e6;
};

GeometryReport geometry_probe(const Functional& J, int k, const GeometryOpts& opts = {});

// Multistart estimate of sup over the span of the first k coordinates
// (finite because J is superlinear there). Used by the (4.14)-style bound.
double sup_on_subspace(const Functional& J, int k, int starts, std::uint64_t seed,
                       int iters = 400);

// Fitted split |f(x,t)| <= eps |t| + C_eps |t|^{p-1}: eps fixed to
// lambda1/2, C_eps fitted on a coarse grid, verified on a fine one.
struct GrowthSplit {
  double eps = 0.0;
  double C_eps = 0.0;
  bool ok = false;
};

GrowthSplit fit_growth_split(const Nonlinearity& nl, double lambda1, double t_box = 10.0,
                             int nt = 4001);

// Deterministic standard-normal vector (Box-Muller over mt19937_64), the
// shared randomness primitive for every probe and sampler.
Vec gaussian_vector(int n, std::uint64_t seed);

}  // namespace saddleflow
