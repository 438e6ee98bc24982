#pragma once

#include <functional>
#include <string>
#include <vector>

#include "saddleflow/types.hpp"

namespace saddleflow {

// The standard C_c^infinity bump exp(1/(t^2-1)) on (-1,1), zero outside,
// and its closed-form derivatives up to order 3. Total functions.
double rho(double t);
double rho_deriv(double t, int order);

// Scaled kernel rho_m(t) = c * m * rho(m t) with support [-1/m, 1/m].
// c normalizes the integral of rho over (-1,1) to one; it is computed once
// by node-doubling quadrature so the normalization invariant stays a real
// check against the fixed 64-node rule used downstream.
struct BumpKernel {
  int m = 1;
  double c = 0.0;

  static BumpKernel make(int m);
  static double normalization();  // c, cached

  double density(double t) const;              // rho_m(t)
  double density_deriv(double t, int i) const; // rho_m^{(i)}(t) = c m^{1+i} rho^{(i)}(mt)
  double support_radius() const { return 1.0 / m; }
};

// A nonlinearity f(x,t) with its t-derivative, primitive F (F(x,0)=0) and
// the hypothesis constants: growth exponent p, growth constant, AR exponent
// theta and AR threshold M. ftt is optional (only C^1 is assumed).
struct Nonlinearity {
  std::function<double(const Point&, double)> f;
  std::function<double(const Point&, double)> ft;
  std::function<double(const Point&, double)> F;
  std::function<double(const Point&, double)> ftt;

  double p = 4.0;
  double C_growth = 3.0;
  double theta = 4.0;
  double M_ar = 1.0;

  bool has_ftt() const { return static_cast<bool>(ftt); }
};

// Named presets: "cubic" (t^3), "thm12" (|t|^{p-2}t + |t|^{q-1}),
// "linear_plus" (lambda t + t^3), "linear" (lambda t, diagnostics only).
Nonlinearity make_preset(const std::string& name, double p = 4.0, double q = 3.0,
                         double lambda = 0.0);

// f_m and its derivatives realized by Gauss-Legendre quadrature of
// rho_m^{(i)}(tau) f(x, t - tau) over the kernel support. Weight rows are
// precomputed per derivative order so an evaluation is one dot product
// against f samples.
class SmoothedNonlinearity {
public:
  SmoothedNonlinearity(Nonlinearity base, int m, int n_quad = 64, double theta_tilde = 0.0);

  const Nonlinearity& base() const { return base_; }
  const BumpKernel& kernel() const { return kernel_; }
  int m() const { return kernel_.m; }
  int n_quad() const { return n_quad_; }
  double theta_tilde() const { return theta_tilde_; }
  double M1() const { return base_.M_ar + 1.0; }

  // (f_m)^{(i)}(x, t), i in 0..3.
  double deriv(const Point& x, double t, int order) const;
  double f_m(const Point& x, double t) const { return deriv(x, t, 0); }

  // Primitive with F_m(x,0) = 0, realized as the mollification of the
  // closed-form primitive: one quadrature instead of a nested one.
  double F_m(const Point& x, double t) const;

  // Same values with a doubled node count; used by the accuracy tripwire.
  double deriv_refined(const Point& x, double t, int order) const;
  double F_m_refined(const Point& x, double t) const;

  // Max |refined - standard| over sample points; > 1e-9 flags the node
  // count as too small for this nonlinearity.
  double quadrature_check(const std::vector<double>& t_samples,
                          const Point& x = Point{}) const;

private:
  double deriv_with(const Vec& nodes, const std::vector<Vec>& wrows, const Point& x,
                    double t, int order) const;
  double primitive_with(const Vec& nodes, const std::vector<Vec>& wrows, const Point& x,
                        double t) const;

  Nonlinearity base_;
  BumpKernel kernel_;
  int n_quad_;
  double theta_tilde_;
  Vec nodes_;                  // GL nodes on [-1,1]
  std::vector<Vec> wrows_;     // wrows_[i][j] = w_j * c * rho^{(i)}(s_j)
  Vec nodes2_;                 // doubled rule
  std::vector<Vec> wrows2_;
};

// Spec operation form of the convolution: (f_m)^{(i)}(x, t).
double mollify(const Nonlinearity& base, const BumpKernel& kernel, const Point& x,
               double t, int order, int n_quad = 64);

// Ambrosetti-Rabinowitz preservation report for the smoothed nonlinearity:
// min over the grid of t f_m - theta_tilde F_m and of F_m; pass iff both
// strictly positive.
struct ARReport {
  double theta_tilde = 0.0;
  double M1 = 0.0;
  double min_margin = 0.0;  // min of t f_m - theta_tilde F_m
  double min_Fm = 0.0;
  bool pass = false;
  std::vector<std::pair<Point, double>> violations;  // (x, t) witnesses
};

ARReport check_ar(const SmoothedNonlinearity& sm, double t_max = 50.0, int nt = 512,
                  const std::vector<Point>& x_grid = {Point{}});

// sup over sampled (x, t) of |f_m - f| on |t| <= t_box.
double uniform_error(const Nonlinearity& base, const BumpKernel& kernel, double t_box,
                     const std::vector<Point>& x_grid = {Point{}}, int nt = 257,
                     int n_quad = 64);

}  // namespace saddleflow
