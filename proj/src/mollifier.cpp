#include "saddleflow/mollifier.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "saddleflow/quadrature.hpp"

namespace saddleflow {

namespace {

// Derivatives of exp(w(t)), w = 1/(t^2-1), via the chain rule. Below the
// underflow threshold the exponential beats every rational factor, so the
// value and all derivatives are returned as exact zero.
constexpr double kUnderflow = -690.0;

}  // namespace

double rho(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  double w = 1.0 / (t * t - 1.0);
  if (w < kUnderflow) return 0.0;
  return std::exp(w);
}

double rho_deriv(double t, int order) {
  if (order < 0 || order > 3) throw SolverError("rho_deriv: order must be in 0..3");
  if (std::abs(t) >= 1.0) return 0.0;
  const double w = 1.0 / (t * t - 1.0);
  if (w < kUnderflow) return 0.0;
  const double e = std::exp(w);
  if (order == 0) return e;
  const double w2 = w * w;
  const double w1 = -2.0 * t * w2;  // w'
  if (order == 1) return w1 * e;
  const double wpp = -2.0 * w2 + 8.0 * t * t * w2 * w;  // w''
  if (order == 2) return (wpp + w1 * w1) * e;
  const double wppp = 24.0 * t * w2 * w - 48.0 * t * t * t * w2 * w2;  // w'''
  return (wppp + 3.0 * w1 * wpp + w1 * w1 * w1) * e;
}

double BumpKernel::normalization() {
  static double c = 0.0;
  static std::once_flag once;
  std::call_once(once, [] {
    double integral = integrate_converged([](double t) { return rho(t); }, -1.0, 1.0, 1e-14);
    c = 1.0 / integral;
  });
  return c;
}

BumpKernel BumpKernel::make(int m) {
  if (m < 1) throw SolverError("BumpKernel: m must be a positive integer");
  BumpKernel k;
  k.m = m;
  k.c = normalization();
  return k;
}

double BumpKernel::density(double t) const { return c * m * rho(m * t); }

double BumpKernel::density_deriv(double t, int i) const {
  return c * std::pow(static_cast<double>(m), 1 + i) * rho_deriv(m * t, i);
}

Nonlinearity make_preset(const std::string& name, double p, double q, double lambda) {
  Nonlinearity nl;
  if (name == "cubic") {
    nl.f = [](const Point&, double t) { return t * t * t; };
    nl.ft = [](const Point&, double t) { return 3.0 * t * t; };
    nl.ftt = [](const Point&, double t) { return 6.0 * t; };
    nl.F = [](const Point&, double t) { return 0.25 * t * t * t * t; };
    nl.p = 4.0;
    nl.C_growth = 3.0;
    nl.theta = 4.0;
    nl.M_ar = 1.0;
  } else if (name == "thm12") {
    if (!(2.0 <= q && q < p)) throw ConfigError("thm12 preset requires 2 <= q < p");
    nl.f = [p, q](const Point&, double t) {
      return std::pow(std::abs(t), p - 2.0) * t + std::pow(std::abs(t), q - 1.0);
    };
    nl.ft = [p, q](const Point&, double t) {
      double a = std::abs(t);
      return (p - 1.0) * std::pow(a, p - 2.0) + (q - 1.0) * (a > 0.0 ? std::pow(a, q - 3.0) * t : 0.0);
    };
    if (q >= 3.0) {
      nl.ftt = [p, q](const Point&, double t) {
        double a = std::abs(t);
        return (p - 1.0) * (p - 2.0) * (a > 0.0 ? std::pow(a, p - 4.0) * t : 0.0) +
               (q - 1.0) * (q - 2.0) * std::pow(a, q - 3.0);
      };
    }
    nl.F = [p, q](const Point&, double t) {
      double a = std::abs(t);
      return std::pow(a, p) / p + std::pow(a, q - 1.0) * t / q;
    };
    nl.p = p;
    nl.C_growth = p + q;
    nl.theta = q;
    nl.M_ar = std::pow(p / q, 1.0 / (p - q)) + 0.5;
  } else if (name == "linear_plus") {
    nl.f = [lambda](const Point&, double t) { return lambda * t + t * t * t; };
    nl.ft = [lambda](const Point&, double t) { return lambda + 3.0 * t * t; };
    nl.ftt = [](const Point&, double t) { return 6.0 * t; };
    nl.F = [lambda](const Point&, double t) {
      return 0.5 * lambda * t * t + 0.25 * t * t * t * t;
    };
    nl.p = 4.0;
    nl.C_growth = 3.0 + std::abs(lambda);
    nl.theta = 3.0;
    nl.M_ar = std::sqrt(2.0 * std::max(lambda, 0.0)) + 1.0;
  } else if (name == "linear") {
    nl.f = [lambda](const Point&, double t) { return lambda * t; };
    nl.ft = [lambda](const Point&, double) { return lambda; };
    nl.ftt = [](const Point&, double) { return 0.0; };
    nl.F = [lambda](const Point&, double t) { return 0.5 * lambda * t * t; };
    nl.p = 3.0;
    nl.C_growth = std::abs(lambda) + 1.0;
    nl.theta = 3.0;
    nl.M_ar = 1.0;
  } else {
    throw ConfigError("unknown nonlinearity preset: " + name);
  }
  return nl;
}

SmoothedNonlinearity::SmoothedNonlinearity(Nonlinearity base, int m, int n_quad,
                                           double theta_tilde)
    : base_(std::move(base)),
      kernel_(BumpKernel::make(m)),
      n_quad_(n_quad),
      theta_tilde_(theta_tilde > 0.0 ? theta_tilde : 0.5 * (2.0 + base_.theta)) {
  if (!(theta_tilde_ > 2.0 && theta_tilde_ < base_.theta))
    throw ConfigError("SmoothedNonlinearity: theta_tilde must lie in (2, theta)");
  auto build = [this](int nq, Vec& nodes, std::vector<Vec>& wrows) {
    const QuadratureRule& rule = gauss_legendre(nq);
    nodes = rule.nodes;
    wrows.assign(4, Vec::Zero(nq));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < nq; ++j)
        wrows[i][j] = rule.weights[j] * kernel_.c * rho_deriv(rule.nodes[j], i);
  };
  build(n_quad_, nodes_, wrows_);
  build(2 * n_quad_, nodes2_, wrows2_);
}

double SmoothedNonlinearity::deriv_with(const Vec& nodes, const std::vector<Vec>& wrows,
                                        const Point& x, double t, int order) const {
  if (order < 0 || order > 3) throw SolverError("SmoothedNonlinearity: order must be in 0..3");
  // Substituting tau = s/m turns the support integral into a fixed rule on
  // [-1,1]: (f_m)^{(i)}(t) = m^i * sum_j c w_j rho^{(i)}(s_j) f(t - s_j/m).
  const double inv_m = 1.0 / kernel_.m;
  const double scale = std::pow(static_cast<double>(kernel_.m), order);
  double sum = 0.0;
  for (int j = 0; j < nodes.size(); ++j)
    sum += wrows[order][j] * base_.f(x, t - nodes[j] * inv_m);
  return scale * sum;
}

double SmoothedNonlinearity::primitive_with(const Vec& nodes, const std::vector<Vec>& wrows,
                                            const Point& x, double t) const {
  const double inv_m = 1.0 / kernel_.m;
  double sum = 0.0;
  for (int j = 0; j < nodes.size(); ++j)
    sum += wrows[0][j] * (base_.F(x, t - nodes[j] * inv_m) - base_.F(x, -nodes[j] * inv_m));
  return sum;
}

double SmoothedNonlinearity::deriv(const Point& x, double t, int order) const {
  return deriv_with(nodes_, wrows_, x, t, order);
}

double SmoothedNonlinearity::F_m(const Point& x, double t) const {
  return primitive_with(nodes_, wrows_, x, t);
}

double SmoothedNonlinearity::deriv_refined(const Point& x, double t, int order) const {
  return deriv_with(nodes2_, wrows2_, x, t, order);
}

double SmoothedNonlinearity::F_m_refined(const Point& x, double t) const {
  return primitive_with(nodes2_, wrows2_, x, t);
}

double SmoothedNonlinearity::quadrature_check(const std::vector<double>& t_samples,
                                              const Point& x) const {
  double worst = 0.0;
  for (double t : t_samples) {
    for (int i = 0; i <= 1; ++i)
      worst = std::max(worst, std::abs(deriv(x, t, i) - deriv_refined(x, t, i)));
    worst = std::max(worst, std::abs(F_m(x, t) - F_m_refined(x, t)));
  }
  return worst;
}

double mollify(const Nonlinearity& base, const BumpKernel& kernel, const Point& x, double t,
               int order, int n_quad) {
  if (order < 0 || order > 3) throw SolverError("mollify: order must be in 0..3");
  const QuadratureRule& rule = gauss_legendre(n_quad);
  const double inv_m = 1.0 / kernel.m;
  const double scale = std::pow(static_cast<double>(kernel.m), order);
  double sum = 0.0;
  for (int j = 0; j < n_quad; ++j)
    sum += rule.weights[j] * kernel.c * rho_deriv(rule.nodes[j], order) *
           base.f(x, t - rule.nodes[j] * inv_m);
  return scale * sum;
}

ARReport check_ar(const SmoothedNonlinearity& sm, double t_max, int nt,
                  const std::vector<Point>& x_grid) {
  ARReport rep;
  rep.theta_tilde = sm.theta_tilde();
  rep.M1 = sm.M1();
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.min_Fm = std::numeric_limits<double>::infinity();
  if (t_max <= rep.M1) throw SolverError("check_ar: t_max must exceed M_ar + 1");
  const double lo = std::log(rep.M1), hi = std::log(t_max);
  for (const Point& x : x_grid) {
    for (int i = 0; i < nt; ++i) {
      double mag = std::exp(lo + (hi - lo) * i / (nt - 1.0));
      for (double t : {mag, -mag}) {
        double fm = sm.f_m(x, t);
        double Fm = sm.F_m(x, t);
        double margin = t * fm - rep.theta_tilde * Fm;
        rep.min_margin = std::min(rep.min_margin, margin);
        rep.min_Fm = std::min(rep.min_Fm, Fm);
        if (margin <= 0.0 || Fm <= 0.0) rep.violations.emplace_back(x, t);
      }
    }
  }
  rep.pass = rep.min_margin > 0.0 && rep.min_Fm > 0.0;
  return rep;
}

double uniform_error(const Nonlinearity& base, const BumpKernel& kernel, double t_box,
                     const std::vector<Point>& x_grid, int nt, int n_quad) {
  double sup = 0.0;
  for (const Point& x : x_grid) {
    for (int i = 0; i < nt; ++i) {
      double t = -t_box + 2.0 * t_box * i / (nt - 1.0);
      sup = std::max(sup, std::abs(mollify(base, kernel, x, t, 0, n_quad) - base.f(x, t)));
    }
  }
  return sup;
}

}  // namespace saddleflow
