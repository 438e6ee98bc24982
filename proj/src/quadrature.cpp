#include "saddleflow/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace saddleflow {

namespace {

QuadratureRule compute_rule(int n) {
  QuadratureRule rule;
  rule.nodes = Vec::Zero(n);
  rule.weights = Vec::Zero(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  const QuadratureRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double rad = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + rad * rule.nodes[i]);
  return rad * sum;
}

double integrate_converged(const std::function<double(double)>& f, double a, double b,
                           double tol, double* achieved) {
  double prev = integrate_gl(f, a, b, 32);
  for (int n = 64; n <= 4096; n *= 2) {
    double cur = integrate_gl(f, a, b, n);
    double delta = std::abs(cur - prev);
    if (delta < tol) {
      if (achieved) *achieved = delta;
      return cur;
    }
    prev = cur;
  }
  if (achieved) *achieved = std::abs(prev);
  return prev;
}

}  // namespace saddleflow
