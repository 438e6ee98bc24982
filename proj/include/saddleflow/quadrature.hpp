#pragma once

#include <functional>

#include "saddleflow/types.hpp"

namespace saddleflow {

// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  Vec nodes;
  Vec weights;
};

// Nodes by Newton iteration on P_n; cached per n, thread-safe.
const QuadratureRule& gauss_legendre(int n);

// \int_a^b f with an n-point Gauss-Legendre rule mapped onto [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Node-doubling driver for reference constants: doubles n until two
// successive values agree to tol (or n exceeds 4096).
double integrate_converged(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-13, double* achieved = nullptr);

}  // namespace saddleflow
