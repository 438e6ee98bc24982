#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace saddleflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point of the closed domain. y is ignored on intervals.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Base class for every recoverable solver failure. The what() string names
// the failing stage so the CLI can report it and exit with code 3.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GeometryFailure : public SolverError {
public:
  using SolverError::SolverError;
};

class StepFailure : public SolverError {
public:
  using SolverError::SolverError;
};

class AscentStalled : public SolverError {
public:
  using SolverError::SolverError;
};

class NoWitness : public SolverError {
public:
  using SolverError::SolverError;
};

class NewtonDiverged : public SolverError {
public:
  using SolverError::SolverError;
};

class DivergedAcrossM : public SolverError {
public:
  using SolverError::SolverError;
};

class DivergedAcrossN : public SolverError {
public:
  using SolverError::SolverError;
};

class RankDeficient : public SolverError {
public:
  using SolverError::SolverError;
};

class OracleMismatch : public SolverError {
public:
  using SolverError::SolverError;
};

class DimensionMismatch : public SolverError {
public:
  using SolverError::SolverError;
};

class ConfigError : public SolverError {
public:
  using SolverError::SolverError;
};

// C2-smooth functional on a finite-dimensional coordinate space. The flow,
// minimax and Morse machinery only see this interface, so the spectral
// Galerkin energy and the synthetic finite-dimensional testbeds share it.
class Functional {
public:
  virtual ~Functional() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;

  // Action of the third derivative: the vector with components
  // D3(x)[a, b, basis_i]. Only available when the underlying nonlinearity
  // has two derivatives.
  virtual bool has_third() const { return false; }
  virtual Vec third_directional(const Vec& x, const Vec& a, const Vec& b) const {
    (void)x;
    (void)a;
    (void)b;
    throw SolverError("third_directional: functional is not three times differentiable");
  }
};

}  // namespace saddleflow
