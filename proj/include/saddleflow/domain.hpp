#pragma once

#include <array>
#include <vector>

#include "saddleflow/types.hpp"

namespace saddleflow {

// Interval (0,Lx) or rectangle (0,Lx)x(0,Ly) with a tensor-product
// trapezoid grid. Per-axis node count is per_mode_factor * max_mode + 1,
// which integrates every retained sine product exactly.
struct Domain {
  enum class Kind { interval, rectangle };

  Kind kind = Kind::interval;
  double Lx = M_PI;
  double Ly = 0.0;
  int max_mode_x = 0;   // largest per-axis mode the grid resolves
  int max_mode_y = 0;

  Vec axis_x, axis_y;   // per-axis nodes
  std::vector<Point> pts;
  Vec w;                // flattened quadrature weights

  static Domain interval(double L, int max_mode, int per_mode_factor = 8);
  static Domain rectangle(double Lx, double Ly, int max_mode_x, int max_mode_y,
                          int per_mode_factor = 8);

  int num_points() const { return static_cast<int>(pts.size()); }
  double measure() const { return kind == Kind::interval ? Lx : Lx * Ly; }
};

// Mode indices (kx, ky) of the n smallest Dirichlet-Laplacian eigenvalues,
// sorted ascending with lexicographic tiebreak. ky = 0 on intervals.
std::vector<std::array<int, 2>> smallest_modes(Domain::Kind kind, double Lx, double Ly, int n);

// Sorted eigenpairs with grid samples of the L2-orthonormal eigenfunctions.
struct EigenBasis {
  int n = 0;
  Vec lambda;
  std::vector<std::array<int, 2>> modes;
  Mat samples;    // num_points x n, e_i on the grid
  Mat synth_mat;  // num_points x n, columns e_i / sqrt(lambda_i)
  Vec weights;    // copy of the grid weights

  double norm_X(const Vec& coeffs) const { return coeffs.norm(); }
};

EigenBasis eigenpairs(const Domain& dom, int n);

// Point values of u = sum c_i e_i / sqrt(lambda_i) on the grid.
Vec synth(const EigenBasis& basis, const Vec& coeffs);

// Quadrature inner products a_i = int g e_i against the L2-orthonormal e_i.
Vec analyze(const EigenBasis& basis, const Vec& grid_values);

// Domain plus matching basis, grid sized from the retained modes.
struct SpectralSpace {
  Domain domain;
  EigenBasis basis;
};

SpectralSpace make_space(Domain::Kind kind, double Lx, double Ly, int n,
                         int per_mode_factor = 8);

}  // namespace saddleflow
