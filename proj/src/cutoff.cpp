#include "saddleflow/cutoff.hpp"

#include <cmath>

namespace saddleflow {

namespace {

// h(y) = exp(-1/y) for y > 0, extended by zero. Below the cut the value
// underflows and every rational prefactor with it.
void h_derivs(double y, double& h, double& h1, double& h2) {
  if (y < 2e-3) {
    h = h1 = h2 = 0.0;
    return;
  }
  h = std::exp(-1.0 / y);
  h1 = h / (y * y);
  h2 = h * (1.0 - 2.0 * y) / (y * y * y * y);
}

}  // namespace

double smooth_step(double t) {
  double s, s1, s2;
  smooth_step_derivs(t, s, s1, s2);
  return s;
}

void smooth_step_derivs(double t, double& s, double& s1, double& s2) {
  if (t <= 0.0) {
    s = 1.0;
    s1 = s2 = 0.0;
    return;
  }
  if (t >= 1.0) {
    s = s1 = s2 = 0.0;
    return;
  }
  double A, A1, A2, B, B1, B2;
  h_derivs(1.0 - t, A, A1, A2);
  h_derivs(t, B, B1, B2);
  A1 = -A1;  // chain rule through 1 - t
  double S = A + B;
  if (S <= 0.0) {  // both tails flushed, resolve by side
    s = t < 0.5 ? 1.0 : 0.0;
    s1 = s2 = 0.0;
    return;
  }
  double Sp = A1 + B1;
  double N = A1 * B - A * B1;
  double Np = A2 * B - A * B2;
  s = A / S;
  s1 = N / (S * S);
  s2 = (Np * S - 2.0 * N * Sp) / (S * S * S);
}

Cutoff Cutoff::from_geometry(const GeometryReport& geo) {
  Cutoff c;
  c.mode = Mode::normal;
  c.k = geo.k;
  c.r_k = geo.r_k;
  c.R_k = geo.R_k;
  c.mu = geo.mu;
  return c;
}

Cutoff Cutoff::disabled() {
  Cutoff c;
  c.mode = Mode::always_zero;
  return c;
}

Cutoff Cutoff::frozen() {
  Cutoff c;
  c.mode = Mode::always_one;
  return c;
}

double Cutoff::distance(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  const double np = x.head(std::min(k, n)).norm();
  const double nq = k < n ? x.tail(n - k).norm() : 0.0;
  const double d_ball = std::sqrt(std::pow(std::max(0.0, np - r_k), 2) + nq * nq);
  const double d_sphere = std::sqrt(std::pow(np - R_k, 2) + nq * nq);
  return std::min(d_ball, d_sphere);
}

double Cutoff::value(const Vec& x) const {
  if (mode == Mode::always_zero) return 0.0;
  if (mode == Mode::always_one) return 1.0;
  return smooth_step((distance(x) - mu) / mu);
}

Vec Cutoff::grad(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  if (mode != Mode::normal) return Vec::Zero(n);
  const double d = distance(x);
  double s, s1, s2;
  smooth_step_derivs((d - mu) / mu, s, s1, s2);
  if (s1 == 0.0) return Vec::Zero(n);

  const double np = x.head(k).norm();
  const double nq = x.tail(n - k).norm();
  const double d_ball = std::sqrt(std::pow(std::max(0.0, np - r_k), 2) + nq * nq);
  const double d_sphere = std::sqrt(std::pow(np - R_k, 2) + nq * nq);

  // grad d, branchwise; the active branch is smooth on the band.
  Vec gd = Vec::Zero(n);
  if (d_ball <= d_sphere) {
    if (np > r_k) {
      gd.head(k) = ((np - r_k) / (d * np)) * x.head(k);
      gd.tail(n - k) = x.tail(n - k) / d;
    } else {
      gd.tail(n - k) = x.tail(n - k) / nq;
    }
  } else {
    gd.head(k) = ((np - R_k) / (d * np)) * x.head(k);
    gd.tail(n - k) = x.tail(n - k) / d;
  }
  return (s1 / mu) * gd;
}

Mat Cutoff::hess(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  if (mode != Mode::normal) return Mat::Zero(n, n);
  const double d = distance(x);
  double s, s1, s2;
  smooth_step_derivs((d - mu) / mu, s, s1, s2);
  if (s1 == 0.0 && s2 == 0.0) return Mat::Zero(n, n);

  const double np = x.head(k).norm();
  const double nq = x.tail(n - k).norm();
  const double d_ball = std::sqrt(std::pow(std::max(0.0, np - r_k), 2) + nq * nq);
  const double d_sphere = std::sqrt(std::pow(np - R_k, 2) + nq * nq);

  Vec gd = Vec::Zero(n);
  Mat hd = Mat::Zero(n, n);
  if (d_ball <= d_sphere && np <= r_k) {
    // Pure q-distance branch.
    Vec qh = x.tail(n - k) / nq;
    gd.tail(n - k) = qh;
    hd.bottomRightCorner(n - k, n - k) =
        (Mat::Identity(n - k, n - k) - qh * qh.transpose()) / nq;
  } else {
    const double Rad = d_ball <= d_sphere ? r_k : R_k;
    // d = sqrt(G), G = (np - Rad)^2 + |q|^2.
    Vec gG = Vec::Zero(n);
    gG.head(k) = 2.0 * (1.0 - Rad / np) * x.head(k);
    gG.tail(n - k) = 2.0 * x.tail(n - k);
    Mat hG = Mat::Zero(n, n);
    hG.topLeftCorner(k, k) =
        2.0 * (1.0 - Rad / np) * Mat::Identity(k, k) +
        (2.0 * Rad / (np * np * np)) * x.head(k) * x.head(k).transpose();
    hG.bottomRightCorner(n - k, n - k) = 2.0 * Mat::Identity(n - k, n - k);
    gd = gG / (2.0 * d);
    hd = hG / (2.0 * d) - gG * gG.transpose() / (4.0 * d * d * d);
  }
  return (s2 / (mu * mu)) * gd * gd.transpose() + (s1 / mu) * hd;
}

}  // namespace saddleflow
