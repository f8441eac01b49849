#pragma once

#include <cmath>

namespace eddy {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  // counterclockwise quarter turn
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Symmetric 2x2 tensor, stored as (a11, a12, a22).
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  SymMat2() = default;
  SymMat2(double a11_, double a12_, double a22_) : a11(a11_), a12(a12_), a22(a22_) {}

  static SymMat2 identity(double s = 1.0) { return {s, 0.0, s}; }
  static SymMat2 outer(const Vec2& v) { return {v.x * v.x, v.x * v.y, v.y * v.y}; }

  SymMat2 operator+(const SymMat2& o) const { return {a11 + o.a11, a12 + o.a12, a22 + o.a22}; }
  SymMat2& operator+=(const SymMat2& o) {
    a11 += o.a11;
    a12 += o.a12;
    a22 += o.a22;
    return *this;
  }
  SymMat2 operator*(double s) const { return {a11 * s, a12 * s, a22 * s}; }

  Vec2 apply(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
  double quad(const Vec2& v) const { return v.dot(apply(v)); }
  // u^T A v, written so swapping u and v reproduces the result bit for bit.
  double bilin(const Vec2& u, const Vec2& v) const {
    return a11 * u.x * v.x + a22 * u.y * v.y + a12 * (u.x * v.y + u.y * v.x);
  }
  double trace() const { return a11 + a22; }

  // Eigenvalues of a symmetric 2x2 matrix in closed form.
  double eig_min() const {
    const double m = 0.5 * (a11 + a22);
    const double d = 0.5 * (a11 - a22);
    return m - std::sqrt(d * d + a12 * a12);
  }
  double eig_max() const {
    const double m = 0.5 * (a11 + a22);
    const double d = 0.5 * (a11 - a22);
    return m + std::sqrt(d * d + a12 * a12);
  }
  // Unit eigenvector for eig_min; falls back to e1 when isotropic.
  Vec2 eigvec_min() const {
    const double lam = eig_min();
    // rows of (A - lam I) are orthogonal to the eigenvector
    Vec2 r1{a11 - lam, a12};
    Vec2 r2{a12, a22 - lam};
    Vec2 r = (r1.norm2() >= r2.norm2()) ? r1 : r2;
    const double n = r.norm();
    if (n < 1e-300) return {1.0, 0.0};
    return {-r.y / n, r.x / n};
  }
  bool is_psd(double tol = 0.0) const { return eig_min() >= -tol; }
};

}  // namespace eddy
