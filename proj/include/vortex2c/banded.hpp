#pragma once

// Banded matrices with kl sub- and ku super-diagonals, an LU factorization
// with partial pivoting (row interchanges widen the upper band to kl + ku),
// and a pivot-free elimination used for Sylvester inertia counts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace vortex2c {

class BandedMatrix {
public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(n * width_, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return j + kl_ >= i && j <= i + ku_;
  }

  double& operator()(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: entry outside band");
    return data_[index(i, j)];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[index(i, j)] : 0.0;
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + ku_);
      double s = 0.0;
      for (std::size_t j = j0; j <= j1; ++j) s += data_[index(i, j)] * x[j];
      y[i] = s;
    }
    return y;
  }

private:
  friend class BandedLU;
  friend std::vector<double> elimination_pivots(BandedMatrix);

  // Row i stores columns i - kl .. i + ku + kl (the extra kl hold LU fill-in).
  std::size_t index(std::size_t i, std::size_t j) const { return i * width_ + (j + kl_ - i); }
  double& raw(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  std::size_t n_ = 0, kl_ = 0, ku_ = 0, width_ = 1;
  std::vector<double> data_;
};

class BandedLU {
public:
  explicit BandedLU(BandedMatrix a) : a_(std::move(a)), piv_(a_.n_) {
    const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    double scale = 0.0;
    for (double v : a_.data_) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 && n > 0) throw SingularJacobian("matrix is identically zero");
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t last_row = std::min(n - 1, k + kl);
      const std::size_t last_col = std::min(n - 1, k + kl + ku);
      std::size_t p = k;
      double best = std::abs(a_.raw(k, k));
      for (std::size_t i = k + 1; i <= last_row; ++i) {
        const double v = std::abs(a_.raw(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (!(best > scale * 1e-300) || !std::isfinite(best))
        throw SingularJacobian("zero pivot at column " + std::to_string(k));
      piv_[k] = p;
      if (p != k)
        for (std::size_t j = k; j <= last_col; ++j) std::swap(a_.raw(k, j), a_.raw(p, j));
      const double pivot = a_.raw(k, k);
      for (std::size_t i = k + 1; i <= last_row; ++i) {
        const double l = a_.raw(i, k) / pivot;
        a_.raw(i, k) = l;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j <= last_col; ++j) a_.raw(i, j) -= l * a_.raw(k, j);
      }
    }
  }

  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    if (b.size() != n) throw LengthMismatch("BandedLU::solve: size mismatch");
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
      const std::size_t last_row = std::min(n - 1, k + kl);
      for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= a_(i, k) * x[k];
    }
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t last_col = std::min(n - 1, k + kl + ku);
      double s = x[k];
      for (std::size_t j = k + 1; j <= last_col; ++j) s -= a_.data_[a_.index(k, j)] * x[j];
      x[k] = s / a_.data_[a_.index(k, k)];
    }
    return x;
  }

private:
  BandedMatrix a_;
  std::vector<std::size_t> piv_;
};

/// Pivots of Gaussian elimination without interchanges.  For a symmetric
/// matrix these are the diagonal of its LDL^T factorization.
inline std::vector<double> elimination_pivots(BandedMatrix a) {
  const std::size_t n = a.n_, kl = a.kl_, ku = a.ku_;
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = a.raw(k, k);
    if (pivot == 0.0) pivot = 1e-300;  // measure-zero tie; nudge off zero
    d[k] = pivot;
    const std::size_t last_row = std::min(n - 1, k + kl);
    const std::size_t last_col = std::min(n - 1, k + ku);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double l = a.raw(i, k) / pivot;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) a.raw(i, j) -= l * a.raw(k, j);
    }
  }
  return d;
}

/// Number of eigenvalues of the pencil (H, diag(mass)) below sigma, by
/// Sylvester's law of inertia applied to H - sigma * diag(mass).
inline std::size_t count_eigenvalues_below(const BandedMatrix& h, std::span<const double> mass, double sigma) {
  BandedMatrix shifted = h;
  for (std::size_t i = 0; i < h.size(); ++i) shifted(i, i) -= sigma * mass[i];
  const auto d = elimination_pivots(std::move(shifted));
  return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double v) { return v < 0.0; }));
}

}  // namespace vortex2c
