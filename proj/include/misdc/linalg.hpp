#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misdc/errors.hpp"
#include "misdc/stencils.hpp"

namespace misdc::linalg {

/// Pentadiagonal matrix with optional extra entries in the first and last
/// rows beyond the band (ghost-cell elimination produces exactly that
/// shape). Entries outside the declared structure are exactly zero.
class BandedMatrix {
 public:
  static constexpr int kBand = 2;          // offsets -2..+2
  static constexpr int kMaxExtras = 2;     // per corner row

  explicit BandedMatrix(int n) : n_(n), band_(static_cast<std::size_t>(n) * 5, 0.0) {
    if (n < 5) {
      throw std::invalid_argument("BandedMatrix: need n >= 5");
    }
  }

  static BandedMatrix identity(int n) {
    BandedMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  int size() const { return n_; }
  int first_row_extras() const { return static_cast<int>(extras_lo_.size()); }
  int last_row_extras() const { return static_cast<int>(extras_hi_.size()); }

  double get(int row, int col) const {
    if (row < 0 || row >= n_ || col < 0 || col >= n_) {
      throw std::invalid_argument("BandedMatrix::get: index out of range");
    }
    const int off = col - row;
    if (std::abs(off) <= kBand) return band_[band_index(row, off)];
    if (row == 0 && off > kBand && off - kBand <= static_cast<int>(extras_lo_.size())) {
      return extras_lo_[off - kBand - 1];
    }
    if (row == n_ - 1 && -off > kBand &&
        -off - kBand <= static_cast<int>(extras_hi_.size())) {
      return extras_hi_[-off - kBand - 1];
    }
    return 0.0;
  }

  void set(int row, int col, double value) { entry(row, col) = value; }
  void add(int row, int col, double value) { entry(row, col) += value; }

  double inf_norm() const {
    double norm = 0.0;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = std::max(0, i - max_lower()); j <= std::min(n_ - 1, i + max_upper()); ++j) {
        s += std::abs(get(i, j));
      }
      norm = std::max(norm, s);
    }
    return norm;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_) {
      throw std::invalid_argument("BandedMatrix::apply: size mismatch");
    }
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = std::max(0, i - max_lower()); j <= std::min(n_ - 1, i + max_upper()); ++j) {
        s += get(i, j) * x[j];
      }
      y[i] = s;
    }
    return y;
  }

  /// Largest reach below/above the diagonal over all rows.
  int max_lower() const { return kBand + last_row_extras(); }
  int max_upper() const { return kBand + first_row_extras(); }

 private:
  double& entry(int row, int col) {
    if (row < 0 || row >= n_ || col < 0 || col >= n_) {
      throw std::invalid_argument("BandedMatrix: index out of range");
    }
    const int off = col - row;
    if (std::abs(off) <= kBand) return band_[band_index(row, off)];
    if (row == 0 && off > kBand && off - kBand <= kMaxExtras) {
      const std::size_t slot = static_cast<std::size_t>(off - kBand);
      if (extras_lo_.size() < slot) extras_lo_.resize(slot, 0.0);
      return extras_lo_[slot - 1];
    }
    if (row == n_ - 1 && -off > kBand && -off - kBand <= kMaxExtras) {
      const std::size_t slot = static_cast<std::size_t>(-off - kBand);
      if (extras_hi_.size() < slot) extras_hi_.resize(slot, 0.0);
      return extras_hi_[slot - 1];
    }
    throw std::invalid_argument("BandedMatrix: (" + std::to_string(row) + "," +
                                std::to_string(col) +
                                ") is outside the declared structure");
  }

  std::size_t band_index(int row, int off) const {
    return static_cast<std::size_t>(row) * 5 + static_cast<std::size_t>(off + kBand);
  }

  int n_;
  std::vector<double> band_;
  std::vector<double> extras_lo_;  // row 0, columns kBand+1 ...
  std::vector<double> extras_hi_;  // row n-1, columns n-1-kBand-1 ... (descending)
};

/// LU factors of a banded matrix with partial pivoting. U's bandwidth grows
/// by the lower bandwidth; the working band carries that fill.
class BandedFactorization {
 public:
  BandedFactorization(const BandedMatrix& a)
      : n_(a.size()),
        kl_(a.max_lower()),
        ku_(a.max_upper()),
        width_(kl_ + ku_),  // U reach after pivoting
        ldab_(kl_ + width_ + 1),
        w_(static_cast<std::size_t>(n_) * ldab_, 0.0),
        ipiv_(n_) {
    for (int i = 0; i < n_; ++i) {
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
        at(i, j) = a.get(i, j);
      }
    }
    const double threshold =
        10.0 * std::numeric_limits<double>::epsilon() * a.inf_norm();
    factorize(threshold);
  }

  std::vector<double> solve(std::vector<double> b) const {
    if (static_cast<int>(b.size()) != n_) {
      throw std::invalid_argument("BandedFactorization::solve: size mismatch");
    }
    for (int j = 0; j < n_; ++j) {
      if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
      const int imax = std::min(n_ - 1, j + kl_);
      for (int i = j + 1; i <= imax; ++i) b[i] -= at(i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      const int cmax = std::min(n_ - 1, j + width_);
      double s = b[j];
      for (int c = j + 1; c <= cmax; ++c) s -= at(j, c) * b[c];
      b[j] = s / at(j, j);
    }
    return b;
  }

 private:
  double& at(int i, int j) {
    return w_[static_cast<std::size_t>(j) * ldab_ + (width_ + i - j)];
  }
  double at(int i, int j) const {
    return w_[static_cast<std::size_t>(j) * ldab_ + (width_ + i - j)];
  }

  void factorize(double threshold) {
    for (int j = 0; j < n_; ++j) {
      const int imax = std::min(n_ - 1, j + kl_);
      int p = j;
      for (int i = j + 1; i <= imax; ++i) {
        if (std::abs(at(i, j)) > std::abs(at(p, j))) p = i;
      }
      ipiv_[j] = p;
      if (!(std::abs(at(p, j)) > threshold)) {
        throw SingularMatrixError(
            "banded LU: pivot " + std::to_string(std::abs(at(p, j))) +
                " at column " + std::to_string(j) + " below threshold",
            j);
      }
      const int cmax = std::min(n_ - 1, j + width_);
      if (p != j) {
        for (int c = j; c <= cmax; ++c) std::swap(at(j, c), at(p, c));
      }
      const double piv = at(j, j);
      for (int i = j + 1; i <= imax; ++i) {
        const double l = at(i, j) / piv;
        at(i, j) = l;
        for (int c = j + 1; c <= cmax; ++c) at(i, c) -= l * at(j, c);
      }
    }
  }

  int n_, kl_, ku_, width_, ldab_;
  std::vector<double> w_;
  std::vector<int> ipiv_;
};

/// Direct solve; factorises on every call. Keep a BandedFactorization when
/// solving repeatedly with the same matrix.
inline std::vector<double> solve_banded(const BandedMatrix& a,
                                        const std::vector<double>& b) {
  return BandedFactorization(a).solve(b);
}

/// The implicit fourth-order diffusion system
///   <rho phi> - dt_coeff * <div(D grad phi)> = <b>,
/// assembled for the cell averages <phi>. The mass product rule treats
/// rho^G as known coefficient data; boundary ghosts of phi are folded into
/// the matrix and the inhomogeneous Dirichlet parts into rhs_adjustment.
/// The assembled system reads  matrix * x = b + rhs_adjustment.
struct DiffusionSystem {
  BandedMatrix matrix;
  std::vector<double> rhs_adjustment;
};

namespace detail {

// Ghost averages of coefficient data by cubic extrapolation from the four
// adjacent interior averages (no boundary condition involved).
inline fv::GhostPair extrapolated_ghosts(std::span<const double> inner4) {
  const double g1 = 4.0 * inner4[0] - 6.0 * inner4[1] + 4.0 * inner4[2] - inner4[3];
  const double g2 = 4.0 * g1 - 6.0 * inner4[0] + 4.0 * inner4[1] - inner4[2];
  return {g1, g2};
}

// Affine representation of one ghost value: coefficients on four interior
// cells plus a boundary-data part.
struct GhostRow {
  std::array<int, 4> cols;
  std::array<double, 4> coef;
  double bc_coef;
};

}  // namespace detail

inline DiffusionSystem assemble_diffusion_matrix(
    const fv::Grid1D& grid, const fv::FaceField& face_coefficients,
    const fv::AvgField& mass_coefficient, double dt_coeff) {
  const int n = grid.cell_count();
  const double dx = grid.dx();
  if (static_cast<int>(face_coefficients.size()) != n + 1) {
    throw std::invalid_argument("assemble_diffusion_matrix: need n+1 face coefficients");
  }
  if (static_cast<int>(mass_coefficient.size()) != n) {
    throw std::invalid_argument("assemble_diffusion_matrix: mass coefficient size mismatch");
  }
  for (std::size_t f = 0; f < face_coefficients.size(); ++f) {
    if (!(face_coefficients[f] > 0.0)) {
      throw std::invalid_argument(
          "assemble_diffusion_matrix: face coefficient must be positive at face " +
          std::to_string(f));
    }
  }

  // rho^G with coefficient-data ghosts (pure extrapolation).
  const auto& rho = mass_coefficient;
  const std::array<double, 4> rho_lo4{rho[0], rho[1], rho[2], rho[3]};
  const std::array<double, 4> rho_hi4{rho[n - 1], rho[n - 2], rho[n - 3], rho[n - 4]};
  const fv::GhostCells rho_ghosts{detail::extrapolated_ghosts(rho_lo4),
                                  detail::extrapolated_ghosts(rho_hi4)};
  const fv::AvgField rho_grad = fv::cell_gradient(rho, rho_ghosts, dx);

  // Ghost rows for the unknown field, from the inflow/outflow formulas.
  const detail::GhostRow lo1{{0, 1, 2, 3},
                             {-77.0 / 12, 43.0 / 12, -17.0 / 12, 3.0 / 12},
                             60.0 / 12};
  const detail::GhostRow lo2{{0, 1, 2, 3},
                             {-505.0 / 12, 335.0 / 12, -145.0 / 12, 27.0 / 12},
                             300.0 / 12};
  const detail::GhostRow hi1{{n - 1, n - 2, n - 3, n - 4},
                             {5.0 / 10, 9.0 / 10, -5.0 / 10, 1.0 / 10},
                             0.0};
  const detail::GhostRow hi2{{n - 1, n - 2, n - 3, n - 4},
                             {-15.0 / 2, 29.0 / 2, -15.0 / 2, 3.0 / 2},
                             0.0};

  DiffusionSystem sys{BandedMatrix(n), std::vector<double>(n, 0.0)};
  const double phi_b = grid.bc_lo().value;

  auto add_coef = [&](int row, int col, double v) {
    if (v == 0.0) return;
    if (col >= 0 && col < n) {
      sys.matrix.add(row, col, v);
      return;
    }
    const detail::GhostRow* ghost = nullptr;
    if (col == -1) ghost = &lo1;
    else if (col == -2) ghost = &lo2;
    else if (col == n) ghost = &hi1;
    else if (col == n + 1) ghost = &hi2;
    else throw std::invalid_argument("assemble: stencil reaches past the ghost layer");
    for (int k = 0; k < 4; ++k) {
      sys.matrix.add(row, ghost->cols[k], v * ghost->coef[k]);
    }
    // known boundary data moves to the right-hand side
    sys.rhs_adjustment[row] -= v * ghost->bc_coef * phi_b;
  };

  for (int i = 0; i < n; ++i) {
    // mass term <rho phi>_i = <rho>_i <phi>_i + (dx^2/12) rho^G_i phi^G_i
    add_coef(i, i, rho[i]);
    const double mass_c = (dx * dx / 12.0) * rho_grad[i] / (48.0 * dx);
    add_coef(i, i - 2, 5.0 * mass_c);
    add_coef(i, i - 1, -34.0 * mass_c);
    add_coef(i, i + 1, 34.0 * mass_c);
    add_coef(i, i + 2, -5.0 * mass_c);

    if (dt_coeff != 0.0) {
      // -dt_coeff * (D~ grad~ |_{i+1/2} - D~ grad~ |_{i-1/2}) / dx;
      // grad~ at face f uses cells f-2..f+1 with weights (1,-15,15,-1)/(12 dx)
      for (int side = 0; side < 2; ++side) {
        const int f = i + 1 - side;  // faces i+1 and i
        const double sign = side == 0 ? -1.0 : 1.0;
        const double c = sign * dt_coeff * face_coefficients[f] / (12.0 * dx * dx);
        add_coef(i, f - 2, c * 1.0);
        add_coef(i, f - 1, c * -15.0);
        add_coef(i, f, c * 15.0);
        add_coef(i, f + 1, c * -1.0);
      }
    }
  }
  return sys;
}

}  // namespace misdc::linalg
