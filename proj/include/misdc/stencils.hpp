#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misdc/errors.hpp"

namespace misdc::fv {

/// Dirichlet value imposed at the inflow face.
struct DirichletBc {
  double value = 0.0;
};

/// Homogeneous Neumann condition at the outflow face.
struct NeumannBc {};

/// Uniform 1-D cell mesh. Inflow (Dirichlet) at x_lo, outflow (homogeneous
/// Neumann) at x_hi. Every stencil in this toolkit needs four interior
/// values, hence n >= 4.
class Grid1D {
 public:
  Grid1D(int cell_count, double x_lo, double x_hi, DirichletBc bc_lo,
         NeumannBc bc_hi = {})
      : n_(cell_count),
        x_lo_(x_lo),
        x_hi_(x_hi),
        dx_((x_hi - x_lo) / cell_count),
        bc_lo_(bc_lo),
        bc_hi_(bc_hi) {
    if (cell_count < 4) {
      throw std::invalid_argument("Grid1D: need at least 4 cells");
    }
    if (!(x_hi > x_lo)) {
      throw std::invalid_argument("Grid1D: x_hi must exceed x_lo");
    }
  }

  int cell_count() const { return n_; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  double dx() const { return dx_; }
  double face(int i) const { return x_lo_ + i * dx_; }
  double cell_center(int i) const { return x_lo_ + (i + 0.5) * dx_; }
  const DirichletBc& bc_lo() const { return bc_lo_; }
  const NeumannBc& bc_hi() const { return bc_hi_; }

 private:
  int n_;
  double x_lo_, x_hi_, dx_;
  DirichletBc bc_lo_;
  NeumannBc bc_hi_;
};

enum class CellKind { Average, Center };

/// Cell data tagged at the type level as averages <phi> or point values
/// phi-hat; the two representations differ at fourth order and must never be
/// mixed silently.
template <CellKind Kind>
class CellField {
 public:
  CellField() = default;
  explicit CellField(std::vector<double> values) : v_(std::move(values)) {}
  explicit CellField(std::size_t n, double fill = 0.0) : v_(n, fill) {}

  static constexpr CellKind kind() { return Kind; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

 private:
  std::vector<double> v_;
};

using AvgField = CellField<CellKind::Average>;
using CenterField = CellField<CellKind::Center>;

/// Face values phi-tilde; n+1 entries for n cells, face i at x_lo + i*dx.
class FaceField {
 public:
  FaceField() = default;
  explicit FaceField(std::vector<double> values) : v_(std::move(values)) {}
  explicit FaceField(std::size_t n_faces, double fill = 0.0) : v_(n_faces, fill) {}

  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> values() const { return v_; }
  const std::vector<double>& raw() const { return v_; }

 private:
  std::vector<double> v_;
};

/// Two extrapolated exterior values, ordered outward from the boundary:
/// `inner` is the cell adjacent to the domain, `outer` the one beyond it.
struct GhostPair {
  double inner = 0.0;
  double outer = 0.0;
};

/// Explicit ghost data for one field, lo then hi side.
struct GhostCells {
  GhostPair lo;
  GhostPair hi;
};

namespace detail {

inline void need4(std::span<const double> v, const char* where) {
  if (v.size() != 4) {
    throw std::invalid_argument(std::string(where) +
                                ": exactly 4 interior values required");
  }
}

}  // namespace detail

/// Inflow ghosts from the Dirichlet face value and the first four interior
/// cell averages (ordered from the boundary inward).
inline GhostPair ghost_inflow_avg(double bc_value,
                                  std::span<const double> interior) {
  detail::need4(interior, "ghost_inflow_avg");
  const double a0 = interior[0], a1 = interior[1], a2 = interior[2],
               a3 = interior[3];
  return {(60.0 * bc_value - 77.0 * a0 + 43.0 * a1 - 17.0 * a2 + 3.0 * a3) / 12.0,
          (300.0 * bc_value - 505.0 * a0 + 335.0 * a1 - 145.0 * a2 + 27.0 * a3) / 12.0};
}

/// Inflow ghosts for cell-centred data.
inline GhostPair ghost_inflow_center(double bc_value,
                                     std::span<const double> interior) {
  detail::need4(interior, "ghost_inflow_center");
  const double b0 = interior[0], b1 = interior[1], b2 = interior[2],
               b3 = interior[3];
  return {(128.0 * bc_value - 140.0 * b0 + 70.0 * b1 - 28.0 * b2 + 5.0 * b3) / 35.0,
          (128.0 * bc_value - 210.0 * b0 + 140.0 * b1 - 63.0 * b2 + 12.0 * b3) / 7.0};
}

/// Outflow (homogeneous Neumann) ghosts from the last four interior cell
/// averages (ordered from the boundary inward).
inline GhostPair ghost_outflow_avg(std::span<const double> interior) {
  detail::need4(interior, "ghost_outflow_avg");
  const double a0 = interior[0], a1 = interior[1], a2 = interior[2],
               a3 = interior[3];
  return {(5.0 * a0 + 9.0 * a1 - 5.0 * a2 + a3) / 10.0,
          (-15.0 * a0 + 29.0 * a1 - 15.0 * a2 + 3.0 * a3) / 2.0};
}

/// Outflow ghosts for cell-centred data.
inline GhostPair ghost_outflow_center(std::span<const double> interior) {
  detail::need4(interior, "ghost_outflow_center");
  const double b0 = interior[0], b1 = interior[1], b2 = interior[2],
               b3 = interior[3];
  return {(17.0 * b0 + 9.0 * b1 - 5.0 * b2 + b3) / 22.0,
          (-135.0 * b0 + 265.0 * b1 - 135.0 * b2 + 27.0 * b3) / 22.0};
}

namespace detail {

template <CellKind Kind>
GhostCells ghosts_from_bc(const CellField<Kind>& f, const Grid1D& grid) {
  if (static_cast<int>(f.size()) != grid.cell_count()) {
    throw std::invalid_argument("field size does not match the grid");
  }
  const auto v = f.values();
  const std::array<double, 4> lo4{v[0], v[1], v[2], v[3]};
  const std::size_t n = f.size();
  const std::array<double, 4> hi4{v[n - 1], v[n - 2], v[n - 3], v[n - 4]};
  if constexpr (Kind == CellKind::Average) {
    return {ghost_inflow_avg(grid.bc_lo().value, lo4), ghost_outflow_avg(hi4)};
  } else {
    return {ghost_inflow_center(grid.bc_lo().value, lo4),
            ghost_outflow_center(hi4)};
  }
}

// Field contents with two ghost cells on each side; pad[i + 2] is cell i.
template <CellKind Kind>
std::vector<double> padded(const CellField<Kind>& f, const GhostCells& g) {
  if (f.size() < 4) {
    throw std::invalid_argument("padded field needs at least 4 cells");
  }
  std::vector<double> p(f.size() + 4);
  p[0] = g.lo.outer;
  p[1] = g.lo.inner;
  std::copy(f.values().begin(), f.values().end(), p.begin() + 2);
  p[p.size() - 2] = g.hi.inner;
  p[p.size() - 1] = g.hi.outer;
  return p;
}

}  // namespace detail

/// phi-hat_i = <phi>_i - (<phi>_{i-1} - 2<phi>_i + <phi>_{i+1}) / 24.
inline CenterField avg_to_center(const AvgField& f, const GhostCells& g) {
  const auto p = detail::padded(f, g);
  CenterField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = i + 2;
    out[i] = p[c] - (p[c - 1] - 2.0 * p[c] + p[c + 1]) / 24.0;
  }
  return out;
}

inline CenterField avg_to_center(const AvgField& f, const Grid1D& grid) {
  return avg_to_center(f, detail::ghosts_from_bc(f, grid));
}

/// <phi>_i = phi-hat_i + (phi-hat_{i-1} - 2 phi-hat_i + phi-hat_{i+1}) / 24.
inline AvgField center_to_avg(const CenterField& f, const GhostCells& g) {
  const auto p = detail::padded(f, g);
  AvgField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = i + 2;
    out[i] = p[c] + (p[c - 1] - 2.0 * p[c] + p[c + 1]) / 24.0;
  }
  return out;
}

inline AvgField center_to_avg(const CenterField& f, const Grid1D& grid) {
  return center_to_avg(f, detail::ghosts_from_bc(f, grid));
}

/// Face values from cell averages:
/// phi-tilde_{i+1/2} = (-<phi>_{i-1} + 7<phi>_i + 7<phi>_{i+1} - <phi>_{i+2}) / 12.
inline FaceField avg_to_face(const AvgField& f, const GhostCells& g) {
  const auto p = detail::padded(f, g);
  FaceField out(f.size() + 1);
  for (std::size_t face = 0; face <= f.size(); ++face) {
    const std::size_t c = face + 2;  // cell to the right of the face
    out[face] = (-p[c - 2] + 7.0 * p[c - 1] + 7.0 * p[c] - p[c + 1]) / 12.0;
  }
  return out;
}

inline FaceField avg_to_face(const AvgField& f, const Grid1D& grid) {
  return avg_to_face(f, detail::ghosts_from_bc(f, grid));
}

/// Face values from cell centres:
/// phi-tilde_{i+1/2} = (-phi-hat_{i-1} + 9 phi-hat_i + 9 phi-hat_{i+1} - phi-hat_{i+2}) / 16.
inline FaceField center_to_face(const CenterField& f, const GhostCells& g) {
  const auto p = detail::padded(f, g);
  FaceField out(f.size() + 1);
  for (std::size_t face = 0; face <= f.size(); ++face) {
    const std::size_t c = face + 2;
    out[face] = (-p[c - 2] + 9.0 * p[c - 1] + 9.0 * p[c] - p[c + 1]) / 16.0;
  }
  return out;
}

inline FaceField center_to_face(const CenterField& f, const Grid1D& grid) {
  return center_to_face(f, detail::ghosts_from_bc(f, grid));
}

/// Fourth-order gradient at faces:
/// (<phi>_{i-1} - 15<phi>_i + 15<phi>_{i+1} - <phi>_{i+2}) / (12 dx).
inline FaceField face_gradient(const AvgField& f, const GhostCells& g, double dx) {
  const auto p = detail::padded(f, g);
  FaceField out(f.size() + 1);
  for (std::size_t face = 0; face <= f.size(); ++face) {
    const std::size_t c = face + 2;
    // difference grouping: constants cancel exactly
    out[face] =
        ((p[c - 2] - p[c + 1]) + 15.0 * (p[c] - p[c - 1])) / (12.0 * dx);
  }
  return out;
}

inline FaceField face_gradient(const AvgField& f, const Grid1D& grid) {
  return face_gradient(f, detail::ghosts_from_bc(f, grid), grid.dx());
}

/// Cell gradient entering the product and quotient corrections:
/// phi^G_i = (5<phi>_{i-2} - 34<phi>_{i-1} + 34<phi>_{i+1} - 5<phi>_{i+2}) / (48 dx).
inline AvgField cell_gradient(const AvgField& f, const GhostCells& g, double dx) {
  const auto p = detail::padded(f, g);
  AvgField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = i + 2;
    out[i] = (5.0 * (p[c - 2] - p[c + 2]) + 34.0 * (p[c + 1] - p[c - 1])) /
             (48.0 * dx);
  }
  return out;
}

inline AvgField cell_gradient(const AvgField& f, const Grid1D& grid) {
  return cell_gradient(f, detail::ghosts_from_bc(f, grid), grid.dx());
}

namespace detail {

inline AvgField product_from_gradients(const AvgField& phi, const AvgField& pg,
                                       const AvgField& psi, const AvgField& qg,
                                       double dx) {
  const double c = dx * dx / 12.0;
  AvgField out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out[i] = phi[i] * psi[i] + c * pg[i] * qg[i];
  }
  return out;
}

}  // namespace detail

/// <phi psi>_i = <phi>_i <psi>_i + (dx^2/12) phi^G_i psi^G_i.
/// The grid overload derives both fields' ghosts from the grid bc; when the
/// two fields carry different boundary data, pass their ghosts explicitly.
inline AvgField product_avg(const AvgField& phi, const AvgField& psi,
                            const Grid1D& grid) {
  return detail::product_from_gradients(phi, cell_gradient(phi, grid), psi,
                                        cell_gradient(psi, grid), grid.dx());
}

inline AvgField product_avg(const AvgField& phi, const GhostCells& phi_ghosts,
                            const AvgField& psi, const GhostCells& psi_ghosts,
                            double dx) {
  return detail::product_from_gradients(phi, cell_gradient(phi, phi_ghosts, dx),
                                        psi, cell_gradient(psi, psi_ghosts, dx),
                                        dx);
}

constexpr double kQuotientThreshold = 1e-30;

/// <phi/psi>_i = <phi>_i/<psi>_i
///             + (dx^2/12) (<phi>_i (psi^G_i)^2 / <psi>_i^3
///                          - phi^G_i psi^G_i / <psi>_i^2).
namespace detail {

inline AvgField quotient_from_gradients(const AvgField& phi, const AvgField& pg,
                                        const AvgField& psi, const AvgField& qg,
                                        double dx) {
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) < kQuotientThreshold) {
      throw SingularInputError(
          "quotient_avg: denominator average vanishes at cell " +
              std::to_string(i),
          static_cast<int>(i));
    }
  }
  const double c = dx * dx / 12.0;
  AvgField out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double inv = 1.0 / psi[i];
    out[i] = phi[i] * inv +
             c * (phi[i] * qg[i] * qg[i] * inv * inv * inv -
                  pg[i] * qg[i] * inv * inv);
  }
  return out;
}

}  // namespace detail

inline AvgField quotient_avg(const AvgField& phi, const AvgField& psi,
                             const Grid1D& grid) {
  return detail::quotient_from_gradients(phi, cell_gradient(phi, grid), psi,
                                         cell_gradient(psi, grid), grid.dx());
}

inline AvgField quotient_avg(const AvgField& phi, const GhostCells& phi_ghosts,
                             const AvgField& psi, const GhostCells& psi_ghosts,
                             double dx) {
  return detail::quotient_from_gradients(
      phi, cell_gradient(phi, phi_ghosts, dx), psi,
      cell_gradient(psi, psi_ghosts, dx), dx);
}

/// <div(U phi)>_i = (U~ phi~ |_{i+1/2} - U~ phi~ |_{i-1/2}) / dx.
inline AvgField flux_divergence(const FaceField& velocity,
                                const FaceField& phi, const Grid1D& grid) {
  if (velocity.size() != phi.size() ||
      static_cast<int>(phi.size()) != grid.cell_count() + 1) {
    throw std::invalid_argument("flux_divergence: need n+1 face values");
  }
  AvgField out(grid.cell_count());
  for (int i = 0; i < grid.cell_count(); ++i) {
    out[static_cast<std::size_t>(i)] =
        (velocity[i + 1] * phi[i + 1] - velocity[i] * phi[i]) / grid.dx();
  }
  return out;
}

/// Face velocities from U~_{i+1/2} - U~_{i-1/2} = <S>_i dx, anchored at the
/// inflow face.
inline FaceField integrate_constraint(const AvgField& source,
                                      double inflow_velocity,
                                      const Grid1D& grid) {
  if (static_cast<int>(source.size()) != grid.cell_count()) {
    throw std::invalid_argument("integrate_constraint: field/grid mismatch");
  }
  FaceField u(grid.cell_count() + 1);
  u[0] = inflow_velocity;
  for (int i = 0; i < grid.cell_count(); ++i) {
    u[i + 1] = u[i] + source[static_cast<std::size_t>(i)] * grid.dx();
  }
  return u;
}

}  // namespace misdc::fv
