#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misdc/errors.hpp"
#include "misdc/linalg.hpp"
#include "misdc/quadrature.hpp"
#include "misdc/sdc.hpp"

namespace misdc::pde {

/// Benchmark advection-diffusion-reaction problem
///   phi_t = a phi_x + d phi_xx + r phi (phi - 1)(phi - 1/2)
/// on [x_lo, x_hi] with phi = bc_lo at the left boundary and phi = bc_hi at
/// the right, advanced with MISDC sweeps on Gauss-Lobatto nodes.
struct TestPdeConfig {
  double advection_speed = -0.1;  // a
  double diffusivity = 1.0;       // d
  double reaction_rate = -10.0;   // r
  int resolution = 200;           // n gridpoints; spacing (x_hi - x_lo)/n
  double cfl = 0.5;               // dt = cfl * dx
  double final_time = 1.0;
  int sweep_count = 4;            // K
  int node_count = 3;
  double x_lo = 0.0;
  double x_hi = 20.0;
  double bc_lo = 1.0;
  double bc_hi = 0.0;
  int max_newton_iters = 50;
  double newton_tol = 1e-14;

  void validate() const {
    if (resolution < 8) throw std::invalid_argument("TestPdeConfig: resolution must be >= 8");
    if (final_time < 0.0) throw std::invalid_argument("TestPdeConfig: final_time must be >= 0");
    if (sweep_count < 1) throw std::invalid_argument("TestPdeConfig: sweep_count must be >= 1");
    if (node_count < 2) throw std::invalid_argument("TestPdeConfig: node_count must be >= 2");
    if (!(cfl > 0.0)) throw std::invalid_argument("TestPdeConfig: cfl must be positive");
    if (!(x_hi > x_lo)) throw std::invalid_argument("TestPdeConfig: empty domain");
  }
};

struct NewtonSolveReport {
  State state;
  int iterations_max = 0;
  double residual_max = 0.0;
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;               // time reached after the step
  int newton_iterations_max = 0;   // over all cells and sweeps in the step
  double newton_residual_max = 0.0;
  double state_min = 0.0;          // over the state after the step
  double state_max = 0.0;
  std::vector<double> sweep_residuals;  // iterate residual per sweep
};

struct SolveResult {
  State state;
  std::vector<StepDiagnostics> steps;
};

/// Method-of-lines discretisation of the benchmark.
///
/// The state holds point values at x_i = x_lo + i*dx, i = 0..n-1, so grids
/// nest under resolution doubling and coarse points coincide with every
/// second fine point. x_0 is pinned to bc_lo; the right boundary x_n = x_hi
/// is not stored and enters the stencils as known data, together with one
/// quartic-extrapolated ghost point beyond each boundary.
class TestPdeProblem {
 public:
  explicit TestPdeProblem(TestPdeConfig config) : cfg_(config) {
    cfg_.validate();
    dx_ = (cfg_.x_hi - cfg_.x_lo) / cfg_.resolution;
  }

  const TestPdeConfig& config() const { return cfg_; }
  double dx() const { return dx_; }
  int size() const { return cfg_.resolution; }
  double point(int i) const { return cfg_.x_lo + i * dx_; }

  /// tanh front evaluated pointwise; the pinned boundary entry carries the
  /// boundary value itself.
  State initial_condition() const {
    State phi(cfg_.resolution);
    for (int i = 0; i < cfg_.resolution; ++i) {
      phi[i] = 0.5 * (std::tanh(10.0 - 2.0 * point(i)) + 1.0);
    }
    phi[0] = cfg_.bc_lo;
    return phi;
  }

  /// a phi_x by the centred fourth-order difference.
  State advection_tendency(const State& phi) const {
    const auto p = padded(phi);
    State out(phi.size(), 0.0);
    const double c = cfg_.advection_speed / (12.0 * dx_);
    for (std::size_t i = 1; i < phi.size(); ++i) {
      const std::size_t k = i + 1;
      out[i] = c * ((p[k - 2] - p[k + 2]) + 8.0 * (p[k + 1] - p[k - 1]));
    }
    return out;
  }

  /// d phi_xx by the centred fourth-order difference.
  State diffusion_tendency(const State& phi) const {
    const auto p = padded(phi);
    State out(phi.size(), 0.0);
    const double c = cfg_.diffusivity / (12.0 * dx_ * dx_);
    for (std::size_t i = 1; i < phi.size(); ++i) {
      const std::size_t k = i + 1;
      out[i] = c * (16.0 * (p[k - 1] + p[k + 1]) - (p[k - 2] + p[k + 2]) -
                    30.0 * p[k]);
    }
    return out;
  }

  static double reaction_value(double phi, double r) {
    return r * phi * (phi - 1.0) * (phi - 0.5);
  }
  static double reaction_jacobian(double phi, double r) {
    return r * (3.0 * phi * phi - 3.0 * phi + 0.5);
  }

  State reaction_tendency(const State& phi) const {
    State out(phi.size(), 0.0);
    for (std::size_t i = 1; i < phi.size(); ++i) {
      out[i] = reaction_value(phi[i], cfg_.reaction_rate);
    }
    return out;
  }

  /// Solves (I - dt_coeff * D) phi = rhs over the interior points; the
  /// pinned entry passes through. Factorisations are cached per dt_coeff.
  State implicit_diffusion_solve(const State& rhs, double dt_coeff) const {
    check_size(rhs);
    if (dt_coeff == 0.0) return rhs;
    const auto& system = cached_system(dt_coeff);
    const int n = cfg_.resolution;
    std::vector<double> reduced(n - 1);
    for (int k = 0; k < n - 1; ++k) {
      reduced[k] = rhs[k + 1] + system.adjust_bc_lo[k] * rhs[0] +
                   system.adjust_bc_hi[k] * cfg_.bc_hi;
    }
    std::vector<double> x = system.factorization->solve(std::move(reduced));
    State out(rhs.size());
    out[0] = rhs[0];
    std::copy(x.begin(), x.end(), out.begin() + 1);
    return out;
  }

  /// Pointwise Newton for phi - dt_coeff * R(phi) = rhs with the analytic
  /// cubic Jacobian; residual max-norm must reach newton_tol.
  NewtonSolveReport implicit_reaction_solve(const State& rhs, double dt_coeff,
                                            const State& guess) const {
    check_size(rhs);
    check_size(guess);
    NewtonSolveReport report;
    report.state = rhs;
    if (dt_coeff == 0.0) return report;
    const double r = cfg_.reaction_rate;
    for (std::size_t i = 1; i < rhs.size(); ++i) {
      double y = guess[i];
      double f = y - dt_coeff * reaction_value(y, r) - rhs[i];
      int it = 0;
      while (std::abs(f) > cfg_.newton_tol) {
        if (it >= cfg_.max_newton_iters) {
          throw NonConvergenceError(
              "reaction Newton stalled at cell " + std::to_string(i) +
                  " with residual " + std::to_string(std::abs(f)),
              std::abs(f), static_cast<int>(i), it);
        }
        const double fp = 1.0 - dt_coeff * reaction_jacobian(y, r);
        if (std::abs(fp) < 1e-30) {
          throw NonConvergenceError(
              "reaction Newton hit a vanishing derivative at cell " +
                  std::to_string(i),
              std::abs(f), static_cast<int>(i), it);
        }
        y -= f / fp;
        f = y - dt_coeff * reaction_value(y, r) - rhs[i];
        ++it;
      }
      report.state[i] = y;
      report.iterations_max = std::max(report.iterations_max, it);
      report.residual_max = std::max(report.residual_max, std::abs(f));
    }
    return report;
  }

  /// Advance from t = 0 to final_time with dt = cfl * dx (last step clipped
  /// to land on final_time exactly).
  SolveResult solve() const {
    const NodeSet nodes = NodeSet::lobatto(cfg_.node_count);
    SolveResult result;
    result.state = initial_condition();
    const double dt = cfg_.cfl * dx_;
    double t = 0.0;
    int step = 0;
    while (t < cfg_.final_time) {
      const double remaining = cfg_.final_time - t;
      if (remaining <= dt * 1e-9) break;
      const double dt_step = std::min(dt, remaining);

      StepDiagnostics diag;
      diag.step = step;
      SweepOperator ops{this, &diag};
      try {
        result.state = misdc_step(
            result.state, dt_step, ops, nodes, cfg_.sweep_count,
            [&diag](const SdcState& st, int k) {
              diag.sweep_residuals.push_back(iterate_residual(st, k));
            });
      } catch (...) {
        std::throw_with_nested(
            TimeStepError("benchmark PDE advance failed at step " +
                              std::to_string(step),
                          step));
      }
      t += dt_step;
      diag.time = t;
      const auto [lo, hi] =
          std::minmax_element(result.state.begin(), result.state.end());
      diag.state_min = *lo;
      diag.state_max = *hi;
      result.steps.push_back(std::move(diag));
      ++step;
    }
    return result;
  }

 private:
  struct SweepOperator {
    const TestPdeProblem* problem;
    StepDiagnostics* diag;

    State eval_A(const State& s, int) const { return problem->advection_tendency(s); }
    State eval_D(const State& s, int) const { return problem->diffusion_tendency(s); }
    State eval_R(const State& s) const { return problem->reaction_tendency(s); }
    State solve_AD(const State& rhs, double c, int) const {
      return problem->implicit_diffusion_solve(rhs, c);
    }
    State solve_R(const State& rhs, double c, const State& guess) const {
      NewtonSolveReport rep = problem->implicit_reaction_solve(rhs, c, guess);
      diag->newton_iterations_max =
          std::max(diag->newton_iterations_max, rep.iterations_max);
      diag->newton_residual_max =
          std::max(diag->newton_residual_max, rep.residual_max);
      return std::move(rep.state);
    }
  };

  struct CachedDiffusionSystem {
    std::unique_ptr<linalg::BandedFactorization> factorization;
    // rhs coupling to the two known boundary values, per interior row
    std::vector<double> adjust_bc_lo;
    std::vector<double> adjust_bc_hi;
  };

  void check_size(const State& s) const {
    if (static_cast<int>(s.size()) != cfg_.resolution) {
      throw std::invalid_argument("TestPdeProblem: state size mismatch");
    }
  }

  // State extended by one entry on each side: the extrapolated ghost at
  // x_{-1}, then the stored points, then the boundary value at x_n and the
  // extrapolated ghost at x_{n+1}.
  std::vector<double> padded(const State& phi) const {
    const std::size_t n = phi.size();
    std::vector<double> p(n + 3);
    p[0] = 5.0 * phi[0] - 10.0 * phi[1] + 10.0 * phi[2] - 5.0 * phi[3] + phi[4];
    std::copy(phi.begin(), phi.end(), p.begin() + 1);
    p[n + 1] = cfg_.bc_hi;
    p[n + 2] = 5.0 * cfg_.bc_hi - 10.0 * phi[n - 1] + 10.0 * phi[n - 2] -
               5.0 * phi[n - 3] + phi[n - 4];
    return p;
  }

  const CachedDiffusionSystem& cached_system(double dt_coeff) const {
    auto it = systems_.find(dt_coeff);
    if (it != systems_.end()) return it->second;
    return systems_.emplace(dt_coeff, build_system(dt_coeff)).first->second;
  }

  // (I - c d Lap) over the interior unknowns phi_1..phi_{n-1}; known values
  // (the pinned left point, the right boundary value, and their ghost
  // contributions) are folded into per-row right-hand-side couplings.
  CachedDiffusionSystem build_system(double dt_coeff) const {
    const int n = cfg_.resolution;
    const int m = n - 1;  // unknowns
    linalg::BandedMatrix a(m);
    std::vector<double> adj_lo(m, 0.0), adj_hi(m, 0.0);
    const double c = dt_coeff * cfg_.diffusivity / (12.0 * dx_ * dx_);

    // quartic extrapolation rows for the two ghost points
    // p(-1) = 5 phi_0 - 10 phi_1 + 10 phi_2 - 5 phi_3 + phi_4
    // p(n+1) = 5 phi_n - 10 phi_{n-1} + 10 phi_{n-2} - 5 phi_{n-3} + phi_{n-4}
    const std::array<double, 5> ext{5.0, -10.0, 10.0, -5.0, 1.0};

    for (int p = 1; p <= n - 1; ++p) {
      const int row = p - 1;
      // accumulate the LHS coefficient of one stencil point; ghost points
      // expand into their extrapolation stencils
      std::function<void(int, double)> add_point = [&](int pt, double coef) {
        if (coef == 0.0) return;
        if (pt >= 1 && pt <= n - 1) {
          a.add(row, pt - 1, coef);
        } else if (pt == 0) {
          adj_lo[row] -= coef;  // known: pinned rhs[0]
        } else if (pt == n) {
          adj_hi[row] -= coef;  // known: bc_hi
        } else if (pt == -1) {
          for (int k = 0; k < 5; ++k) add_point(k, coef * ext[k]);
        } else if (pt == n + 1) {
          for (int k = 0; k < 5; ++k) add_point(n - k, coef * ext[k]);
        } else {
          throw std::invalid_argument("diffusion stencil out of range");
        }
      };

      add_point(p, 1.0);  // identity
      // -c * (-1, 16, -30, 16, -1) on points p-2..p+2
      add_point(p - 2, c);
      add_point(p - 1, -16.0 * c);
      add_point(p, 30.0 * c);
      add_point(p + 1, -16.0 * c);
      add_point(p + 2, c);
    }

    CachedDiffusionSystem sys;
    sys.factorization = std::make_unique<linalg::BandedFactorization>(a);
    sys.adjust_bc_lo = std::move(adj_lo);
    sys.adjust_bc_hi = std::move(adj_hi);
    return sys;
  }

  TestPdeConfig cfg_;
  double dx_ = 0.0;
  mutable std::map<double, CachedDiffusionSystem> systems_;
};

}  // namespace misdc::pde
