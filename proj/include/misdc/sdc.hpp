#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "misdc/errors.hpp"
#include "misdc/quadrature.hpp"

namespace misdc {

/// Solution vector at one temporal node.
using State = std::vector<double>;

/// The three-way splitting F = F_A + F_D + F_R together with the implicit
/// solves the correction equations need.
///
/// solve_AD(rhs, c, m) returns x with  x - c * F_D(x) = rhs,
/// solve_R(rhs, c, guess) returns x with  x - c * F_R(x) = rhs,
/// each to the operator's configured tolerance.
template <class Ops>
concept SplitOperator =
    requires(const Ops& ops, const State& s, double c, int m) {
      { ops.eval_A(s, m) } -> std::same_as<State>;
      { ops.eval_D(s, m) } -> std::same_as<State>;
      { ops.eval_R(s) } -> std::same_as<State>;
      { ops.solve_AD(s, c, m) } -> std::same_as<State>;
      { ops.solve_R(s, c, s) } -> std::same_as<State>;
    };

/// The two-index solution lattice phi[k][m] over correction iterations k and
/// temporal nodes m, with the split tendencies cached per (k, m).
///
/// States produced by misdc_step satisfy phi[k][0] == phi_n for all k and
/// phi[0][m] == phi_n for all m. sdc_seed builds lattices with arbitrary
/// iterate-0 node values; the analysis module uses that to probe single
/// sweeps on basis perturbations.
struct SdcState {
  NodeSet nodes;
  double dt = 0.0;
  std::vector<std::vector<State>> phi;     // phi[k][m]
  std::vector<std::vector<State>> f_adv;   // F_A(phi[k][m])
  std::vector<std::vector<State>> f_diff;  // F_D(phi[k][m])
  std::vector<std::vector<State>> f_reac;  // F_R(phi[k][m])

  int iteration_count() const { return static_cast<int>(phi.size()) - 1; }
  int node_count() const { return nodes.node_count(); }
  const State& solution() const { return phi.back().back(); }
};

namespace detail {

inline State weighted_tendency_sum(const SdcState& st, int k, int m) {
  // I_m^{m+1}[F(phi^{(k)})] = dt * sum_j w[m][j] (F_A + F_D + F_R)(phi^{j,(k)})
  const auto& w = st.nodes.weights[m];
  const std::size_t n = st.phi[0][0].size();
  State acc(n, 0.0);
  for (int j = 0; j < st.node_count(); ++j) {
    const double c = st.dt * w[j];
    const State& fa = st.f_adv[k][j];
    const State& fd = st.f_diff[k][j];
    const State& fr = st.f_reac[k][j];
    for (std::size_t i = 0; i < n; ++i) {
      acc[i] += c * (fa[i] + fd[i] + fr[i]);
    }
  }
  return acc;
}

inline double max_abs_diff(const State& u, const State& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    m = std::max(m, std::abs(u[i] - v[i]));
  }
  return m;
}

}  // namespace detail

/// Lattice with iterate 0 holding the given node values (node_values[m] is
/// the value at temporal node m; node_values[0] is phi_n).
template <class Ops>
  requires SplitOperator<Ops>
SdcState sdc_seed(const std::vector<State>& node_values, double dt,
                  const Ops& ops, const NodeSet& nodes) {
  detail::validate_nodes(nodes.nodes);
  if (static_cast<int>(nodes.weights.size()) != nodes.substep_count()) {
    throw std::invalid_argument("sdc_seed: node set lacks its weight rows");
  }
  for (const auto& row : nodes.weights) {
    if (static_cast<int>(row.size()) != nodes.node_count()) {
      throw std::invalid_argument("sdc_seed: malformed weight row");
    }
  }
  if (static_cast<int>(node_values.size()) != nodes.node_count()) {
    throw std::invalid_argument("sdc_seed: one value per temporal node required");
  }
  if (node_values[0].empty()) {
    throw std::invalid_argument("sdc_seed: empty state");
  }
  SdcState st;
  st.nodes = nodes;
  st.dt = dt;
  st.phi.push_back(node_values);
  st.f_adv.emplace_back();
  st.f_diff.emplace_back();
  st.f_reac.emplace_back();
  for (int m = 0; m < nodes.node_count(); ++m) {
    st.f_adv[0].push_back(ops.eval_A(node_values[m], m));
    st.f_diff[0].push_back(ops.eval_D(node_values[m], m));
    st.f_reac[0].push_back(ops.eval_R(node_values[m]));
  }
  return st;
}

/// Lattice initialised the way a timestep starts: every node of iterate 0 is
/// a copy of phi_n.
template <class Ops>
  requires SplitOperator<Ops>
SdcState sdc_initialize(const State& phi_n, double dt, const Ops& ops,
                        const NodeSet& nodes) {
  return sdc_seed(std::vector<State>(nodes.node_count(), phi_n), dt, ops, nodes);
}

/// One MISDC correction sweep: appends iterate k+1 to the lattice.
///
/// Per substep m, forms the advection-diffusion right-hand side
///   phi^{m,(k+1)} + dt^m (F_A(phi^{m,(k+1)}) - F_A(phi^{m,(k)})
///                         - F_D(phi^{m+1,(k)})) + I_m^{m+1}[F^{(k)}],
/// solves for the provisional phi_AD^{m+1,(k+1)}, then adds
///   dt^m (F_D(phi_AD^{m+1,(k+1)}) - F_R(phi^{m+1,(k)}))
/// and solves the reaction correction with the previous iterate as the
/// Newton initial guess. The provisional advection state is never formed.
/// F values of iterate k are read from the cache, never recomputed.
template <class Ops>
  requires SplitOperator<Ops>
void sdc_sweep(SdcState& st, const Ops& ops) {
  const int k = st.iteration_count();  // previous iterate index
  const int node_count = st.node_count();
  const std::size_t n = st.phi[0][0].size();

  st.phi.emplace_back(node_count);
  st.f_adv.emplace_back(node_count);
  st.f_diff.emplace_back(node_count);
  st.f_reac.emplace_back(node_count);
  auto& phi_new = st.phi[k + 1];
  auto& fa_new = st.f_adv[k + 1];
  auto& fd_new = st.f_diff[k + 1];
  auto& fr_new = st.f_reac[k + 1];

  // Node 0 never changes within the step.
  phi_new[0] = st.phi[k][0];
  fa_new[0] = st.f_adv[k][0];
  fd_new[0] = st.f_diff[k][0];
  fr_new[0] = st.f_reac[k][0];

  for (int m = 0; m + 1 < node_count; ++m) {
    const double dtm = st.dt * st.nodes.substep_width(m);
    State rhs = detail::weighted_tendency_sum(st, k, m);
    {
      const State& fa_here = fa_new[m];
      const State& fa_prev = st.f_adv[k][m];
      const State& fd_lag = st.f_diff[k][m + 1];
      const State& base = phi_new[m];
      for (std::size_t i = 0; i < n; ++i) {
        rhs[i] += base[i] + dtm * (fa_here[i] - fa_prev[i] - fd_lag[i]);
      }
    }

    State phi_ad;
    try {
      phi_ad = ops.solve_AD(rhs, dtm, m + 1);
    } catch (...) {
      std::throw_with_nested(SweepSolveError(
          "diffusion correction solve failed at node " + std::to_string(m + 1) +
              ", iteration " + std::to_string(k + 1),
          m + 1, k + 1));
    }

    // F_D at the provisional state follows from the solve identity
    // phi_AD - dtm * F_D(phi_AD) = rhs, so no extra operator application.
    {
      const State& fr_lag = st.f_reac[k][m + 1];
      for (std::size_t i = 0; i < n; ++i) {
        const double fd_ad = (phi_ad[i] - rhs[i]) / dtm;
        rhs[i] += dtm * (fd_ad - fr_lag[i]);
      }
    }

    try {
      phi_new[m + 1] = ops.solve_R(rhs, dtm, st.phi[k][m + 1]);
    } catch (...) {
      std::throw_with_nested(SweepSolveError(
          "reaction correction solve failed at node " + std::to_string(m + 1) +
              ", iteration " + std::to_string(k + 1),
          m + 1, k + 1));
    }

    fa_new[m + 1] = ops.eval_A(phi_new[m + 1], m + 1);
    fd_new[m + 1] = ops.eval_D(phi_new[m + 1], m + 1);
    fr_new[m + 1] = ops.eval_R(phi_new[m + 1]);
  }
}

/// Max over nodes of the infinity norm of phi[k][m] - phi[k-1][m].
inline double iterate_residual(const SdcState& st, int k) {
  if (k < 1 || k > st.iteration_count()) {
    throw std::invalid_argument("iterate_residual: need 1 <= k <= iterations");
  }
  double r = 0.0;
  for (int m = 0; m < st.node_count(); ++m) {
    r = std::max(r, detail::max_abs_diff(st.phi[k][m], st.phi[k - 1][m]));
  }
  return r;
}

using SweepCallback = std::function<void(const SdcState&, int /*iteration*/)>;

/// Advance phi_n by one timestep of size dt with `sweep_count` MISDC
/// correction iterations; returns the final-node value of the last iterate.
/// `on_sweep`, when set, runs after each completed sweep.
template <class Ops>
  requires SplitOperator<Ops>
State misdc_step(const State& phi_n, double dt, const Ops& ops,
                 const NodeSet& nodes, int sweep_count,
                 const SweepCallback& on_sweep = {}) {
  if (sweep_count < 1) {
    throw std::invalid_argument("misdc_step: sweep_count must be >= 1");
  }
  SdcState st = sdc_initialize(phi_n, dt, ops, nodes);
  for (int k = 0; k < sweep_count; ++k) {
    sdc_sweep(st, ops);
    if (on_sweep) on_sweep(st, k + 1);
  }
  return st.solution();
}

/// Correction sweeps for an evolution equation containing only advection:
///   phi^{m+1,(k+1)} = phi^{m,(k+1)}
///                   + dt^m (F_A(phi^{m,(k+1)}) - F_A(phi^{m,(k)}))
///                   + I_m^{m+1}[F_A(phi^{(k)})].
/// `eval_A` has signature State(const State&, int node).
template <class EvalA>
State sdc_advect_step(const State& phi_n, double dt, EvalA&& eval_A,
                      const NodeSet& nodes, int sweep_count) {
  if (sweep_count < 1) {
    throw std::invalid_argument("sdc_advect_step: sweep_count must be >= 1");
  }
  const int node_count = nodes.node_count();
  const std::size_t n = phi_n.size();

  std::vector<State> phi_prev(node_count, phi_n);
  std::vector<State> fa_prev(node_count);
  for (int m = 0; m < node_count; ++m) fa_prev[m] = eval_A(phi_n, m);

  for (int k = 0; k < sweep_count; ++k) {
    std::vector<State> phi_new(node_count);
    std::vector<State> fa_new(node_count);
    phi_new[0] = phi_prev[0];
    fa_new[0] = fa_prev[0];
    for (int m = 0; m + 1 < node_count; ++m) {
      const double dtm = dt * nodes.substep_width(m);
      State next = phi_new[m];
      for (std::size_t i = 0; i < n; ++i) {
        next[i] += dtm * (fa_new[m][i] - fa_prev[m][i]);
      }
      const auto& w = nodes.weights[m];
      for (int j = 0; j < node_count; ++j) {
        const double c = dt * w[j];
        for (std::size_t i = 0; i < n; ++i) next[i] += c * fa_prev[j][i];
      }
      phi_new[m + 1] = std::move(next);
      fa_new[m + 1] = eval_A(phi_new[m + 1], m + 1);
    }
    phi_prev = std::move(phi_new);
    fa_prev = std::move(fa_new);
  }
  return phi_prev.back();
}

}  // namespace misdc
