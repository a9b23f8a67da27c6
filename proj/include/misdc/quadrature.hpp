#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace misdc {

/// Gauss-Lobatto substep nodes and integration weights for one timestep.
///
/// Nodes are stored as fractions tau in [0,1] of the step, so one NodeSet is
/// reusable across timesteps of any size. Row m of `weights` integrates the
/// degree-M interpolating polynomial over the substep [tau_m, tau_{m+1}]:
///
///   I_m^{m+1}[F] = dt * sum_j weights[m][j] * F(t^j).
struct NodeSet {
  std::vector<double> nodes;                         // tau_0 .. tau_M
  std::vector<std::vector<double>> weights;          // M rows x (M+1) cols

  int node_count() const { return static_cast<int>(nodes.size()); }
  int substep_count() const { return static_cast<int>(nodes.size()) - 1; }
  double substep_width(int m) const { return nodes[m + 1] - nodes[m]; }

  static NodeSet lobatto(int node_count);
};

/// Offsets of the Gauss-Lobatto rule on [0,1]. The first node is 0 and the
/// last is 1 for every count.
std::vector<double> lobatto_nodes(int node_count);

/// Substep weights w[m][j] obtained by exact integration of the Lagrange
/// basis polynomials of `nodes` over each [tau_m, tau_{m+1}].
std::vector<std::vector<double>> substep_weights(const std::vector<double>& nodes);

namespace detail {

inline void validate_nodes(const std::vector<double>& nodes) {
  if (nodes.size() < 2) {
    throw std::invalid_argument("node set needs at least 2 nodes");
  }
  if (nodes.front() != 0.0 || nodes.back() != 1.0) {
    throw std::invalid_argument("nodes must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (!(nodes[i] < nodes[i + 1])) {
      throw std::invalid_argument("nodes must be strictly increasing");
    }
  }
}

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<long double, long double> legendre(int n, long double x) {
  long double p0 = 1.0L, p1 = x;
  if (n == 0) return {1.0L, 0.0L};
  for (int k = 2; k <= n; ++k) {
    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
  return {p1, dp};
}

}  // namespace detail

inline std::vector<double> lobatto_nodes(int node_count) {
  if (node_count < 2) {
    throw std::invalid_argument("lobatto_nodes: node_count must be >= 2");
  }
  if (node_count == 2) return {0.0, 1.0};
  if (node_count == 3) return {0.0, 0.5, 1.0};

  // Interior Lobatto abscissae on [-1,1] are the roots of P'_{M}, M = count-1.
  // Newton iteration from Chebyshev-Gauss-Lobatto initial guesses.
  const int m = node_count - 1;
  std::vector<long double> x(node_count);
  x.front() = -1.0L;
  x.back() = 1.0L;
  for (int i = 1; i < m; ++i) {
    long double xi = -std::cos(static_cast<long double>(std::numbers::pi_v<long double>) * i / m);
    for (int it = 0; it < 100; ++it) {
      // f = P'_m(xi); f' from the Legendre ODE:
      // (1-x^2) P_m'' = 2x P_m' - m(m+1) P_m
      const auto [p, dp] = detail::legendre(m, xi);
      const long double d2p = (2.0L * xi * dp - m * (m + 1) * p) / (1.0L - xi * xi);
      const long double step = dp / d2p;
      xi -= step;
      if (std::abs(static_cast<double>(step)) < 1e-18) break;
    }
    x[i] = xi;
  }
  // Map [-1,1] -> [0,1], pinning the endpoints exactly.
  std::vector<double> tau(node_count);
  for (int i = 0; i < node_count; ++i) {
    tau[i] = static_cast<double>(0.5L * (x[i] + 1.0L));
  }
  tau.front() = 0.0;
  tau.back() = 1.0;
  return tau;
}

inline std::vector<std::vector<double>> substep_weights(
    const std::vector<double>& nodes) {
  detail::validate_nodes(nodes);
  const int count = static_cast<int>(nodes.size());

  // Closed forms for the two rules the sweeps use, so golden values are exact.
  if (count == 2) {
    return {{0.5, 0.5}};  // trapezoidal rule
  }
  if (count == 3) {
    return {{5.0 / 24.0, 8.0 / 24.0, -1.0 / 24.0},
            {-1.0 / 24.0, 8.0 / 24.0, 5.0 / 24.0}};
  }

  // General path: expand each Lagrange basis polynomial in monomials and
  // integrate the antiderivative between consecutive nodes. Extended
  // precision keeps the monomial-basis roundoff below double epsilon.
  const int m = count - 1;
  std::vector<std::vector<double>> w(m, std::vector<double>(count, 0.0));
  for (int j = 0; j < count; ++j) {
    std::vector<long double> poly{1.0L};  // coefficients, low order first
    for (int l = 0; l < count; ++l) {
      if (l == j) continue;
      const long double scale =
          1.0L / (static_cast<long double>(nodes[j]) - nodes[l]);
      std::vector<long double> next(poly.size() + 1, 0.0L);
      for (std::size_t p = 0; p < poly.size(); ++p) {
        next[p] += poly[p] * (-static_cast<long double>(nodes[l])) * scale;
        next[p + 1] += poly[p] * scale;
      }
      poly = std::move(next);
    }
    auto antiderivative_at = [&poly](long double t) {
      // integral of c_p t^p is c_p t^{p+1}/(p+1)
      long double acc = 0.0L;
      long double power = t;
      for (std::size_t p = 0; p < poly.size(); ++p) {
        acc += poly[p] * power / static_cast<long double>(p + 1);
        power *= t;
      }
      return acc;
    };
    for (int row = 0; row < m; ++row) {
      w[row][j] = static_cast<double>(antiderivative_at(nodes[row + 1]) -
                                      antiderivative_at(nodes[row]));
    }
  }
  return w;
}

inline NodeSet NodeSet::lobatto(int node_count) {
  NodeSet set;
  set.nodes = lobatto_nodes(node_count);
  set.weights = substep_weights(set.nodes);
  return set;
}

}  // namespace misdc
