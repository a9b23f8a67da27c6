#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "misdc/errors.hpp"
#include "misdc/sdc.hpp"

namespace misdc::analysis {

/// Scalar linear model problem phi_t = a phi + d phi + r phi with the three
/// terms standing in for advection, diffusion, and reaction.
struct ScalarLinearOps {
  double a = 0.0;
  double d = 0.0;
  double r = 0.0;

  State eval_A(const State& s, int) const { return {a * s[0]}; }
  State eval_D(const State& s, int) const { return {d * s[0]}; }
  State eval_R(const State& s) const { return {r * s[0]}; }
  State solve_AD(const State& rhs, double c, int) const {
    return {rhs[0] / denom(c * d)};
  }
  State solve_R(const State& rhs, double c, const State&) const {
    return {rhs[0] / denom(c * r)};
  }

 private:
  static double denom(double cd) {
    const double v = 1.0 - cd;
    if (std::abs(v) < 1e-300) {
      throw PoleError("scalar implicit solve at pole");
    }
    return v;
  }
};

/// The linear map taking the bounds (|phi^1 change|, |phi^2 change|) of one
/// sweep's iterate differences to the next sweep, for the scalar linear model
/// problem on three Gauss-Lobatto nodes (node 1 = midpoint, node 2 =
/// endpoint).
///
/// The signed entries are stored by role. alpha..delta are their magnitudes,
/// paired in the convention under which, with advective-diffusive scaling
/// a = a~/dx, d = d~/dx^2, dt = lambda*dx, the factors tend to
/// alpha -> 1/12, beta -> 1/3, gamma -> 2/3, delta -> 7/12 as dx -> 0.
struct IterationMap {
  double a = 0.0, d = 0.0, r = 0.0, dt = 0.0;

  // Signed entries of the affine sweep's difference map.
  double mid_from_mid = 0.0;  // midpoint row, coefficient of the midpoint difference
  double mid_from_end = 0.0;  // midpoint row, coefficient of the endpoint difference
  double end_from_mid = 0.0;  // endpoint row, coefficient of the midpoint difference
  double end_from_end = 0.0;  // endpoint row, coefficient of the endpoint difference

  double alpha = 0.0;  // |mid_from_end|
  double beta = 0.0;   // |mid_from_mid|
  double gamma = 0.0;  // |end_from_mid|
  double delta = 0.0;  // |end_from_end|

  double theta() const { return std::max({alpha, beta, gamma, delta}); }
};

constexpr double kPoleGuard = 1e-8;

namespace detail {

inline void check_poles(double d, double r, double dt) {
  if (std::abs(d * dt - 2.0) < kPoleGuard) {
    throw PoleError("iteration map pole: d*dt too close to 2 (d*dt = " +
                    std::to_string(d * dt) + ")");
  }
  if (std::abs(r * dt - 2.0) < kPoleGuard) {
    throw PoleError("iteration map pole: r*dt too close to 2 (r*dt = " +
                    std::to_string(r * dt) + ")");
  }
}

}  // namespace detail

/// Reads the four map coefficients off single MISDC sweeps run on basis
/// perturbations of the iterate values. The sweep is affine in the previous
/// iterate with phi^n = 0, so sweeping the two unit seeds yields the matrix
/// columns exactly (up to roundoff).
inline IterationMap extract_iteration_map(double a, double d, double r,
                                          double dt) {
  detail::check_poles(d, r, dt);
  const NodeSet nodes = NodeSet::lobatto(3);
  const ScalarLinearOps ops{a, d, r};

  auto sweep_column = [&](int node) {
    std::vector<State> seed(3, State{0.0});
    seed[node] = State{1.0};
    SdcState st = sdc_seed(seed, dt, ops, nodes);
    sdc_sweep(st, ops);
    return std::pair<double, double>{st.phi[1][1][0], st.phi[1][2][0]};
  };
  const auto [m11, m21] = sweep_column(1);
  const auto [m12, m22] = sweep_column(2);

  IterationMap map;
  map.a = a;
  map.d = d;
  map.r = r;
  map.dt = dt;
  map.mid_from_mid = m11;
  map.mid_from_end = m12;
  map.end_from_mid = m21;
  map.end_from_end = m22;
  map.alpha = std::abs(m12);
  map.beta = std::abs(m11);
  map.gamma = std::abs(m21);
  map.delta = std::abs(m22);
  return map;
}

/// theta(a, d, r, dt) = max{alpha, beta, gamma, delta}; the iterations are
/// guaranteed to contract when theta < 1.
inline double theta(double a, double d, double r, double dt) {
  return extract_iteration_map(a, d, r, dt).theta();
}

/// Closed forms of the endpoint-row coefficients c1 = end_from_mid and
/// c2 = end_from_end of the difference recursion
///   phi^{2,(k+1)} - phi^{2,(k)} = c1 (phi^{1,(k)} - phi^{1,(k-1)})
///                               + c2 (phi^{2,(k)} - phi^{2,(k-1)}),
/// exact for the sweep the engine performs. Independent route for
/// cross-checking the extraction.
inline std::pair<double, double> closed_form_node2_coefficients(double a,
                                                                double d,
                                                                double r,
                                                                double dt) {
  detail::check_poles(d, r, dt);
  const double dd = d * dt;
  const double rr = r * dt;
  const double denom = (dd - 2.0) * (dd - 2.0) * (rr - 2.0) * (rr - 2.0);
  const double c1 =
      4.0 * dt *
      (dt * dt * (a * d * r + d * d * r + d * r * r) +
       2.0 * dt * (a * a - d * d - r * r) - dt * d * r +
       2.0 * (a + d + r)) /
      (3.0 * denom);
  const double c2 =
      dt *
      (6.0 * dt * dt * dt * d * d * r * r +
       dt * dt * (5.0 * a * d * r - 19.0 * d * d * r - 19.0 * d * r * r) +
       dt * (-2.0 * a * a - 12.0 * a * d - 12.0 * a * r + 14.0 * d * d +
             52.0 * d * r + 14.0 * r * r) +
       16.0 * a - 32.0 * d - 32.0 * r) /
      (6.0 * denom);
  return {c1, c2};
}

/// Contraction factors (magnitudes) of the two-node scheme that solves the
/// reaction correction as an exact ODE against linear-in-time advection and
/// diffusion representations.
struct LegacyMap {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Direct evaluation of the two-node legacy coefficients. Poles at d*dt = 1
/// and r = 0.
inline LegacyMap legacy_map(double a, double d, double r, double dt) {
  if (std::abs(d * dt - 1.0) < kPoleGuard) {
    throw PoleError("legacy map pole: d*dt too close to 1");
  }
  if (std::abs(r) < kPoleGuard) {
    throw PoleError("legacy map pole: r too close to 0");
  }
  const double e = std::exp(r * dt);
  const double em1 = std::expm1(r * dt);
  const double num =
      a * (2.0 * d * dt + dt * r * (d * dt - 2.0) + e * (d * dt * (dt * r - 2.0) + 2.0) - 2.0) +
      d * (e * (d * dt * dt * r - 2.0 * dt * (d + r) + 2.0) + d * dt * (dt * r + 2.0) - 2.0);
  const double alpha = -num / (2.0 * dt * r * r * (d * dt - 1.0));
  const double beta = d * em1 / (r * (d * dt - 1.0));
  return {std::abs(alpha), std::abs(beta)};
}

enum class Method : std::uint8_t { misdc, legacy };

inline const char* method_name(Method m) {
  return m == Method::misdc ? "misdc" : "legacy";
}

/// Grid of theta values over (d*dt, r*dt) with dt normalised to 1, so the
/// axes are the dimensionless products directly.
struct RegionScan {
  Method method = Method::misdc;
  double a = 0.0;
  std::vector<double> d_dt_axis;
  std::vector<double> r_dt_axis;
  // Row-major over (d index, r index).
  std::vector<double> theta;
  std::vector<std::uint8_t> converged;
  std::vector<std::uint8_t> pole;

  int index(int di, int ri) const {
    return di * static_cast<int>(r_dt_axis.size()) + ri;
  }
  /// Number of converged cells; pole cells never count.
  int converged_count() const {
    int c = 0;
    for (auto v : converged) c += v;
    return c;
  }
};

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return v;
}

inline RegionScan scan_region(Method method, double a, double d_dt_lo,
                              double d_dt_hi, double r_dt_lo, double r_dt_hi,
                              int resolution) {
  if (resolution < 2) {
    throw std::invalid_argument("scan_region: resolution must be >= 2 per axis");
  }
  if (!std::isfinite(d_dt_lo) || !std::isfinite(d_dt_hi) ||
      !std::isfinite(r_dt_lo) || !std::isfinite(r_dt_hi)) {
    throw std::invalid_argument("scan_region: ranges must be finite");
  }
  RegionScan scan;
  scan.method = method;
  scan.a = a;
  scan.d_dt_axis = linspace(d_dt_lo, d_dt_hi, resolution);
  scan.r_dt_axis = linspace(r_dt_lo, r_dt_hi, resolution);
  const int cells = resolution * resolution;
  scan.theta.assign(cells, std::numeric_limits<double>::quiet_NaN());
  scan.converged.assign(cells, 0);
  scan.pole.assign(cells, 0);

  for (int di = 0; di < resolution; ++di) {
    for (int ri = 0; ri < resolution; ++ri) {
      const int idx = scan.index(di, ri);
      const double d = scan.d_dt_axis[di];
      const double r = scan.r_dt_axis[ri];
      try {
        double th;
        if (method == Method::misdc) {
          th = theta(a, d, r, 1.0);
        } else {
          const LegacyMap lm = legacy_map(a, d, r, 1.0);
          th = std::max(lm.alpha, lm.beta);
        }
        scan.theta[idx] = th;
        scan.converged[idx] = th < 1.0 ? 1 : 0;
      } catch (const PoleError&) {
        scan.pole[idx] = 1;
      }
    }
  }
  return scan;
}

/// One row of a dx -> 0 limit study under the scaling a = a~/dx,
/// d = d~/dx^2, dt = lambda*dx.
struct LimitPoint {
  double dx = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double theta = 0.0;
};

struct LimitReport {
  double a_tilde = 0.0, d_tilde = 0.0, r = 0.0, lambda = 0.0;
  std::vector<LimitPoint> points;  // ordered as the dx sequence
  /// Estimate of each factor's limit: the values at the smallest dx.
  const LimitPoint& finest() const { return points.back(); }
};

inline LimitReport limit_check(double a_tilde, double d_tilde, double r,
                               double lambda,
                               const std::vector<double>& dx_sequence) {
  if (dx_sequence.empty()) {
    throw std::invalid_argument("limit_check: empty dx sequence");
  }
  for (std::size_t i = 0; i + 1 < dx_sequence.size(); ++i) {
    if (!(dx_sequence[i] > dx_sequence[i + 1])) {
      throw std::invalid_argument("limit_check: dx sequence must be strictly decreasing");
    }
  }
  LimitReport report;
  report.a_tilde = a_tilde;
  report.d_tilde = d_tilde;
  report.r = r;
  report.lambda = lambda;
  for (double dx : dx_sequence) {
    const IterationMap map = extract_iteration_map(
        a_tilde / dx, d_tilde / (dx * dx), r, lambda * dx);
    report.points.push_back(
        {dx, map.alpha, map.beta, map.gamma, map.delta, map.theta()});
  }
  return report;
}

}  // namespace misdc::analysis
