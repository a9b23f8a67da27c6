#include "misdc/stencils.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace misdc::fv;
using misdc::test::fitted_order;
using misdc::test::kEps;
using misdc::test::poly_cell_avg;
using misdc::test::poly_eval;
using misdc::test::rel_err;

namespace {

Grid1D make_grid(int n, double lo = 0.0, double hi = 1.0, double bc = 0.0) {
  return Grid1D(n, lo, hi, DirichletBc{bc});
}

// Analytic cell averages of a polynomial (coefficients low order first).
AvgField analytic_avg(std::span<const double> coeffs, const Grid1D& g) {
  std::vector<double> v(g.cell_count());
  for (int i = 0; i < g.cell_count(); ++i) {
    v[i] = poly_cell_avg(coeffs, g.face(i), g.face(i + 1));
  }
  return AvgField(std::move(v));
}

CenterField analytic_center(std::span<const double> coeffs, const Grid1D& g) {
  std::vector<double> v(g.cell_count());
  for (int i = 0; i < g.cell_count(); ++i) {
    v[i] = poly_eval(coeffs, g.cell_center(i));
  }
  return CenterField(std::move(v));
}

// Ghost data continued analytically past both ends.
GhostCells analytic_avg_ghosts(std::span<const double> coeffs, const Grid1D& g) {
  const double dx = g.dx();
  return {{poly_cell_avg(coeffs, g.x_lo() - dx, g.x_lo()),
           poly_cell_avg(coeffs, g.x_lo() - 2 * dx, g.x_lo() - dx)},
          {poly_cell_avg(coeffs, g.x_hi(), g.x_hi() + dx),
           poly_cell_avg(coeffs, g.x_hi() + dx, g.x_hi() + 2 * dx)}};
}

GhostCells analytic_center_ghosts(std::span<const double> coeffs, const Grid1D& g) {
  const double dx = g.dx();
  return {{poly_eval(coeffs, g.x_lo() - 0.5 * dx), poly_eval(coeffs, g.x_lo() - 1.5 * dx)},
          {poly_eval(coeffs, g.x_hi() + 0.5 * dx), poly_eval(coeffs, g.x_hi() + 1.5 * dx)}};
}

// Cubic with zero slope at x_hi, compatible with the outflow condition:
// p(x) = c0 + c2 (x - x_hi)^2 + c3 (x - x_hi)^3, expanded in x.
std::array<double, 4> outflow_compatible_cubic(double x_hi, double c0, double c2,
                                               double c3) {
  return {c0 + c2 * x_hi * x_hi - c3 * x_hi * x_hi * x_hi,
          -2.0 * c2 * x_hi + 3.0 * c3 * x_hi * x_hi,
          c2 - 3.0 * c3 * x_hi,
          c3};
}

}  // namespace

TEST_CASE("Grid1D invariants") {
  CHECK_THROWS_AS(make_grid(3), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(8, 1.0, 0.0, DirichletBc{0.0}), std::invalid_argument);
  const Grid1D g(10, 0.0, 20.0, DirichletBc{1.0});
  CHECK(g.dx() == (20.0 - 0.0) / 10);
  CHECK(g.face(10) == 20.0);
  CHECK(g.cell_center(0) == 1.0);
}

TEST_CASE("inflow ghost extrapolation") {
  SECTION("constant field with matching bc value") {
    const std::array<double, 4> c{7.5, 7.5, 7.5, 7.5};
    const GhostPair avg = ghost_inflow_avg(7.5, c);
    CHECK(avg.inner == 7.5);
    CHECK(avg.outer == 7.5);
    const GhostPair cen = ghost_inflow_center(7.5, c);
    CHECK(cen.inner == 7.5);
    CHECK(cen.outer == 7.5);
  }
  SECTION("linear field is reproduced exactly") {
    const Grid1D g = make_grid(8, 0.0, 2.0);
    const std::array<double, 2> line{0.3, -1.7};
    const AvgField f = analytic_avg(line, g);
    const GhostPair got = ghost_inflow_avg(poly_eval(line, 0.0),
                                           f.values().subspan(0, 4));
    const GhostCells want = analytic_avg_ghosts(line, g);
    CHECK(rel_err(got.inner, want.lo.inner) < 1e-14);
    CHECK(rel_err(got.outer, want.lo.outer) < 1e-14);
  }
  SECTION("cubic averages with the exact boundary value") {
    const Grid1D g = make_grid(12, 0.5, 3.5);
    const std::array<double, 4> cubic{1.0, -2.0, 0.75, 0.3};
    const AvgField f = analytic_avg(cubic, g);
    const GhostPair got = ghost_inflow_avg(poly_eval(cubic, g.x_lo()),
                                           f.values().subspan(0, 4));
    const GhostCells want = analytic_avg_ghosts(cubic, g);
    CHECK(rel_err(got.inner, want.lo.inner) < 1e-13);
    CHECK(rel_err(got.outer, want.lo.outer) < 1e-13);

    const CenterField fc = analytic_center(cubic, g);
    const GhostPair gotc = ghost_inflow_center(poly_eval(cubic, g.x_lo()),
                                               fc.values().subspan(0, 4));
    const GhostCells wantc = analytic_center_ghosts(cubic, g);
    CHECK(rel_err(gotc.inner, wantc.lo.inner) < 1e-13);
    CHECK(rel_err(gotc.outer, wantc.lo.outer) < 1e-13);
  }
  SECTION("span size is validated") {
    const std::array<double, 3> three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(ghost_inflow_avg(0.0, three), std::invalid_argument);
  }
}

TEST_CASE("outflow ghost extrapolation") {
  SECTION("constant field") {
    const std::array<double, 4> c{-2.25, -2.25, -2.25, -2.25};
    const GhostPair avg = ghost_outflow_avg(c);
    CHECK(avg.inner == -2.25);
    CHECK(avg.outer == -2.25);
    const GhostPair cen = ghost_outflow_center(c);
    CHECK(cen.inner == -2.25);
    CHECK(cen.outer == -2.25);
  }
  SECTION("cubic with zero slope at the boundary is exact") {
    const Grid1D g = make_grid(12, 0.0, 3.0);
    const auto cubic = outflow_compatible_cubic(g.x_hi(), 0.8, -1.1, 0.4);
    const AvgField f = analytic_avg(cubic, g);
    const int n = g.cell_count();
    const std::array<double, 4> last4{f[n - 1], f[n - 2], f[n - 3], f[n - 4]};
    const GhostPair got = ghost_outflow_avg(last4);
    const GhostCells want = analytic_avg_ghosts(cubic, g);
    CHECK(rel_err(got.inner, want.hi.inner) < 1e-13);
    CHECK(rel_err(got.outer, want.hi.outer) < 1e-13);

    const CenterField fc = analytic_center(cubic, g);
    const std::array<double, 4> lastc{fc[n - 1], fc[n - 2], fc[n - 3], fc[n - 4]};
    const GhostPair gotc = ghost_outflow_center(lastc);
    const GhostCells wantc = analytic_center_ghosts(cubic, g);
    CHECK(rel_err(gotc.inner, wantc.hi.inner) < 1e-13);
    CHECK(rel_err(gotc.outer, wantc.hi.outer) < 1e-13);
  }
  SECTION("even data about the boundary gives mirrored ghosts") {
    // p(x) = 2 + 3(x-x_hi)^2 + (x-x_hi)^4 is even about x_hi and has zero
    // slope there, so the ghosts must mirror the interior values.
    const Grid1D g = make_grid(10, 0.0, 5.0);
    const double xh = g.x_hi();
    std::vector<double> avg(g.cell_count());
    auto prim = [xh](double x) {
      const double u = x - xh;
      return 2.0 * x + u * u * u + u * u * u * u * u / 5.0;
    };
    for (int i = 0; i < g.cell_count(); ++i) {
      avg[i] = (prim(g.face(i + 1)) - prim(g.face(i))) / g.dx();
    }
    const int n = g.cell_count();
    const std::array<double, 4> last4{avg[n - 1], avg[n - 2], avg[n - 3], avg[n - 4]};
    const GhostPair got = ghost_outflow_avg(last4);
    CHECK(rel_err(got.inner, avg[n - 1]) < 1e-13);
    CHECK(rel_err(got.outer, avg[n - 2]) < 1e-13);
  }
}

TEST_CASE("cell conversions are exact on cubic data") {
  const Grid1D g = make_grid(16, 0.25, 4.25);
  const std::array<double, 4> cubic{0.5, 1.5, -0.8, 0.21};

  SECTION("avg_to_center") {
    const AvgField f = analytic_avg(cubic, g);
    const CenterField got = avg_to_center(f, analytic_avg_ghosts(cubic, g));
    const CenterField want = analytic_center(cubic, g);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(rel_err(got[i], want[i]) < 10 * kEps);
    }
  }
  SECTION("center_to_avg") {
    const CenterField f = analytic_center(cubic, g);
    const AvgField got = center_to_avg(f, analytic_center_ghosts(cubic, g));
    const AvgField want = analytic_avg(cubic, g);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(rel_err(got[i], want[i]) < 10 * kEps);
    }
  }
  SECTION("constant fields pass through unchanged") {
    const Grid1D gc = make_grid(8, 0.0, 1.0, 4.0);
    const AvgField f(8, 4.0);
    const CenterField c = avg_to_center(f, gc);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == 4.0);
    const AvgField back = center_to_avg(CenterField(8, 4.0), gc);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == 4.0);
  }
  SECTION("quadratic through the grid-bc path") {
    // x^2 has zero slope at x = 0; flip the grid so the outflow side is the
    // zero-slope end and the Dirichlet side carries the exact value.
    const Grid1D gq(16, -3.0, 0.0, DirichletBc{9.0});
    const std::array<double, 3> quad{0.0, 0.0, 1.0};
    const AvgField f = analytic_avg(quad, gq);
    const CenterField got = avg_to_center(f, gq);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(rel_err(got[i], gq.cell_center(i) * gq.cell_center(i)) < 100 * kEps);
    }
  }
}

TEST_CASE("face interpolation and gradients on analytic data") {
  const Grid1D g = make_grid(16, 0.0, 2.0);
  const std::array<double, 4> cubic{-0.4, 0.9, 1.2, -0.35};

  SECTION("avg_to_face exact for cubic averages") {
    const FaceField got = avg_to_face(analytic_avg(cubic, g),
                                      analytic_avg_ghosts(cubic, g));
    for (int f = 0; f <= g.cell_count(); ++f) {
      CHECK(rel_err(got[f], poly_eval(cubic, g.face(f))) < 1e-13);
    }
  }
  SECTION("center_to_face exact for cubic centres") {
    const FaceField got = center_to_face(analytic_center(cubic, g),
                                         analytic_center_ghosts(cubic, g));
    for (int f = 0; f <= g.cell_count(); ++f) {
      CHECK(rel_err(got[f], poly_eval(cubic, g.face(f))) < 1e-13);
    }
  }
  SECTION("linear field face values are exact") {
    const Grid1D gl(12, -2.0, 0.0, DirichletBc{-0.5});
    const std::array<double, 2> line{1.0, 0.75};
    const FaceField got = avg_to_face(analytic_avg(line, gl),
                                      analytic_avg_ghosts(line, gl));
    for (int f = 0; f <= gl.cell_count(); ++f) {
      CHECK(misdc::test::close(got[f], poly_eval(line, gl.face(f)), 1e-14));
    }
  }
  SECTION("face_gradient: constant gives zero, quadratic averages are exact") {
    const AvgField c(16, 3.3);
    const FaceField zero = face_gradient(c, GhostCells{{3.3, 3.3}, {3.3, 3.3}}, g.dx());
    for (std::size_t f = 0; f < zero.size(); ++f) CHECK(zero[f] == 0.0);

    const std::array<double, 3> quad{0.2, -1.0, 2.0};
    const FaceField got = face_gradient(analytic_avg(quad, g),
                                        analytic_avg_ghosts(quad, g), g.dx());
    for (int f = 0; f <= g.cell_count(); ++f) {
      const double want = -1.0 + 4.0 * g.face(f);
      CHECK(misdc::test::close(got[f], want, 1e-12));
    }
  }
  SECTION("face_gradient is even exact on x^4 and fourth order on x^5") {
    // The centred stencil reproduces x^4 gradients exactly (even symmetry
    // about the face), so the first degree with a genuine truncation error
    // is five.
    const std::array<double, 5> quartic{0.0, 0.0, 0.0, 0.0, 1.0};
    const Grid1D gq = make_grid(16, 1.0, 2.0);
    const FaceField exact4 = face_gradient(analytic_avg(quartic, gq),
                                           analytic_avg_ghosts(quartic, gq),
                                           gq.dx());
    for (int f = 0; f <= gq.cell_count(); ++f) {
      const double x = gq.face(f);
      CHECK(misdc::test::close(exact4[f], 4.0 * x * x * x, 1e-12));
    }

    std::vector<double> errors;
    const std::array<double, 6> quintic{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    for (int n : {16, 32, 64, 128}) {
      const Grid1D gr = make_grid(n, 1.0, 2.0);
      const FaceField got = face_gradient(analytic_avg(quintic, gr),
                                          analytic_avg_ghosts(quintic, gr),
                                          gr.dx());
      double err = 0.0;
      for (int fc = 0; fc <= n; ++fc) {
        const double x = gr.face(fc);
        err += std::abs(got[fc] - 5.0 * x * x * x * x);
      }
      errors.push_back(err / (n + 1));
    }
    CHECK(fitted_order(errors) == Catch::Approx(4.0).margin(0.2));
  }
  SECTION("cell_gradient: constant, linear, cubic") {
    const AvgField c(16, -1.5);
    const AvgField zero = cell_gradient(c, GhostCells{{-1.5, -1.5}, {-1.5, -1.5}}, g.dx());
    for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero[i] == 0.0);

    const std::array<double, 2> line{2.0, -3.5};
    const AvgField lg = cell_gradient(analytic_avg(line, g),
                                      analytic_avg_ghosts(line, g), g.dx());
    for (std::size_t i = 0; i < lg.size(); ++i) {
      CHECK(rel_err(lg[i], -3.5) < 1e-13);
    }

    const AvgField cg = cell_gradient(analytic_avg(cubic, g),
                                      analytic_avg_ghosts(cubic, g), g.dx());
    for (int i = 0; i < g.cell_count(); ++i) {
      const double x = g.cell_center(i);
      const double want = cubic[1] + 2.0 * cubic[2] * x + 3.0 * cubic[3] * x * x;
      CHECK(rel_err(cg[i], want) < 1e-12);
    }
  }
}

TEST_CASE("product rule") {
  const Grid1D g = make_grid(20, 0.5, 2.5, /*bc=*/1.0);

  SECTION("unit factor passes the other through") {
    // bc value 1 matches the unit factor, whose gradient then vanishes
    // identically and kills the correction term.
    const std::array<double, 4> cubic{0.5, 1.5, -0.8, 0.21};
    const AvgField f = analytic_avg(cubic, g);
    const AvgField one(20, 1.0);
    const Grid1D gb(20, 0.5, 2.5, DirichletBc{1.0});
    const AvgField got = product_avg(f, one, gb);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(got[i] == f[i]);
  }
  SECTION("commutativity is exact") {
    const std::array<double, 3> u{1.0, 0.4, -0.2};
    const std::array<double, 4> v{2.0, -0.3, 0.0, 0.05};
    const AvgField uf = analytic_avg(u, g), vf = analytic_avg(v, g);
    const AvgField uv = product_avg(uf, vf, g);
    const AvgField vu = product_avg(vf, uf, g);
    for (std::size_t i = 0; i < uv.size(); ++i) CHECK(uv[i] == vu[i]);
  }
  SECTION("x times x^2 reproduces the averages of x^3 on interior cells") {
    const std::array<double, 2> xx{0.0, 1.0};
    const std::array<double, 3> x2{0.0, 0.0, 1.0};
    const std::array<double, 4> x3{0.0, 0.0, 0.0, 1.0};
    const AvgField got = product_avg(analytic_avg(xx, g), analytic_avg(x2, g), g);
    const AvgField want = analytic_avg(x3, g);
    for (int i = 2; i < g.cell_count() - 2; ++i) {
      CHECK(rel_err(got[i], want[i]) < 1e-13);
    }
  }
  SECTION("smooth product converges at fourth order on interior cells") {
    std::vector<double> errors;
    for (int n : {32, 64, 128, 256}) {
      const Grid1D gr = make_grid(n, 0.0, 1.0);
      AvgField u(n), v(n);
      for (int i = 0; i < n; ++i) {
        const double a = gr.face(i), b = gr.face(i + 1);
        u[i] = misdc::test::sin_cell_avg(a, b) + 2.0;
        v[i] = misdc::test::cos_cell_avg(a, b) + 2.0;
      }
      const AvgField got = product_avg(u, v, gr);
      double err = 0.0;
      int cells = 0;
      for (int i = 2; i < n - 2; ++i) {
        const double a = gr.face(i), b = gr.face(i + 1);
        // (sin x + 2)(cos x + 2): averages via antiderivative
        auto prim = [](double x) {
          return -std::cos(2.0 * x) / 4.0 + 2.0 * std::sin(x) - 2.0 * std::cos(x) + 4.0 * x;
        };
        const double want = (prim(b) - prim(a)) / gr.dx();
        err += std::abs(got[i] - want);
        ++cells;
      }
      errors.push_back(err / cells);
    }
    CHECK(fitted_order(errors) == Catch::Approx(4.0).margin(0.2));
  }
}

TEST_CASE("quotient rule") {
  const Grid1D g = make_grid(20, 0.0, 1.0);

  SECTION("unit denominator passes the numerator through") {
    const Grid1D gb(20, 0.0, 1.0, DirichletBc{1.0});
    const std::array<double, 4> cubic{0.5, 1.5, -0.8, 0.21};
    const AvgField f = analytic_avg(cubic, gb);
    const AvgField got = quotient_avg(f, AvgField(20, 1.0), gb);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(got[i] == f[i]);
  }
  SECTION("vanishing denominator average raises a singular-input error") {
    AvgField psi(20, 1.0);
    psi[7] = 0.0;
    CHECK_THROWS_AS(quotient_avg(AvgField(20, 1.0), psi, g), misdc::SingularInputError);
    try {
      quotient_avg(AvgField(20, 1.0), psi, g);
    } catch (const misdc::SingularInputError& err) {
      CHECK(err.index() == 7);
    }
  }
  SECTION("x^2 over 1+x converges at fourth order on interior cells") {
    std::vector<double> errors;
    for (int n : {32, 64, 128, 256}) {
      const Grid1D gr = make_grid(n, 0.0, 1.0);
      const std::array<double, 3> x2{0.0, 0.0, 1.0};
      const std::array<double, 2> onepx{1.0, 1.0};
      const AvgField got =
          quotient_avg(analytic_avg(x2, gr), analytic_avg(onepx, gr), gr);
      // <x^2/(1+x)>: antiderivative of x^2/(1+x) is x^2/2 - x + log(1+x)
      auto prim = [](double x) { return 0.5 * x * x - x + std::log1p(x); };
      double err = 0.0;
      int cells = 0;
      for (int i = 2; i < n - 2; ++i) {
        const double want = (prim(gr.face(i + 1)) - prim(gr.face(i))) / gr.dx();
        err += std::abs(got[i] - want);
        ++cells;
      }
      errors.push_back(err / cells);
    }
    CHECK(fitted_order(errors) == Catch::Approx(4.0).margin(0.2));
  }
  SECTION("quotient then product recovers the numerator at fourth order") {
    std::vector<double> errors;
    for (int n : {32, 64, 128, 256}) {
      const Grid1D gr = make_grid(n, 0.0, 1.0);
      AvgField phi(n), psi(n);
      for (int i = 0; i < n; ++i) {
        const double a = gr.face(i), b = gr.face(i + 1);
        phi[i] = misdc::test::sin_cell_avg(a, b) + 3.0;
        psi[i] = misdc::test::cos_cell_avg(a, b) + 2.0;
      }
      const AvgField ratio = quotient_avg(phi, psi, gr);
      const AvgField back = product_avg(ratio, psi, gr);
      double err = 0.0;
      int cells = 0;
      for (int i = 4; i < n - 4; ++i) {
        err += std::abs(back[i] - phi[i]);
        ++cells;
      }
      errors.push_back(err / cells);
    }
    CHECK(fitted_order(errors) == Catch::Approx(4.0).margin(0.25));
  }
}

TEST_CASE("flux divergence and constraint integration") {
  const Grid1D g = make_grid(10, 0.0, 1.0);

  SECTION("constant flux has zero divergence") {
    const FaceField u(11, 2.0), phi(11, 3.0);
    const AvgField div = flux_divergence(u, phi, g);
    for (std::size_t i = 0; i < div.size(); ++i) CHECK(div[i] == 0.0);
  }
  SECTION("flux U*phi = x telescopes to exactly one") {
    FaceField u(11), one(11, 1.0);
    for (int f = 0; f <= 10; ++f) u[f] = g.face(f);
    const AvgField div = flux_divergence(u, one, g);
    for (std::size_t i = 0; i < div.size(); ++i) {
      CHECK(rel_err(div[i], 1.0) < 10 * kEps);
    }
  }
  SECTION("manufactured smooth flux converges at fourth order") {
    // Face data sampled from smooth functions; the divergence target is the
    // cell average of (U phi)', a pure flux difference.
    std::vector<double> errors;
    for (int n : {32, 64, 128, 256}) {
      const Grid1D gr = make_grid(n, 0.0, 1.0);
      AvgField avg_u(n);
      for (int i = 0; i < n; ++i) {
        avg_u[i] = misdc::test::sin_cell_avg(gr.face(i), gr.face(i + 1)) + 2.0;
      }
      const GhostCells ghosts{
          {misdc::test::sin_cell_avg(-gr.dx(), 0.0) + 2.0,
           misdc::test::sin_cell_avg(-2.0 * gr.dx(), -gr.dx()) + 2.0},
          {misdc::test::sin_cell_avg(1.0, 1.0 + gr.dx()) + 2.0,
           misdc::test::sin_cell_avg(1.0 + gr.dx(), 1.0 + 2.0 * gr.dx()) + 2.0}};
      const FaceField phi_face = avg_to_face(avg_u, ghosts);
      FaceField vel(n + 1);
      for (int f = 0; f <= n; ++f) vel[f] = std::cos(gr.face(f)) + 1.5;
      const AvgField got = flux_divergence(vel, phi_face, gr);
      auto flux = [](double x) {
        return (std::cos(x) + 1.5) * (std::sin(x) + 2.0);
      };
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        const double want = (flux(gr.face(i + 1)) - flux(gr.face(i))) / gr.dx();
        err += std::abs(got[i] - want);
      }
      errors.push_back(err / n);
    }
    CHECK(fitted_order(errors) == Catch::Approx(4.0).margin(0.2));
  }
  SECTION("constraint integration") {
    const AvgField zero(10, 0.0);
    const FaceField u5 = integrate_constraint(zero, 5.0, g);
    for (std::size_t f = 0; f < u5.size(); ++f) CHECK(u5[f] == 5.0);

    const Grid1D gd(10, 0.0, 1.0, DirichletBc{0.0});
    const AvgField ones(10, 1.0);
    const FaceField u = integrate_constraint(ones, 0.0, gd);
    for (int f = 0; f <= 10; ++f) {
      CHECK(rel_err(u[f], 0.1 * f) < 10 * kEps);
    }
  }
  SECTION("divergence of the integrated field recovers the source exactly") {
    AvgField s(10);
    for (int i = 0; i < 10; ++i) s[i] = std::sin(2.0 + i);
    const FaceField u = integrate_constraint(s, -1.25, g);
    const FaceField one(11, 1.0);
    const AvgField back = flux_divergence(u, one, g);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(back[i] - s[i]) < 1e-13);
    }
  }
}

TEST_CASE("bc-driven conversions converge at fourth order on sin data") {
  // sin on [0, 5pi/2]: the Dirichlet value at x=0 is 0 and the slope at
  // x = 5pi/2 vanishes, so both boundary extrapolations see compatible data.
  // (A multi-period domain keeps the errors above the roundoff floor at the
  // finest resolution.)
  const double hi = 2.5 * std::numbers::pi;
  std::vector<double> e_a2c, e_c2a, e_a2f, e_c2f, e_grad, e_rt;
  for (int n : {64, 128, 256, 512}) {
    const Grid1D g(n, 0.0, hi, DirichletBc{0.0});
    AvgField avg(n);
    CenterField cen(n);
    for (int i = 0; i < n; ++i) {
      avg[i] = misdc::test::sin_cell_avg(g.face(i), g.face(i + 1));
      cen[i] = std::sin(g.cell_center(i));
    }
    const CenterField a2c = avg_to_center(avg, g);
    const AvgField c2a = center_to_avg(cen, g);
    const FaceField a2f = avg_to_face(avg, g);
    const FaceField c2f = center_to_face(cen, g);
    const FaceField grad = face_gradient(avg, g);
    const AvgField rt = center_to_avg(a2c, g);

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0;
    for (int i = 0; i < n; ++i) {
      s1 += std::abs(a2c[i] - cen[i]);
      s2 += std::abs(c2a[i] - avg[i]);
      s6 += std::abs(rt[i] - avg[i]);
    }
    for (int f = 0; f <= n; ++f) {
      s3 += std::abs(a2f[f] - std::sin(g.face(f)));
      s4 += std::abs(c2f[f] - std::sin(g.face(f)));
      s5 += std::abs(grad[f] - std::cos(g.face(f)));
    }
    e_a2c.push_back(s1 / n);
    e_c2a.push_back(s2 / n);
    e_a2f.push_back(s3 / (n + 1));
    e_c2f.push_back(s4 / (n + 1));
    e_grad.push_back(s5 / (n + 1));
    e_rt.push_back(s6 / n);
  }
  CHECK(fitted_order(e_a2c) == Catch::Approx(4.0).margin(0.2));
  CHECK(fitted_order(e_c2a) == Catch::Approx(4.0).margin(0.2));
  CHECK(fitted_order(e_a2f) == Catch::Approx(4.0).margin(0.2));
  CHECK(fitted_order(e_c2f) == Catch::Approx(4.0).margin(0.2));
  CHECK(fitted_order(e_grad) == Catch::Approx(4.0).margin(0.2));
  CHECK(fitted_order(e_rt) == Catch::Approx(4.0).margin(0.2));
}

TEST_CASE("field/grid size mismatches are rejected") {
  const Grid1D g = make_grid(8);
  CHECK_THROWS_AS(avg_to_center(AvgField(7), g), std::invalid_argument);
  CHECK_THROWS_AS(flux_divergence(FaceField(8), FaceField(9), g),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_constraint(AvgField(5), 0.0, g),
                  std::invalid_argument);
}
