#include "misdc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using misdc::lobatto_nodes;
using misdc::NodeSet;
using misdc::substep_weights;
using misdc::test::kEps;

TEST_CASE("lobatto nodes, small counts") {
  CHECK(lobatto_nodes(2) == std::vector<double>{0.0, 1.0});
  CHECK(lobatto_nodes(3) == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("lobatto nodes reject counts below 2") {
  CHECK_THROWS_AS(lobatto_nodes(1), std::invalid_argument);
  CHECK_THROWS_AS(lobatto_nodes(0), std::invalid_argument);
  CHECK_THROWS_AS(lobatto_nodes(-3), std::invalid_argument);
}

TEST_CASE("lobatto nodes span [0,1] strictly increasing for any count") {
  for (int count = 2; count <= 8; ++count) {
    const auto tau = lobatto_nodes(count);
    REQUIRE(tau.size() == static_cast<std::size_t>(count));
    CHECK(tau.front() == 0.0);
    CHECK(tau.back() == 1.0);
    for (int i = 0; i + 1 < count; ++i) CHECK(tau[i] < tau[i + 1]);
  }
}

TEST_CASE("lobatto nodes, 4 and 5 match the classical abscissae") {
  const auto t4 = lobatto_nodes(4);
  const double s = std::sqrt(1.0 / 5.0);
  CHECK(misdc::test::rel_err(t4[1], 0.5 * (1.0 - s)) < 1e-14);
  CHECK(misdc::test::rel_err(t4[2], 0.5 * (1.0 + s)) < 1e-14);
  const auto t5 = lobatto_nodes(5);
  const double q = std::sqrt(3.0 / 7.0);
  CHECK(misdc::test::rel_err(t5[1], 0.5 * (1.0 - q)) < 1e-14);
  CHECK(t5[2] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("substep weights golden values") {
  const auto w2 = substep_weights({0.0, 1.0});
  REQUIRE(w2.size() == 1);
  CHECK(w2[0] == std::vector<double>{0.5, 0.5});

  const auto w3 = substep_weights({0.0, 0.5, 1.0});
  REQUIRE(w3.size() == 2);
  CHECK(w3[0] == std::vector<double>{5.0 / 24.0, 8.0 / 24.0, -1.0 / 24.0});
  CHECK(w3[1] == std::vector<double>{-1.0 / 24.0, 8.0 / 24.0, 5.0 / 24.0});
}

TEST_CASE("three-node symmetry: first row reversed equals second row") {
  const auto w = substep_weights({0.0, 0.5, 1.0});
  CHECK(w[0][0] == w[1][2]);
  CHECK(w[0][1] == w[1][1]);
  CHECK(w[0][2] == w[1][0]);
}

TEST_CASE("weight rows integrate monomials exactly up to the node degree") {
  for (int count : {2, 3, 4, 5}) {
    const NodeSet set = NodeSet::lobatto(count);
    // The two rules the sweeps use carry the tight bound; the extension
    // counts get an allowance for the test's own summation roundoff.
    const double tol = (count <= 3 ? 10 : 50) * kEps;
    for (int m = 0; m < set.substep_count(); ++m) {
      for (int p = 0; p < count; ++p) {
        double quad = 0.0;
        for (int j = 0; j < count; ++j) {
          quad += set.weights[m][j] * std::pow(set.nodes[j], p);
        }
        const double exact = (std::pow(set.nodes[m + 1], p + 1) -
                              std::pow(set.nodes[m], p + 1)) /
                             (p + 1);
        CAPTURE(count, m, p);
        CHECK(misdc::test::rel_err(quad, exact) < tol);
      }
    }
  }
}

TEST_CASE("weight row sums equal substep widths") {
  for (int count : {2, 3, 4, 6}) {
    const NodeSet set = NodeSet::lobatto(count);
    for (int m = 0; m < set.substep_count(); ++m) {
      double sum = 0.0;
      for (double w : set.weights[m]) sum += w;
      CHECK(misdc::test::rel_err(sum, set.substep_width(m)) < 10 * kEps);
    }
  }
}

TEST_CASE("substep weights validate the node list") {
  CHECK_THROWS_AS(substep_weights({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(substep_weights({0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(substep_weights({0.0, 0.7, 0.6, 1.0}), std::invalid_argument);
}
