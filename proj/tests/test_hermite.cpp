#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sica/hermite.hpp"
#include "sica/hermite_check.hpp"

#include <cmath>
#include <random>

using namespace sica::hermite;

TEST_CASE("eval follows the three-term recurrence")
{
    CHECK(eval(0, 7.3) == 1.0);
    CHECK(eval(4, 0.0) == doctest::Approx(3.0));
    CHECK(eval(3, 2.0) == doctest::Approx(2.0));
    for (int k = 0; k <= 12; ++k) {
        const auto p = oracle::hermite_poly(k);
        for (double x : {-2.5, -0.3, 0.0, 1.1, 3.7}) {
            double ref = 0.0;
            for (std::size_t i = p.size(); i-- > 0;) ref = ref * x + p[i];
            CHECK(eval(k, x) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(eval(-1, 0.0), std::invalid_argument);
}

TEST_CASE("factorial")
{
    CHECK(factorial(0) == 1.0);
    CHECK(factorial(10) == 3628800.0);
    CHECK(factorial(-1) == 0.0);
    CHECK(factorial(25) == doctest::Approx(1.5511210043330986e25).epsilon(1e-12));
}

TEST_CASE("Gauss rule integrates Gaussian moments")
{
    for (int n : {1, 2, 7, 40, 200}) {
        const auto g = gauss_rule(n);
        REQUIRE(g->size() == static_cast<std::size_t>(n));
        double wsum = 0.0;
        for (double w : g->weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
        for (int p = 0; p <= std::min(2 * n - 1, 20); ++p)
            CHECK(g->expect([p](double x) { return std::pow(x, p); }) ==
                  doctest::Approx(oracle::gaussian_moment(p)).epsilon(1e-10).scale(
                      std::sqrt(oracle::gaussian_moment(2 * p))));
    }
    CHECK_THROWS_AS(gauss_rule(0), QuadratureError);
    CHECK_THROWS_AS(gauss_rule(100000), QuadratureError);
}

TEST_CASE("coefficients of simple functions")
{
    const auto h4 = coefficients([](double x) { return eval(4, x); }, 8);
    REQUIRE(h4.max_degree() == 8);
    for (int k = 0; k <= 8; ++k) CHECK(h4[k] == doctest::Approx(k == 4 ? 24.0 : 0.0).scale(1.0).epsilon(1e-10));

    const auto id = coefficients([](double x) { return x; }, 4);
    CHECK(id[1] == doctest::Approx(1.0));

    // E[-exp(-z^2/2) h_4(z)] against an independent Simpson integral.
    const auto ng = coefficients([](double x) { return -std::exp(-0.5 * x * x); }, 6);
    const double ref = oracle::gaussian_expect([](double z) {
        return -std::exp(-0.5 * z * z) * (z * z * z * z - 6 * z * z + 3);
    });
    CHECK(ng[4] == doctest::Approx(ref).epsilon(1e-9));
    CHECK(ng[4] == doctest::Approx(-3.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-9));
    CHECK_THROWS(coefficients([](double x) { return x; }, 10, 10));
}

TEST_CASE("information exponents")
{
    const auto h4 = coefficients([](double x) { return eval(4, x); }, 10);
    CHECK(information_exponent(h4) == 4);
    const auto ng = coefficients([](double x) { return -std::exp(-0.5 * x * x); }, 10);
    CHECK(information_exponent(ng) == 2);
    const auto id = coefficients([](double x) { return x; }, 10);
    CHECK(information_exponent(id) == 1);
    const auto c = coefficients([](double) { return 1.0; }, 10);
    CHECK_FALSE(information_exponent(c).has_value());
    CHECK_THROWS(information_exponent(id, 0.0));
    CHECK(joint_information_exponent(ng, h4) == 4);
}

TEST_CASE("product expectations agree with the monomial oracle")
{
    for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j)
            for (int k = 0; k <= 6; ++k) {
                const double ref = oracle::product_expectation({{i, 0}, {j, 0}, {k, 0}}, 0.0, 0.0, 0.0);
                CHECK(triple_product(i, j, k) == doctest::Approx(ref).scale(1.0));
            }
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = 0; c <= 4; ++c)
                for (int d = 0; d <= 4; ++d) {
                    const double ref = oracle::product_expectation({{a, 0}, {b, 0}, {c, 0}, {d, 0}}, 0, 0, 0);
                    CHECK(quadruple_product(a, b, c, d) == doctest::Approx(ref).scale(1.0));
                }
    // Known values: E[h_2 h_2 h_2] = 8, E[h_1 h_1 h_2] = 2, triangle violation gives 0.
    CHECK(triple_product(2, 2, 2) == doctest::Approx(8.0));
    CHECK(triple_product(1, 1, 2) == doctest::Approx(2.0));
    CHECK(triple_product(1, 1, 4) == 0.0);
    CHECK(triple_product(1, 2, 4) == 0.0);
}

TEST_CASE("correlated products agree with the monomial oracle")
{
    const std::vector<Correlations> sets{{0.3, -0.5, 0.2}, {0.9, 0.8, 0.75}, {-0.6, 0.4, -0.1}, {0.5, 0.5, 1.0}};
    for (const auto& c : sets) {
        for (int i = 0; i <= 5; ++i)
            for (int j = 0; j <= 5; ++j)
                for (int k = 0; k <= 5; ++k) {
                    const double ref = oracle::product_expectation({{i, 0}, {j, 1}, {k, 2}}, c.rho, c.tau, c.eta);
                    CHECK(triple_product(i, j, k, c) == doctest::Approx(ref).scale(1.0).epsilon(1e-9));
                }
        for (int i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6; ++j) {
                const double ref = oracle::product_expectation({{i, 0}, {1, 0}, {j, 1}}, c.rho, c.tau, c.eta);
                CHECK(same_argument_triple(i, j, c.rho) == doctest::Approx(ref).scale(1.0).epsilon(1e-9));
            }
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; j <= 3; ++j)
                for (int k = 0; k <= 3; ++k)
                    for (int t = 0; t <= 3; ++t) {
                        const double ref =
                            oracle::product_expectation({{i, 0}, {j, 0}, {k, 1}, {t, 2}}, c.rho, c.tau, c.eta);
                        CHECK(same_argument_quadruple(i, j, k, t, c) ==
                              doctest::Approx(ref).scale(1.0).epsilon(1e-9));
                    }
    }
}

TEST_CASE("product arguments are validated")
{
    CHECK_THROWS_AS(triple_product(-1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(quadruple_product(0, 0, -2, 0), std::invalid_argument);
    CHECK_THROWS_AS(triple_product(1, 1, 1, Correlations{1.2, 0, 0}), std::invalid_argument);
    // rho = tau = 0.9 forces eta >= 0.62.
    CHECK_THROWS_AS(require_realizable({0.9, 0.9, -0.5}), std::invalid_argument);
    CHECK_NOTHROW(require_realizable({0.9, 0.9, 0.9}));
}

TEST_CASE("property: symmetric in the uncorrelated indices")
{
    std::mt19937_64 eng(7);
    std::uniform_int_distribution<int> idx(0, 6);
    for (int rep = 0; rep < 200; ++rep) {
        const int a = idx(eng), b = idx(eng), c = idx(eng), d = idx(eng);
        const double q = quadruple_product(a, b, c, d);
        CHECK(quadruple_product(d, c, b, a) == doctest::Approx(q));
        CHECK(quadruple_product(b, d, a, c) == doctest::Approx(q));
        CHECK(triple_product(a, b, c) == doctest::Approx(triple_product(c, a, b)));
        // h_0 is the identity element.
        CHECK(quadruple_product(a, b, c, 0) == doctest::Approx(triple_product(a, b, c)));
    }
}

TEST_CASE("property: correlated triple reduces at rho = tau = eta = 1")
{
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; j <= 5; ++j)
            for (int k = 0; k <= 5; ++k)
                CHECK(triple_product(i, j, k, Correlations{1.0, 1.0, 1.0}) ==
                      doctest::Approx(triple_product(i, j, k)).scale(1.0));
}

TEST_CASE("quadrature cross-check stays within tolerance")
{
    for (const auto& c : check_products(8)) {
        INFO(c.family << " worst " << c.worst);
        CHECK(c.cases > 0);
        CHECK(c.max_rel_error < 1e-9);
    }
}
