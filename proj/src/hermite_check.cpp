#include "sica/hermite_check.hpp"

#include "sica/hermite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace sica::hermite {

namespace {

void record(ProductCheck& c, double closed, double quad, const std::string& label)
{
    ++c.cases;
    const double err = std::abs(closed - quad) / std::max(1.0, std::abs(quad));
    if (err >= c.max_rel_error) {
        c.max_rel_error = err;
        c.worst = label;
    }
}

std::string label(std::initializer_list<int> idx, const Correlations* c = nullptr)
{
    std::string s = "(";
    for (int v : idx) s += (s.size() > 1 ? "," : "") + std::to_string(v);
    s += ")";
    if (c) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " rho=%g tau=%g eta=%g", c->rho, c->tau, c->eta);
        s += buf;
    }
    return s;
}

// Unit vectors in R^3 with the prescribed inner products.
std::array<std::array<double, 3>, 3> realize(const Correlations& c)
{
    const double s = std::sqrt(1.0 - c.rho * c.rho);
    const double b = (c.eta - c.rho * c.tau) / s;
    const double r = std::sqrt(std::max(0.0, 1.0 - c.tau * c.tau - b * b));
    return {{{1.0, 0.0, 0.0}, {c.rho, s, 0.0}, {c.tau, b, r}}};
}

// Tensor Gauss-Hermite expectation of f(w1.x, w2.x, w3.x), x ~ N(0, I_3).
template <class F>
double expect3(const GaussRule& g, const Correlations& c, F&& f)
{
    const auto w = realize(c);
    double acc = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b)
            for (std::size_t e = 0; e < g.size(); ++e) {
                const std::array<double, 3> x{g.nodes[a], g.nodes[b], g.nodes[e]};
                double p[3];
                for (int k = 0; k < 3; ++k) p[k] = w[k][0] * x[0] + w[k][1] * x[1] + w[k][2] * x[2];
                acc += g.weights[a] * g.weights[b] * g.weights[e] * f(p[0], p[1], p[2]);
            }
    return acc;
}

} // namespace

std::vector<ProductCheck> check_products(int max_total_degree)
{
    const int K = max_total_degree;
    const auto g1 = gauss_rule(std::max(8, K + 4));
    const auto g3 = gauss_rule(K / 2 + 2);
    const std::array<Correlations, 4> corr{{{0.3, -0.5, 0.2}, {0.9, 0.8, 0.75}, {-0.6, 0.4, -0.1}, {0.5, 0.5, 1.0}}};

    ProductCheck dbl{"double", 0, 0.0, {}};
    ProductCheck tri{"triple", 0, 0.0, {}};
    ProductCheck quad{"quadruple", 0, 0.0, {}};
    ProductCheck ctri{"correlated triple", 0, 0.0, {}};
    ProductCheck stri{"same-argument triple", 0, 0.0, {}};
    ProductCheck squad{"same-argument quadruple", 0, 0.0, {}};

    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K; ++j) {
            const double q = g1->expect([&](double x) { return eval(i, x) * eval(j, x); });
            record(dbl, i == j ? factorial(i) : 0.0, q, label({i, j}));
            for (int k = 0; i + j + k <= K; ++k) {
                const double q3 = g1->expect([&](double x) { return eval(i, x) * eval(j, x) * eval(k, x); });
                record(tri, triple_product(i, j, k), q3, label({i, j, k}));
                for (int l = 0; i + j + k + l <= K; ++l) {
                    const double q4 = g1->expect(
                        [&](double x) { return eval(i, x) * eval(j, x) * eval(k, x) * eval(l, x); });
                    record(quad, quadruple_product(i, j, k, l), q4, label({i, j, k, l}));
                }
            }
        }

    for (const auto& c : corr) {
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) {
                if (i + j + 1 <= K) {
                    const double q = expect3(*g3, c, [&](double a, double b, double) {
                        return eval(i, a) * a * eval(j, b);
                    });
                    record(stri, same_argument_triple(i, j, c.rho), q, label({i, j}, &c));
                }
                for (int k = 0; i + j + k <= K; ++k) {
                    const double q3 = expect3(*g3, c, [&](double a, double b, double e) {
                        return eval(i, a) * eval(j, b) * eval(k, e);
                    });
                    record(ctri, triple_product(i, j, k, c), q3, label({i, j, k}, &c));
                    for (int t = 0; i + j + k + t <= K; ++t) {
                        const double q4 = expect3(*g3, c, [&](double a, double b, double e) {
                            return eval(i, a) * eval(j, a) * eval(k, b) * eval(t, e);
                        });
                        record(squad, same_argument_quadruple(i, j, k, t, c), q4, label({i, j, k, t}, &c));
                    }
                }
            }
    }
    return {dbl, tri, quad, ctri, stri, squad};
}

} // namespace sica::hermite
