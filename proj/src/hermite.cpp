#include "sica/hermite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace sica::hermite {

namespace {

constexpr int kMaxNodes = 400;

double ipow(double base, int e)
{
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// 1/n!, zero for negative n.
double rfact(int n)
{
    if (n < 0) return 0.0;
    return 1.0 / factorial(n);
}

double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    return factorial(n) * rfact(k) * rfact(n - k);
}

void require_nonneg(std::initializer_list<int> idx)
{
    for (int i : idx)
        if (i < 0) throw std::invalid_argument("hermite: negative polynomial index");
}

// Orthonormal Hermite functions psi_k(x) * exp(-x^2/4) for k = n-1, n. The
// exponential damping keeps the recurrence finite at the outermost nodes.
std::pair<double, double> damped_pair(int n, double x)
{
    double prev = 0.0;
    double cur = std::exp(-0.25 * x * x);
    for (int k = 0; k < n; ++k) {
        double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
        prev = cur;
        cur = next;
    }
    return {prev, cur};
}

GaussRule build_rule(int n)
{
    if (n < 1 || n > kMaxNodes)
        throw QuadratureError("Gauss-Hermite rule: node count " + std::to_string(n) +
                              " outside [1, " + std::to_string(kMaxNodes) + "]");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 1.0;
        return rule;
    }

    // Golub-Welsch for starting nodes, then Newton on psi_n.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw QuadratureError("Gauss-Hermite rule: eigen solver failed");

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()[i];
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            auto [pm1, p] = damped_pair(n, x);
            if (pm1 == 0.0) break;
            double dx = p / (sqrt_n * pm1);
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) {
                converged = true;
                break;
            }
        }
        auto [pm1, p] = damped_pair(n, x);
        (void)p;
        if (!converged || !std::isfinite(x) || pm1 == 0.0)
            throw QuadratureError("Gauss-Hermite rule: Newton refinement failed");
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x) / (n * pm1 * pm1);
    }
    // Exact symmetry about zero.
    for (int i = 0; i < n / 2; ++i) {
        auto a = static_cast<std::size_t>(i);
        auto b = static_cast<std::size_t>(n - 1 - i);
        double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
        double w = 0.5 * (rule.weights[a] + rule.weights[b]);
        rule.nodes[a] = -x;
        rule.nodes[b] = x;
        rule.weights[a] = rule.weights[b] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

} // namespace

double eval(int k, double x)
{
    if (k < 0) throw std::invalid_argument("hermite::eval: negative degree");
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int m = 1; m < k; ++m) {
        double next = x * cur - m * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double factorial(int n)
{
    static const std::array<double, 21> table = [] {
        std::array<double, 21> t{};
        std::uint64_t f = 1;
        t[0] = 1.0;
        for (std::uint64_t i = 1; i <= 20; ++i) {
            f *= i;
            t[i] = static_cast<double>(f);
        }
        return t;
    }();
    if (n < 0) return 0.0;
    if (n <= 20) return table[static_cast<std::size_t>(n)];
    return std::exp(std::lgamma(n + 1.0));
}

std::shared_ptr<const GaussRule> gauss_rule(int nodes)
{
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const GaussRule>> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(nodes); it != cache.end()) return it->second;
    }
    auto built = std::make_shared<const GaussRule>(build_rule(nodes));
    std::lock_guard lock(mu);
    auto [it, inserted] = cache.emplace(nodes, std::move(built));
    return it->second;
}

HermiteSeries coefficients(const std::function<double(double)>& f, int max_degree, int nodes)
{
    if (max_degree < 0) throw std::invalid_argument("hermite::coefficients: negative max_degree");
    if (nodes <= max_degree)
        throw std::invalid_argument("hermite::coefficients: need more nodes than max_degree");
    auto rule = gauss_rule(nodes);

    HermiteSeries out;
    out.coefficients.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
    for (std::size_t i = 0; i < rule->size(); ++i) {
        const double x = rule->nodes[i];
        const double wf = rule->weights[i] * f(x);
        double prev = 0.0;
        double cur = 1.0;
        for (int k = 0; k <= max_degree; ++k) {
            out.coefficients[static_cast<std::size_t>(k)] += wf * cur;
            double next = x * cur - k * prev;
            prev = cur;
            cur = next;
        }
    }
    return out;
}

std::optional<int> information_exponent(const HermiteSeries& series, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("information_exponent: tol must be positive");
    for (int k = 1; k <= series.max_degree(); ++k)
        if (std::abs(series[k]) > tol * std::sqrt(factorial(k))) return k;
    return std::nullopt;
}

std::optional<int> joint_information_exponent(const HermiteSeries& f, const HermiteSeries& l,
                                              double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("information_exponent: tol must be positive");
    const int kmax = std::min(f.max_degree(), l.max_degree());
    for (int k = 1; k <= kmax; ++k) {
        const double thr = tol * std::sqrt(factorial(k));
        if (std::abs(f[k]) > thr && std::abs(l[k]) > thr) return k;
    }
    return std::nullopt;
}

double triple_product(int i, int j, int k)
{
    require_nonneg({i, j, k});
    if ((i + j + k) % 2 != 0) return 0.0;
    const int s = (i + j + k) / 2;
    return factorial(i) * factorial(j) * factorial(k) * rfact(s - i) * rfact(s - j) * rfact(s - k);
}

double quadruple_product(int m1, int m2, int m3, int m4)
{
    require_nonneg({m1, m2, m3, m4});
    std::array<int, 4> m{m1, m2, m3, m4};
    std::sort(m.begin(), m.end(), std::greater<>());
    const int sum = m[0] + m[1] + m[2] + m[3];
    if (sum % 2 != 0) return 0.0;
    const int M = sum / 2;
    const int a = m[0], b = m[1], c = m[2], d = m[3];

    // Linearise h_c h_d = sum_v C(c,v) C(d,v) v! h_{c+d-2v}, then apply the
    // triple-product identity to each term.
    double total = 0.0;
    for (int v = 0; v <= std::min(c, d); ++v) {
        total += factorial(c + d - 2 * v) * rfact(M - c - d + v) * rfact(M - a - v) *
                 rfact(M - b - v) * rfact(c - v) * rfact(d - v) * rfact(v);
    }
    return total * factorial(a) * factorial(b) * factorial(c) * factorial(d);
}

void require_realizable(const Correlations& c)
{
    constexpr double eps = 1e-12;
    for (double r : {c.rho, c.tau, c.eta})
        if (!std::isfinite(r) || std::abs(r) > 1.0 + eps)
            throw std::invalid_argument("hermite: correlation outside [-1, 1]");
    const double det = 1.0 + 2.0 * c.rho * c.tau * c.eta - c.rho * c.rho - c.tau * c.tau -
                       c.eta * c.eta;
    if (det < -eps) throw std::invalid_argument("hermite: correlations not realizable by unit vectors");
}

double triple_product(int i, int j, int k, const Correlations& c)
{
    require_nonneg({i, j, k});
    require_realizable(c);
    if ((i + j + k) % 2 != 0) return 0.0;

    // w2 = rho w1 + sqrt(1-rho^2) u, w3 = tau w1 + sqrt(1-tau^2) u'; only the
    // terms where the u and u' degrees match survive.
    const double cross = c.eta - c.tau * c.rho;
    const double base = factorial(i) * factorial(j) * factorial(k) * rfact((i + j - k) / 2) *
                        rfact((i + k - j) / 2);
    if (base == 0.0) return 0.0;
    double total = 0.0;
    for (int l = std::max(0, j - k); l <= j; ++l) {
        const int lp = k - j + l;
        if ((lp + l - i) % 2 != 0) continue;
        total += rfact(j - l) * rfact((lp + l - i) / 2) * ipow(c.rho, l) * ipow(c.tau, lp) *
                 ipow(cross, j - l);
    }
    return base * total;
}

double same_argument_triple(int i, int j, double rho)
{
    require_nonneg({i, j});
    if (!std::isfinite(rho) || std::abs(rho) > 1.0 + 1e-12)
        throw std::invalid_argument("hermite: correlation outside [-1, 1]");
    return ipow(rho, j) * triple_product(i, 1, j);
}

double same_argument_quadruple(int i, int j, int k, int t, const Correlations& c)
{
    require_nonneg({i, j, k, t});
    require_realizable(c);
    const double cross = c.eta - c.rho * c.tau;
    double total = 0.0;
    for (int a = std::max(0, k - t); a <= k; ++a) {
        const int b = t - k + a;
        total += binom(k, a) * binom(t, b) * factorial(k - a) * ipow(c.rho, a) * ipow(c.tau, b) *
                 ipow(cross, k - a) * quadruple_product(i, j, a, b);
    }
    return total;
}

} // namespace sica::hermite
