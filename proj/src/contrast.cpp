#include "sica/contrast.hpp"

#include <charconv>
#include <cmath>

namespace sica {

namespace {

constexpr int kSeriesDegree = 12;

double stable_log_cosh(double x)
{
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

void require_dimension(const VectorRef& w, const VectorRef& x)
{
    if (w.size() != x.size()) throw std::invalid_argument("smoothing: w and x differ in dimension");
    if (w.size() < 3) throw std::invalid_argument("smoothing: requires d >= 3");
}

struct Projection {
    double s; // w.x
    double r; // |P_w^perp x|
    Eigen::VectorXd perp;
};

Projection project(const VectorRef& w, const VectorRef& x)
{
    Projection p;
    p.s = w.dot(x);
    p.perp = x - p.s * w;
    p.r = p.perp.norm();
    return p;
}

} // namespace

Contrast::Contrast(Kind kind, double a) : kind_(kind), a_(a)
{
    series_ = hermite::coefficients([this](double s) { return eval(s).g; }, kSeriesDegree);
    k2_ = hermite::information_exponent(series_).value_or(0);
}

Contrast Contrast::log_cosh(double a)
{
    if (!(a >= 1.0 && a <= 2.0)) throw std::invalid_argument("logcosh contrast: a must lie in [1, 2]");
    return Contrast(Kind::LogCosh, a);
}

Contrast Contrast::parse(const std::string& key)
{
    if (key == "neg_gaussian") return neg_gaussian();
    if (key == "h4") return h4();
    if (key == "logcosh") return log_cosh(1.0);
    const std::string prefix = "logcosh:a=";
    if (key.rfind(prefix, 0) == 0) {
        double a = 0.0;
        const char* first = key.data() + prefix.size();
        const char* last = key.data() + key.size();
        auto [p, ec] = std::from_chars(first, last, a);
        if (ec != std::errc{} || p != last) throw std::invalid_argument("bad contrast key '" + key + "'");
        return log_cosh(a);
    }
    throw std::invalid_argument("unknown contrast '" + key + "' (expected neg_gaussian, logcosh[:a=..], h4)");
}

std::string Contrast::key() const
{
    switch (kind_) {
    case Kind::NegGaussian: return "neg_gaussian";
    case Kind::H4: return "h4";
    case Kind::LogCosh: {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, a_);
        (void)ec;
        return "logcosh:a=" + std::string(buf, p);
    }
    }
    return {};
}

ContrastValue Contrast::eval(double s) const
{
    switch (kind_) {
    case Kind::NegGaussian: {
        const double e = std::exp(-0.5 * s * s);
        return {-e, s * e, (1.0 - s * s) * e};
    }
    case Kind::LogCosh: {
        const double t = std::tanh(a_ * s);
        return {stable_log_cosh(a_ * s) / a_, t, a_ * (1.0 - t * t)};
    }
    case Kind::H4: {
        const double s2 = s * s;
        return {s2 * s2 - 6.0 * s2 + 3.0, 4.0 * s2 * s - 12.0 * s, 12.0 * s2 - 12.0};
    }
    }
    return {0.0, 0.0, 0.0};
}

double Contrast::derivative(double s) const
{
    switch (kind_) {
    case Kind::NegGaussian: return s * std::exp(-0.5 * s * s);
    case Kind::LogCosh: return std::tanh(a_ * s);
    case Kind::H4: return 4.0 * s * s * s - 12.0 * s;
    }
    return 0.0;
}

GrowthBound Contrast::growth_bound() const
{
    switch (kind_) {
    case Kind::NegGaussian: return {1.0, 0.0}; // max |s e^{-s^2/2}| = e^{-1/2}
    case Kind::LogCosh: return {1.0, 0.0};
    case Kind::H4: return {12.0, 1.5};
    }
    return {0.0, 0.0};
}

// ---------------------------------------------------------------------------

double sphere_coordinate(int d, Rng& rng)
{
    if (d < 3) throw std::invalid_argument("sphere_coordinate: requires d >= 3");
    const double shape = 0.5 * (d - 2);
    const double x = rng.gamma(shape);
    const double y = rng.gamma(shape);
    return 2.0 * x / (x + y) - 1.0;
}

SphereCoordinateRule SphereCoordinateRule::build(int d, int nodes)
{
    if (d < 3) throw std::invalid_argument("SphereCoordinateRule: requires d >= 3");
    if (nodes < 1) throw std::invalid_argument("SphereCoordinateRule: need at least one node");
    SphereCoordinateRule rule;
    rule.d = d;
    rule.nodes.resize(static_cast<std::size_t>(nodes));
    rule.weights.resize(static_cast<std::size_t>(nodes));
    if (nodes == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 1.0;
        return rule;
    }
    // Symmetric Jacobi weight (1 - t^2)^a.
    const double a = 0.5 * (d - 4);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(nodes);
    Eigen::VectorXd sub(nodes - 1);
    sub[0] = std::sqrt(1.0 / (3.0 + 2.0 * a));
    for (int k = 2; k < nodes; ++k)
        sub[k - 1] = std::sqrt(k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("SphereCoordinateRule: eigen solver failed");
    for (int i = 0; i < nodes; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    return rule;
}

MonteCarloEstimate smoothed_loss(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                 double lambda, int mc, Rng& rng)
{
    require_dimension(w, x);
    if (mc < 1) throw std::invalid_argument("smoothed_loss: mc must be >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("smoothed_loss: lambda must be >= 0");
    const double s = w.dot(x);
    if (lambda == 0.0) return {G.eval(s).g, 0.0};

    const double r = std::sqrt(std::max(0.0, x.squaredNorm() - s * s));
    const double c = 1.0 / std::sqrt(1.0 + lambda * lambda);
    const int d = static_cast<int>(w.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (int k = 0; k < mc; ++k) {
        const double z1 = sphere_coordinate(d, rng);
        const double val = G.eval(c * (s + lambda * z1 * r)).g;
        sum += val;
        sum2 += val * val;
    }
    const double mean = sum / mc;
    const double var = mc > 1 ? std::max(0.0, (sum2 - mc * mean * mean) / (mc - 1)) : 0.0;
    return {mean, std::sqrt(var / mc)};
}

SmoothedGradient smoothed_sph_gradient(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                       double lambda, int mc, Rng& rng)
{
    require_dimension(w, x);
    if (mc < 1) throw std::invalid_argument("smoothed_sph_gradient: mc must be >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("smoothed_sph_gradient: lambda must be >= 0");
    Projection p = project(w, x);
    if (lambda == 0.0) {
        const double coef = G.derivative(p.s);
        return {coef * p.perp, coef, 0.0};
    }
    if (p.r < 1e-12) throw DegenerateInputError("smoothed_sph_gradient: x is parallel to w");

    const double c = 1.0 / std::sqrt(1.0 + lambda * lambda);
    const int d = static_cast<int>(w.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (int k = 0; k < mc; ++k) {
        const double z1 = sphere_coordinate(d, rng);
        const double val = G.derivative(c * (p.s + lambda * z1 * p.r)) * (c - lambda * z1 * p.s * c / p.r);
        sum += val;
        sum2 += val * val;
    }
    const double mean = sum / mc;
    const double var = mc > 1 ? std::max(0.0, (sum2 - mc * mean * mean) / (mc - 1)) : 0.0;
    return {mean * p.perp, mean, std::sqrt(var / mc)};
}

SmoothedGradient smoothed_sph_gradient(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                       double lambda, const SphereCoordinateRule& rule)
{
    require_dimension(w, x);
    if (rule.d != w.size()) throw std::invalid_argument("smoothed_sph_gradient: rule built for another dimension");
    if (!(lambda >= 0.0)) throw std::invalid_argument("smoothed_sph_gradient: lambda must be >= 0");
    Projection p = project(w, x);
    if (lambda == 0.0) {
        const double coef = G.derivative(p.s);
        return {coef * p.perp, coef, 0.0};
    }
    if (p.r < 1e-12) throw DegenerateInputError("smoothed_sph_gradient: x is parallel to w");

    const double c = 1.0 / std::sqrt(1.0 + lambda * lambda);
    double coef = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z1 = rule.nodes[i];
        coef += rule.weights[i] * G.derivative(c * (p.s + lambda * z1 * p.r)) *
                (c - lambda * z1 * p.s * c / p.r);
    }
    return {coef * p.perp, coef, 0.0};
}

double smoothed_population_loss(const hermite::HermiteSeries& g_series,
                                const hermite::HermiteSeries& l_series, double alpha,
                                double lambda, const SphereCoordinateRule& rule)
{
    if (std::abs(alpha) > 1.0) throw std::invalid_argument("smoothed_population_loss: |alpha| > 1");
    const int kmax = std::min(g_series.max_degree(), l_series.max_degree());
    const double c = 1.0 / std::sqrt(1.0 + lambda * lambda);
    const double perp = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double m = c * (alpha + lambda * perp * rule.nodes[i]);
        double acc = 0.0;
        double mk = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            acc += g_series[k] * l_series[k] / hermite::factorial(k) * mk;
            mk *= m;
        }
        total += rule.weights[i] * acc;
    }
    return total;
}

} // namespace sica
