#pragma once

#include "sica/datamodel.hpp"
#include "sica/hermite.hpp"
#include "sica/rng.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace sica {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

struct ContrastValue {
    double g;
    double d1;
    double d2;
};

// |G'(s)| <= c1 (1 + s^2)^c2 for all s.
struct GrowthBound {
    double c1;
    double c2;
};

// Even contrast function G with analytic first and second derivatives.
class Contrast {
public:
    enum class Kind { NegGaussian, LogCosh, H4 };

    static Contrast neg_gaussian() { return Contrast(Kind::NegGaussian, 1.0); }
    // a in [1, 2].
    static Contrast log_cosh(double a = 1.0);
    static Contrast h4() { return Contrast(Kind::H4, 1.0); }

    // "neg_gaussian", "logcosh", "logcosh:a=1.5", "h4".
    static Contrast parse(const std::string& key);
    std::string key() const;

    Kind kind() const { return kind_; }
    double a() const { return a_; }

    ContrastValue eval(double s) const;
    double derivative(double s) const;

    // c_0..c_12 of G.
    const hermite::HermiteSeries& hermite() const { return series_; }
    // k2*: information exponent of G itself.
    int information_exponent() const { return k2_; }
    GrowthBound growth_bound() const;

private:
    Contrast(Kind kind, double a);

    Kind kind_;
    double a_;
    hermite::HermiteSeries series_;
    int k2_ = 0;
};

class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// First coordinate z1 of a uniform point on the unit sphere of w's orthogonal
// complement (S^{d-2}); density proportional to (1 - t^2)^{(d-4)/2}.
double sphere_coordinate(int d, Rng& rng);

// Gauss-Jacobi rule for expectations over z1 in dimension d.
struct SphereCoordinateRule {
    int d = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    static SphereCoordinateRule build(int d, int nodes = 16);
};

struct MonteCarloEstimate {
    double mean;
    double std_error;
};

// Smoothed loss L_lambda[G(w.x)] estimated with mc draws of z1. Uses
// ((w + lambda z)/|w + lambda z|).x = (w.x + lambda |P_w^perp x| z1)/sqrt(1+lambda^2).
// Exact (no draws) when lambda = 0. Requires d >= 3.
MonteCarloEstimate smoothed_loss(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                 double lambda, int mc, Rng& rng);

// Spherical gradient of the smoothed loss, gradient = coefficient * P_w^perp x.
// coefficient_se is the Monte Carlo standard error of coefficient (0 for the
// quadrature form).
struct SmoothedGradient {
    Eigen::VectorXd gradient;
    double coefficient;
    double coefficient_se;
};

// Monte Carlo form; consumes the same z1 draws as smoothed_loss given the same
// stream. Throws DegenerateInputError if lambda > 0 and |P_w^perp x| < 1e-12.
SmoothedGradient smoothed_sph_gradient(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                       double lambda, int mc, Rng& rng);

// Deterministic form: the z1 expectation by Gauss-Jacobi quadrature.
SmoothedGradient smoothed_sph_gradient(const Contrast& G, const VectorRef& w, const VectorRef& x,
                                       double lambda, const SphereCoordinateRule& rule);

// Population smoothed loss of the spiked model as a function of the overlap
// alpha, from the Hermite data of G and of the likelihood ratio.
double smoothed_population_loss(const hermite::HermiteSeries& g_series,
                                const hermite::HermiteSeries& l_series, double alpha,
                                double lambda, const SphereCoordinateRule& rule);

} // namespace sica
