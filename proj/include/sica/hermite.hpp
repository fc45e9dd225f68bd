#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

// Probabilists' Hermite polynomials and the Gaussian product identities used
// to analyse ICA losses. All expectations are over a standard normal variable
// unless stated otherwise.
namespace sica::hermite {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultNodes = 200;

// h_k(x) via h_{k+1} = x h_k - k h_{k-1}.
double eval(int k, double x);

// n! as a double; exact up to 20!, log-gamma beyond. Negative n yields 0 so
// that product-formula terms with a negative factorial argument vanish.
double factorial(int n);

// Gauss-Hermite rule for the standard normal density: sum_i weight_i f(node_i)
// approximates E[f(z)], exactly for polynomials of degree <= 2*size()-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double expect(F&& f) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Cached, thread-safe. Throws QuadratureError if the rule cannot be built.
std::shared_ptr<const GaussRule> gauss_rule(int nodes = kDefaultNodes);

struct HermiteSeries {
    std::vector<double> coefficients; // c_k = E[f(z) h_k(z)], k = 0..max_degree

    int max_degree() const { return static_cast<int>(coefficients.size()) - 1; }
    double operator[](int k) const { return coefficients.at(static_cast<std::size_t>(k)); }
};

HermiteSeries coefficients(const std::function<double(double)>& f, int max_degree,
                           int nodes = kDefaultNodes);

inline constexpr double kDefaultExponentTol = 1e-6;

// Smallest k >= 1 with |c_k| > tol * sqrt(k!); nullopt when every coefficient
// up to max_degree is below the threshold.
std::optional<int> information_exponent(const HermiteSeries& series,
                                        double tol = kDefaultExponentTol);

// Information exponent of E_P[f(w.x)] = sum_k c_k^f c_k^l alpha^k / k!, i.e.
// the first k >= 1 where both coefficients are above threshold.
std::optional<int> joint_information_exponent(const HermiteSeries& f, const HermiteSeries& l,
                                              double tol = kDefaultExponentTol);

// E[h_i h_j h_k].
double triple_product(int i, int j, int k);

// E[h_a h_b h_c h_d].
double quadruple_product(int m1, int m2, int m3, int m4);

// Pairwise inner products of unit vectors w1, w2, w3:
// rho = w1.w2, tau = w1.w3, eta = w2.w3.
struct Correlations {
    double rho = 0.0;
    double tau = 0.0;
    double eta = 0.0;
};

// Throws std::invalid_argument unless the Gram matrix of (w1, w2, w3) is PSD.
void require_realizable(const Correlations& c);

// E[h_i(w1.x) h_j(w2.x) h_k(w3.x)] for x ~ N(0, I).
double triple_product(int i, int j, int k, const Correlations& c);

// E[h_i(w1.x) h_1(w1.x) h_j(w2.x)], rho = w1.w2.
double same_argument_triple(int i, int j, double rho);

// E[h_i(w1.x) h_j(w1.x) h_k(w2.x) h_t(w3.x)].
double same_argument_quadruple(int i, int j, int k, int t, const Correlations& c);

} // namespace sica::hermite
