#pragma once

#include "sica/hermite.hpp"
#include "sica/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sica {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Latent priors. Every built-in prior has mean 0 and variance 1.

struct Rademacher {};
struct Laplace {}; // scale 1/sqrt(2)
struct ThreeNotFour {}; // {-1, 0, 2} w.p. {1/3, 1/2, 1/6}
struct DiscreteCustom {
    std::vector<double> values;
    std::vector<double> probabilities;
};

class LatentPrior {
public:
    using Variant = std::variant<Rademacher, Laplace, ThreeNotFour, DiscreteCustom>;

    LatentPrior() : LatentPrior(Rademacher{}) {}
    // Throws std::invalid_argument for a DiscreteCustom that is not a
    // zero-mean, unit-variance probability vector.
    LatentPrior(Variant v);

    // "rademacher", "laplace", "3not4"; custom priors have no key.
    static LatentPrior parse(const std::string& key);
    std::string key() const;

    const Variant& variant() const { return v_; }
    bool finite_support() const { return !std::holds_alternative<Laplace>(v_); }
    // Finite-support atoms; empty for Laplace.
    const std::vector<double>& support() const { return values_; }
    const std::vector<double>& probabilities() const { return probs_; }

    // E[nu^p].
    double moment(int p) const;
    // E[h_k(nu)].
    double hermite_moment(int k) const;

    double sample(Rng& rng) const;

    bool operator==(const LatentPrior& o) const;

private:
    Variant v_;
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

// ---------------------------------------------------------------------------
// Whitening S = I - c v v^T with c = beta / (1 + beta + sqrt(1 + beta)).

class Whitening {
public:
    Whitening(double beta, Vector spike);

    double coefficient() const { return c_; }
    const Vector& spike() const { return v_; }

    Vector apply(const Vector& x) const { return x - c_ * v_.dot(x) * v_; }
    Eigen::MatrixXd dense() const;

private:
    double c_;
    Vector v_;
};

Whitening whitening_matrix(double beta, const Vector& spike);

// Uniform draw from the unit sphere.
Vector random_unit_vector(int d, Rng& rng);

struct SpikedCumulantModel {
    int d = 0;
    double beta = 0.0;
    Vector spike;
    LatentPrior prior;

    // Validates d >= 1, beta >= 0 and |spike| = 1.
    SpikedCumulantModel(double beta, Vector spike, LatentPrior prior = {});

    Whitening whitening() const { return {beta, spike}; }
};

class DataBatch {
public:
    DataBatch() = default;
    // Throws std::invalid_argument if any entry is not finite.
    explicit DataBatch(RowMatrix samples);

    int n() const { return static_cast<int>(x_.rows()); }
    int d() const { return static_cast<int>(x_.cols()); }
    const RowMatrix& samples() const { return x_; }
    auto row(int i) const { return x_.row(i); }

private:
    RowMatrix x_;
};

// Rows S (sqrt(beta) nu v + z), generated in order from the given stream.
RowMatrix sample_rows(const SpikedCumulantModel& model, int n, Rng& rng);

// Deterministic in (model, n, seed). Draws in chunks of 2^16 rows, chunk c
// using stream {c} of the seed, the same layout used by streaming FastICA.
DataBatch sample_batch(const SpikedCumulantModel& model, int n, std::uint64_t seed);

inline constexpr int kChunkRows = 1 << 16;

// Density of the 1-D marginal y = v.x divided by the standard normal density.
// Throws std::runtime_error if the Laplace integral fails.
double likelihood_ratio(double y, double beta, const LatentPrior& prior);

hermite::HermiteSeries likelihood_hermite_data(double beta, const LatentPrior& prior, int max_degree,
                                               int nodes = hermite::kDefaultNodes);

// Closed form c_k = (beta/(1+beta))^{k/2} E[h_k(nu)].
double likelihood_hermite_closed(int k, double beta, const LatentPrior& prior);

class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Empirical centering and whitening. Without pca_components the symmetric
// inverse square root of the covariance is applied (output dimension d);
// with k components the data is projected onto the top-k eigenvectors and
// scaled to unit variance (output dimension k).
DataBatch center_and_whiten(const DataBatch& raw, std::optional<int> pca_components = std::nullopt,
                            double rank_tol = 1e-10);

// Empirical second-moment matrix X^T X / n.
Eigen::MatrixXd empirical_covariance(const DataBatch& batch);

// CSV with header x0,...,x{d-1}; values written with round-trip precision.
void write_csv(const DataBatch& batch, const std::filesystem::path& path);
DataBatch read_csv(const std::filesystem::path& path);

// Little-endian: "SCB1", u32 n, u32 d, u32 reserved (0), then n*d f64 row-major.
void write_binary(const DataBatch& batch, const std::filesystem::path& path);
DataBatch read_binary(const std::filesystem::path& path);

} // namespace sica
