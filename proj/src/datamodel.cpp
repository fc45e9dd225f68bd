#include "sica/datamodel.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace sica {

namespace {

constexpr double kLaplaceScale = 0.70710678118654752440; // 1/sqrt(2): unit variance

constexpr double kPi = 3.14159265358979323846;

// log Phi(z), stable far into the lower tail.
double log_normal_cdf(double z)
{
    if (z > -20.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
    // Mills ratio asymptotic series.
    const double q = 1.0 / (z * z);
    const double series = 1.0 - q * (1.0 - 3.0 * q * (1.0 - 5.0 * q * (1.0 - 7.0 * q)));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

struct FiniteAtoms {
    std::vector<double> values;
    std::vector<double> probs;
};

FiniteAtoms atoms_of(const LatentPrior::Variant& v)
{
    return std::visit(
        [](const auto& p) -> FiniteAtoms {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rademacher>) return {{-1.0, 1.0}, {0.5, 0.5}};
            else if constexpr (std::is_same_v<T, ThreeNotFour>)
                return {{-1.0, 0.0, 2.0}, {1.0 / 3.0, 0.5, 1.0 / 6.0}};
            else if constexpr (std::is_same_v<T, DiscreteCustom>) return {p.values, p.probabilities};
            else return {};
        },
        v);
}

// Coefficients of h_k as a polynomial: h_k(x) = sum_m a_m x^{k-2m}.
double hermite_poly_coeff(int k, int m)
{
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * hermite::factorial(k) /
           (hermite::factorial(m) * hermite::factorial(k - 2 * m) * std::ldexp(1.0, m));
}

} // namespace

LatentPrior::LatentPrior(Variant v) : v_(std::move(v))
{
    auto atoms = atoms_of(v_);
    values_ = std::move(atoms.values);
    probs_ = std::move(atoms.probs);
    if (std::holds_alternative<DiscreteCustom>(v_)) {
        if (values_.empty() || values_.size() != probs_.size())
            throw std::invalid_argument("DiscreteCustom prior: values and probabilities must be nonempty and equal length");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]) || !std::isfinite(probs_[i]) || probs_[i] < 0.0)
                throw std::invalid_argument("DiscreteCustom prior: invalid atom");
        const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("DiscreteCustom prior: probabilities must sum to 1");
        if (std::abs(moment(1)) > 1e-9 || std::abs(moment(2) - 1.0) > 1e-9)
            throw std::invalid_argument("DiscreteCustom prior: must have mean 0 and variance 1");
    }
    cdf_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
}

LatentPrior LatentPrior::parse(const std::string& key)
{
    if (key == "rademacher") return LatentPrior(Rademacher{});
    if (key == "laplace") return LatentPrior(Laplace{});
    if (key == "3not4" || key == "three_not_four") return LatentPrior(ThreeNotFour{});
    throw std::invalid_argument("unknown prior '" + key + "' (expected rademacher, laplace, 3not4)");
}

std::string LatentPrior::key() const
{
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rademacher>) return "rademacher";
            else if constexpr (std::is_same_v<T, Laplace>) return "laplace";
            else if constexpr (std::is_same_v<T, ThreeNotFour>) return "3not4";
            else return "custom";
        },
        v_);
}

double LatentPrior::moment(int p) const
{
    if (p < 0) throw std::invalid_argument("LatentPrior::moment: negative order");
    if (std::holds_alternative<Laplace>(v_)) {
        if (p % 2 == 1) return 0.0;
        return hermite::factorial(p) * std::pow(kLaplaceScale, p);
    }
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * std::pow(values_[i], p);
    return m;
}

double LatentPrior::hermite_moment(int k) const
{
    if (finite_support()) {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * hermite::eval(k, values_[i]);
        return m;
    }
    double m = 0.0;
    for (int j = 0; 2 * j <= k; ++j) m += hermite_poly_coeff(k, j) * moment(k - 2 * j);
    return m;
}

double LatentPrior::sample(Rng& rng) const
{
    if (std::holds_alternative<Laplace>(v_)) {
        double u = rng.uniform();
        while (u == 0.0) u = rng.uniform();
        return u < 0.5 ? kLaplaceScale * std::log(2.0 * u) : -kLaplaceScale * std::log(2.0 * (1.0 - u));
    }
    const double u = rng.uniform();
    for (std::size_t i = 0; i + 1 < cdf_.size(); ++i)
        if (u < cdf_[i]) return values_[i];
    return values_.back();
}

bool LatentPrior::operator==(const LatentPrior& o) const
{
    return v_.index() == o.v_.index() && values_ == o.values_ && probs_ == o.probs_;
}

// ---------------------------------------------------------------------------

Whitening::Whitening(double beta, Vector spike) : v_(std::move(spike))
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("whitening: beta must be a finite value >= 0");
    c_ = beta / (1.0 + beta + std::sqrt(1.0 + beta));
}

Eigen::MatrixXd Whitening::dense() const
{
    const auto d = v_.size();
    return Eigen::MatrixXd::Identity(d, d) - c_ * v_ * v_.transpose();
}

Whitening whitening_matrix(double beta, const Vector& spike) { return {beta, spike}; }

Vector random_unit_vector(int d, Rng& rng)
{
    if (d < 1) throw std::invalid_argument("random_unit_vector: d must be >= 1");
    Vector u(d);
    double nrm = 0.0;
    do {
        for (int i = 0; i < d; ++i) u[i] = rng.normal();
        nrm = u.norm();
    } while (nrm == 0.0);
    return u / nrm;
}

SpikedCumulantModel::SpikedCumulantModel(double beta_, Vector spike_, LatentPrior prior_)
    : d(static_cast<int>(spike_.size())), beta(beta_), spike(std::move(spike_)), prior(std::move(prior_))
{
    if (d < 1) throw std::invalid_argument("SpikedCumulantModel: dimension must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("SpikedCumulantModel: beta must be a finite value >= 0");
    if (std::abs(spike.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("SpikedCumulantModel: spike must have unit norm");
}

DataBatch::DataBatch(RowMatrix samples) : x_(std::move(samples))
{
    if (!x_.allFinite()) throw std::invalid_argument("DataBatch: non-finite entry");
}

RowMatrix sample_rows(const SpikedCumulantModel& model, int n, Rng& rng)
{
    if (n < 0) throw std::invalid_argument("sample_rows: negative n");
    const int d = model.d;
    const double c = model.whitening().coefficient();
    const double sb = std::sqrt(model.beta);
    const Vector& v = model.spike;
    RowMatrix x(n, d);
    for (int i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (int j = 0; j < d; ++j) row[j] = rng.normal();
        const double signal = sb * model.prior.sample(rng);
        const double proj = row.dot(v) + signal;
        row += (signal - c * proj) * v.transpose();
    }
    return x;
}

DataBatch sample_batch(const SpikedCumulantModel& model, int n, std::uint64_t seed)
{
    if (n < 1) throw std::invalid_argument("sample_batch: n must be >= 1");
    RowMatrix x(n, model.d);
    const Rng root(seed);
    for (int start = 0, chunk = 0; start < n; start += kChunkRows, ++chunk) {
        const int m = std::min(kChunkRows, n - start);
        Rng rng = root.stream({static_cast<std::uint64_t>(chunk)});
        x.middleRows(start, m) = sample_rows(model, m, rng);
    }
    return DataBatch(std::move(x));
}

double likelihood_ratio(double y, double beta, const LatentPrior& prior)
{
    if (!(beta >= 0.0)) throw std::invalid_argument("likelihood_ratio: beta must be >= 0");
    if (beta == 0.0) return 1.0;
    const double a = std::sqrt(1.0 + beta);
    const double sb = std::sqrt(beta);
    auto kernel = [&](double nu) {
        const double r = a * y - sb * nu;
        return a * std::exp(-0.5 * r * r + 0.5 * y * y);
    };
    if (prior.finite_support()) {
        double l = 0.0;
        const auto& vals = prior.support();
        const auto& probs = prior.probabilities();
        for (std::size_t i = 0; i < vals.size(); ++i) l += probs[i] * kernel(vals[i]);
        return l;
    }

    // Laplace: each half-line is a shifted Gaussian tail, in closed form.
    //   int_0^inf e^{-t/b}/(2b) e^{-(m - sb t)^2/2} dt = sqrt(2 pi)/(2 b sb) e^{c^2/2 - c m} Phi(m - c)
    // with c = 1/(b sb), m = +-a y; combined in log space against e^{y^2/2}.
    const double c = 1.0 / (kLaplaceScale * sb);
    const double log_pref = std::log(a * std::sqrt(2.0 * kPi) / (2.0 * kLaplaceScale * sb)) + 0.5 * y * y + 0.5 * c * c;
    double total = 0.0;
    for (double m : {a * y, -a * y}) total += std::exp(log_pref - c * m + log_normal_cdf(m - c));
    return total;
}

hermite::HermiteSeries likelihood_hermite_data(double beta, const LatentPrior& prior, int max_degree,
                                               int nodes)
{
    return hermite::coefficients([&](double y) { return likelihood_ratio(y, beta, prior); },
                                 max_degree, nodes);
}

double likelihood_hermite_closed(int k, double beta, const LatentPrior& prior)
{
    if (!(beta >= 0.0)) throw std::invalid_argument("likelihood_hermite_closed: beta must be >= 0");
    const double alpha = std::sqrt(beta / (1.0 + beta));
    return std::pow(alpha, k) * prior.hermite_moment(k);
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd empirical_covariance(const DataBatch& batch)
{
    const auto& x = batch.samples();
    return (x.transpose() * x) / static_cast<double>(batch.n());
}

DataBatch center_and_whiten(const DataBatch& raw, std::optional<int> pca_components, double rank_tol)
{
    const int n = raw.n();
    const int d = raw.d();
    const int k = pca_components.value_or(d);
    if (k < 1 || k > d) throw std::invalid_argument("center_and_whiten: pca_components must be in [1, d]");
    if (n <= k) throw std::invalid_argument("center_and_whiten: need more samples than output dimensions");

    const Eigen::RowVectorXd mean = raw.samples().colwise().mean();
    RowMatrix centered = raw.samples().rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("center_and_whiten: eigen solver failed");
    const Vector& evals = es.eigenvalues(); // ascending
    const double top = evals[d - 1];
    if (!(top > 0.0)) throw RankDeficientError("center_and_whiten: covariance is zero");
    const double smallest_kept = evals[d - k];
    if (smallest_kept < rank_tol * top)
        throw RankDeficientError("center_and_whiten: covariance is rank deficient (eigenvalue " +
                                 std::to_string(smallest_kept) + ")");

    const Eigen::MatrixXd basis = es.eigenvectors().rightCols(k);
    const Vector scale = evals.tail(k).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd transform = basis * scale.asDiagonal();
    if (!pca_components) transform = transform * basis.transpose(); // symmetric (ZCA) form
    return DataBatch(RowMatrix(centered * transform));
}

} // namespace sica
