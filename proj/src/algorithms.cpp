#include "sica/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sica {

namespace {

constexpr double kDegenerateNorm = 1e-14;
constexpr int kSgdBlockRows = 4096;
constexpr int kProbeRows = 1 << 16;

Vector normalized(const Vector& w, const char* what)
{
    const double nrm = w.norm();
    if (!(nrm >= kDegenerateNorm) || !std::isfinite(nrm))
        throw DegenerateUpdateError(std::string(what) + ": degenerate update norm");
    return w / nrm;
}

double overlap(const Vector& w, const Vector* spike)
{
    return spike ? std::clamp(w.dot(*spike), -1.0, 1.0) : std::numeric_limits<double>::quiet_NaN();
}

void require_unit(const Vector& w, const char* what)
{
    if (std::abs(w.norm() - 1.0) > 1e-8) throw std::invalid_argument(std::string(what) + ": w must be a unit vector");
}

} // namespace

InitSpec InitSpec::fixed_overlap(double alpha0)
{
    if (!(std::abs(alpha0) <= 1.0)) throw std::invalid_argument("InitSpec: |alpha0| must be <= 1");
    return {Kind::FixedOverlap, alpha0};
}

Vector initial_vector(const InitSpec& init, int d, const Vector* spike, Rng& rng)
{
    if (init.kind == InitSpec::Kind::UniformSphere) return random_unit_vector(d, rng);
    if (!spike) throw std::invalid_argument("initial_vector: FixedOverlap needs the spike");
    if (spike->size() != d) throw std::invalid_argument("initial_vector: spike has wrong dimension");
    if (!(std::abs(init.alpha0) <= 1.0)) throw std::invalid_argument("initial_vector: |alpha0| must be <= 1");
    if (d == 1) return init.alpha0 >= 0 ? *spike : Vector(-*spike);
    Vector u;
    double nrm = 0.0;
    do {
        u = random_unit_vector(d, rng);
        u -= u.dot(*spike) * *spike;
        nrm = u.norm();
    } while (nrm < 1e-8);
    u /= nrm;
    Vector w = init.alpha0 * *spike + std::sqrt(1.0 - init.alpha0 * init.alpha0) * u;
    return w / w.norm();
}

Direction parse_direction(const std::string& s)
{
    if (s == "maximize" || s == "max") return Direction::Maximize;
    if (s == "minimize" || s == "min") return Direction::Minimize;
    if (s == "auto") return Direction::Auto;
    throw std::invalid_argument("unknown direction '" + s + "' (expected maximize, minimize, auto)");
}

std::string to_string(Direction d)
{
    switch (d) {
    case Direction::Maximize: return "maximize";
    case Direction::Minimize: return "minimize";
    case Direction::Auto: return "auto";
    }
    return {};
}

double resolve_direction(Direction dir, const Contrast& G, const SpikedCumulantModel* model,
                         const Vector& w, const DataBatch* probe)
{
    if (dir == Direction::Maximize) return 1.0;
    if (dir == Direction::Minimize) return -1.0;
    const double c4g = G.hermite()[4];
    if (model) {
        const double prod = c4g * likelihood_hermite_closed(4, model->beta, model->prior);
        if (std::abs(prod) > 1e-12) return prod > 0 ? 1.0 : -1.0;
    }
    if (!probe || probe->n() == 0)
        throw std::invalid_argument("resolve_direction: auto needs a model with c4 != 0 or probe data");
    const Eigen::VectorXd s = probe->samples() * w;
    const double m2 = s.array().square().mean();
    const double m4 = s.array().square().square().mean();
    const double kurtosis = m4 / (m2 * m2) - 3.0;
    return c4g * kurtosis >= 0.0 ? 1.0 : -1.0;
}

// ---------------------------------------------------------------------------

void FasticaMoments::add(const FasticaMoments& o)
{
    if (sum_xg1.size() == 0) sum_xg1 = Vector::Zero(o.sum_xg1.size());
    sum_xg1 += o.sum_xg1;
    sum_g2 += o.sum_g2;
    sum_g += o.sum_g;
    n += o.n;
}

FasticaMoments fastica_moments(const Vector& w, const RowMatrix& rows, const Contrast& G)
{
    if (rows.cols() != w.size()) throw std::invalid_argument("fastica: batch and w differ in dimension");
    const Eigen::VectorXd s = rows * w;
    Eigen::VectorXd g1(s.size());
    FasticaMoments m;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const ContrastValue v = G.eval(s[i]);
        g1[i] = v.d1;
        m.sum_g2 += v.d2;
        m.sum_g += v.g;
    }
    m.sum_xg1 = rows.transpose() * g1;
    m.n = rows.rows();
    return m;
}

Vector fastica_update(const Vector& w, const FasticaMoments& m, bool regularized)
{
    if (m.n <= 0) throw std::invalid_argument("fastica: empty batch");
    const double inv = 1.0 / static_cast<double>(m.n);
    Vector next = m.sum_xg1 * inv;
    if (regularized) next -= (m.sum_g2 * inv) * w;
    return normalized(next, "fastica_step");
}

Vector fastica_step(const Vector& w, const DataBatch& batch, const Contrast& G, bool regularized)
{
    require_unit(w, "fastica_step");
    if (batch.n() == 0) throw std::invalid_argument("fastica_step: empty batch");
    return fastica_update(w, fastica_moments(w, batch.samples(), G), regularized);
}

FasticaMoments fastica_moments_streaming(const Vector& w, const SpikedCumulantModel& model,
                                         long long n, const Contrast& G, const Rng& rng)
{
    if (n < 1) throw std::invalid_argument("fastica: n must be >= 1");
    FasticaMoments total;
    total.sum_xg1 = Vector::Zero(model.d);
    std::uint64_t chunk = 0;
    for (long long start = 0; start < n; start += kChunkRows, ++chunk) {
        const int m = static_cast<int>(std::min<long long>(kChunkRows, n - start));
        Rng chunk_rng = rng.stream({chunk});
        total.add(fastica_moments(w, sample_rows(model, m, chunk_rng), G));
    }
    return total;
}

AlgorithmState fastica_run(const SpikedCumulantModel& model, const FasticaOptions& opts, std::uint64_t seed)
{
    if (opts.steps < 1) throw std::invalid_argument("fastica_run: steps must be >= 1");
    if (opts.n < 1) throw std::invalid_argument("fastica_run: n must be >= 1");
    const Rng root(seed);
    Rng init_rng = root.stream({0});

    AlgorithmState st;
    st.w = initial_vector(opts.init, model.d, &model.spike, init_rng);
    for (int t = 0; t < opts.steps; ++t) {
        const std::uint64_t data_id = opts.resample ? static_cast<std::uint64_t>(t) : 0;
        FasticaMoments m = fastica_moments_streaming(st.w, model, opts.n, opts.G, root.stream({1, data_id}));
        Vector next;
        try {
            next = fastica_update(st.w, m, opts.regularized);
        } catch (const DegenerateUpdateError&) {
            m = fastica_moments_streaming(st.w, model, opts.n, opts.G,
                                          root.stream({3, static_cast<std::uint64_t>(t)}));
            next = fastica_update(st.w, m, opts.regularized);
            st.samples += opts.n;
        }
        st.trace.push_back({st.step, st.samples, overlap(st.w, &model.spike), m.sum_g / static_cast<double>(m.n)});
        st.w = std::move(next);
        ++st.step;
        if (opts.resample || t == 0) st.samples += opts.n;
    }
    const long long eval_n = std::min<long long>(opts.n, kChunkRows);
    Rng eval_rng = root.stream({2});
    const FasticaMoments e = fastica_moments(st.w, sample_rows(model, static_cast<int>(eval_n), eval_rng), opts.G);
    st.trace.push_back({st.step, st.samples, overlap(st.w, &model.spike), e.sum_g / static_cast<double>(e.n)});
    return st;
}

AlgorithmState fastica_run(const DataBatch& data, const FasticaOptions& opts, std::uint64_t seed,
                           const Vector* spike)
{
    if (opts.steps < 1) throw std::invalid_argument("fastica_run: steps must be >= 1");
    if (data.n() == 0) throw std::invalid_argument("fastica_run: empty batch");
    if (spike && spike->size() != data.d()) throw std::invalid_argument("fastica_run: spike has wrong dimension");
    Rng init_rng = Rng(seed).stream({0});

    AlgorithmState st;
    st.w = initial_vector(opts.init, data.d(), spike, init_rng);
    for (int t = 0; t < opts.steps; ++t) {
        const FasticaMoments m = fastica_moments(st.w, data.samples(), opts.G);
        st.trace.push_back({st.step, st.samples, overlap(st.w, spike), m.sum_g / static_cast<double>(m.n)});
        st.w = fastica_update(st.w, m, opts.regularized);
        ++st.step;
        st.samples = data.n();
    }
    const FasticaMoments e = fastica_moments(st.w, data.samples(), opts.G);
    st.trace.push_back({st.step, st.samples, overlap(st.w, spike), e.sum_g / static_cast<double>(e.n)});
    return st;
}

// ---------------------------------------------------------------------------

Vector sgd_vanilla_step(const Vector& w, const VectorRef& x, const Contrast& G, double delta, double sign)
{
    require_unit(w, "sgd_vanilla_step");
    if (x.size() != w.size()) throw std::invalid_argument("sgd_vanilla_step: x has wrong dimension");
    const double s = w.dot(x);
    const double scale = sign * delta / static_cast<double>(w.size()) * G.derivative(s);
    Vector next = w + scale * (x - s * w);
    return normalized(next, "sgd_vanilla_step");
}

namespace {

void require_lambda(double lambda, Eigen::Index d)
{
    const double top = std::pow(static_cast<double>(d), 0.25);
    if (!(lambda >= 0.0) || lambda > top * (1.0 + 1e-12))
        throw std::invalid_argument("sgd_smoothed_step: lambda must lie in [0, d^{1/4}]");
}

} // namespace

Vector sgd_smoothed_step(const Vector& w, const VectorRef& x, const Contrast& G, double eta, double lambda,
                         const SphereCoordinateRule& rule, double sign)
{
    require_unit(w, "sgd_smoothed_step");
    require_lambda(lambda, w.size());
    const SmoothedGradient g = smoothed_sph_gradient(G, w, x, lambda, rule);
    return normalized(w + (sign * eta) * g.gradient, "sgd_smoothed_step");
}

Vector sgd_smoothed_step(const Vector& w, const VectorRef& x, const Contrast& G, double eta, double lambda,
                         int mc, Rng& rng, double sign)
{
    require_unit(w, "sgd_smoothed_step");
    require_lambda(lambda, w.size());
    const SmoothedGradient g = smoothed_sph_gradient(G, w, x, lambda, mc, rng);
    return normalized(w + (sign * eta) * g.gradient, "sgd_smoothed_step");
}

AlgorithmState sgd_run(const SpikedCumulantModel& model, const SgdOptions& opts, std::uint64_t seed)
{
    if (opts.samples < 1) throw std::invalid_argument("sgd_run: samples must be >= 1");
    if (!(opts.lr > 0.0)) throw std::invalid_argument("sgd_run: learning rate must be positive");
    if (opts.record_every < 0) throw std::invalid_argument("sgd_run: record_every must be >= 0");
    if (opts.smoothed) require_lambda(opts.lambda, model.d);

    const Rng root(seed);
    Rng init_rng = root.stream({0});
    AlgorithmState st;
    st.w = initial_vector(opts.init, model.d, &model.spike, init_rng);

    double sign = 1.0;
    {
        std::optional<DataBatch> probe;
        const double c4l = likelihood_hermite_closed(4, model.beta, model.prior);
        if (opts.direction == Direction::Auto && std::abs(opts.G.hermite()[4] * c4l) <= 1e-12) {
            Rng probe_rng = root.stream({4});
            probe.emplace(sample_rows(model, kProbeRows, probe_rng));
        }
        sign = resolve_direction(opts.direction, opts.G, &model, st.w, probe ? &*probe : nullptr);
    }

    std::optional<SphereCoordinateRule> rule;
    if (opts.smoothed && opts.mc == 0) rule = SphereCoordinateRule::build(model.d, opts.quadrature_nodes);
    Rng mc_rng = root.stream({2});
    const std::set<long long> checkpoints(opts.checkpoints.begin(), opts.checkpoints.end());

    RowMatrix block;
    double window_loss = 0.0;
    long long window_n = 0;
    for (long long k = 0; k < opts.samples; ++k) {
        const long long in_block = k % kSgdBlockRows;
        if (in_block == 0) {
            const int rows = static_cast<int>(std::min<long long>(kSgdBlockRows, opts.samples - k));
            Rng block_rng = root.stream({1, static_cast<std::uint64_t>(k / kSgdBlockRows)});
            block = sample_rows(model, rows, block_rng);
        }
        const auto x = block.row(in_block).transpose();
        const double g = opts.G.eval(st.w.dot(x)).g;
        if (k == 0) st.trace.push_back({0, 0, overlap(st.w, &model.spike), g});
        window_loss += g;
        ++window_n;

        if (!opts.smoothed)
            st.w = sgd_vanilla_step(st.w, x, opts.G, opts.lr, sign);
        else if (rule)
            st.w = sgd_smoothed_step(st.w, x, opts.G, opts.lr, opts.lambda, *rule, sign);
        else
            st.w = sgd_smoothed_step(st.w, x, opts.G, opts.lr, opts.lambda, opts.mc, mc_rng, sign);
        ++st.step;
        ++st.samples;

        const long long done = k + 1;
        const bool record = done == opts.samples || checkpoints.count(done) ||
                            (opts.record_every > 0 && done % opts.record_every == 0);
        if (record) {
            st.trace.push_back({st.step, st.samples, overlap(st.w, &model.spike), window_loss / window_n});
            window_loss = 0.0;
            window_n = 0;
        }
    }
    return st;
}

double predict_recovery_exponent(int k1, int k2, double lambda_exponent)
{
    if (k2 < 2 || k1 < k2) throw std::invalid_argument("predict_recovery_exponent: requires k1 >= k2 >= 2");
    if (!(lambda_exponent >= 0.0 && lambda_exponent <= 0.25))
        throw std::invalid_argument("predict_recovery_exponent: lambda_exponent must lie in [0, 1/4]");
    return static_cast<double>(k1) - 1.0 - 2.0 * (k2 - 2) * lambda_exponent;
}

} // namespace sica
