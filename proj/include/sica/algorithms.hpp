#pragma once

#include "sica/contrast.hpp"
#include "sica/datamodel.hpp"
#include "sica/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sica {

class DegenerateUpdateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitSpec {
    enum class Kind { UniformSphere, FixedOverlap };

    Kind kind = Kind::UniformSphere;
    double alpha0 = 0.0;

    static InitSpec uniform_sphere() { return {}; }
    // Throws std::invalid_argument if |alpha0| > 1.
    static InitSpec fixed_overlap(double alpha0);
};

// Initial iterate. FixedOverlap needs the spike: w0 = alpha0 v + sqrt(1 - alpha0^2) u
// with u uniform on the unit sphere orthogonal to v.
Vector initial_vector(const InitSpec& init, int d, const Vector* spike, Rng& rng);

struct TracePoint {
    long long step = 0;
    long long samples = 0;
    double alpha = 0.0; // w.v, NaN when no spike is known
    double loss = 0.0;  // sample mean of G(w.x)
};

struct AlgorithmState {
    Vector w;
    long long step = 0;
    long long samples = 0;
    std::vector<TracePoint> trace;
};

enum class Direction { Maximize, Minimize, Auto };

Direction parse_direction(const std::string& s);
std::string to_string(Direction d);

// +1 to increase E[G(w.x)], -1 to decrease it. Auto uses sign(c4^G c4^l) from
// the model; when that product vanishes (or no model is given) it falls back
// to sign(c4^G * excess kurtosis of w.x) on the probe batch.
double resolve_direction(Direction dir, const Contrast& G, const SpikedCumulantModel* model,
                         const Vector& w, const DataBatch* probe);

// ---------------------------------------------------------------------------
// FastICA

// Batch sums needed by one FastICA update.
struct FasticaMoments {
    Vector sum_xg1;      // sum_i x_i G'(w.x_i)
    double sum_g2 = 0.0; // sum_i G''(w.x_i)
    double sum_g = 0.0;  // sum_i G(w.x_i)
    long long n = 0;

    void add(const FasticaMoments& o);
};

FasticaMoments fastica_moments(const Vector& w, const RowMatrix& rows, const Contrast& G);

// w~ = mean x G'(w.x) - mean G''(w.x) w (regularized) or only the first term;
// returns w~/|w~|. Throws DegenerateUpdateError if |w~| < 1e-14.
Vector fastica_update(const Vector& w, const FasticaMoments& m, bool regularized);
Vector fastica_step(const Vector& w, const DataBatch& batch, const Contrast& G, bool regularized);

// Streams n fresh rows of the model in chunks of kChunkRows (chunk c from
// stream {c} of rng) and accumulates the moments in chunk order; equal to
// fastica_moments on sample_batch with the same root stream.
FasticaMoments fastica_moments_streaming(const Vector& w, const SpikedCumulantModel& model,
                                         long long n, const Contrast& G, const Rng& rng);

struct FasticaOptions {
    Contrast G = Contrast::neg_gaussian();
    int steps = 4;
    long long n = 0; // rows per step
    bool resample = true;
    bool regularized = true;
    InitSpec init;
};

// Trace has steps + 1 points. Point t holds alpha of w_t and the mean of
// G(w_t.x) over the batch used for step t + 1; the last point uses an
// independent evaluation batch of min(n, kChunkRows) rows (or the fixed batch).
AlgorithmState fastica_run(const SpikedCumulantModel& model, const FasticaOptions& opts, std::uint64_t seed);

// Fixed-data variant; alpha is recorded only when the spike is provided.
AlgorithmState fastica_run(const DataBatch& data, const FasticaOptions& opts, std::uint64_t seed,
                           const Vector* spike = nullptr);

// ---------------------------------------------------------------------------
// Online spherical SGD

// w + sign (delta/d) P_w^perp x G'(w.x), normalized. sign = +1 ascends E[G].
Vector sgd_vanilla_step(const Vector& w, const VectorRef& x, const Contrast& G, double delta,
                        double sign = 1.0);

// w + sign eta grad L_lambda, normalized. lambda must lie in [0, d^{1/4}].
Vector sgd_smoothed_step(const Vector& w, const VectorRef& x, const Contrast& G, double eta, double lambda,
                         const SphereCoordinateRule& rule, double sign = 1.0);
Vector sgd_smoothed_step(const Vector& w, const VectorRef& x, const Contrast& G, double eta, double lambda,
                         int mc, Rng& rng, double sign = 1.0);

struct SgdOptions {
    Contrast G = Contrast::neg_gaussian();
    long long samples = 0; // one fresh sample per step
    bool smoothed = false;
    double lr = 0.0;       // delta (vanilla, scaled by 1/d) or eta (smoothed)
    double lambda = 0.0;
    int mc = 0;            // 0: Gauss-Jacobi quadrature over z1, else Monte Carlo draws
    int quadrature_nodes = 16;
    Direction direction = Direction::Auto;
    InitSpec init;
    long long record_every = 0; // 0: only checkpoints and the final step
    std::vector<long long> checkpoints;
};

// Trace point at step 0, at every multiple of record_every, at each
// checkpoint and at the final step. loss is the running mean of G(w.x) over
// the samples since the previous point.
AlgorithmState sgd_run(const SpikedCumulantModel& model, const SgdOptions& opts, std::uint64_t seed);

// theta = k1 - 1 - 2 (k2 - 2) lambda_exponent. Requires k1 >= k2 >= 2 and
// lambda_exponent in [0, 1/4].
double predict_recovery_exponent(int k1, int k2, double lambda_exponent);

} // namespace sica
