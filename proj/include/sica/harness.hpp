#pragma once

#include "sica/algorithms.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sica {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class AlgorithmKind { FastICA, Sgd, SmoothedSgd };

std::string to_string(AlgorithmKind k);
AlgorithmKind parse_algorithm(const std::string& s);

// Learning-rate rule.
//   constant:         lr = value
//   per_dimension:    lr = value (vanilla SGD already scales by 1/d)
//   smoothing_scaled: eta = value * d^{-k1/2} * lambda^{2 k2 - 2}, with k1 the
//                     population information exponent and k2 that of G
struct EtaRule {
    enum class Kind { Constant, PerDimension, SmoothingScaled };
    Kind kind = Kind::PerDimension;
    double value = 0.2;
};

struct ModelConfig {
    int d = 25;
    double beta = 5.0;
    std::string prior = "rademacher";
};

struct AlgorithmConfig {
    AlgorithmKind kind = AlgorithmKind::FastICA;
    std::string contrast = "neg_gaussian";
    int steps = 4;                       // FastICA iterations
    std::optional<long long> n;          // rows per FastICA step or total SGD samples
    std::optional<double> n_exponent;    // n = round(n_multiplier * d^n_exponent)
    double n_multiplier = 1.0;
    bool resample = true;
    bool regularized = true;
    double lambda_exponent = 0.0;        // lambda = d^lambda_exponent
    EtaRule eta;
    Direction direction = Direction::Auto;
    long long record_every = 0;
    std::vector<double> checkpoint_exponents; // extra SGD trace points at d^e samples
    int mc = 0;                          // smoothed SGD: 0 = quadrature over z1
    int quadrature_nodes = 16;
};

// alpha0 is divided by sqrt(d) when scaled is set, so {1, true} is the
// typical random overlap 1/sqrt(d).
struct InitConfig {
    InitSpec::Kind kind = InitSpec::Kind::FixedOverlap;
    double alpha0 = 1.0;
    bool scaled = true;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelConfig model;
    AlgorithmConfig algorithm;
    InitConfig init;
    std::vector<std::uint64_t> seeds{0};
    std::string output; // directory; empty = do not write files

    // Throws ConfigError.
    void validate() const;

    InitSpec resolved_init() const;
    long long resolved_n() const;
    double resolved_lambda() const;
    double resolved_lr() const;
    std::vector<long long> resolved_checkpoints() const;

    // Canonical hash of everything except seeds and output.
    std::string hash() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
// Strict: unknown keys and type mismatches raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<TracePoint> rows;
    std::optional<std::string> error; // set when the run failed
};

// Spike for a seed: uniform on the sphere, from stream {100} of the seed.
Vector spike_for_seed(int d, std::uint64_t seed);

RunRecord run_single(const ExperimentConfig& config, std::uint64_t seed);

// Runs every seed on `threads` workers (0 = hardware concurrency). Records are
// returned in seed order. With a non-empty output directory writes
// config.json, runs.csv and summary.csv (and failures.csv if any seed failed).
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int threads = 0);

struct SummaryRow {
    long long step = 0;
    long long samples = 0;
    double mean_abs_alpha = 0.0;
    double sem = 0.0;
    int n_seeds = 0;
};

// Per-step mean and standard error of |alpha| over the successful records.
// Throws std::invalid_argument on an empty set or mixed config hashes.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

enum class Verdict { Recovered, Stuck, Intermediate };
std::string to_string(Verdict v);
// Recovered if the final mean |alpha| >= recovered, stuck if <= 3/sqrt(d).
Verdict verdict(const std::vector<SummaryRow>& summary, int d, double recovered = 0.9);

void write_runs_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int points = 0;
};

// Least-squares fit of log(value) on log(d), after averaging value over
// repeated d. 95% confidence interval from the t distribution. Requires at
// least 3 distinct d and positive means.
ScalingFit scaling_fit(const std::vector<double>& d, const std::vector<double>& value);

// Prefactor of the smoothing_scaled rule used by the fig3 preset.
inline constexpr double kFig3SmoothedPrefactor = 0.02;

// fig2, fig2-small, fig3, fig_f1, fig_f2, fig_f3.
std::vector<ExperimentConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace sica
