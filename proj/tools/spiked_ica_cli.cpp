// spiked-ica: command-line driver for the spiked cumulant experiments.

#include "sica/algorithms.hpp"
#include "sica/harness.hpp"
#include "sica/hermite_check.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace sica;

namespace {

struct ModelFlags {
    int d = 25;
    double beta = 5.0;
    std::string prior = "rademacher";

    void add(CLI::App* app)
    {
        app->add_option("--d", d, "Input dimension")->check(CLI::PositiveNumber);
        app->add_option("--beta", beta, "Signal-to-noise ratio")->check(CLI::NonNegativeNumber);
        app->add_option("--prior", prior, "Latent prior: rademacher, laplace, 3not4");
    }
};

struct RunFlags {
    std::string config;
    ModelFlags model;
    std::string contrast = "neg_gaussian";
    long long n = 0;
    double n_exponent = -1.0;
    double n_multiplier = 1.0;
    int steps = 4;
    int seeds = 1;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
    double lr = -1.0;
    double lambda_exponent = 0.25;
    std::string direction = "auto";
    long long record_every = 0;
    bool no_resample = false;
    bool gradient_only = false;
    bool uniform_init = false;
    int mc = 0;
};

void add_run_flags(CLI::App* app, RunFlags& f, AlgorithmKind kind)
{
    app->add_option("--config", f.config, "JSON experiment config (other run flags are ignored)");
    f.model.add(app);
    app->add_option("--contrast", f.contrast, "neg_gaussian, logcosh[:a=..], h4");
    app->add_option("--n", f.n, "Samples per step (FastICA) or total samples (SGD)");
    app->add_option("--n-exponent", f.n_exponent, "Use n = multiplier * d^exponent");
    app->add_option("--n-multiplier", f.n_multiplier, "Multiplier for --n-exponent");
    app->add_option("--seed", f.seed, "First seed");
    app->add_option("--seeds", f.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
    app->add_option("--out", f.out, "Output directory for config.json, runs.csv, summary.csv");
    app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    app->add_flag("--uniform-init", f.uniform_init, "Uniform initialisation instead of overlap 1/sqrt(d)");
    if (kind == AlgorithmKind::FastICA) {
        app->add_option("--steps", f.steps, "FastICA iterations")->check(CLI::PositiveNumber);
        app->add_flag("--no-resample", f.no_resample, "Reuse the first batch at every step");
        app->add_flag("--gradient-only", f.gradient_only, "Drop the second-order term of the update");
    } else {
        app->add_option("--lr", f.lr, kind == AlgorithmKind::Sgd ? "delta (step is delta/d)" : "eta");
        app->add_option("--direction", f.direction, "maximize, minimize, auto");
        app->add_option("--record-every", f.record_every, "Trace interval in samples");
    }
    if (kind == AlgorithmKind::SmoothedSgd) {
        app->add_option("--lambda-exponent", f.lambda_exponent, "lambda = d^exponent, in [0, 1/4]");
        app->add_option("--mc", f.mc, "Monte Carlo draws of z1 per step (0 = quadrature)");
    }
}

ExperimentConfig config_from_flags(const RunFlags& f, AlgorithmKind kind)
{
    if (!f.config.empty()) {
        ExperimentConfig c = load_config(f.config);
        if (!f.out.empty()) c.output = f.out;
        return c;
    }
    ExperimentConfig c;
    c.name = to_string(kind);
    c.model = {f.model.d, f.model.beta, f.model.prior};
    auto& a = c.algorithm;
    a.kind = kind;
    a.contrast = f.contrast;
    a.steps = f.steps;
    if (f.n_exponent >= 0.0) a.n_exponent = f.n_exponent;
    else if (f.n > 0) a.n = f.n;
    else a.n_exponent = 2.0;
    a.n_multiplier = f.n_multiplier;
    a.resample = !f.no_resample;
    a.regularized = !f.gradient_only;
    a.direction = parse_direction(f.direction);
    a.record_every = f.record_every;
    a.mc = f.mc;
    if (kind == AlgorithmKind::Sgd) a.eta = {EtaRule::Kind::PerDimension, f.lr > 0 ? f.lr : 0.2};
    if (kind == AlgorithmKind::SmoothedSgd) {
        a.lambda_exponent = f.lambda_exponent;
        a.eta = f.lr > 0 ? EtaRule{EtaRule::Kind::Constant, f.lr}
                         : EtaRule{EtaRule::Kind::SmoothingScaled, kFig3SmoothedPrefactor};
    }
    if (f.uniform_init) c.init = {InitSpec::Kind::UniformSphere, 0.0, false};
    c.seeds.clear();
    for (int i = 0; i < f.seeds; ++i) c.seeds.push_back(f.seed + static_cast<std::uint64_t>(i));
    c.output = f.out;
    c.validate();
    return c;
}

void print_summary(const ExperimentConfig& c, const std::vector<RunRecord>& records)
{
    int failed = 0;
    for (const auto& r : records)
        if (r.error) {
            ++failed;
            std::cerr << "seed " << r.seed << " failed: " << *r.error << '\n';
        }
    if (failed == static_cast<int>(records.size())) throw std::runtime_error("every seed failed");
    const auto rows = summarize(records);
    std::printf("# %s  hash=%s  d=%d beta=%g  n=%lld  seeds=%zu\n", c.name.c_str(), c.hash().c_str(), c.model.d,
                c.model.beta, c.resolved_n(), c.seeds.size());
    std::printf("step,samples,mean_abs_alpha,sem,n_seeds\n");
    for (const auto& r : rows)
        std::printf("%lld,%lld,%.6f,%.6f,%d\n", r.step, r.samples, r.mean_abs_alpha, r.sem, r.n_seeds);
    std::printf("# verdict: %s\n", to_string(verdict(rows, c.model.d)).c_str());
}

int run_config(const ExperimentConfig& c, int threads)
{
    const auto records = run_experiment(c, threads);
    print_summary(c, records);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spiked cumulant model experiments: FastICA and online SGD"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a data batch and its spike");
    ModelFlags gen_model;
    long long gen_n = 1000;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    std::string gen_format = "csv";
    gen_model.add(gen);
    gen->add_option("--n", gen_n, "Number of rows")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--out", gen_out, "Output file (the spike goes to <out>.spike.csv)")->required();
    gen->add_option("--format", gen_format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

    RunFlags fica_flags, sgd_flags, smooth_flags;
    auto* fica = app.add_subcommand("fastica", "Run FastICA on the spiked cumulant model");
    add_run_flags(fica, fica_flags, AlgorithmKind::FastICA);
    std::string fica_data;
    bool fica_whiten = false;
    fica->add_option("--data", fica_data, "Run on a fixed CSV or binary batch instead of the model");
    fica->add_flag("--whiten", fica_whiten, "Center and whiten --data first");
    auto* sgd = app.add_subcommand("sgd", "Run vanilla spherical online SGD");
    add_run_flags(sgd, sgd_flags, AlgorithmKind::Sgd);
    auto* smooth = app.add_subcommand("smoothed-sgd", "Run smoothed spherical online SGD");
    add_run_flags(smooth, smooth_flags, AlgorithmKind::SmoothedSgd);

    auto* sweep = app.add_subcommand("sweep", "Run a config file or a figure preset");
    std::string sweep_config, sweep_preset, sweep_out;
    int sweep_threads = 0;
    sweep->add_option("--config", sweep_config, "JSON experiment config");
    sweep->add_option("--preset", sweep_preset, "fig2, fig2-small, fig3, fig_f1, fig_f2, fig_f3")
        ->check(CLI::IsMember(preset_names()));
    sweep->add_option("--out", sweep_out, "Output base directory");
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");

    auto* summ = app.add_subcommand("summarize", "Summarize a runs.csv file");
    std::string summ_runs, summ_out;
    summ->add_option("runs", summ_runs, "runs.csv")->required()->check(CLI::ExistingFile);
    summ->add_option("--out", summ_out, "Write summary CSV here");

    auto* hcheck = app.add_subcommand("hermite-check", "Compare closed-form Hermite products with quadrature");
    int hcheck_degree = 12;
    double hcheck_tol = 1e-6;
    hcheck->add_option("--max-degree", hcheck_degree, "Maximum total degree")->check(CLI::Range(0, 24));
    hcheck->add_option("--tol", hcheck_tol, "Relative tolerance");

    auto* pred = app.add_subcommand("predict", "Predicted sample-complexity exponent");
    int k1 = 4, k2 = 4;
    double lexp = 0.25;
    pred->add_option("--k1", k1, "Information exponent of the population loss");
    pred->add_option("--k2", k2, "Information exponent of the contrast");
    pred->add_option("--lambda-exponent", lexp, "lambda = d^exponent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Rng rng(gen_seed);
            Rng spike_rng = rng.stream({100});
            const SpikedCumulantModel model(gen_model.beta, random_unit_vector(gen_model.d, spike_rng),
                                            LatentPrior::parse(gen_model.prior));
            const DataBatch batch = sample_batch(model, static_cast<int>(gen_n), gen_seed);
            if (gen_format == "csv") write_csv(batch, gen_out);
            else write_binary(batch, gen_out);
            write_csv(DataBatch(RowMatrix(model.spike.transpose())), gen_out + ".spike.csv");
            std::printf("wrote %d x %d batch to %s\n", batch.n(), batch.d(), gen_out.c_str());
            return 0;
        }
        if (*fica && !fica_data.empty()) {
            const std::filesystem::path p(fica_data);
            DataBatch data = p.extension() == ".csv" ? read_csv(p) : read_binary(p);
            if (fica_whiten) data = center_and_whiten(data);
            FasticaOptions o;
            o.G = Contrast::parse(fica_flags.contrast);
            o.steps = fica_flags.steps;
            o.regularized = !fica_flags.gradient_only;
            const AlgorithmState st = fastica_run(data, o, fica_flags.seed);
            std::printf("step,loss\n");
            for (const auto& t : st.trace) std::printf("%lld,%.9g\n", t.step, t.loss);
            std::printf("# w =");
            for (Eigen::Index i = 0; i < st.w.size(); ++i) std::printf(" %.9g", st.w[i]);
            std::printf("\n");
            return 0;
        }
        if (*fica) return run_config(config_from_flags(fica_flags, AlgorithmKind::FastICA), fica_flags.threads);
        if (*sgd) return run_config(config_from_flags(sgd_flags, AlgorithmKind::Sgd), sgd_flags.threads);
        if (*smooth)
            return run_config(config_from_flags(smooth_flags, AlgorithmKind::SmoothedSgd), smooth_flags.threads);
        if (*sweep) {
            std::vector<ExperimentConfig> configs;
            if (!sweep_config.empty()) configs.push_back(load_config(sweep_config));
            else if (!sweep_preset.empty()) configs = preset(sweep_preset);
            else throw ConfigError("sweep needs --config or --preset");
            for (auto& c : configs) {
                if (!sweep_out.empty())
                    c.output = (std::filesystem::path(sweep_out) / std::filesystem::path(c.output).filename()).string();
                run_config(c, sweep_threads);
            }
            return 0;
        }
        if (*summ) {
            const auto rows = summarize(read_runs_csv(summ_runs));
            if (!summ_out.empty()) write_summary_csv(rows, summ_out);
            std::printf("step,samples,mean_abs_alpha,sem,n_seeds\n");
            for (const auto& r : rows)
                std::printf("%lld,%lld,%.6f,%.6f,%d\n", r.step, r.samples, r.mean_abs_alpha, r.sem, r.n_seeds);
            return 0;
        }
        if (*hcheck) {
            bool ok = true;
            for (const auto& c : hermite::check_products(hcheck_degree)) {
                const bool pass = c.max_rel_error <= hcheck_tol;
                ok = ok && pass;
                std::printf("%-26s %6d cases  max rel err %.3e  %s  (worst %s)\n", c.family.c_str(), c.cases,
                            c.max_rel_error, pass ? "ok" : "FAIL", c.worst.c_str());
            }
            return ok ? 0 : 1;
        }
        if (*pred) {
            std::printf("%.6g\n", predict_recovery_exponent(k1, k2, lexp));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
