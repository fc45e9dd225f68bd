#include "sica/harness.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace sica {

using nlohmann::json;

namespace {

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

template <class T>
void read_field(const json& j, const char* key, T& out, const char* where)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

std::string eta_rule_name(EtaRule::Kind k)
{
    switch (k) {
    case EtaRule::Kind::Constant: return "constant";
    case EtaRule::Kind::PerDimension: return "per_dimension";
    case EtaRule::Kind::SmoothingScaled: return "smoothing_scaled";
    }
    return {};
}

EtaRule::Kind parse_eta_rule(const std::string& s)
{
    if (s == "constant") return EtaRule::Kind::Constant;
    if (s == "per_dimension") return EtaRule::Kind::PerDimension;
    if (s == "smoothing_scaled") return EtaRule::Kind::SmoothingScaled;
    throw ConfigError("unknown eta rule '" + s + "' (expected constant, per_dimension, smoothing_scaled)");
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Population information exponent of E[G(w.x)] for the configured model.
int population_exponent(const Contrast& G, double beta, const LatentPrior& prior)
{
    hermite::HermiteSeries l;
    for (int k = 0; k <= G.hermite().max_degree(); ++k)
        l.coefficients.push_back(likelihood_hermite_closed(k, beta, prior));
    const auto k1 = hermite::joint_information_exponent(G.hermite(), l);
    if (!k1) throw ConfigError("population loss has no information exponent up to degree 12");
    return *k1;
}

} // namespace

std::string to_string(AlgorithmKind k)
{
    switch (k) {
    case AlgorithmKind::FastICA: return "fastica";
    case AlgorithmKind::Sgd: return "sgd";
    case AlgorithmKind::SmoothedSgd: return "smoothed-sgd";
    }
    return {};
}

AlgorithmKind parse_algorithm(const std::string& s)
{
    if (s == "fastica") return AlgorithmKind::FastICA;
    if (s == "sgd") return AlgorithmKind::Sgd;
    if (s == "smoothed-sgd") return AlgorithmKind::SmoothedSgd;
    throw ConfigError("unknown algorithm '" + s + "' (expected fastica, sgd, smoothed-sgd)");
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const
{
    const auto& a = algorithm;
    if (model.d < 2) throw ConfigError("model.d must be >= 2");
    if (!(model.beta >= 0.0) || !std::isfinite(model.beta)) throw ConfigError("model.beta must be finite and >= 0");
    try {
        LatentPrior::parse(model.prior);
        Contrast::parse(a.contrast);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (a.n.has_value() == a.n_exponent.has_value())
        throw ConfigError("algorithm: exactly one of n and n_exponent must be given");
    if (a.n && *a.n < 1) throw ConfigError("algorithm.n must be >= 1");
    if (a.n_exponent && !(*a.n_exponent >= 0.0 && *a.n_exponent <= 8.0))
        throw ConfigError("algorithm.n_exponent must lie in [0, 8]");
    if (!(a.n_multiplier > 0.0) || !std::isfinite(a.n_multiplier))
        throw ConfigError("algorithm.n_multiplier must be positive");
    if (a.steps < 1) throw ConfigError("algorithm.steps must be >= 1");
    if (!(a.eta.value > 0.0) || !std::isfinite(a.eta.value)) throw ConfigError("algorithm.eta.value must be positive");
    if (a.record_every < 0) throw ConfigError("algorithm.record_every must be >= 0");
    if (a.mc < 0) throw ConfigError("algorithm.mc must be >= 0");
    if (a.quadrature_nodes < 1) throw ConfigError("algorithm.quadrature_nodes must be >= 1");
    for (double e : a.checkpoint_exponents)
        if (!(e >= 0.0 && e <= 8.0)) throw ConfigError("algorithm.checkpoint_exponents must lie in [0, 8]");
    if (a.kind == AlgorithmKind::SmoothedSgd) {
        if (model.d < 3) throw ConfigError("smoothed-sgd needs d >= 3");
        if (!(a.lambda_exponent >= 0.0 && a.lambda_exponent <= 0.25))
            throw ConfigError("algorithm.lambda_exponent must lie in [0, 1/4]");
    }
    const double alpha0 = init.scaled ? init.alpha0 / std::sqrt(model.d) : init.alpha0;
    if (!(std::abs(alpha0) <= 1.0)) throw ConfigError("init.alpha0 resolves to |alpha0| > 1");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw ConfigError("seeds must be distinct");
    const double n = a.n ? static_cast<double>(*a.n) : a.n_multiplier * std::pow(model.d, *a.n_exponent);
    if (n > 4e12) throw ConfigError("resolved n is too large");
}

InitSpec ExperimentConfig::resolved_init() const
{
    if (init.kind == InitSpec::Kind::UniformSphere) return InitSpec::uniform_sphere();
    return InitSpec::fixed_overlap(init.scaled ? init.alpha0 / std::sqrt(model.d) : init.alpha0);
}

long long ExperimentConfig::resolved_n() const
{
    if (algorithm.n) return *algorithm.n;
    return std::max(1LL, std::llround(algorithm.n_multiplier * std::pow(model.d, algorithm.n_exponent.value_or(0.0))));
}

double ExperimentConfig::resolved_lambda() const
{
    if (algorithm.kind != AlgorithmKind::SmoothedSgd) return 0.0;
    return std::pow(static_cast<double>(model.d), algorithm.lambda_exponent);
}

double ExperimentConfig::resolved_lr() const
{
    const double d = model.d;
    const auto& e = algorithm.eta;
    const bool vanilla = algorithm.kind == AlgorithmKind::Sgd;
    switch (e.kind) {
    case EtaRule::Kind::Constant: return vanilla ? e.value * d : e.value;
    case EtaRule::Kind::PerDimension: return vanilla ? e.value : e.value / d;
    case EtaRule::Kind::SmoothingScaled: {
        const Contrast G = Contrast::parse(algorithm.contrast);
        const int k1 = population_exponent(G, model.beta, LatentPrior::parse(model.prior));
        const int k2 = G.information_exponent();
        const double eta = e.value * std::pow(d, -0.5 * k1) * std::pow(resolved_lambda(), 2.0 * k2 - 2.0);
        return vanilla ? eta * d : eta;
    }
    }
    return e.value;
}

std::vector<long long> ExperimentConfig::resolved_checkpoints() const
{
    std::vector<long long> out;
    for (double e : algorithm.checkpoint_exponents)
        out.push_back(std::max(1LL, std::llround(std::pow(static_cast<double>(model.d), e))));
    return out;
}

std::string ExperimentConfig::hash() const
{
    json j = to_json(*this);
    j.erase("seeds");
    j.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

json to_json(const ExperimentConfig& c)
{
    const auto& a = c.algorithm;
    json alg = {
        {"kind", to_string(a.kind)},
        {"contrast", a.contrast},
        {"steps", a.steps},
        {"n_multiplier", a.n_multiplier},
        {"resample", a.resample},
        {"regularized", a.regularized},
        {"lambda_exponent", a.lambda_exponent},
        {"eta", {{"rule", eta_rule_name(a.eta.kind)}, {"value", a.eta.value}}},
        {"direction", to_string(a.direction)},
        {"record_every", a.record_every},
        {"checkpoint_exponents", a.checkpoint_exponents},
        {"mc", a.mc},
        {"quadrature_nodes", a.quadrature_nodes},
    };
    if (a.n) alg["n"] = *a.n;
    if (a.n_exponent) alg["n_exponent"] = *a.n_exponent;
    return {
        {"name", c.name},
        {"model", {{"d", c.model.d}, {"beta", c.model.beta}, {"prior", c.model.prior}}},
        {"algorithm", alg},
        {"init",
         {{"kind", c.init.kind == InitSpec::Kind::UniformSphere ? "uniform_sphere" : "fixed_overlap"},
          {"alpha0", c.init.alpha0},
          {"scaled", c.init.scaled}}},
        {"seeds", c.seeds},
        {"output", c.output},
    };
}

ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig c;
    check_keys(j, "config", {"name", "model", "algorithm", "init", "seeds", "output"});
    read_field(j, "name", c.name, "config");
    read_field(j, "seeds", c.seeds, "config");
    read_field(j, "output", c.output, "config");

    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"d", "beta", "prior"});
        read_field(m, "d", c.model.d, "model");
        read_field(m, "beta", c.model.beta, "model");
        read_field(m, "prior", c.model.prior, "model");
    }

    if (j.contains("algorithm")) {
        const json& a = j.at("algorithm");
        check_keys(a, "algorithm",
                   {"kind", "contrast", "steps", "n", "n_exponent", "n_multiplier", "resample", "regularized",
                    "lambda_exponent", "eta", "direction", "record_every", "checkpoint_exponents", "mc",
                    "quadrature_nodes"});
        auto& o = c.algorithm;
        std::string kind = to_string(o.kind);
        read_field(a, "kind", kind, "algorithm");
        o.kind = parse_algorithm(kind);
        read_field(a, "contrast", o.contrast, "algorithm");
        read_field(a, "steps", o.steps, "algorithm");
        if (a.contains("n")) {
            long long n = 0;
            read_field(a, "n", n, "algorithm");
            o.n = n;
        }
        if (a.contains("n_exponent")) {
            double e = 0.0;
            read_field(a, "n_exponent", e, "algorithm");
            o.n_exponent = e;
        }
        read_field(a, "n_multiplier", o.n_multiplier, "algorithm");
        read_field(a, "resample", o.resample, "algorithm");
        read_field(a, "regularized", o.regularized, "algorithm");
        read_field(a, "lambda_exponent", o.lambda_exponent, "algorithm");
        if (a.contains("eta")) {
            const json& e = a.at("eta");
            check_keys(e, "algorithm.eta", {"rule", "value"});
            std::string rule = eta_rule_name(o.eta.kind);
            read_field(e, "rule", rule, "algorithm.eta");
            o.eta.kind = parse_eta_rule(rule);
            read_field(e, "value", o.eta.value, "algorithm.eta");
        }
        std::string dir = to_string(o.direction);
        read_field(a, "direction", dir, "algorithm");
        try {
            o.direction = parse_direction(dir);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        read_field(a, "record_every", o.record_every, "algorithm");
        read_field(a, "checkpoint_exponents", o.checkpoint_exponents, "algorithm");
        read_field(a, "mc", o.mc, "algorithm");
        read_field(a, "quadrature_nodes", o.quadrature_nodes, "algorithm");
    }

    if (j.contains("init")) {
        const json& i = j.at("init");
        check_keys(i, "init", {"kind", "alpha0", "scaled"});
        std::string kind = "fixed_overlap";
        read_field(i, "kind", kind, "init");
        if (kind == "uniform_sphere") c.init.kind = InitSpec::Kind::UniformSphere;
        else if (kind == "fixed_overlap") c.init.kind = InitSpec::Kind::FixedOverlap;
        else throw ConfigError("unknown init kind '" + kind + "' (expected uniform_sphere, fixed_overlap)");
        read_field(i, "alpha0", c.init.alpha0, "init");
        read_field(i, "scaled", c.init.scaled, "init");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Running

Vector spike_for_seed(int d, std::uint64_t seed)
{
    Rng rng = Rng(seed).stream({100});
    return random_unit_vector(d, rng);
}

RunRecord run_single(const ExperimentConfig& config, std::uint64_t seed)
{
    RunRecord rec;
    rec.config_hash = config.hash();
    rec.seed = seed;
    try {
        const auto& a = config.algorithm;
        const SpikedCumulantModel model(config.model.beta, spike_for_seed(config.model.d, seed),
                                        LatentPrior::parse(config.model.prior));
        AlgorithmState st;
        if (a.kind == AlgorithmKind::FastICA) {
            FasticaOptions o;
            o.G = Contrast::parse(a.contrast);
            o.steps = a.steps;
            o.n = config.resolved_n();
            o.resample = a.resample;
            o.regularized = a.regularized;
            o.init = config.resolved_init();
            st = fastica_run(model, o, seed);
        } else {
            SgdOptions o;
            o.G = Contrast::parse(a.contrast);
            o.samples = config.resolved_n();
            o.smoothed = a.kind == AlgorithmKind::SmoothedSgd;
            o.lr = config.resolved_lr();
            o.lambda = config.resolved_lambda();
            o.mc = a.mc;
            o.quadrature_nodes = a.quadrature_nodes;
            o.direction = a.direction;
            o.init = config.resolved_init();
            o.record_every = a.record_every;
            o.checkpoints = config.resolved_checkpoints();
            st = sgd_run(model, o, seed);
        }
        rec.rows = std::move(st.trace);
    } catch (const std::exception& e) {
        rec.rows.clear();
        rec.error = e.what();
    }
    return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int threads)
{
    config.validate();
    const std::size_t jobs = config.seeds.size();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs);

    std::vector<RunRecord> records(jobs);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) records[i] = run_single(config, config.seeds[i]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }

    if (!config.output.empty()) {
        const std::filesystem::path dir(config.output);
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir / "config.json");
            os << to_json(config).dump(2) << '\n';
        }
        write_runs_csv(records, dir / "runs.csv");
        std::vector<RunRecord> failed;
        for (const auto& r : records)
            if (r.error) failed.push_back(r);
        if (failed.size() < records.size()) write_summary_csv(summarize(records), dir / "summary.csv");
        if (!failed.empty()) {
            std::ofstream os(dir / "failures.csv");
            os << "config_hash,seed,error\n";
            for (const auto& r : failed) {
                std::string msg = *r.error;
                std::replace(msg.begin(), msg.end(), '"', '\'');
                os << r.config_hash << ',' << r.seed << ",\"" << msg << "\"\n";
            }
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Results

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records)
{
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    const std::string& hash = records.front().config_hash;
    struct Acc {
        long long samples = 0;
        std::vector<double> values;
    };
    std::map<long long, Acc> by_step;
    int ok = 0;
    for (const auto& r : records) {
        if (r.config_hash != hash) throw std::invalid_argument("summarize: records come from different configs");
        if (r.error) continue;
        ++ok;
        for (const auto& p : r.rows) {
            auto& acc = by_step[p.step];
            acc.samples = std::max(acc.samples, p.samples);
            acc.values.push_back(std::abs(p.alpha));
        }
    }
    if (ok == 0) throw std::invalid_argument("summarize: every run failed");

    std::vector<SummaryRow> out;
    for (const auto& [step, acc] : by_step) {
        SummaryRow row;
        row.step = step;
        row.samples = acc.samples;
        row.n_seeds = static_cast<int>(acc.values.size());
        double mean = 0.0;
        for (double v : acc.values) mean += v;
        mean /= row.n_seeds;
        double ss = 0.0;
        for (double v : acc.values) ss += (v - mean) * (v - mean);
        row.mean_abs_alpha = mean;
        row.sem = row.n_seeds > 1 ? std::sqrt(ss / (row.n_seeds - 1) / row.n_seeds) : 0.0;
        out.push_back(row);
    }
    return out;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Recovered: return "recovered";
    case Verdict::Stuck: return "stuck";
    case Verdict::Intermediate: return "intermediate";
    }
    return {};
}

Verdict verdict(const std::vector<SummaryRow>& summary, int d, double recovered)
{
    if (summary.empty()) throw std::invalid_argument("verdict: empty summary");
    const double final_alpha = summary.back().mean_abs_alpha;
    if (final_alpha >= recovered) return Verdict::Recovered;
    if (final_alpha <= 3.0 / std::sqrt(static_cast<double>(d))) return Verdict::Stuck;
    return Verdict::Intermediate;
}

void write_runs_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << "config_hash,seed,step,samples,alpha,loss\n";
    for (const auto& r : records)
        for (const auto& p : r.rows)
            os << r.config_hash << ',' << r.seed << ',' << p.step << ',' << p.samples << ','
               << fmt_double(p.alpha) << ',' << fmt_double(p.loss) << '\n';
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    std::getline(is, line);
    if (line.rfind("config_hash,seed,step,samples,alpha,loss", 0) != 0)
        throw std::runtime_error("'" + path.string() + "' is not a runs.csv file");
    std::vector<RunRecord> out;
    std::map<std::pair<std::string, std::uint64_t>, std::size_t> index;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 6) throw std::runtime_error("runs.csv line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            const auto key = std::make_pair(f[0], static_cast<std::uint64_t>(std::stoull(f[1])));
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, out.size()).first;
                out.push_back({key.first, key.second, {}, std::nullopt});
            }
            out[it->second].rows.push_back({std::stoll(f[2]), std::stoll(f[3]), std::stod(f[4]), std::stod(f[5])});
        } catch (const std::logic_error&) {
            throw std::runtime_error("runs.csv line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << "step,samples,mean_abs_alpha,sem,n_seeds\n";
    for (const auto& r : rows)
        os << r.step << ',' << r.samples << ',' << fmt_double(r.mean_abs_alpha) << ',' << fmt_double(r.sem) << ','
           << r.n_seeds << '\n';
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ScalingFit scaling_fit(const std::vector<double>& d, const std::vector<double>& value)
{
    if (d.size() != value.size()) throw std::invalid_argument("scaling_fit: d and value differ in length");
    std::map<double, std::pair<double, int>> groups;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) throw std::invalid_argument("scaling_fit: d must be positive");
        auto& g = groups[d[i]];
        g.first += value[i];
        g.second += 1;
    }
    if (groups.size() < 3) throw std::invalid_argument("scaling_fit: need at least 3 distinct d values");

    std::vector<double> x, y;
    for (const auto& [dv, g] : groups) {
        const double mean = g.first / g.second;
        if (!(mean > 0.0)) throw std::invalid_argument("scaling_fit: statistic must be positive");
        x.push_back(std::log(dv));
        y.push_back(std::log(mean));
    }
    const auto k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    ScalingFit fit;
    fit.points = static_cast<int>(x.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sse += r * r;
    }
    const double se = std::sqrt(sse / (k - 2.0) / sxx);
    const boost::math::students_t dist(k - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
    return fit;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

std::vector<std::uint64_t> seed_range(int count)
{
    std::vector<std::uint64_t> s(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
    return s;
}

std::vector<ExperimentConfig> fastica_phase(const std::string& name, int d, double beta, const std::string& prior,
                                            bool resample)
{
    std::vector<ExperimentConfig> out;
    for (double theta : {2.0, 3.2, 4.0}) {
        ExperimentConfig c;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s-theta%g", name.c_str(), theta);
        c.name = buf;
        c.model = {d, beta, prior};
        c.algorithm.kind = AlgorithmKind::FastICA;
        c.algorithm.contrast = "neg_gaussian";
        c.algorithm.steps = 4;
        c.algorithm.n_exponent = theta;
        c.algorithm.resample = resample;
        c.init = {InitSpec::Kind::FixedOverlap, 1.0, true};
        c.seeds = seed_range(15);
        c.output = "results/" + c.name;
        out.push_back(c);
    }
    return out;
}

} // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig2-small", "fig3", "fig_f1", "fig_f2", "fig_f3"}; }

std::vector<ExperimentConfig> preset(const std::string& name)
{
    if (name == "fig2") return fastica_phase("fig2", 50, 15.0, "rademacher", true);
    if (name == "fig2-small") return fastica_phase("fig2-small", 25, 5.0, "rademacher", true);
    if (name == "fig_f1") return fastica_phase("fig_f1", 25, 5.0, "rademacher", false);
    if (name == "fig_f2") return fastica_phase("fig_f2", 25, 5.0, "3not4", true);
    if (name == "fig_f3") return fastica_phase("fig_f3", 25, 5.0, "laplace", true);
    if (name == "fig3") {
        ExperimentConfig base;
        base.model = {40, 15.0, "rademacher"};
        base.algorithm.n_exponent = 3.0;
        base.algorithm.n_multiplier = 5.0;
        base.algorithm.record_every = 1600;
        base.algorithm.checkpoint_exponents = {1.0, 2.0};
        base.algorithm.direction = Direction::Auto;
        base.init = {InitSpec::Kind::UniformSphere, 0.0, false};
        base.seeds = seed_range(30);

        ExperimentConfig smoothed = base;
        smoothed.name = "fig3-smoothed-h4";
        smoothed.algorithm.kind = AlgorithmKind::SmoothedSgd;
        smoothed.algorithm.contrast = "h4";
        smoothed.algorithm.lambda_exponent = 0.25;
        smoothed.algorithm.eta = {EtaRule::Kind::SmoothingScaled, kFig3SmoothedPrefactor};
        smoothed.output = "results/" + smoothed.name;

        ExperimentConfig vanilla = base;
        vanilla.name = "fig3-vanilla-neg_gaussian";
        vanilla.algorithm.kind = AlgorithmKind::Sgd;
        vanilla.algorithm.contrast = "neg_gaussian";
        vanilla.algorithm.eta = {EtaRule::Kind::PerDimension, 0.2};
        vanilla.output = "results/" + vanilla.name;
        return {smoothed, vanilla};
    }
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace sica
