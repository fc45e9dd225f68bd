#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sica/algorithms.hpp"

#include <cmath>

using namespace sica;

namespace {

Vector unit(int d, std::uint64_t seed)
{
    Rng rng(seed);
    return random_unit_vector(d, rng);
}

SpikedCumulantModel model(int d, double beta, const char* prior = "rademacher", std::uint64_t seed = 0)
{
    return {beta, unit(d, 1000 + seed), LatentPrior::parse(prior)};
}

} // namespace

TEST_CASE("initial vectors")
{
    const Vector v = unit(20, 1);
    Rng rng(2);
    const Vector w = initial_vector(InitSpec::fixed_overlap(0.3), 20, &v, rng);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.dot(v) == doctest::Approx(0.3).epsilon(1e-12));
    const Vector w1 = initial_vector(InitSpec::fixed_overlap(-1.0), 20, &v, rng);
    CHECK(w1.dot(v) == doctest::Approx(-1.0));
    CHECK(initial_vector(InitSpec::uniform_sphere(), 20, nullptr, rng).norm() == doctest::Approx(1.0));
    CHECK_THROWS(InitSpec::fixed_overlap(1.01));
    CHECK_THROWS(initial_vector(InitSpec::fixed_overlap(0.1), 20, nullptr, rng));
}

TEST_CASE("property: uniform initial overlap has second moment 1/d")
{
    for (int d : {10, 40}) {
        const Vector v = unit(d, 3);
        Rng rng(d);
        double m2 = 0.0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) m2 += std::pow(initial_vector(InitSpec::uniform_sphere(), d, &v, rng).dot(v), 2);
        CHECK(m2 / n == doctest::Approx(1.0 / d).epsilon(0.04));
    }
}

TEST_CASE("fastica_step on a hand-computed batch")
{
    RowMatrix x(2, 2);
    x << 1.0, 0.5, -0.5, 2.0;
    const DataBatch b(x);
    const Vector w = Vector::Unit(2, 0);
    const auto G = Contrast::neg_gaussian();
    Vector expect = Vector::Zero(2);
    double g2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double s = x.row(i).dot(w);
        expect += x.row(i).transpose() * s * std::exp(-s * s / 2);
        g2 += (1 - s * s) * std::exp(-s * s / 2);
    }
    expect /= 2.0;
    const Vector grad_only = fastica_step(w, b, G, false);
    CHECK((grad_only - expect.normalized()).norm() < 1e-14);
    const Vector reg = fastica_step(w, b, G, true);
    CHECK((reg - (expect - g2 / 2.0 * w).normalized()).norm() < 1e-14);
}

TEST_CASE("fastica degenerate update is reported")
{
    RowMatrix x = RowMatrix::Zero(3, 4);
    const Vector w = Vector::Unit(4, 0);
    CHECK_THROWS_AS(fastica_step(w, DataBatch(x), Contrast::neg_gaussian(), false), DegenerateUpdateError);
    CHECK_THROWS(fastica_step(Vector::Ones(4), DataBatch(x), Contrast::neg_gaussian(), false));
}

TEST_CASE("streaming moments equal the materialised batch")
{
    const auto m = model(7, 5.0);
    const Vector w = unit(7, 4);
    const auto G = Contrast::log_cosh();
    const long long n = kChunkRows + 1234;
    const auto streamed = fastica_moments_streaming(w, m, n, G, Rng(42));
    const DataBatch batch = sample_batch(m, static_cast<int>(n), 42);
    const auto direct = fastica_moments(w, batch.samples(), G);
    CHECK(streamed.n == direct.n);
    CHECK((streamed.sum_xg1 - direct.sum_xg1).norm() < 1e-9 * direct.sum_xg1.norm());
    CHECK(streamed.sum_g2 == doctest::Approx(direct.sum_g2).epsilon(1e-12));
    CHECK((fastica_update(w, streamed, true) - fastica_step(w, batch, G, true)).norm() < 1e-12);
}

TEST_CASE("fastica_run trace and determinism")
{
    const auto m = model(10, 15.0);
    FasticaOptions o;
    o.steps = 3;
    o.n = 20000;
    o.init = InitSpec::fixed_overlap(0.5);
    const auto a = fastica_run(m, o, 7);
    const auto b = fastica_run(m, o, 7);
    REQUIRE(a.trace.size() == 4);
    CHECK(a.trace.front().alpha == doctest::Approx(0.5));
    CHECK(a.trace.back().samples == 60000);
    CHECK(a.w == b.w);
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].step == static_cast<long long>(i));
        CHECK(std::abs(a.trace[i].alpha) <= 1.0);
        if (i) CHECK(a.trace[i].samples >= a.trace[i - 1].samples);
    }
    CHECK(a.w.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Strong signal from a warm start: converges.
    CHECK(std::abs(a.trace.back().alpha) > 0.95);

    o.resample = false;
    const auto c = fastica_run(m, o, 7);
    CHECK(c.trace.back().samples == 20000);
}

TEST_CASE("fastica on a fixed batch")
{
    const auto m = model(6, 15.0);
    const DataBatch data = sample_batch(m, 50000, 3);
    FasticaOptions o;
    o.steps = 5;
    o.init = InitSpec::fixed_overlap(0.4);
    const auto st = fastica_run(data, o, 1, &m.spike);
    CHECK(std::abs(st.trace.back().alpha) > 0.95);
    o.init = InitSpec::uniform_sphere();
    const auto blind = fastica_run(data, o, 1);
    CHECK(std::isnan(blind.trace.back().alpha));
}

TEST_CASE("vanilla SGD step")
{
    const auto G = Contrast::neg_gaussian();
    const Vector w = unit(8, 1);
    const Vector x = 1.5 * unit(8, 2);
    const Vector next = sgd_vanilla_step(w, x, G, 0.7, 1.0);
    const double s = w.dot(x);
    const Vector expect = (w + 0.7 / 8.0 * G.derivative(s) * (x - s * w)).normalized();
    CHECK((next - expect).norm() < 1e-15);
    CHECK(next.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // x parallel to w: no movement.
    CHECK((sgd_vanilla_step(w, 3.0 * w, G, 1.0) - w).norm() < 1e-15);
    const Vector down = sgd_vanilla_step(w, x, G, 0.7, -1.0);
    CHECK((down - (w - 0.7 / 8.0 * G.derivative(s) * (x - s * w)).normalized()).norm() < 1e-15);
}

TEST_CASE("smoothed step reduces to vanilla at lambda = 0")
{
    const auto G = Contrast::h4();
    const int d = 16;
    const auto rule = SphereCoordinateRule::build(d);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Vector w = unit(d, s);
        const Vector x = unit(d, 50 + s) * 2.0;
        const double eta = 0.01;
        const Vector a = sgd_smoothed_step(w, x, G, eta, 0.0, rule, -1.0);
        const Vector b = sgd_vanilla_step(w, x, G, eta * d, -1.0);
        CHECK((a - b).norm() < 1e-14);
    }
    Rng rng(0);
    const Vector w = unit(d, 1);
    CHECK_THROWS(sgd_smoothed_step(w, unit(d, 2), G, 0.01, 2.1, rule)); // 16^{1/4} = 2
    CHECK_NOTHROW(sgd_smoothed_step(w, unit(d, 2), G, 0.01, 2.0, rule));
    CHECK_NOTHROW(sgd_smoothed_step(w, unit(d, 2), G, 0.01, 1.0, 4, rng));
}

TEST_CASE("property: every step keeps unit norm")
{
    const auto m = model(12, 5.0);
    const auto rule = SphereCoordinateRule::build(12);
    Rng rng(5);
    const RowMatrix xs = sample_rows(m, 300, rng);
    Vector w = unit(12, 9);
    for (int i = 0; i < 100; ++i) {
        w = sgd_vanilla_step(w, xs.row(i).transpose(), Contrast::log_cosh(), 2.0);
        REQUIRE(std::abs(w.norm() - 1.0) < 1e-10);
        w = sgd_smoothed_step(w, xs.row(100 + i).transpose(), Contrast::h4(), 0.01, 1.5, rule);
        REQUIRE(std::abs(w.norm() - 1.0) < 1e-10);
        w = sgd_smoothed_step(w, xs.row(200 + i).transpose(), Contrast::neg_gaussian(), 0.05, 1.0, 3, rng);
        REQUIRE(std::abs(w.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("direction resolution")
{
    const auto rad = model(10, 15.0);
    const Vector w = unit(10, 1);
    // NegGaussian c4 < 0, Rademacher c4 < 0: maximize E[G].
    CHECK(resolve_direction(Direction::Auto, Contrast::neg_gaussian(), &rad, w, nullptr) == 1.0);
    CHECK(resolve_direction(Direction::Auto, Contrast::h4(), &rad, w, nullptr) == -1.0);
    const auto lap = model(10, 15.0, "laplace");
    CHECK(resolve_direction(Direction::Auto, Contrast::h4(), &lap, w, nullptr) == 1.0);
    CHECK(resolve_direction(Direction::Minimize, Contrast::h4(), &lap, w, nullptr) == -1.0);
    // c4^l = 0 falls back to the probe: kurtosis along the spike is ~0 but
    // along a direction of platykurtic data it is negative.
    const auto t34 = model(10, 15.0, "3not4");
    CHECK_THROWS(resolve_direction(Direction::Auto, Contrast::h4(), &t34, w, nullptr));
    const DataBatch probe = sample_batch(rad, 100000, 1);
    CHECK(resolve_direction(Direction::Auto, Contrast::h4(), nullptr, rad.spike, &probe) == -1.0);
    CHECK(parse_direction("max") == Direction::Maximize);
    CHECK_THROWS(parse_direction("up"));
}

TEST_CASE("sgd_run trace layout")
{
    const auto m = model(10, 15.0);
    SgdOptions o;
    o.samples = 5000;
    o.lr = 0.2;
    o.record_every = 1000;
    o.checkpoints = {100, 2500};
    const auto st = sgd_run(m, o, 3);
    std::vector<long long> steps;
    for (const auto& p : st.trace) steps.push_back(p.step);
    CHECK(steps == std::vector<long long>{0, 100, 1000, 2000, 2500, 3000, 4000, 5000});
    CHECK(st.samples == 5000);
    CHECK(sgd_run(m, o, 3).w == st.w);
    CHECK(sgd_run(m, o, 4).w != st.w);

    o.smoothed = true;
    o.lambda = 1.0;
    o.lr = 0.005;
    o.G = Contrast::h4();
    CHECK(sgd_run(m, o, 3).w.norm() == doctest::Approx(1.0));
    o.mc = 2;
    CHECK(sgd_run(m, o, 3).w.norm() == doctest::Approx(1.0));
    o.lambda = 5.0;
    CHECK_THROWS(sgd_run(m, o, 3));
}

TEST_CASE("vanilla SGD recovers a strong spike in low dimension")
{
    const auto m = model(8, 15.0);
    SgdOptions o;
    o.samples = 30000;
    o.lr = 0.2;
    o.init = InitSpec::uniform_sphere();
    double mean = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) mean += std::abs(sgd_run(m, o, s).trace.back().alpha) / 4;
    CHECK(mean > 0.9);
}

TEST_CASE("predict_recovery_exponent")
{
    CHECK(predict_recovery_exponent(4, 4, 0.25) == 2.0);
    CHECK(predict_recovery_exponent(4, 2, 0.25) == 3.0);
    CHECK(predict_recovery_exponent(4, 4, 0.0) == 3.0);
    CHECK(predict_recovery_exponent(6, 6, 0.25) == 3.0);
    CHECK_THROWS(predict_recovery_exponent(3, 4, 0.1));
    CHECK_THROWS(predict_recovery_exponent(4, 1, 0.1));
    CHECK_THROWS(predict_recovery_exponent(4, 4, 0.3));
    CHECK_THROWS(predict_recovery_exponent(4, 4, -0.1));
}
