#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sica/datamodel.hpp"

#include <cmath>
#include <filesystem>

using namespace sica;

namespace {

Vector unit(int d, std::uint64_t seed)
{
    Rng rng(seed);
    return random_unit_vector(d, rng);
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("sica_test_" + name);
}

} // namespace

TEST_CASE("priors have zero mean and unit variance")
{
    for (const char* key : {"rademacher", "laplace", "3not4"}) {
        const auto p = LatentPrior::parse(key);
        CHECK(p.key() == key);
        CHECK(p.moment(1) == doctest::Approx(0.0));
        CHECK(p.moment(2) == doctest::Approx(1.0));
    }
    const auto r = LatentPrior::parse("rademacher");
    CHECK(r.moment(4) == doctest::Approx(1.0));
    CHECK(r.hermite_moment(4) == doctest::Approx(-2.0)); // 1 - 6 + 3
    const auto l = LatentPrior::parse("laplace");
    CHECK(l.moment(4) == doctest::Approx(6.0)); // 4! b^4 with b = 1/sqrt(2)
    CHECK(l.hermite_moment(4) == doctest::Approx(3.0));
    const auto t = LatentPrior::parse("3not4");
    CHECK(t.moment(3) == doctest::Approx(1.0));
    CHECK(t.moment(4) == doctest::Approx(3.0));
    CHECK(t.hermite_moment(4) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(LatentPrior::parse("gauss"), std::invalid_argument);
}

TEST_CASE("custom priors are validated")
{
    CHECK_NOTHROW(LatentPrior(DiscreteCustom{{-1.0, 1.0}, {0.5, 0.5}}));
    CHECK_THROWS_AS(LatentPrior(DiscreteCustom{{-1.0, 1.0}, {0.4, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(LatentPrior(DiscreteCustom{{0.0, 2.0}, {0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(LatentPrior(DiscreteCustom{{-2.0, 2.0}, {0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(LatentPrior(DiscreteCustom{{}, {}}), std::invalid_argument);
    CHECK(LatentPrior(DiscreteCustom{{-1.0, 1.0}, {0.5, 0.5}}).key() == "custom");
}

TEST_CASE("prior sampling matches moments")
{
    for (const char* key : {"rademacher", "laplace", "3not4"}) {
        const auto p = LatentPrior::parse(key);
        Rng rng(11);
        const int n = 400000;
        double m1 = 0, m2 = 0, m4 = 0;
        for (int i = 0; i < n; ++i) {
            const double v = p.sample(rng);
            m1 += v;
            m2 += v * v;
            m4 += v * v * v * v;
        }
        INFO(std::string(key));
        CHECK(m1 / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
        CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
        CHECK(m4 / n == doctest::Approx(p.moment(4)).epsilon(0.05));
    }
}

TEST_CASE("whitening matrix")
{
    const Vector v = unit(6, 1);
    const Whitening s(5.0, v);
    const double c = 5.0 / (6.0 + std::sqrt(6.0));
    CHECK(s.coefficient() == doctest::Approx(c));
    // S (I + beta v v^T) S = I.
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(6, 6) + 5.0 * v * v.transpose();
    const Eigen::MatrixXd out = s.dense() * cov * s.dense();
    CHECK((out - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    const Vector x = unit(6, 2);
    CHECK((s.apply(x) - s.dense() * x).norm() < 1e-14);
    CHECK(Whitening(0.0, v).coefficient() == 0.0);
    CHECK_THROWS_AS(Whitening(-1.0, v), std::invalid_argument);
}

TEST_CASE("model validation")
{
    CHECK_THROWS_AS(SpikedCumulantModel(1.0, Vector::Ones(3)), std::invalid_argument);
    CHECK_THROWS_AS(SpikedCumulantModel(-1.0, unit(3, 0)), std::invalid_argument);
    CHECK_THROWS_AS(SpikedCumulantModel(std::nan(""), unit(3, 0)), std::invalid_argument);
    const SpikedCumulantModel m(2.0, unit(4, 0));
    CHECK(m.d == 4);
}

TEST_CASE("samples are white with a non-Gaussian spike direction")
{
    const int d = 12;
    const SpikedCumulantModel m(15.0, unit(d, 3));
    const DataBatch b = sample_batch(m, 200000, 5);
    const Eigen::MatrixXd cov = empirical_covariance(b);
    CHECK((cov - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 0.03);
    const Eigen::VectorXd y = b.samples() * m.spike;
    const double k4 = y.array().pow(4).mean() - 3.0;
    // Excess kurtosis along v: (beta/(1+beta))^2 (E nu^4 - 3) = -2 (15/16)^2.
    CHECK(k4 == doctest::Approx(-2.0 * 225.0 / 256.0).epsilon(0.05));
}

TEST_CASE("sample_batch is deterministic and chunked")
{
    const SpikedCumulantModel m(5.0, unit(5, 4));
    const DataBatch a = sample_batch(m, 70000, 9);
    const DataBatch b = sample_batch(m, 70000, 9);
    CHECK(a.samples() == b.samples());
    const DataBatch c = sample_batch(m, 70000, 10);
    CHECK(a.samples() != c.samples());
    // The first chunk does not depend on the total size.
    const DataBatch small = sample_batch(m, 100, 9);
    CHECK(small.samples() == a.samples().topRows(100));
    // The second chunk comes from stream {1}.
    Rng s1 = Rng(9).stream({1});
    CHECK(sample_rows(m, 10, s1) == a.samples().middleRows(kChunkRows, 10));
    CHECK_THROWS(sample_batch(m, 0, 1));
}

TEST_CASE("DataBatch rejects non-finite values")
{
    RowMatrix x = RowMatrix::Zero(2, 2);
    x(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DataBatch{x}, std::invalid_argument);
}

TEST_CASE("likelihood ratio")
{
    const auto rad = LatentPrior::parse("rademacher");
    CHECK(likelihood_ratio(0.7, 0.0, rad) == 1.0);
    // Rademacher: sqrt(1+b) exp(-b y^2/2 ... ) closed form.
    const double beta = 3.0, y = 0.8;
    const double a = std::sqrt(1 + beta), sb = std::sqrt(beta);
    const double ref = 0.5 * a * (std::exp(-0.5 * std::pow(a * y - sb, 2) + 0.5 * y * y) +
                                  std::exp(-0.5 * std::pow(a * y + sb, 2) + 0.5 * y * y));
    CHECK(likelihood_ratio(y, beta, rad) == doctest::Approx(ref).epsilon(1e-14));

    // Integrates to one against the standard normal, and has unit variance.
    for (const char* key : {"rademacher", "laplace", "3not4"}) {
        const auto p = LatentPrior::parse(key);
        INFO(std::string(key));
        const double mass = oracle::gaussian_expect([&](double z) { return likelihood_ratio(z, 2.0, p); });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
        const double var = oracle::gaussian_expect([&](double z) { return z * z * likelihood_ratio(z, 2.0, p); });
        CHECK(var == doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK_THROWS(likelihood_ratio(0.0, -1.0, rad));
}

TEST_CASE("likelihood Hermite data matches the closed form")
{
    for (const char* key : {"rademacher", "laplace", "3not4"}) {
        const auto p = LatentPrior::parse(key);
        for (double beta : {1.0, 5.0, 15.0}) {
            const auto series = likelihood_hermite_data(beta, p, 8);
            INFO(key << " beta=" << beta);
            for (int k = 0; k <= 8; ++k)
                CHECK(series[k] == doctest::Approx(likelihood_hermite_closed(k, beta, p)).scale(1.0).epsilon(1e-7));
        }
    }
    const auto rad = LatentPrior::parse("rademacher");
    CHECK(likelihood_hermite_closed(4, 15.0, rad) == doctest::Approx(-1.7578125));
    CHECK(likelihood_hermite_closed(2, 15.0, rad) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("center_and_whiten")
{
    Rng rng(2);
    RowMatrix raw(5000, 4);
    Eigen::MatrixXd mix(4, 4);
    mix << 2, 0.3, 0, 0, 0.1, 1, 0.5, 0, 0, 0, 3, 0.2, 0.4, 0, 0, 0.5;
    for (int i = 0; i < raw.rows(); ++i)
        for (int j = 0; j < 4; ++j) raw(i, j) = rng.normal() + 7.0;
    raw = raw * mix;
    const DataBatch white = center_and_whiten(DataBatch(raw));
    const Eigen::RowVectorXd mean = white.samples().colwise().mean();
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-10);
    CHECK((empirical_covariance(white) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    const DataBatch pca = center_and_whiten(DataBatch(raw), 2);
    CHECK(pca.d() == 2);
    CHECK((empirical_covariance(pca) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

    RowMatrix degenerate = raw;
    degenerate.col(3) = degenerate.col(0) * 2.0;
    CHECK_THROWS_AS(center_and_whiten(DataBatch(degenerate)), RankDeficientError);
    CHECK_NOTHROW(center_and_whiten(DataBatch(degenerate), 3));
    CHECK_THROWS_AS(center_and_whiten(DataBatch(raw), 0), std::invalid_argument);
}

TEST_CASE("CSV and binary round trip")
{
    const SpikedCumulantModel m(5.0, unit(3, 4));
    const DataBatch b = sample_batch(m, 17, 1);
    const auto csv = temp_file("rt.csv");
    const auto bin = temp_file("rt.scb");
    write_csv(b, csv);
    write_binary(b, bin);
    CHECK(read_csv(csv).samples() == b.samples());
    CHECK(read_binary(bin).samples() == b.samples());
    CHECK(std::filesystem::file_size(bin) == 16 + 8 * 17 * 3);

    {
        std::ofstream os(csv);
        os << "x0,x1\n1,2\n3\n";
    }
    CHECK_THROWS(read_csv(csv));
    {
        std::ofstream os(csv);
        os << "a,b\n1,2\n";
    }
    CHECK_THROWS(read_csv(csv));
    {
        std::ofstream os(bin, std::ios::binary);
        os << "SCB1xxxx";
    }
    CHECK_THROWS(read_binary(bin));
    std::filesystem::remove(csv);
    std::filesystem::remove(bin);
}
