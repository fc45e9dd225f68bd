#include "sica/datamodel.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sica {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'C', 'B', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::ostream& os, std::uint32_t v)
{
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double x)
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    os.write(b.data(), 8);
}

std::uint64_t get_le(const unsigned char* p, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode)
{
    std::ofstream os(path, mode);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return os;
}

} // namespace

void write_csv(const DataBatch& batch, const std::filesystem::path& path)
{
    auto os = open_out(path, std::ios::out | std::ios::trunc);
    for (int j = 0; j < batch.d(); ++j) os << (j ? ",x" : "x") << j;
    os << '\n';
    char buf[32];
    for (int i = 0; i < batch.n(); ++i) {
        for (int j = 0; j < batch.d(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", batch.samples()(i, j));
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

DataBatch read_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("CSV '" + path.string() + "' is empty");

    int d = 0;
    {
        std::stringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) {
            if (!tok.empty() && tok.back() == '\r') tok.pop_back();
            if (tok != "x" + std::to_string(d))
                throw std::runtime_error("CSV header must be x0,...,x{d-1}; got '" + tok + "'");
            ++d;
        }
    }
    if (d == 0) throw std::runtime_error("CSV header has no columns");

    std::vector<double> values;
    int n = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int j = 0; j < d; ++j) {
            double x = 0.0;
            auto [next, ec] = std::from_chars(p, end, x);
            if (ec != std::errc{})
                throw std::runtime_error("CSV row " + std::to_string(n + 1) + ": bad number");
            p = next;
            if (j + 1 < d) {
                if (p == end || *p != ',')
                    throw std::runtime_error("CSV row " + std::to_string(n + 1) + ": expected " +
                                             std::to_string(d) + " fields");
                ++p;
            }
            values.push_back(x);
        }
        if (p != end) throw std::runtime_error("CSV row " + std::to_string(n + 1) + ": too many fields");
        ++n;
    }
    if (n == 0) throw std::runtime_error("CSV '" + path.string() + "' has no data rows");
    return DataBatch(Eigen::Map<RowMatrix>(values.data(), n, d));
}

void write_binary(const DataBatch& batch, const std::filesystem::path& path)
{
    auto os = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    os.write(kMagic.data(), 4);
    put_u32(os, static_cast<std::uint32_t>(batch.n()));
    put_u32(os, static_cast<std::uint32_t>(batch.d()));
    put_u32(os, 0);
    const auto& x = batch.samples();
    for (Eigen::Index i = 0; i < x.size(); ++i) put_f64(os, x.data()[i]);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

DataBatch read_binary(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bytes.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw std::runtime_error("'" + path.string() + "' is not an SCB1 batch file");
    const auto n = get_le(bytes.data() + 4, 4);
    const auto d = get_le(bytes.data() + 8, 4);
    if (bytes.size() != kHeaderBytes + 8 * n * d)
        throw std::runtime_error("'" + path.string() + "': payload size does not match header");
    RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n * d; ++i)
        x.data()[i] = std::bit_cast<double>(get_le(bytes.data() + kHeaderBytes + 8 * i, 8));
    return DataBatch(std::move(x));
}

} // namespace sica
