#include "ghostproj/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ghostproj {

std::string to_string(Distribution d)
{
    switch (d) {
    case Distribution::uniform01: return "uniform01";
    case Distribution::binary01: return "binary01";
    case Distribution::truncated_gaussian: return "truncated-gaussian";
    }
    return "?";
}

Distribution distribution_from_string(const std::string& s)
{
    if (s == "uniform01") return Distribution::uniform01;
    if (s == "binary01") return Distribution::binary01;
    if (s == "truncated-gaussian") return Distribution::truncated_gaussian;
    throw std::invalid_argument("unknown distribution '" + s + "'");
}

void BasisSpec::validate() const
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("BasisSpec: rows/cols must be >= 1");
    if (count < 1)
        throw std::invalid_argument("BasisSpec: mask count must be >= 1");
    if (distribution == Distribution::truncated_gaussian && sigma <= 0.0)
        throw std::invalid_argument("BasisSpec: truncated gaussian needs sigma > 0");
}

namespace {

double clip01(double x) noexcept
{
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

// Sampling oracle for the clipped Gaussian; 1e7 deviates, cached per
// (mu, sigma).
DistributionMoments sampled_truncgauss_moments(double mu, double sigma)
{
    static std::mutex mtx;
    static std::map<std::pair<double, double>, DistributionMoments> cache;
    std::lock_guard lock(mtx);
    const auto key = std::make_pair(mu, sigma);
    if (auto it = cache.find(key); it != cache.end())
        return it->second;

    constexpr std::uint64_t n = 10'000'000;
    CounterStream rng(0x67a5'70c4'9e37'79b9ull, RngStream::generic, 0);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, sp = 0.0, sp2 = 0.0;
    double prev = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = clip01(mu + sigma * rng.next_gaussian());
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        if (i % 2 == 1) {
            sp += prev * x;
            sp2 += prev * prev * x2;
        }
        prev = x;
    }
    DistributionMoments m;
    m.mean = s1 / n;
    m.second_moment = s2 / n;
    m.variance = m.second_moment - m.mean * m.mean;
    m.square_variance = s4 / n - m.second_moment * m.second_moment;
    const double pm = sp / (n / 2);
    m.product_variance = sp2 / (n / 2) - pm * pm;
    cache[key] = m;
    return m;
}

} // namespace

DistributionMoments moments(const BasisSpec& spec)
{
    switch (spec.distribution) {
    case Distribution::uniform01:
        return {0.5, 1.0 / 12.0, 1.0 / 3.0, 4.0 / 45.0, 7.0 / 144.0};
    case Distribution::binary01:
        return {0.5, 0.25, 0.5, 0.25, 3.0 / 16.0};
    case Distribution::truncated_gaussian:
        return sampled_truncgauss_moments(spec.mu, spec.sigma);
    }
    throw std::invalid_argument("moments: unsupported distribution family");
}

RandomBasis::RandomBasis(BasisSpec spec, std::size_t memory_cap_bytes)
    : spec_(spec), moments_(ghostproj::moments(spec)), memory_cap_(memory_cap_bytes)
{
    spec_.validate();
}

bool RandomBasis::fits_in_memory() const noexcept
{
    const auto bytes = static_cast<std::size_t>(spec_.count) * spec_.pixels() * sizeof(double);
    return bytes / sizeof(double) / spec_.pixels() == spec_.count && bytes <= memory_cap_;
}

void RandomBasis::fill_mask(std::uint64_t k, std::span<double> out) const
{
    const long nm = spec_.pixels();
    if (static_cast<long>(out.size()) != nm)
        throw std::invalid_argument("fill_mask: output span has wrong size");
    if (k >= spec_.count)
        throw std::out_of_range("fill_mask: mask index out of range");

    if (materialized()) {
        const double* src = cache_.data() + static_cast<std::size_t>(k) * nm;
        std::copy(src, src + nm, out.begin());
        return;
    }

    const Philox4x32::Key key{static_cast<std::uint32_t>(spec_.master_seed),
                              static_cast<std::uint32_t>(spec_.master_seed >> 32)};
    const std::uint32_t klo = static_cast<std::uint32_t>(k);
    const std::uint32_t khi = static_cast<std::uint32_t>(k >> 32);
    const std::uint32_t stream = static_cast<std::uint32_t>(RngStream::mask) << 24;

    switch (spec_.distribution) {
    case Distribution::uniform01:
        for (long p = 0; p < nm; p += 2) {
            const auto w = Philox4x32::round10(
                {static_cast<std::uint32_t>(p >> 1), klo, khi, stream}, key);
            out[p] = u01_from_bits(w[0], w[1]);
            if (p + 1 < nm)
                out[p + 1] = u01_from_bits(w[2], w[3]);
        }
        break;
    case Distribution::binary01:
        for (long p = 0; p < nm; p += 2) {
            const auto w = Philox4x32::round10(
                {static_cast<std::uint32_t>(p >> 1), klo, khi, stream}, key);
            out[p] = (w[0] >> 31) ? 1.0 : 0.0;
            if (p + 1 < nm)
                out[p + 1] = (w[1] >> 31) ? 1.0 : 0.0;
        }
        break;
    case Distribution::truncated_gaussian:
        for (long p = 0; p < nm; ++p) {
            const auto w = Philox4x32::round10(
                {static_cast<std::uint32_t>(p), klo, khi, stream}, key);
            double u1 = u01_from_bits(w[0], w[1]);
            const double u2 = u01_from_bits(w[2], w[3]);
            if (u1 <= 0.0)
                u1 = 0x1.0p-54;
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            out[p] = clip01(spec_.mu + spec_.sigma * z);
        }
        break;
    }
}

std::vector<double> RandomBasis::mask(std::uint64_t k) const
{
    std::vector<double> out(static_cast<std::size_t>(spec_.pixels()));
    fill_mask(k, out);
    return out;
}

double RandomBasis::pixel(std::uint64_t k, long p) const
{
    if (p < 0 || p >= spec_.pixels())
        throw std::out_of_range("pixel: index out of range");
    if (materialized())
        return cache_[static_cast<std::size_t>(k) * spec_.pixels() + p];

    const Philox4x32::Key key{static_cast<std::uint32_t>(spec_.master_seed),
                              static_cast<std::uint32_t>(spec_.master_seed >> 32)};
    const std::uint32_t klo = static_cast<std::uint32_t>(k);
    const std::uint32_t khi = static_cast<std::uint32_t>(k >> 32);
    const std::uint32_t stream = static_cast<std::uint32_t>(RngStream::mask) << 24;

    if (spec_.distribution == Distribution::truncated_gaussian) {
        const auto w = Philox4x32::round10(
            {static_cast<std::uint32_t>(p), klo, khi, stream}, key);
        double u1 = u01_from_bits(w[0], w[1]);
        const double u2 = u01_from_bits(w[2], w[3]);
        if (u1 <= 0.0)
            u1 = 0x1.0p-54;
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return clip01(spec_.mu + spec_.sigma * z);
    }

    const auto w = Philox4x32::round10(
        {static_cast<std::uint32_t>(p >> 1), klo, khi, stream}, key);
    const bool odd = (p & 1) != 0;
    if (spec_.distribution == Distribution::binary01)
        return ((odd ? w[1] : w[0]) >> 31) ? 1.0 : 0.0;
    return odd ? u01_from_bits(w[2], w[3]) : u01_from_bits(w[0], w[1]);
}

void RandomBasis::materialize()
{
    if (materialized())
        return;
    if (!fits_in_memory())
        throw std::runtime_error("materialize: basis exceeds the memory cap; use streaming access");
    const long nm = spec_.pixels();
    // Generate before installing the cache: fill_mask serves from cache_ as
    // soon as it is non-empty, so filling cache_ in place would copy zeros.
    std::vector<double> generated(static_cast<std::size_t>(spec_.count) * nm);
    for (std::uint64_t k = 0; k < spec_.count; ++k)
        fill_mask(k, std::span<double>(generated.data() + static_cast<std::size_t>(k) * nm,
                                       static_cast<std::size_t>(nm)));
    cache_ = std::move(generated);
}

OrthogonalityReport orthogonality_report(const RandomBasis& basis, std::uint64_t pairs)
{
    const auto& spec = basis.spec();
    if (spec.count < 2)
        throw std::invalid_argument("orthogonality_report: needs N >= 2");
    const auto& m = basis.moments();
    const double nm = static_cast<double>(spec.pixels());
    const double norm = 1.0 / (nm * m.variance);

    CounterStream pick(spec.master_seed ^ 0x5bf0'3635ull, RngStream::generic, 1);
    std::vector<double> a(static_cast<std::size_t>(spec.pixels()));
    std::vector<double> b(a.size());

    double off_s1 = 0.0, off_s2 = 0.0, diag_s1 = 0.0, diag_s2 = 0.0;
    for (std::uint64_t t = 0; t < pairs; ++t) {
        const auto k1 = static_cast<std::uint64_t>(pick.next_u01() * spec.count) % spec.count;
        auto k2 = static_cast<std::uint64_t>(pick.next_u01() * spec.count) % spec.count;
        if (k2 == k1)
            k2 = (k2 + 1) % spec.count;
        basis.fill_mask(k1, a);
        basis.fill_mask(k2, b);
        double dot = 0.0, self = 0.0;
        for (std::size_t p = 0; p < a.size(); ++p) {
            dot += a[p] * b[p];
            self += a[p] * a[p];
        }
        const double off = dot * norm;
        const double diag = self * norm;
        off_s1 += off;
        off_s2 += off * off;
        diag_s1 += diag;
        diag_s2 += diag * diag;
    }

    OrthogonalityReport r;
    r.pairs = pairs;
    const double n = static_cast<double>(pairs);
    r.offdiag_mean = off_s1 / n;
    r.offdiag_variance = off_s2 / n - r.offdiag_mean * r.offdiag_mean;
    r.diag_mean = diag_s1 / n;
    r.diag_variance = diag_s2 / n - r.diag_mean * r.diag_mean;
    const double v2 = m.variance * m.variance;
    r.offdiag_mean_predicted = m.mean * m.mean / m.variance;
    r.diag_mean_predicted = m.second_moment / m.variance;
    r.offdiag_variance_predicted =
        (m.second_moment * m.second_moment - std::pow(m.mean, 4)) / (nm * v2);
    r.diag_variance_predicted = m.square_variance / (nm * v2);
    return r;
}

CompletenessReport completeness_report(const RandomBasis& basis, int pixel_pairs)
{
    const auto& spec = basis.spec();
    if (spec.count < 2)
        throw std::invalid_argument("completeness_report: needs N >= 2");
    if (pixel_pairs < 1)
        throw std::invalid_argument("completeness_report: needs at least one pixel pair");
    const auto& m = basis.moments();
    const double invN = 1.0 / (static_cast<double>(spec.count) * m.variance);

    CounterStream pick(spec.master_seed ^ 0x2545'f491ull, RngStream::generic, 2);
    double off_s1 = 0.0, off_s2 = 0.0, diag_s1 = 0.0, diag_s2 = 0.0;
    for (int t = 0; t < pixel_pairs; ++t) {
        const long nm = spec.pixels();
        const long p = static_cast<long>(pick.next_u01() * nm) % nm;
        long q = static_cast<long>(pick.next_u01() * nm) % nm;
        if (q == p)
            q = (q + 1) % nm;
        double dot = 0.0, self = 0.0;
        for (std::uint64_t k = 0; k < spec.count; ++k) {
            const double rp = basis.pixel(k, p);
            dot += rp * basis.pixel(k, q);
            self += rp * rp;
        }
        const double off = dot * invN;
        const double diag = self * invN;
        off_s1 += off;
        off_s2 += off * off;
        diag_s1 += diag;
        diag_s2 += diag * diag;
    }

    CompletenessReport r;
    r.pixel_pairs = pixel_pairs;
    const double n = static_cast<double>(pixel_pairs);
    r.offdiag_mean = off_s1 / n;
    r.offdiag_variance = off_s2 / n - r.offdiag_mean * r.offdiag_mean;
    r.diag_mean = diag_s1 / n;
    r.diag_variance = diag_s2 / n - r.diag_mean * r.diag_mean;
    const double v2 = m.variance * m.variance;
    const double N = static_cast<double>(spec.count);
    r.offdiag_mean_predicted = m.mean * m.mean / m.variance;
    r.diag_mean_predicted = 1.0 + m.mean * m.mean / m.variance;
    r.offdiag_variance_predicted = m.product_variance / (N * v2);
    r.diag_variance_predicted = m.square_variance / (N * v2);
    return r;
}

} // namespace ghostproj
