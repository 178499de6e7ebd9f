#include "rankspectra/data.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace rankspectra {

std::string_view to_string(Margin margin) {
    switch (margin) {
    case Margin::Uniform01: return "uniform01";
    case Margin::StandardNormal: return "standard-normal";
    case Margin::StandardCauchy: return "standard-cauchy";
    case Margin::Exponential1: return "exponential1";
    }
    return "unknown";
}

Margin parse_margin(std::string_view name) {
    for (Margin m : {Margin::Uniform01, Margin::StandardNormal, Margin::StandardCauchy,
                     Margin::Exponential1})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown margin '" + std::string(name) + "'");
}

std::string_view to_string(MonotoneMap map) {
    switch (map) {
    case MonotoneMap::Identity: return "identity";
    case MonotoneMap::Cube: return "cube";
    case MonotoneMap::Exp: return "exp";
    case MonotoneMap::Atan: return "atan";
    case MonotoneMap::Affine: return "affine";
    }
    return "unknown";
}

MonotoneMap parse_monotone_map(std::string_view name) {
    for (MonotoneMap m : {MonotoneMap::Identity, MonotoneMap::Cube, MonotoneMap::Exp,
                          MonotoneMap::Atan, MonotoneMap::Affine})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown monotone map '" + std::string(name) + "'");
}

double apply(MonotoneMap map, double x) noexcept {
    switch (map) {
    case MonotoneMap::Identity: return x;
    case MonotoneMap::Cube: return x * x * x;
    case MonotoneMap::Exp: return std::exp(x);
    case MonotoneMap::Atan: return std::atan(x);
    case MonotoneMap::Affine: return 2.0 * x + 1.0;
    }
    return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double margin_quantile(Margin margin, double u) {
    switch (margin) {
    case Margin::Uniform01: return u;
    case Margin::StandardNormal: {
        static const boost::math::normal_distribution<double> standard;
        return boost::math::quantile(standard, u);
    }
    case Margin::StandardCauchy: return std::tan(std::numbers::pi * (u - 0.5));
    case Margin::Exponential1: return -std::log1p(-u);
    }
    return u;
}

namespace {

// Index of the later member of an exactly-equal pair, or n if none.
std::size_t find_collision(const std::vector<double>& column, std::vector<std::size_t>& order) {
    order.resize(column.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (column[order[i]] == column[order[i - 1]]) return std::max(order[i], order[i - 1]);
    return column.size();
}

void require_tie_free(std::span<const double> x, std::size_t column) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw TiesError("column " + std::to_string(column) + " contains tied values");
}

} // namespace

std::vector<double> draw_column(std::size_t n, Margin margin, std::uint64_t seed,
                                std::size_t column, std::size_t* retries) {
    UniformStream stream(derive_seed(seed, column));
    std::vector<double> values(n);
    for (auto& v : values) v = margin_quantile(margin, stream.next());

    std::vector<std::size_t> order;
    std::size_t redraws = 0;
    for (std::size_t hit = find_collision(values, order); hit < n;
         hit = find_collision(values, order)) {
        if (++redraws > kMaxTieRetriesPerColumn)
            throw ComputationError("column " + std::to_string(column) +
                                   ": exceeded tie retry limit");
        values[hit] = margin_quantile(margin, stream.next());
    }
    if (retries) *retries += redraws;
    return values;
}

SampleMatrix::SampleMatrix(std::size_t n, std::size_t p, std::vector<double> column_major,
                           Margin margin, std::uint64_t seed, std::size_t retries)
    : n_(n), p_(p), values_(std::move(column_major)), margin_(margin), seed_(seed),
      retries_(retries) {
    if (n_ < 2 || p_ < 2) throw SizeError("sample matrix requires n >= 2 and p >= 2");
    if (values_.size() != n_ * p_) throw SizeError("sample matrix storage does not match n*p");
    for (std::size_t j = 0; j < p_; ++j) {
        for (double v : column(j))
            if (!std::isfinite(v)) throw DomainError("sample matrix contains non-finite values");
        require_tie_free(column(j), j);
    }
}

SampleMatrix sample_matrix(std::size_t n, std::size_t p, Margin margin, std::uint64_t seed,
                           unsigned threads) {
    if (n < 2 || p < 2) throw SizeError("sample_matrix requires n >= 2 and p >= 2");
    std::vector<double> values(n * p);
    std::vector<std::size_t> retries(p, 0);
    parallel_for(p, resolve_threads(threads), [&](std::size_t j) {
        auto col = draw_column(n, margin, seed, j, &retries[j]);
        std::copy(col.begin(), col.end(), values.begin() + static_cast<std::ptrdiff_t>(j * n));
    });
    const std::size_t total = std::accumulate(retries.begin(), retries.end(), std::size_t{0});
    return SampleMatrix(n, p, std::move(values), margin, seed, total);
}

RankVector column_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
    RankVector out{std::vector<std::uint32_t>(n)};
    for (std::size_t r = 0; r < n; ++r) {
        if (r > 0 && x[order[r]] == x[order[r - 1]]) throw TiesError("tied values in rank input");
        if (std::isnan(x[order[r]])) throw DomainError("NaN in rank input");
        out.ranks[order[r]] = static_cast<std::uint32_t>(r + 1);
    }
    return out;
}

SampleMatrix monotone_transform(const SampleMatrix& m, std::span<const MonotoneMap> transforms) {
    if (transforms.size() != 1 && transforms.size() != m.p())
        throw SizeError("monotone_transform needs one map or one map per column");
    std::vector<double> out(m.values().begin(), m.values().end());
    for (std::size_t j = 0; j < m.p(); ++j) {
        const MonotoneMap map = transforms.size() == 1 ? transforms[0] : transforms[j];
        for (std::size_t i = 0; i < m.n(); ++i) out[j * m.n() + i] = apply(map, m.at(i, j));
    }
    // The SampleMatrix constructor rejects floating-point collisions.
    return SampleMatrix(m.n(), m.p(), std::move(out), m.margin(), m.seed(), m.retries());
}

} // namespace rankspectra
