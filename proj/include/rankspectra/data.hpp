#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rankspectra {

/// Continuous marginal distributions available to the sample generator.
/// Every margin is produced by its quantile function from one shared uniform
/// stream, so two margins with the same seed differ by a monotone map.
enum class Margin { Uniform01, StandardNormal, StandardCauchy, Exponential1 };

std::string_view to_string(Margin margin);
Margin parse_margin(std::string_view name);

/// Strictly increasing maps usable by monotone_transform.
enum class MonotoneMap { Identity, Cube, Exp, Atan, Affine };

std::string_view to_string(MonotoneMap map);
MonotoneMap parse_monotone_map(std::string_view name);
double apply(MonotoneMap map, double x) noexcept;

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to key
/// per-column and per-trial generators so results are schedule-independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Uniform draws on the open interval (0, 1) from a 53-bit grid.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t key) : engine_(key) {}
    double next() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

double margin_quantile(Margin margin, double u);

inline constexpr std::size_t kMaxTieRetriesPerColumn = 100;

/// Draws column `column` of the (seed, margin) sample: a deterministic
/// function of (seed, column, n, margin). Colliding draws are redrawn from
/// the same stream; the number of redraws is added to *retries.
std::vector<double> draw_column(std::size_t n, Margin margin, std::uint64_t seed,
                                std::size_t column, std::size_t* retries = nullptr);

/// n x p block of observations, stored column-major. Each column is tie-free.
class SampleMatrix {
public:
    SampleMatrix(std::size_t n, std::size_t p, std::vector<double> column_major, Margin margin,
                 std::uint64_t seed = 0, std::size_t retries = 0);

    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }
    Margin margin() const noexcept { return margin_; }
    std::uint64_t seed() const noexcept { return seed_; }
    /// Total number of redrawn entries caused by floating-point collisions.
    std::size_t retries() const noexcept { return retries_; }

    std::span<const double> column(std::size_t j) const noexcept {
        return {values_.data() + j * n_, n_};
    }
    double at(std::size_t i, std::size_t j) const noexcept { return values_[j * n_ + i]; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const SampleMatrix& other) const = default;

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> values_;
    Margin margin_;
    std::uint64_t seed_;
    std::size_t retries_;
};

SampleMatrix sample_matrix(std::size_t n, std::size_t p, Margin margin, std::uint64_t seed,
                           unsigned threads = 1);

/// Ranks 1..n of a tie-free vector.
struct RankVector {
    std::vector<std::uint32_t> ranks;

    std::size_t size() const noexcept { return ranks.size(); }
    std::uint32_t operator[](std::size_t i) const noexcept { return ranks[i]; }
    bool operator==(const RankVector&) const = default;
};

/// ranks[i] = #{j : x[j] <= x[i]}. Throws TiesError on exact duplicates.
RankVector column_ranks(std::span<const double> x);

/// Applies transforms[j] to column j. A single map is broadcast to all columns.
SampleMatrix monotone_transform(const SampleMatrix& m, std::span<const MonotoneMap> transforms);

} // namespace rankspectra
