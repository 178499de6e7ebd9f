#pragma once

#include "rankspectra/data.hpp"
#include "rankspectra/kernels.hpp"
#include "rankspectra/spectra.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankspectra {

std::string_view version() noexcept;

struct ExperimentConfig {
    KernelId statistic = KernelId::HoeffdingD;
    std::size_t n = 300;
    std::size_t p = 400;
    std::uint64_t seed = 1;
    Margin margin = Margin::Uniform01;
    std::size_t bins = 60;
    std::size_t trials = 1;
    std::optional<int> truncation_T;
    std::vector<std::complex<double>> z_probes{{0.0, 1.0}, {0.0, 3.0}};
    std::filesystem::path out_dir = ".";
    unsigned threads = 0; // 0 = auto

    double gamma() const noexcept { return static_cast<double>(p) / static_cast<double>(n); }

    /// Throws ValidationError (or a subclass) on any broken invariant.
    void validate() const;
};

/// Applies one key=value setting. Keys: stat, n, p, seed, margin, bins,
/// trials, truncation, z ("re,im"), out, threads (N or "auto").
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses "re,im" into a complex number.
std::complex<double> parse_complex(std::string_view text);

/// Reads a key=value file ('#' starts a comment). The first `z` line replaces
/// the default probes; later ones append.
ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base = {});

struct StieltjesGap {
    std::complex<double> z;
    std::complex<double> s;       // empirical
    std::complex<double> m_theta; // semicircle law
    double gap = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    double gamma = 0.0;
    double radius = 0.0;
    double ks = 0.0;
    double second_moment_empirical = 0.0;
    double second_moment_theory = 0.0;
    std::vector<StieltjesGap> stieltjes_gaps;
    double elapsed_seconds = 0.0;
    std::string version;
    std::vector<double> eigenvalues; // descending
    Histogram histogram;
};

/// Builds the matrix, its spectrum and the law comparison, without writing files.
ExperimentResult compute_experiment(const ExperimentConfig& cfg);

/// eigenvalues.csv, histogram.csv, stieltjes.csv and summary.json in `dir`.
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

/// compute_experiment followed by write_artifacts(cfg.out_dir).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string summary_json(const ExperimentResult& result);

/// W = sqrt(n)(R - I) for one sample, through the configured matrix path.
std::vector<double> experiment_spectrum(const ExperimentConfig& cfg);

struct VarianceRow {
    std::size_t p = 0;
    std::size_t n = 0;
    std::complex<double> mean;
    double variance = 0.0; // sum |s - mean|^2 / (trials - 1)
};

struct VarianceScan {
    KernelId statistic = KernelId::HoeffdingD;
    double gamma = 0.0;
    std::complex<double> z;
    std::size_t trials = 0;
    std::vector<VarianceRow> rows;
    double slope = 0.0;     // least squares of log variance on log p
    double intercept = 0.0;
};

/// Requires trials >= 50 and n = round(p / gamma) >= m for every p.
VarianceScan run_variance_scan(KernelId id, std::span<const std::size_t> p_list, double gamma,
                               std::size_t trials, std::complex<double> z, std::uint64_t seed,
                               Margin margin = Margin::Uniform01, unsigned threads = 0);

struct ConvergenceRow {
    std::complex<double> z;
    std::complex<double> mean_s;
    double standard_error = 0.0; // of |mean_s| components, combined
    std::complex<double> m_theta;
    double gap = 0.0;
};

struct ConvergenceTable {
    KernelId statistic = KernelId::HoeffdingD;
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t trials = 0;
    double radius = 0.0;           // law the data should follow
    double reference_radius = 0.0; // law the gaps are measured against
    double second_moment_mean = 0.0;
    double second_moment_theory = 0.0;
    std::vector<ConvergenceRow> rows;
};

/// Requires trials >= 20. `reference_radius` overrides the comparison law
/// (defaults to the statistic's own radius).
ConvergenceTable run_stieltjes_convergence(KernelId id, std::size_t n, std::size_t p,
                                           std::size_t trials,
                                           std::span<const std::complex<double>> z_probes,
                                           std::uint64_t seed,
                                           std::optional<double> reference_radius = std::nullopt,
                                           Margin margin = Margin::Uniform01,
                                           unsigned threads = 0);

} // namespace rankspectra
