#include "rankspectra/harness.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/faststats.hpp"
#include "rankspectra/gramlab.hpp"
#include "rankspectra/limitlaw.hpp"
#include "rankspectra/parallel.hpp"
#include "rankspectra/summation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef RANKSPECTRA_VERSION
#define RANKSPECTRA_VERSION "0.0.0"
#endif

namespace rankspectra {

std::string_view version() noexcept { return RANKSPECTRA_VERSION; }

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ValidationError("invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
    return value;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_number(double v) {
    if (!std::isfinite(v)) throw ComputationError("non-finite value in summary");
    return fmt(v);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> spectrum_of(const CorrMatrix& r) {
    const WMatrix w = standardize(r);
    return sym_eigenvalues(w.entries, w.p);
}

CorrMatrix build_matrix(const ExperimentConfig& cfg, const SampleMatrix& sample) {
    if (cfg.truncation_T)
        return truncated_matrix(sample, TruncationConfig{*cfg.truncation_T, cfg.statistic}, cfg.threads);
    return correlation_matrix(cfg.statistic, sample, cfg.threads);
}

void check_probes(std::span<const std::complex<double>> z_probes) {
    for (const auto& z : z_probes)
        if (!(z.imag() > 0.0) || !std::isfinite(z.real()))
            throw DomainError("z probes must lie in the upper half-plane");
}

} // namespace

void ExperimentConfig::validate() const {
    const auto m = static_cast<std::size_t>(kernel_order(statistic));
    if (n < m)
        throw SizeError("n = " + std::to_string(n) + " is below the kernel order " + std::to_string(m));
    if (n > kMaxFastN) throw SizeError("n exceeds " + std::to_string(kMaxFastN));
    if (p < 2) throw SizeError("p must be >= 2");
    if (bins < 10) throw ValidationError("bins must be >= 10");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (truncation_T && *truncation_T < 1) throw ValidationError("truncation must be >= 1");
    if (z_probes.empty()) throw ValidationError("at least one z probe is required");
    check_probes(z_probes);
}

std::complex<double> parse_complex(std::string_view text) {
    text = trim(text);
    const auto comma = text.find(',');
    if (comma == std::string_view::npos)
        throw ValidationError("complex value must be 're,im': '" + std::string(text) + "'");
    return {parse_number<double>("z", text.substr(0, comma)),
            parse_number<double>("z", text.substr(comma + 1))};
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "stat" || key == "statistic") {
        cfg.statistic = parse_kernel(value);
    } else if (key == "n") {
        cfg.n = parse_number<std::size_t>(key, value);
    } else if (key == "p") {
        cfg.p = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "margin") {
        cfg.margin = parse_margin(value);
    } else if (key == "bins") {
        cfg.bins = parse_number<std::size_t>(key, value);
    } else if (key == "trials") {
        cfg.trials = parse_number<std::size_t>(key, value);
    } else if (key == "truncation") {
        if (value.empty() || value == "none")
            cfg.truncation_T.reset();
        else
            cfg.truncation_T = parse_number<int>(key, value);
    } else if (key == "z") {
        cfg.z_probes.push_back(parse_complex(value));
    } else if (key == "out") {
        cfg.out_dir = std::string(value);
    } else if (key == "threads") {
        cfg.threads = value == "auto" ? 0u : parse_number<unsigned>(key, value);
    } else {
        throw ValidationError("unknown setting '" + std::string(key) + "'");
    }
}

ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read config file " + file.string());
    bool probes_replaced = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": expected key=value");
        const auto key = trim(view.substr(0, eq));
        if (key == "z" && !probes_replaced) {
            base.z_probes.clear();
            probes_replaced = true;
        }
        apply_setting(base, key, view.substr(eq + 1));
    }
    return base;
}

std::vector<double> experiment_spectrum(const ExperimentConfig& cfg) {
    cfg.validate();
    const SampleMatrix sample = sample_matrix(cfg.n, cfg.p, cfg.margin, cfg.seed, cfg.threads);
    return spectrum_of(build_matrix(cfg, sample));
}

ExperimentResult compute_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    ExperimentResult res;
    res.config = cfg;
    res.gamma = cfg.gamma();
    res.radius = corollary_radius(cfg.statistic, res.gamma);
    res.version = std::string(version());

    const SampleMatrix sample = sample_matrix(cfg.n, cfg.p, cfg.margin, cfg.seed, cfg.threads);
    const WMatrix w = standardize(build_matrix(cfg, sample));
    const SemicircleLaw law(res.radius);
    SpectralSummary summary = summarize_spectrum(w.entries, w.p, law, cfg.bins, -1.5 * res.radius,
                                                 1.5 * res.radius, cfg.z_probes);

    res.ks = summary.ks_to_law;
    res.second_moment_empirical = summary.second_moment;
    res.second_moment_theory = law.second_moment();
    for (const auto& sample_z : summary.stieltjes_samples) {
        const auto m = law.stieltjes(sample_z.z);
        res.stieltjes_gaps.push_back({sample_z.z, sample_z.s, m, std::abs(sample_z.s - m)});
    }
    res.eigenvalues = std::move(summary.eigenvalues);
    res.histogram = std::move(summary.histogram);
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::string summary_json(const ExperimentResult& r) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"statistic\": \"" << to_string(r.config.statistic) << "\",\n";
    o << "  \"n\": " << r.config.n << ",\n";
    o << "  \"p\": " << r.config.p << ",\n";
    o << "  \"gamma\": " << json_number(r.gamma) << ",\n";
    o << "  \"radius\": " << json_number(r.radius) << ",\n";
    o << "  \"ks\": " << json_number(r.ks) << ",\n";
    o << "  \"second_moment_empirical\": " << json_number(r.second_moment_empirical) << ",\n";
    o << "  \"second_moment_theory\": " << json_number(r.second_moment_theory) << ",\n";
    o << "  \"stieltjes_gaps\": [";
    for (std::size_t i = 0; i < r.stieltjes_gaps.size(); ++i) {
        const auto& g = r.stieltjes_gaps[i];
        o << (i ? ",\n" : "\n") << "    {\"re_z\": " << json_number(g.z.real())
          << ", \"im_z\": " << json_number(g.z.imag()) << ", \"gap\": " << json_number(g.gap) << "}";
    }
    o << (r.stieltjes_gaps.empty() ? "],\n" : "\n  ],\n");
    o << "  \"seed\": " << r.config.seed << ",\n";
    o << "  \"margin\": \"" << to_string(r.config.margin) << "\",\n";
    o << "  \"elapsed_seconds\": " << json_number(r.elapsed_seconds) << ",\n";
    o << "  \"version\": \"" << r.version << "\"\n";
    o << "}\n";
    return o.str();
}

void write_artifacts(const ExperimentResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::string eig = "index,eigenvalue\n";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        eig += std::to_string(i) + "," + fmt(r.eigenvalues[i]) + "\n";
    write_file(dir / "eigenvalues.csv", eig);

    std::string hist = "bin_lo,bin_hi,density,count\n";
    const Histogram& h = r.histogram;
    for (std::size_t b = 0; b < h.bins(); ++b)
        hist += fmt(h.edges[b]) + "," + fmt(h.edges[b + 1]) + "," + fmt(h.density[b]) + "," +
                std::to_string(h.counts[b]) + "\n";
    write_file(dir / "histogram.csv", hist);

    std::string st = "re_z,im_z,re_s,im_s,re_m_theta,im_m_theta\n";
    for (const auto& g : r.stieltjes_gaps)
        st += fmt(g.z.real()) + "," + fmt(g.z.imag()) + "," + fmt(g.s.real()) + "," +
              fmt(g.s.imag()) + "," + fmt(g.m_theta.real()) + "," + fmt(g.m_theta.imag()) + "\n";
    write_file(dir / "stieltjes.csv", st);

    write_file(dir / "summary.json", summary_json(r));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res = compute_experiment(cfg);
    write_artifacts(res, cfg.out_dir);
    return res;
}

VarianceScan run_variance_scan(KernelId id, std::span<const std::size_t> p_list, double gamma,
                               std::size_t trials, std::complex<double> z, std::uint64_t seed,
                               Margin margin, unsigned threads) {
    if (trials < 50) throw ValidationError("variance scan needs trials >= 50");
    if (p_list.size() < 2) throw ValidationError("variance scan needs at least two p values");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
    check_probes(std::span(&z, 1));

    const auto m = static_cast<std::size_t>(kernel_order(id));
    VarianceScan scan{id, gamma, z, trials, {}, 0.0, 0.0};
    for (const std::size_t p : p_list) {
        const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(p) / gamma));
        if (n < m || p < 2)
            throw SizeError("p = " + std::to_string(p) + " gives n = " + std::to_string(n) +
                            " below the kernel order");
        ExperimentConfig cfg;
        cfg.statistic = id;
        cfg.n = n;
        cfg.p = p;
        cfg.margin = margin;
        cfg.threads = threads;

        std::vector<std::complex<double>> s(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            cfg.seed = derive_seed(derive_seed(seed, p), t);
            s[t] = empirical_stieltjes(experiment_spectrum(cfg), z);
        }
        ComplexCompensatedSum sum;
        for (const auto& v : s) sum.add(v);
        const std::complex<double> mean = sum.value() / static_cast<double>(trials);
        CompensatedSum dev;
        for (const auto& v : s) dev.add(std::norm(v - mean));
        scan.rows.push_back({p, n, mean, dev.value() / static_cast<double>(trials - 1)});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(scan.rows.size());
    for (const auto& row : scan.rows) {
        if (!(row.variance > 0.0)) throw ComputationError("zero variance in scan; cannot fit slope");
        const double x = std::log(static_cast<double>(row.p));
        const double y = std::log(row.variance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    scan.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    scan.intercept = (sy - scan.slope * sx) / k;
    return scan;
}

ConvergenceTable run_stieltjes_convergence(KernelId id, std::size_t n, std::size_t p,
                                           std::size_t trials,
                                           std::span<const std::complex<double>> z_probes,
                                           std::uint64_t seed,
                                           std::optional<double> reference_radius, Margin margin,
                                           unsigned threads) {
    if (trials < 20) throw ValidationError("convergence run needs trials >= 20");
    if (z_probes.empty()) throw ValidationError("at least one z probe is required");
    check_probes(z_probes);

    ExperimentConfig cfg;
    cfg.statistic = id;
    cfg.n = n;
    cfg.p = p;
    cfg.margin = margin;
    cfg.threads = threads;
    cfg.z_probes.assign(z_probes.begin(), z_probes.end());
    cfg.validate();

    ConvergenceTable table;
    table.statistic = id;
    table.n = n;
    table.p = p;
    table.trials = trials;
    table.radius = corollary_radius(id, cfg.gamma());
    table.reference_radius = reference_radius.value_or(table.radius);
    const SemicircleLaw law(table.reference_radius);
    table.second_moment_theory = SemicircleLaw(table.radius).second_moment();

    std::vector<MeanAccumulator> re(z_probes.size()), im(z_probes.size());
    MeanAccumulator moment;
    for (std::size_t t = 0; t < trials; ++t) {
        cfg.seed = derive_seed(seed, t);
        const auto eigs = experiment_spectrum(cfg);
        CompensatedSum sq;
        for (double e : eigs) sq.add(e * e);
        moment.add(sq.value() / static_cast<double>(eigs.size()));
        for (std::size_t k = 0; k < z_probes.size(); ++k) {
            const auto s = empirical_stieltjes(eigs, z_probes[k]);
            re[k].add(s.real());
            im[k].add(s.imag());
        }
    }
    table.second_moment_mean = moment.mean();
    for (std::size_t k = 0; k < z_probes.size(); ++k) {
        const std::complex<double> mean{re[k].mean(), im[k].mean()};
        const auto m = law.stieltjes(z_probes[k]);
        table.rows.push_back({z_probes[k], mean,
                              std::hypot(re[k].standard_error(), im[k].standard_error()), m,
                              std::abs(mean - m)});
    }
    return table;
}

} // namespace rankspectra
