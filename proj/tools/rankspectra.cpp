// rankspectra: run the spectral experiments and write CSV/JSON artifacts.
//
//   rankspectra [run] [config] --stat hoeffding-d --n 300 --p 400 --out results/
//   rankspectra scan --stat bkr-r --p-list 50,100,200 --gamma 1 --trials 100
//   rankspectra converge --stat bdy-taustar --n 300 --p 400 --trials 20 --z 0,1
//
// Exit codes: 0 ok, 2 invalid input, 3 computation failure, 4 I/O failure.

#include "rankspectra/error.hpp"
#include "rankspectra/harness.hpp"
#include "rankspectra/limitlaw.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace rs = rankspectra;

namespace {

struct Flags {
    std::optional<std::string> config_file;
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<std::string> z;
    std::string p_list = "50,100,200";
    double gamma = 1.0;
    std::optional<double> reference_radius;
};

void add_common(CLI::App& app, Flags& f) {
    const auto setting = [&f, &app](const char* flag, const char* key, const char* help) {
        app.add_option_function<std::string>(
            flag, [&f, key](const std::string& v) { f.settings.emplace_back(key, v); }, help);
    };
    setting("--stat", "stat", "hoeffding-d | bkr-r | bdy-taustar");
    setting("--n", "n", "sample size");
    setting("--p", "p", "dimension");
    setting("--seed", "seed", "master seed");
    setting("--margin", "margin", "uniform01 | standard-normal | standard-cauchy | exponential1");
    setting("--bins", "bins", "histogram bins (>= 10)");
    setting("--trials", "trials", "Monte Carlo trials (scan, converge)");
    setting("--truncation", "truncation", "use the T-term Gram approximation");
    setting("--out", "out", "output directory");
    setting("--threads", "threads", "worker threads, N or auto");
    app.add_option("--z", f.z, "probe point re,im (repeatable)")->allow_extra_args(false);
    app.add_option("config", f.config_file, "key=value config file");
}

rs::ExperimentConfig resolve(const Flags& f) {
    rs::ExperimentConfig cfg;
    if (f.config_file) cfg = rs::load_config(*f.config_file);
    for (const auto& [k, v] : f.settings) rs::apply_setting(cfg, k, v);
    if (!f.z.empty()) {
        cfg.z_probes.clear();
        for (const auto& z : f.z) cfg.z_probes.push_back(rs::parse_complex(z));
    }
    return cfg;
}

std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw rs::ValidationError("invalid --p-list entry '" + item + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& dir, const char* name, const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw rs::IoError("cannot create output directory " + dir.string());
    const auto path = dir / name;
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw rs::IoError("cannot open " + path.string() + " for writing");
    const bool ok = std::fwrite(body.data(), 1, body.size(), fp) == body.size();
    if (std::fclose(fp) != 0 || !ok) throw rs::IoError("failed writing " + path.string());
}

int do_run(const Flags& f) {
    const auto cfg = resolve(f);
    const auto res = rs::run_experiment(cfg);
    std::cout << rs::summary_json(res);
    return 0;
}

int do_scan(const Flags& f) {
    const auto cfg = resolve(f);
    const auto p_list = parse_list(f.p_list);
    const auto z = cfg.z_probes.front();
    const auto scan = rs::run_variance_scan(cfg.statistic, p_list, f.gamma, cfg.trials, z, cfg.seed,
                                            cfg.margin, cfg.threads);
    std::string csv = "p,n,re_mean_s,im_mean_s,variance\n";
    for (const auto& row : scan.rows)
        csv += std::to_string(row.p) + "," + std::to_string(row.n) + "," + num(row.mean.real()) +
               "," + num(row.mean.imag()) + "," + num(row.variance) + "\n";
    write_text(cfg.out_dir, "variance_scan.csv", csv);
    std::cout << csv << "slope," << num(scan.slope) << "\n";
    return 0;
}

int do_converge(const Flags& f) {
    const auto cfg = resolve(f);
    const auto table = rs::run_stieltjes_convergence(cfg.statistic, cfg.n, cfg.p, cfg.trials,
                                                     cfg.z_probes, cfg.seed, f.reference_radius,
                                                     cfg.margin, cfg.threads);
    std::string csv = "re_z,im_z,re_mean_s,im_mean_s,re_m_theta,im_m_theta,gap\n";
    for (const auto& row : table.rows)
        csv += num(row.z.real()) + "," + num(row.z.imag()) + "," + num(row.mean_s.real()) + "," +
               num(row.mean_s.imag()) + "," + num(row.m_theta.real()) + "," +
               num(row.m_theta.imag()) + "," + num(row.gap) + "\n";
    write_text(cfg.out_dir, "convergence.csv", csv);
    std::cout << csv << "second_moment," << num(table.second_moment_mean) << ","
              << num(table.second_moment_theory) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of high-dimensional rank correlation matrices"};
    app.set_version_flag("--version", std::string(rs::version()));
    app.require_subcommand(0, 1);

    Flags top, run_flags, scan_flags, conv_flags;
    add_common(app, top);
    auto* run = app.add_subcommand("run", "single experiment (default)");
    add_common(*run, run_flags);
    auto* scan = app.add_subcommand("scan", "Stieltjes variance scan over p");
    add_common(*scan, scan_flags);
    scan->add_option("--p-list", scan_flags.p_list, "comma-separated dimensions");
    scan->add_option("--gamma", scan_flags.gamma, "p / n");
    auto* converge = app.add_subcommand("converge", "mean Stieltjes transform vs the limit law");
    add_common(*converge, conv_flags);
    converge->add_option("--reference-radius", conv_flags.reference_radius,
                         "compare against W(r) for this r instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*scan) return do_scan(scan_flags);
        if (*converge) return do_converge(conv_flags);
        if (*run) return do_run(run_flags);
        return do_run(top);
    } catch (const rs::Error& e) {
        std::cerr << "rankspectra: " << e.what() << "\n";
        switch (e.kind()) {
        case rs::ErrorKind::Validation: return 2;
        case rs::ErrorKind::Computation: return 3;
        case rs::ErrorKind::Io: return 4;
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "rankspectra: " << e.what() << "\n";
        return 3;
    }
}
