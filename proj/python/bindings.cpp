#include "rankspectra/data.hpp"
#include "rankspectra/error.hpp"
#include "rankspectra/faststats.hpp"
#include "rankspectra/gramlab.hpp"
#include "rankspectra/harness.hpp"
#include "rankspectra/kernels.hpp"
#include "rankspectra/limitlaw.hpp"
#include "rankspectra/spectra.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

namespace py = pybind11;
namespace rs = rankspectra;

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

Array square(std::span<const double> row_major, std::size_t p) {
    Array out({p, p});
    std::copy(row_major.begin(), row_major.end(), out.mutable_data());
    return out;
}

Array vector_array(std::span<const double> v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw rs::ValidationError("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

// (n, p) array -> column-major sample.
rs::SampleMatrix to_sample(const Array& x, rs::Margin margin) {
    if (x.ndim() != 2) throw rs::ValidationError("expected an (n, p) array");
    const auto n = static_cast<std::size_t>(x.shape(0));
    const auto p = static_cast<std::size_t>(x.shape(1));
    std::vector<double> cols(n * p);
    auto v = x.unchecked<2>();
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) cols[j * n + i] = v(i, j);
    return rs::SampleMatrix(n, p, std::move(cols), margin);
}

Array to_array(const rs::SampleMatrix& m) {
    Array out({m.n(), m.p()});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t j = 0; j < m.p(); ++j)
        for (std::size_t i = 0; i < m.n(); ++i) v(i, j) = m.at(i, j);
    return out;
}

rs::CorrMatrix corr_from_array(const Array& r, std::size_t n, rs::KernelId id) {
    if (r.ndim() != 2 || r.shape(0) != r.shape(1)) throw rs::ValidationError("expected a square array");
    const auto p = static_cast<std::size_t>(r.shape(0));
    return rs::CorrMatrix{p, n, id, std::vector<double>(r.data(), r.data() + r.size())};
}

std::vector<double> eigenvalues_of(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw rs::ValidationError("expected a square array");
    return rs::sym_eigenvalues({a.data(), static_cast<std::size_t>(a.size())},
                               static_cast<std::size_t>(a.shape(0)));
}

py::dict result_dict(const rs::ExperimentResult& r) {
    py::list gaps;
    for (const auto& g : r.stieltjes_gaps) {
        py::dict d;
        d["z"] = g.z;
        d["s"] = g.s;
        d["m_theta"] = g.m_theta;
        d["gap"] = g.gap;
        gaps.append(d);
    }
    py::dict out;
    out["statistic"] = std::string(rs::to_string(r.config.statistic));
    out["n"] = r.config.n;
    out["p"] = r.config.p;
    out["gamma"] = r.gamma;
    out["radius"] = r.radius;
    out["ks"] = r.ks;
    out["second_moment_empirical"] = r.second_moment_empirical;
    out["second_moment_theory"] = r.second_moment_theory;
    out["stieltjes_gaps"] = gaps;
    out["seed"] = r.config.seed;
    out["margin"] = std::string(rs::to_string(r.config.margin));
    out["elapsed_seconds"] = r.elapsed_seconds;
    out["version"] = r.version;
    out["eigenvalues"] = vector_array(r.eigenvalues);
    return out;
}

} // namespace

PYBIND11_MODULE(_rankspectra, m) {
    m.doc() = "Rank correlation matrices, their spectra and semicircle limits";
    m.attr("__version__") = std::string(rs::version());

    // Module-lifetime exception types, one per error class.
    static PyObject* base = py::exception<rs::Error>(m, "RankSpectraError", PyExc_Exception).release().ptr();
    auto bases = [](PyObject* builtin) { return py::make_tuple(py::handle(base), py::handle(builtin)).release().ptr(); };
    static PyObject* validation = PyErr_NewException("rankspectra.ValidationError", bases(PyExc_ValueError), nullptr);
    static PyObject* computation = PyErr_NewException("rankspectra.ComputationError", bases(PyExc_RuntimeError), nullptr);
    static PyObject* io = PyErr_NewException("rankspectra.IoError", bases(PyExc_OSError), nullptr);
    m.attr("ValidationError") = py::handle(validation);
    m.attr("ComputationError") = py::handle(computation);
    m.attr("IoError") = py::handle(io);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const rs::Error& e) {
            PyObject* type = base;
            switch (e.kind()) {
            case rs::ErrorKind::Validation: type = validation; break;
            case rs::ErrorKind::Computation: type = computation; break;
            case rs::ErrorKind::Io: type = io; break;
            }
            PyErr_SetString(type, e.what());
        }
    });

    // data
    m.def("sample_matrix",
          [](std::size_t n, std::size_t p, const std::string& margin, std::uint64_t seed) {
              return to_array(rs::sample_matrix(n, p, rs::parse_margin(margin), seed));
          },
          py::arg("n"), py::arg("p"), py::arg("margin") = "uniform01", py::arg("seed") = 1,
          "Tie-free (n, p) sample with independent columns.");
    m.def("derive_seed", &rs::derive_seed, py::arg("seed"), py::arg("stream"));

    // kernels
    m.def("kernel_order", [](const std::string& s) { return rs::kernel_order(rs::parse_kernel(s)); });
    m.def("kernel_bound", [](const std::string& s) { return rs::kernel_bound(rs::parse_kernel(s)); });
    m.def("kernel_eval",
          [](const std::string& s, const Array& x, const Array& y) {
              return rs::kernel_eval(rs::parse_kernel(s), to_vector(x), to_vector(y));
          },
          py::arg("statistic"), py::arg("x"), py::arg("y"));
    m.def("u_statistic_naive",
          [](const std::string& s, const Array& x, const Array& y, double max_terms) {
              return rs::u_statistic_naive(rs::parse_kernel(s), to_vector(x), to_vector(y), max_terms);
          },
          py::arg("statistic"), py::arg("x"), py::arg("y"), py::arg("max_terms") = rs::kDefaultTermBudget);

    // faststats
    m.def("pair_stat",
          [](const std::string& s, const Array& x, const Array& y) {
              return rs::pair_stat(rs::parse_kernel(s), to_vector(x), to_vector(y));
          },
          py::arg("statistic"), py::arg("x"), py::arg("y"));
    m.def("correlation_matrix",
          [](const std::string& s, const Array& x, unsigned threads) {
              const auto r = rs::correlation_matrix(rs::parse_kernel(s), to_sample(x, rs::Margin::Uniform01), threads);
              return square(r.entries, r.p);
          },
          py::arg("statistic"), py::arg("x"), py::arg("threads") = 0,
          "p x p rank-correlation matrix of an (n, p) sample.");
    m.def("standardize",
          [](const Array& r, std::size_t n) {
              const auto w = rs::standardize(corr_from_array(r, n, rs::KernelId::HoeffdingD));
              return square(w.entries, w.p);
          },
          py::arg("r"), py::arg("n"), "sqrt(n) (R - I).");

    // spectra
    m.def("sym_eigenvalues", [](const Array& a) { return vector_array(eigenvalues_of(a)); },
          py::arg("a"), "Eigenvalues of a symmetric matrix, descending.");
    m.def("empirical_stieltjes",
          [](const Array& eigs, std::complex<double> z) { return rs::empirical_stieltjes(to_vector(eigs), z); },
          py::arg("eigenvalues"), py::arg("z"));
    m.def("ks_distance",
          [](const Array& eigs, double radius) {
              return rs::ks_distance(to_vector(eigs), rs::SemicircleLaw(radius));
          },
          py::arg("eigenvalues"), py::arg("radius"), "KS distance of the ESD to W(radius).");
    m.def("esd_histogram",
          [](const Array& eigs, std::size_t bins, double lo, double hi) {
              const auto h = rs::esd_histogram(to_vector(eigs), bins, lo, hi);
              py::dict d;
              d["edges"] = vector_array(h.edges);
              d["counts"] = h.counts;
              d["density"] = vector_array(h.density);
              d["underflow"] = h.underflow;
              d["overflow"] = h.overflow;
              return d;
          },
          py::arg("eigenvalues"), py::arg("bins"), py::arg("lo"), py::arg("hi"));

    // limitlaw
    m.def("sc_density", &rs::sc_density, py::arg("x"), py::arg("r"));
    m.def("sc_cdf", &rs::sc_cdf, py::arg("x"), py::arg("r"));
    m.def("sc_stieltjes", &rs::sc_stieltjes, py::arg("z"), py::arg("r"));
    m.def("radius_theta", &rs::radius_theta, py::arg("m"), py::arg("gamma"), py::arg("sum_lambda_sq"));
    m.def("corollary_radius",
          [](const std::string& s, double gamma) { return rs::corollary_radius(rs::parse_kernel(s), gamma); },
          py::arg("statistic"), py::arg("gamma"));
    m.def("g_closed", &rs::g_closed, py::arg("x"), py::arg("y"));
    m.def("g_series", &rs::HoeffdingEigenSystem::g_series, py::arg("x"), py::arg("y"),
          py::arg("T") = rs::kDefaultSeriesTerms);

    // gramlab
    m.def("gram_identity_residual",
          [](const Array& x, int T, const std::string& s, double scale) {
              return rs::gram_identity_residual(to_sample(x, rs::Margin::Uniform01),
                                                rs::TruncationConfig{T, rs::parse_kernel(s)}, scale);
          },
          py::arg("x"), py::arg("T"), py::arg("statistic") = "hoeffding-d", py::arg("feature_scale") = 1.0);
    m.def("s_minus_identity_frobenius",
          [](std::size_t n, std::size_t p, int T, std::size_t trials, std::uint64_t seed, const std::string& s) {
              const auto f = rs::s_minus_identity_frobenius(n, p, rs::TruncationConfig{T, rs::parse_kernel(s)},
                                                            trials, seed);
              return py::make_tuple(f.estimate, f.standard_error);
          },
          py::arg("n"), py::arg("p"), py::arg("T"), py::arg("trials"), py::arg("seed"),
          py::arg("statistic") = "hoeffding-d", "(estimate, standard error) of E||S - I||_F^2.");
    m.def("resolvent_quadratic_gap",
          [](std::size_t n, std::size_t p, int T, std::complex<double> z, std::size_t trials,
             std::uint64_t seed, const std::string& s, bool rademacher) {
              const auto r = rs::resolvent_quadratic_gap(
                  n, p, rs::TruncationConfig{T, rs::parse_kernel(s)}, z, trials, seed,
                  rademacher ? rs::FeatureSource::Rademacher : rs::FeatureSource::Kernel);
              return py::make_tuple(r.estimate, r.standard_error);
          },
          py::arg("n"), py::arg("p"), py::arg("T"), py::arg("z"), py::arg("trials"), py::arg("seed"),
          py::arg("statistic") = "hoeffding-d", py::arg("rademacher") = false);

    // harness
    m.def("run_experiment",
          [](const std::string& s, std::size_t n, std::size_t p, std::uint64_t seed,
             const std::string& margin, std::size_t bins, std::optional<int> truncation,
             std::vector<std::complex<double>> z, std::optional<std::filesystem::path> out,
             unsigned threads) {
              rs::ExperimentConfig cfg;
              cfg.statistic = rs::parse_kernel(s);
              cfg.n = n;
              cfg.p = p;
              cfg.seed = seed;
              cfg.margin = rs::parse_margin(margin);
              cfg.bins = bins;
              cfg.truncation_T = truncation;
              cfg.z_probes = std::move(z);
              cfg.threads = threads;
              rs::ExperimentResult r;
              {
                  py::gil_scoped_release release;
                  r = rs::compute_experiment(cfg);
                  if (out) rs::write_artifacts(r, *out);
              }
              return result_dict(r);
          },
          py::arg("statistic") = "hoeffding-d", py::arg("n") = 300, py::arg("p") = 400,
          py::arg("seed") = 1, py::arg("margin") = "uniform01", py::arg("bins") = 60,
          py::arg("truncation") = py::none(),
          py::arg("z") = std::vector<std::complex<double>>{{0.0, 1.0}, {0.0, 3.0}},
          py::arg("out") = py::none(), py::arg("threads") = 0,
          "Runs one experiment; writes the CSV/JSON artifacts when `out` is given.");
    m.def("run_variance_scan",
          [](const std::string& s, std::vector<std::size_t> p_list, double gamma, std::size_t trials,
             std::complex<double> z, std::uint64_t seed) {
              rs::VarianceScan scan;
              {
                  py::gil_scoped_release release;
                  scan = rs::run_variance_scan(rs::parse_kernel(s), p_list, gamma, trials, z, seed);
              }
              py::list rows;
              for (const auto& r : scan.rows)
                  rows.append(py::dict(py::arg("p") = r.p, py::arg("n") = r.n,
                                       py::arg("mean") = r.mean, py::arg("variance") = r.variance));
              return py::dict(py::arg("rows") = rows, py::arg("slope") = scan.slope,
                              py::arg("intercept") = scan.intercept);
          },
          py::arg("statistic"), py::arg("p_list"), py::arg("gamma"), py::arg("trials"),
          py::arg("z") = std::complex<double>(0.0, 1.0), py::arg("seed") = 1);
    m.def("run_stieltjes_convergence",
          [](const std::string& s, std::size_t n, std::size_t p, std::size_t trials,
             std::vector<std::complex<double>> z, std::uint64_t seed, std::optional<double> reference_radius) {
              rs::ConvergenceTable t;
              {
                  py::gil_scoped_release release;
                  t = rs::run_stieltjes_convergence(rs::parse_kernel(s), n, p, trials, z, seed, reference_radius);
              }
              py::list rows;
              for (const auto& r : t.rows)
                  rows.append(py::dict(py::arg("z") = r.z, py::arg("mean_s") = r.mean_s,
                                       py::arg("m_theta") = r.m_theta, py::arg("gap") = r.gap));
              return py::dict(py::arg("rows") = rows, py::arg("radius") = t.radius,
                              py::arg("reference_radius") = t.reference_radius,
                              py::arg("second_moment_mean") = t.second_moment_mean,
                              py::arg("second_moment_theory") = t.second_moment_theory);
          },
          py::arg("statistic"), py::arg("n"), py::arg("p"), py::arg("trials"),
          py::arg("z") = std::vector<std::complex<double>>{{0.0, 1.0}}, py::arg("seed") = 1,
          py::arg("reference_radius") = py::none());
}
