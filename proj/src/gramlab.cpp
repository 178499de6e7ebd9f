#include "rankspectra/gramlab.hpp"

#include "rankspectra/error.hpp"
#include "rankspectra/limitlaw.hpp"
#include "rankspectra/parallel.hpp"
#include "rankspectra/summation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rankspectra {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

std::size_t pair_row(std::size_t n, SamplePair pair) noexcept {
    const std::size_t i = pair.first - 1;
    const std::size_t j = pair.second - 1;
    // rows before block i: sum_{a<i} (n - 1 - a)
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

SamplePair row_pair(std::size_t n, std::size_t row) noexcept {
    std::size_t i = 0;
    while (row >= n - 1 - i) {
        row -= n - 1 - i;
        ++i;
    }
    return {static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(i + 2 + row)};
}

double truncation_sigma(const TruncationConfig& cfg) {
    if (cfg.T < 1) throw ValidationError("truncation level T must be >= 1");
    return std::sqrt(h2_scale(cfg.id) * HoeffdingEigenSystem::sum_lambda_sq(cfg.T));
}

double feature_bound(const TruncationConfig& cfg) {
    // sup ||psi_r||_inf = sqrt 2
    return std::sqrt(h2_scale(cfg.id)) * 2.0 * HoeffdingEigenSystem::sum_lambda() /
           truncation_sigma(cfg);
}

namespace {

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Column-major n x p values on [0, 1].
std::vector<double> unit_columns(const SampleMatrix& m) {
    const std::size_t n = m.n();
    std::vector<double> out(m.values().begin(), m.values().end());
    if (m.margin() == Margin::Uniform01) {
        for (double v : out)
            if (!(v >= 0.0 && v <= 1.0))
                throw MarginError("uniform01 sample has values outside [0,1]");
        return out;
    }
    for (std::size_t j = 0; j < m.p(); ++j) {
        const RankVector r = column_ranks(m.column(j));
        for (std::size_t i = 0; i < n; ++i)
            out[j * n + i] = static_cast<double>(r[i]) / static_cast<double>(n + 1);
    }
    return out;
}

// weight * sum_{r<=T} lambda_r psi_r(x_i1) psi_r(x_i2) for all pairs i1 < i2.
void series_features(const double* x, std::size_t n, int T, double weight, double* out) {
    MatrixXd psi(n, T);
    for (int r = 1; r <= T; ++r)
        for (std::size_t i = 0; i < n; ++i) psi(i, r - 1) = HoeffdingEigenSystem::psi(r, x[i]);
    VectorXd lambda(T);
    for (int r = 1; r <= T; ++r) lambda(r - 1) = HoeffdingEigenSystem::lambda(r);
    const MatrixXd K = psi * lambda.asDiagonal() * psi.transpose();
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out[row++] = weight * K(i, j);
}

void closed_features(const double* x, std::size_t n, double weight, double* out) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out[row++] = weight * g_closed(x[i], x[j]);
}

MatrixXd gram(const MatrixXd& F) {
    MatrixXd G = MatrixXd::Zero(F.cols(), F.cols());
    G.selfadjointView<Eigen::Lower>().rankUpdate(F.transpose());
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return G;
}

CorrMatrix from_gram(const MatrixXd& G, double factor, std::size_t n, KernelId id) {
    const std::size_t p = static_cast<std::size_t>(G.rows());
    CorrMatrix out{p, n, id, std::vector<double>(p * p)};
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k)
            out.entries[j * p + k] = j == k ? 1.0 : factor * G(static_cast<Eigen::Index>(j),
                                                                 static_cast<Eigen::Index>(k));
    return out;
}

double prefactor(KernelId id, std::size_t n) {
    const double m = kernel_order(id);
    return m * (m - 1.0) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

MatrixXd series_feature_matrix(const std::vector<double>& unit, std::size_t n, std::size_t p,
                               int T, double weight, unsigned threads) {
    MatrixXd F(static_cast<Eigen::Index>(pair_count(n)), static_cast<Eigen::Index>(p));
    parallel_for(p, resolve_threads(threads), [&](std::size_t k) {
        series_features(unit.data() + k * n, n, T, weight, F.col(static_cast<Eigen::Index>(k)).data());
    });
    return F;
}

// Uniform n x p block, one tie-free stream per column.
MatrixXd uniform_block(std::size_t n, std::size_t p, std::uint64_t seed) {
    MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < p; ++k) {
        const auto col = draw_column(n, Margin::Uniform01, seed, k);
        std::copy(col.begin(), col.end(), X.col(static_cast<Eigen::Index>(k)).data());
    }
    return X;
}

MatrixXd normalized_features(const MatrixXd& X, const TruncationConfig& cfg) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t p = static_cast<std::size_t>(X.cols());
    const double weight = std::sqrt(h2_scale(cfg.id)) / truncation_sigma(cfg);
    MatrixXd F(static_cast<Eigen::Index>(pair_count(n)), static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < p; ++k)
        series_features(X.col(static_cast<Eigen::Index>(k)).data(), n, cfg.T, weight,
                        F.col(static_cast<Eigen::Index>(k)).data());
    return F;
}

void check_truncation(const TruncationConfig& cfg) {
    if (cfg.T < 1) throw ValidationError("truncation level T must be >= 1");
}

} // namespace

CorrMatrix leading_matrix(const SampleMatrix& m, KernelId id, unsigned threads) {
    const std::size_t n = m.n(), p = m.p();
    const auto unit = unit_columns(m);
    const double weight = std::sqrt(h2_scale(id));
    MatrixXd F(static_cast<Eigen::Index>(pair_count(n)), static_cast<Eigen::Index>(p));
    parallel_for(p, resolve_threads(threads), [&](std::size_t k) {
        closed_features(unit.data() + k * n, n, weight, F.col(static_cast<Eigen::Index>(k)).data());
    });
    return from_gram(gram(F), prefactor(id, n), n, id);
}

CorrMatrix truncated_matrix(const SampleMatrix& m, const TruncationConfig& cfg, unsigned threads) {
    check_truncation(cfg);
    const std::size_t n = m.n(), p = m.p();
    const auto unit = unit_columns(m);
    const MatrixXd F = series_feature_matrix(unit, n, p, cfg.T, std::sqrt(h2_scale(cfg.id)), threads);
    return from_gram(gram(F), prefactor(cfg.id, n), n, cfg.id);
}

FeatureMatrix build_feature_matrix(const SampleMatrix& m, const TruncationConfig& cfg,
                                   unsigned threads) {
    check_truncation(cfg);
    const std::size_t n = m.n(), p = m.p();
    const auto unit = unit_columns(m);
    FeatureMatrix out;
    out.n = n;
    out.p = p;
    out.M = pair_count(n);
    out.sigma_T = truncation_sigma(cfg);
    out.entries.resize(out.M * p);
    const double weight = std::sqrt(h2_scale(cfg.id)) / out.sigma_T;
    parallel_for(p, resolve_threads(threads), [&](std::size_t k) {
        series_features(unit.data() + k * n, n, cfg.T, weight, out.entries.data() + k * out.M);
    });
    return out;
}

double gram_identity_residual(const SampleMatrix& m, const TruncationConfig& cfg,
                              double feature_scale) {
    const std::size_t n = m.n(), p = m.p();
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(p);

    const CorrMatrix truncated = truncated_matrix(m, cfg, 1);
    const WMatrix direct = standardize(truncated);

    const FeatureMatrix A = build_feature_matrix(m, cfg, 1);
    const double Md = static_cast<double>(A.M);
    Eigen::Map<const MatrixXd> At(A.entries.data(), static_cast<Eigen::Index>(A.M),
                                  static_cast<Eigen::Index>(p));
    const MatrixXd scaled = feature_scale * At;
    MatrixXd S = scaled.transpose() * scaled / Md;
    S.diagonal().setZero();
    const MatrixXd G = std::sqrt(Md / pd) * S;

    const double order = kernel_order(cfg.id);
    const double factor = order * (order - 1.0) * std::sqrt(pd * Md) * A.sigma_T * A.sigma_T /
                          (std::sqrt(nd) * (nd - 1.0));
    double worst = 0.0;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k)
            worst = std::max(worst, std::abs(direct.at(j, k) -
                                             factor * G(static_cast<Eigen::Index>(j),
                                                        static_cast<Eigen::Index>(k))));
    return worst;
}

McEstimate cross_moment_mc(std::span<const SamplePair> tuples, const TruncationConfig& cfg,
                           std::size_t trials, std::uint64_t seed) {
    check_truncation(cfg);
    if (tuples.empty()) throw ValidationError("cross_moment_mc: empty tuple list");
    if (trials < 2) throw ValidationError("cross_moment_mc: need at least 2 trials");
    std::size_t n = 0;
    for (const auto& [a, b] : tuples) {
        if (a == 0 || b == 0 || a == b)
            throw IndexError("cross_moment_mc: pair indices must be distinct and >= 1");
        n = std::max<std::size_t>(n, std::max(a, b));
    }

    const double weight = std::sqrt(h2_scale(cfg.id)) / truncation_sigma(cfg);
    std::vector<double> lambda(cfg.T);
    for (int r = 1; r <= cfg.T; ++r) lambda[r - 1] = HoeffdingEigenSystem::lambda(r);

    UniformStream stream(derive_seed(seed, 0x63726f7373ULL));
    std::vector<double> psi(n * cfg.T);
    MeanAccumulator acc;
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = stream.next();
            for (int r = 1; r <= cfg.T; ++r) psi[i * cfg.T + (r - 1)] = HoeffdingEigenSystem::psi(r, x);
        }
        double product = 1.0;
        for (const auto& [a, b] : tuples) {
            const double* pa = &psi[(a - 1) * cfg.T];
            const double* pb = &psi[(b - 1) * cfg.T];
            double entry = 0.0;
            for (int r = 0; r < cfg.T; ++r) entry += lambda[r] * pa[r] * pb[r];
            product *= weight * entry;
        }
        acc.add(product);
    }
    return {acc.mean(), acc.standard_error()};
}

FrobeniusEstimate s_minus_identity_frobenius(std::size_t n, std::size_t p,
                                             const TruncationConfig& cfg, std::size_t trials,
                                             std::uint64_t seed) {
    check_truncation(cfg);
    if (trials < 30) throw ValidationError("s_minus_identity_frobenius: need trials >= 30");
    if (n < 2 || p < 1) throw SizeError("s_minus_identity_frobenius: need n >= 2, p >= 1");
    const double Md = static_cast<double>(pair_count(n));

    MeanAccumulator total, diag, off;
    for (std::size_t t = 0; t < trials; ++t) {
        const MatrixXd A = normalized_features(uniform_block(n, p, derive_seed(seed, t)), cfg);
        const MatrixXd S = gram(A) / Md;
        double d = 0.0, o = 0.0;
        for (Eigen::Index j = 0; j < S.rows(); ++j)
            for (Eigen::Index k = 0; k < S.cols(); ++k) {
                if (j == k)
                    d += (S(j, k) - 1.0) * (S(j, k) - 1.0);
                else
                    o += S(j, k) * S(j, k);
            }
        total.add(d + o);
        diag.add(d);
        off.add(o);
    }
    return {total.mean(), total.standard_error(), diag.mean(), off.mean()};
}

McEstimate resolvent_quadratic_gap(std::size_t n, std::size_t p, const TruncationConfig& cfg,
                                   std::complex<double> z, std::size_t trials, std::uint64_t seed,
                                   FeatureSource source) {
    check_truncation(cfg);
    if (!(z.imag() > 0.0)) throw DomainError("resolvent_quadratic_gap requires Im z > 0");
    if (n < 2 || p < 2) throw SizeError("resolvent_quadratic_gap: need n >= 2, p >= 2");
    if (trials < 2) throw ValidationError("resolvent_quadratic_gap: need at least 2 trials");
    const std::size_t M = pair_count(n);
    if (M > kMaxResolventRows)
        throw MemoryGuardError("resolvent_quadratic_gap: M = " + std::to_string(M) +
                               " exceeds " + std::to_string(kMaxResolventRows));
    const double Md = static_cast<double>(M);
    const double pd = static_cast<double>(p);
    const double y_inv_sqrt = std::sqrt(Md / pd);
    const Eigen::Index q = static_cast<Eigen::Index>(p) - 1;

    MeanAccumulator acc;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        MatrixXd A;
        if (source == FeatureSource::Kernel) {
            A = normalized_features(uniform_block(n, p, trial_seed), cfg);
        } else {
            A.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(p));
            UniformStream stream(trial_seed);
            for (Eigen::Index k = 0; k < A.cols(); ++k)
                for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, k) = stream.next() < 0.5 ? -1.0 : 1.0;
        }
        const MatrixXd S = gram(A) / Md;

        CompensatedSum gaps;
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(p); ++k) {
            // S_{-k} and v = A_{-k}^T a_k = M S[-k, k]
            MatrixXd Sk(q, q);
            VectorXd v(q);
            for (Eigen::Index a = 0, ra = 0; a < S.rows(); ++a) {
                if (a == k) continue;
                v(ra) = Md * S(a, k);
                for (Eigen::Index b = 0, rb = 0; b < S.cols(); ++b) {
                    if (b == k) continue;
                    Sk(ra, rb) = S(a, b);
                    ++rb;
                }
                ++ra;
            }
            MatrixXcd H = (y_inv_sqrt * Sk).cast<std::complex<double>>();
            for (Eigen::Index i = 0; i < q; ++i) H(i, i) = -z;
            const MatrixXcd Q = H.partialPivLu().inverse();
            const std::complex<double> quad = v.cast<std::complex<double>>().transpose() * Q *
                                              v.cast<std::complex<double>>();
            const std::complex<double> trace =
                Md * (Q * Sk.cast<std::complex<double>>()).trace();
            gaps.add(std::norm(quad - trace));
        }
        acc.add(gaps.value() / pd / (pd * pd * pd * Md * Md));
    }
    return {acc.mean(), acc.standard_error()};
}

} // namespace rankspectra
