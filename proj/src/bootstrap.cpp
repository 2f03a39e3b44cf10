#include "specfreq/bootstrap.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace specfreq {

namespace {

constexpr double kMaxJitter = 1e-6;
constexpr Eigen::Index kChunk = 32;

struct Factorization {
    Matrix factor;
    double jitter_used = 0.0;
    bool eigen_fallback = false;
};

Factorization factorize(const Matrix& m, double jitter, double scale) {
    const Eigen::Index n = m.rows();
    if (!(jitter >= 0.0)) throw Error(ErrorCode::InvalidArgument, "jitter must be non-negative");
    double j = jitter;
    while (true) {
        Matrix shifted = m;
        shifted.diagonal().array() += j * scale;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() == Eigen::Success) {
            Matrix l = llt.matrixL();
            return Factorization{std::move(l), j, false};
        }
        if (j >= kMaxJitter) break;
        j = j > 0.0 ? std::min(j * 10.0, kMaxJitter) : 1e-12;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigendecomposition failed");
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix f = eig.eigenvectors() * root.asDiagonal();
    (void)n;
    return Factorization{std::move(f), 0.0, true};
}

double max_block(const FreqProjection& proj, std::size_t width, const Eigen::Ref<const Vector>& sum) {
    const auto w = static_cast<Eigen::Index>(width);
    const Eigen::Index blocks = sum.size() / w;
    const Eigen::Map<const Matrix> s(sum.data(), w, blocks);
    const Matrix projected = proj.rows * s;
    return projected.colwise().squaredNorm().maxCoeff();
}

}  // namespace

ToeplitzFactor factor_theta(std::size_t length, double bandwidth, double jitter) {
    if (length == 0) throw Error(ErrorCode::InsufficientLength, "Theta needs at least one row");
    if (!(bandwidth > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "long-run bandwidth must be positive");
    const Vector row = qs_toeplitz_row(length, bandwidth, kQsTruncation);
    const auto n = static_cast<Eigen::Index>(length);
    Matrix theta(n, n);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index s = 0; s < n; ++s) theta(t, s) = row(std::abs(t - s));
    }
    Factorization f = factorize(theta, jitter, 1.0);
    return ToeplitzFactor{length, row, std::move(f.factor), f.jitter_used, f.eigen_fallback};
}

PsdFactor psd_factor(const Matrix& m, double jitter) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
    const double scale = m.rows() > 0 ? m.diagonal().maxCoeff() : 0.0;
    if (!(scale > 0.0)) return PsdFactor{Matrix::Zero(m.rows(), m.cols()), 0.0, false};
    Factorization f = factorize(m, jitter, scale);
    return PsdFactor{std::move(f.factor), f.jitter_used, f.eigen_fallback};
}

Vector draw_multipliers(const ToeplitzFactor& factor, StreamKey key) {
    Vector z(static_cast<Eigen::Index>(factor.dim));
    CounterRng rng(key);
    rng.fill_normal(std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
    if (factor.eigen_fallback) return factor.factor * z;
    return factor.factor.triangularView<Eigen::Lower>() * z;
}

double xi_from_sum(std::span<const FreqProjection> projections, std::size_t block_width,
                   const Eigen::Ref<const Vector>& sum) {
    if (block_width == 0 || static_cast<std::size_t>(sum.size()) % block_width != 0) {
        throw Error(ErrorCode::DimensionMismatch, "sum length is not a multiple of the block width");
    }
    double best = 0.0;
    for (const auto& proj : projections) {
        if (static_cast<std::size_t>(proj.rows.cols()) != block_width) {
            throw Error(ErrorCode::DimensionMismatch, "projection width does not match the lag panel");
        }
        best = std::max(best, max_block(proj, block_width, sum));
    }
    return best;
}

double xi_draw(const LagPanel& lag_panel, std::span<const FreqProjection> projections, const Vector& eps) {
    if (static_cast<std::size_t>(eps.size()) != lag_panel.length()) {
        throw Error(ErrorCode::DimensionMismatch, "multiplier length differs from the lag panel length");
    }
    const Vector sum = lag_panel.rows().transpose() * eps / std::sqrt(static_cast<double>(lag_panel.length()));
    return xi_from_sum(projections, lag_panel.block_width(), sum);
}

MultiplierRoute choose_route(std::size_t length, std::size_t dimension, std::size_t replicates) {
    const double n = static_cast<double>(length);
    const double d = static_cast<double>(dimension);
    const double b = static_cast<double>(replicates);
    const double time_domain = b * (n * n / 2.0 + n * d) + n * n * n / 3.0;
    const double long_run = b * d * d / 2.0 + n * n * d + n * d * d + d * d * d / 3.0;
    return long_run < time_domain ? MultiplierRoute::LongRun : MultiplierRoute::TimeDomain;
}

BootstrapDraws run_bootstrap(const LagPanel& lag_panel, const FrequencySet& freqs, Bandwidth bw,
                             const FlatTopKernel& kernel, double longrun_bandwidth, const MultiplierConfig& cfg,
                             std::uint64_t stream_id) {
    if (cfg.replicates == 0) throw Error(ErrorCode::InvalidArgument, "replicates must be positive");
    if (lag_panel.block_width() != 2 * bw.lags + 1) {
        throw Error(ErrorCode::DimensionMismatch, "lag panel block width does not match l_n");
    }
    const std::vector<FreqProjection> projections = freq_projections(bw, kernel, freqs.grid());
    const auto total = static_cast<Eigen::Index>(cfg.replicates);
    const auto length = static_cast<Eigen::Index>(lag_panel.length());
    const auto dim = static_cast<Eigen::Index>(lag_panel.dimension());
    const StreamKey base{cfg.seed, stream_id};

    BootstrapDraws out;
    out.xi.assign(cfg.replicates, 0.0);
    out.stream_ids.resize(cfg.replicates);
    for (std::size_t b = 0; b < cfg.replicates; ++b) out.stream_ids[b] = base.child(b).stream;
    out.route = cfg.route == MultiplierRoute::Automatic ? choose_route(lag_panel.length(), lag_panel.dimension(),
                                                                       cfg.replicates)
                                                        : cfg.route;
    if (cfg.zero_multipliers) return out;

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(length));
    Matrix factor;
    bool lower = false;
    Eigen::Index draw_size = 0;
    if (out.route == MultiplierRoute::TimeDomain) {
        ToeplitzFactor tf = factor_theta(lag_panel.length(), longrun_bandwidth, cfg.jitter);
        out.jitter_used = tf.jitter_used;
        out.factor_fallback = tf.eigen_fallback;
        lower = !tf.eigen_fallback;
        factor = std::move(tf.factor);
        draw_size = length;
    } else {
        const LongRunCov cov = estimate_longrun(lag_panel, longrun_bandwidth);
        PsdFactor pf = psd_factor(cov.matrix, cfg.jitter);
        out.jitter_used = pf.jitter_used;
        out.factor_fallback = pf.eigen_fallback;
        lower = !pf.eigen_fallback;
        factor = std::move(pf.factor);
        draw_size = dim;
    }

    const Eigen::Index chunks = (total + kChunk - 1) / kChunk;
    const std::size_t width = lag_panel.block_width();
    const Matrix& c = lag_panel.rows();

#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index chunk = 0; chunk < chunks; ++chunk) {
        const Eigen::Index first = chunk * kChunk;
        const Eigen::Index count = std::min(kChunk, total - first);
        Matrix z(draw_size, count);
        for (Eigen::Index k = 0; k < count; ++k) {
            CounterRng rng(base.child(static_cast<std::uint64_t>(first + k)));
            rng.fill_normal(std::span<double>(z.col(k).data(), static_cast<std::size_t>(draw_size)));
        }
        Matrix scaled = lower ? Matrix(factor.triangularView<Eigen::Lower>() * z) : Matrix(factor * z);
        Matrix sums;
        if (out.route == MultiplierRoute::TimeDomain) {
            sums.noalias() = c.transpose() * scaled;
            sums *= inv_sqrt_n;
        } else {
            sums = std::move(scaled);
        }
        for (Eigen::Index k = 0; k < count; ++k) {
            out.xi[static_cast<std::size_t>(first + k)] = xi_from_sum(projections, width, sums.col(k));
        }
    }
    return out;
}

void write_draws_csv(std::ostream& out, const BootstrapDraws& draws) {
    out << "draw,stream,xi\n" << std::setprecision(17);
    for (std::size_t b = 0; b < draws.xi.size(); ++b) {
        out << b + 1 << ',' << draws.stream_ids[b] << ',' << draws.xi[b] << '\n';
    }
}

}  // namespace specfreq
