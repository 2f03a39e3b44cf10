#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "specfreq/core.hpp"
#include "specfreq/longrun.hpp"
#include "specfreq/rng.hpp"
#include "specfreq/spectral.hpp"

namespace specfreq {

/// How the conditional Gaussian vector S = ñ^{-1/2} sum_t eps_t c_t is drawn.
///
/// TimeDomain draws eps ~ N(0, Theta) and forms S from the lag panel.
/// LongRun draws S ~ N(0, Xi) directly from a factor of the long-run
/// covariance; both give the same conditional law of S. Automatic picks the
/// cheaper of the two for the panel shape and replicate count.
enum class MultiplierRoute { Automatic, TimeDomain, LongRun };

struct MultiplierConfig {
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    double jitter = 1e-10;
    MultiplierRoute route = MultiplierRoute::Automatic;
    /// Test hook: every multiplier is zero.
    bool zero_multipliers = false;
};

/// Square root of Theta + jitter I, Theta_{ts} = K_QS((t - s) / b_n).
struct ToeplitzFactor {
    std::size_t dim = 0;
    Vector first_row;
    /// Lower-triangular Cholesky factor, or V diag(sqrt(max(lambda, 0))) after the eigen fallback.
    Matrix factor;
    double jitter_used = 0.0;
    bool eigen_fallback = false;
};

/// Cholesky of Theta + jitter I. Jitter escalates x10 up to 1e-6, then the
/// symmetric eigendecomposition with negative eigenvalues clipped to zero is used.
[[nodiscard]] ToeplitzFactor factor_theta(std::size_t length, double bandwidth, double jitter);

/// Symmetric PSD square root F with F F^T ~= m, using the same escalation
/// policy with jitter relative to the largest diagonal entry.
struct PsdFactor {
    Matrix factor;
    double jitter_used = 0.0;
    bool eigen_fallback = false;
};
[[nodiscard]] PsdFactor psd_factor(const Matrix& m, double jitter);

/// eps = factor * z with z i.i.d. standard normal read from `key`.
[[nodiscard]] Vector draw_multipliers(const ToeplitzFactor& factor, StreamKey key);

/// sup over the projection grid and max over pair blocks of |A(w) S_l|^2 for
/// S = ñ^{-1/2} sum_t eps_t c_t.
[[nodiscard]] double xi_draw(const LagPanel& lag_panel, std::span<const FreqProjection> projections,
                             const Vector& eps);

/// The same maximum, starting from a precomputed S.
[[nodiscard]] double xi_from_sum(std::span<const FreqProjection> projections, std::size_t block_width,
                                 const Eigen::Ref<const Vector>& sum);

struct BootstrapDraws {
    std::vector<double> xi;
    /// Stream identifier used for each draw, for reproducibility audits.
    std::vector<std::uint64_t> stream_ids;
    MultiplierRoute route = MultiplierRoute::TimeDomain;
    double jitter_used = 0.0;
    bool factor_fallback = false;
};

/// Draw b reads its normals from StreamKey{cfg.seed, stream_id}.child(b), so
/// the draws do not depend on thread scheduling.
[[nodiscard]] BootstrapDraws run_bootstrap(const LagPanel& lag_panel, const FrequencySet& freqs, Bandwidth bw,
                                           const FlatTopKernel& kernel, double longrun_bandwidth,
                                           const MultiplierConfig& cfg, std::uint64_t stream_id = 0);

/// The route Automatic resolves to for this shape.
[[nodiscard]] MultiplierRoute choose_route(std::size_t length, std::size_t dimension, std::size_t replicates);

/// CSV columns: draw,stream,xi.
void write_draws_csv(std::ostream& out, const BootstrapDraws& draws);

}  // namespace specfreq
