#pragma once

#include <cstddef>
#include <iosfwd>

#include "specfreq/core.hpp"
#include "specfreq/spectral.hpp"
#include "specfreq/timeseries.hpp"

namespace specfreq {

/// Centered lag products, one row per t = 1..n-2l.
///
/// Column l*(2L+1) + m of row t holds
/// (2 pi)^{-1} { x_{i,t+m} x_{j,t+L} - gamma_{ij}(m - L) } for pair l = (i, j)
/// on the centered panel, m = 0..2L.
class LagPanel {
public:
    LagPanel(Matrix rows, std::size_t block_width);

    [[nodiscard]] const Matrix& rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
    [[nodiscard]] std::size_t block_width() const noexcept { return block_width_; }
    [[nodiscard]] std::size_t pair_count() const noexcept { return dimension() / block_width_; }

private:
    Matrix rows_;
    std::size_t block_width_;
};

[[nodiscard]] LagPanel build_lag_panel(const TimePanel& panel, const IndexSet& pairs, Bandwidth bw);
/// Same, reusing a centered panel and autocovariances computed up to at least l_n.
[[nodiscard]] LagPanel build_lag_panel(const Matrix& centered, const AutocovSet& gamma, const IndexSet& pairs,
                                       Bandwidth bw);

/// Quadratic-Spectral kernel, with K(0) = 1.
[[nodiscard]] double qs_weight(double u) noexcept;

/// K(q / b_n) for q = 0..size-1: the first row of the Toeplitz matrix Theta.
/// Entries with |K| below `truncation` are set to zero.
[[nodiscard]] Vector qs_toeplitz_row(std::size_t size, double bandwidth, double truncation = 0.0);

struct AndrewsOptions {
    double min_bandwidth = 1.0;
    double rho_clip = 0.97;
};

/// b_n = max(1.3221 (a ñ)^{1/5}, b_min) with `a` pooled from per-column AR(1) fits.
[[nodiscard]] double andrews_bandwidth(const LagPanel& lag_panel, const AndrewsOptions& options = {});

struct LongRunCov {
    Matrix matrix;
    double bandwidth = 0.0;
};

inline constexpr double kQsTruncation = 1e-12;

/// Xi = sum_{|q| < ñ} K(q/b_n) Pi(q), evaluated as ñ^{-1} C^T Theta C.
[[nodiscard]] LongRunCov estimate_longrun(const LagPanel& lag_panel, double bandwidth,
                                          double truncation = kQsTruncation);

/// CSV columns: row,col,value (1-based).
void write_longrun_csv(std::ostream& out, const LongRunCov& cov);

}  // namespace specfreq
