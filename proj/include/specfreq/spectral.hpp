#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "specfreq/core.hpp"
#include "specfreq/timeseries.hpp"

namespace specfreq {

/// Flat-top lag window: 1 on [-c, c], linear down to 0 at |u| = 1.
class FlatTopKernel {
public:
    explicit FlatTopKernel(double c = 0.5);

    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double operator()(double u) const noexcept;

private:
    double c_;
};

[[nodiscard]] double flat_top_weight(const FlatTopKernel& kernel, double u) noexcept;

/// Lag-window bandwidth l_n.
struct Bandwidth {
    std::size_t lags = 1;

    /// Throws InvalidBandwidth unless lags >= 1 and n - 2 lags >= 2.
    void check(std::size_t n) const;
    [[nodiscard]] std::size_t effective_length(std::size_t n) const { return n - 2 * lags; }
};

/// l_n = max(round(0.1 ln r), 1) with round-half-to-even.
[[nodiscard]] Bandwidth default_bandwidth(std::size_t pair_count);

/// Per-frequency complex p x p estimates. Entries that were not requested
/// hold NaN; the diagonal is always populated.
class SpectralEstimate {
public:
    SpectralEstimate(std::vector<double> frequencies, std::vector<ComplexMatrix> matrices);

    [[nodiscard]] const std::vector<double>& frequencies() const noexcept { return frequencies_; }
    [[nodiscard]] const ComplexMatrix& at(std::size_t freq_index) const { return matrices_.at(freq_index); }
    [[nodiscard]] Complex value(std::size_t i, std::size_t j, std::size_t freq_index) const {
        return matrices_.at(freq_index)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    [[nodiscard]] std::size_t dimension() const noexcept;
    /// Index of `omega` in the evaluated grid (within 1e-12), if present.
    [[nodiscard]] std::optional<std::size_t> find(double omega) const noexcept;

private:
    std::vector<double> frequencies_;
    std::vector<ComplexMatrix> matrices_;
};

/// f_{ij}(w) = (2 pi)^{-1} sum_{|k| <= l} W(k/l) gamma_{ij}(k) e^{-i k w}.
/// With no pair set every entry is computed.
[[nodiscard]] SpectralEstimate estimate_spectrum(const TimePanel& panel, Bandwidth bw, const FlatTopKernel& kernel,
                                                 const FrequencySet& freqs,
                                                 const std::optional<IndexSet>& pairs = std::nullopt);
[[nodiscard]] SpectralEstimate estimate_spectrum(const AutocovSet& gamma, Bandwidth bw, const FlatTopKernel& kernel,
                                                 std::span<const double> omegas, const IndexSet* pairs);

/// Tolerance below which an auto-spectrum is treated as non-positive.
inline constexpr double kCoherenceFloor = 1e-12;

/// f_{ij} / sqrt(f_{ii} f_{jj}); throws NonPositiveAutoSpectrum when a
/// denominator auto-spectrum is <= kCoherenceFloor.
[[nodiscard]] Complex coherence(const SpectralEstimate& est, std::size_t i, std::size_t j, double omega);

/// A(w): the 2 x (2l+1) projection mapping a lag block onto (Re, Im) of the
/// scaled spectral estimate.
struct FreqProjection {
    double omega = 0.0;
    Eigen::Matrix<double, 2, Eigen::Dynamic> rows;
};

[[nodiscard]] FreqProjection freq_projection(Bandwidth bw, const FlatTopKernel& kernel, double omega);
[[nodiscard]] std::vector<FreqProjection> freq_projections(Bandwidth bw, const FlatTopKernel& kernel,
                                                           std::span<const double> omegas);

/// CSV columns: omega,i,j,re,im (1-based series indices), 17 significant digits.
void write_spectrum_csv(std::ostream& out, const SpectralEstimate& est);

}  // namespace specfreq
