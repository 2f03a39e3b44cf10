#include "specfreq/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace specfreq {

FlatTopKernel::FlatTopKernel(double c) : c_(c) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "flat-top constant c must lie in (0, 1]");
}

double FlatTopKernel::operator()(double u) const noexcept {
    const double a = std::abs(u);
    if (a <= c_) return 1.0;
    if (a <= 1.0) return (a - 1.0) / (c_ - 1.0);
    return 0.0;
}

double flat_top_weight(const FlatTopKernel& kernel, double u) noexcept { return kernel(u); }

void Bandwidth::check(std::size_t n) const {
    if (lags < 1) throw Error(ErrorCode::InvalidBandwidth, "bandwidth l_n must be at least 1");
    if (n < 2 * lags + 2) {
        throw Error(ErrorCode::InvalidBandwidth, "n=" + std::to_string(n) + " too short for l_n=" +
                                                     std::to_string(lags) + " (need n - 2 l_n >= 2)");
    }
}

Bandwidth default_bandwidth(std::size_t pair_count) {
    if (pair_count < 1) throw Error(ErrorCode::InvalidArgument, "pair count must be positive");
    // nearbyint under the default FE_TONEAREST mode rounds half to even.
    const double rounded = std::nearbyint(0.1 * std::log(static_cast<double>(pair_count)));
    return Bandwidth{static_cast<std::size_t>(std::max(rounded, 1.0))};
}

SpectralEstimate::SpectralEstimate(std::vector<double> frequencies, std::vector<ComplexMatrix> matrices)
    : frequencies_(std::move(frequencies)), matrices_(std::move(matrices)) {
    if (frequencies_.size() != matrices_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one matrix per frequency required");
    }
}

std::size_t SpectralEstimate::dimension() const noexcept {
    return matrices_.empty() ? 0 : static_cast<std::size_t>(matrices_.front().rows());
}

std::optional<std::size_t> SpectralEstimate::find(double omega) const noexcept {
    for (std::size_t k = 0; k < frequencies_.size(); ++k) {
        if (std::abs(frequencies_[k] - omega) <= 1e-12) return k;
    }
    return std::nullopt;
}

SpectralEstimate estimate_spectrum(const AutocovSet& gamma, Bandwidth bw, const FlatTopKernel& kernel,
                                   std::span<const double> omegas, const IndexSet* pairs) {
    const long L = static_cast<long>(bw.lags);
    if (gamma.max_lag() < bw.lags) throw Error(ErrorCode::DimensionMismatch, "autocovariances stop short of l_n");
    const auto p = gamma.at(0).rows();

    // Entries to fill: requested pairs, their transposes, and the diagonal.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
    if (pairs == nullptr) {
        for (Eigen::Index j = 0; j < p; ++j)
            for (Eigen::Index i = 0; i < p; ++i) entries.emplace_back(i, j);
    } else {
        pairs->check_dimension(static_cast<std::size_t>(p));
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> wanted =
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p, p, false);
        for (const auto& pr : *pairs) {
            wanted(static_cast<Eigen::Index>(pr.first), static_cast<Eigen::Index>(pr.second)) = true;
            wanted(static_cast<Eigen::Index>(pr.second), static_cast<Eigen::Index>(pr.first)) = true;
        }
        for (Eigen::Index i = 0; i < p; ++i) wanted(i, i) = true;
        for (Eigen::Index j = 0; j < p; ++j)
            for (Eigen::Index i = 0; i < p; ++i)
                if (wanted(i, j)) entries.emplace_back(i, j);
    }

    // Kernel weights folded with 1/(2 pi), one per lag.
    std::vector<double> weight(2 * bw.lags + 1);
    for (long k = -L; k <= L; ++k) {
        weight[static_cast<std::size_t>(k + L)] = kernel(static_cast<double>(k) / static_cast<double>(L)) / kTwoPi;
    }

    const auto K = omegas.size();
    std::vector<ComplexMatrix> matrices(K);
    const double nan = std::numeric_limits<double>::quiet_NaN();

#pragma omp parallel for schedule(dynamic)
    for (std::size_t f = 0; f < K; ++f) {
        const double w = omegas[f];
        std::vector<double> cosk(2 * bw.lags + 1);
        std::vector<double> sink(2 * bw.lags + 1);
        for (long k = -L; k <= L; ++k) {
            cosk[static_cast<std::size_t>(k + L)] = std::cos(static_cast<double>(k) * w);
            sink[static_cast<std::size_t>(k + L)] = std::sin(static_cast<double>(k) * w);
        }
        ComplexMatrix out = ComplexMatrix::Constant(p, p, Complex(nan, nan));
        for (const auto& [i, j] : entries) {
            double re = 0.0;
            double im = 0.0;
            for (long k = -L; k <= L; ++k) {
                const auto idx = static_cast<std::size_t>(k + L);
                const double g = weight[idx] * gamma.at(k)(i, j);
                re += g * cosk[idx];
                im -= g * sink[idx];
            }
            out(i, j) = Complex(re, im);
        }
        matrices[f] = std::move(out);
    }
    return SpectralEstimate(std::vector<double>(omegas.begin(), omegas.end()), std::move(matrices));
}

SpectralEstimate estimate_spectrum(const TimePanel& panel, Bandwidth bw, const FlatTopKernel& kernel,
                                   const FrequencySet& freqs, const std::optional<IndexSet>& pairs) {
    bw.check(panel.n());
    const auto gamma = autocov(panel, bw.lags);
    return estimate_spectrum(gamma, bw, kernel, freqs.grid(), pairs ? &*pairs : nullptr);
}

Complex coherence(const SpectralEstimate& est, std::size_t i, std::size_t j, double omega) {
    const auto k = est.find(omega);
    if (!k) throw Error(ErrorCode::InvalidFrequency, "frequency was not evaluated");
    if (i >= est.dimension() || j >= est.dimension()) throw Error(ErrorCode::InvalidArgument, "series index out of range");
    const double fii = est.value(i, i, *k).real();
    const double fjj = est.value(j, j, *k).real();
    if (!(fii > kCoherenceFloor) || !(fjj > kCoherenceFloor)) {
        throw Error(ErrorCode::NonPositiveAutoSpectrum, "auto-spectrum at or below tolerance");
    }
    const Complex fij = est.value(i, j, *k);
    if (std::isnan(fij.real())) throw Error(ErrorCode::InvalidArgument, "pair was not estimated");
    if (i == j) return Complex(1.0, 0.0);
    return fij / std::sqrt(fii * fjj);
}

FreqProjection freq_projection(Bandwidth bw, const FlatTopKernel& kernel, double omega) {
    const long L = static_cast<long>(bw.lags);
    if (L < 1) throw Error(ErrorCode::InvalidBandwidth, "bandwidth l_n must be at least 1");
    FreqProjection proj{omega, Eigen::Matrix<double, 2, Eigen::Dynamic>(2, 2 * L + 1)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    for (long k = -L; k <= L; ++k) {
        const double w = scale * kernel(static_cast<double>(k) / static_cast<double>(L));
        const auto col = static_cast<Eigen::Index>(k + L);
        proj.rows(0, col) = w * std::cos(static_cast<double>(k) * omega);
        proj.rows(1, col) = -w * std::sin(static_cast<double>(k) * omega);
    }
    return proj;
}

std::vector<FreqProjection> freq_projections(Bandwidth bw, const FlatTopKernel& kernel,
                                             std::span<const double> omegas) {
    std::vector<FreqProjection> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(freq_projection(bw, kernel, w));
    return out;
}

void write_spectrum_csv(std::ostream& out, const SpectralEstimate& est) {
    out << "omega,i,j,re,im\n" << std::setprecision(17);
    const auto p = est.dimension();
    for (std::size_t f = 0; f < est.frequencies().size(); ++f) {
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                const Complex v = est.value(i, j, f);
                if (std::isnan(v.real())) continue;
                out << est.frequencies()[f] << ',' << i + 1 << ',' << j + 1 << ',' << v.real() << ',' << v.imag()
                    << '\n';
            }
        }
    }
}

}  // namespace specfreq
