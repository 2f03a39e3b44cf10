#include "specfreq/longrun.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

namespace specfreq {

LagPanel::LagPanel(Matrix rows, std::size_t block_width) : rows_(std::move(rows)), block_width_(block_width) {
    if (block_width_ == 0 || rows_.cols() == 0 || static_cast<std::size_t>(rows_.cols()) % block_width_ != 0) {
        throw Error(ErrorCode::DimensionMismatch, "lag panel width must be a positive multiple of the block width");
    }
    if (rows_.rows() < 1) throw Error(ErrorCode::InsufficientLength, "lag panel has no rows");
}

LagPanel build_lag_panel(const Matrix& centered, const AutocovSet& gamma, const IndexSet& pairs, Bandwidth bw) {
    const auto n = static_cast<std::size_t>(centered.rows());
    bw.check(n);
    pairs.check_dimension(static_cast<std::size_t>(centered.cols()));
    if (gamma.max_lag() < bw.lags) throw Error(ErrorCode::DimensionMismatch, "autocovariances stop short of l_n");

    const long L = static_cast<long>(bw.lags);
    const auto width = static_cast<Eigen::Index>(2 * bw.lags + 1);
    const auto length = static_cast<Eigen::Index>(bw.effective_length(n));
    const auto r = static_cast<long>(pairs.size());
    Matrix rows(length, width * r);
    const double inv_2pi = 1.0 / kTwoPi;

#pragma omp parallel for schedule(static)
    for (long ell = 0; ell < r; ++ell) {
        const auto& pr = pairs[static_cast<std::size_t>(ell)];
        const auto i = static_cast<Eigen::Index>(pr.first);
        const auto j = static_cast<Eigen::Index>(pr.second);
        for (Eigen::Index m = 0; m < width; ++m) {
            const double g = gamma.at(static_cast<long>(m) - L)(i, j);
            auto col = rows.col(ell * width + m);
            for (Eigen::Index t = 0; t < length; ++t) {
                col(t) = inv_2pi * (centered(t + m, i) * centered(t + L, j) - g);
            }
        }
    }
    return LagPanel(std::move(rows), static_cast<std::size_t>(width));
}

LagPanel build_lag_panel(const TimePanel& panel, const IndexSet& pairs, Bandwidth bw) {
    bw.check(panel.n());
    const Matrix centered = panel.centered();
    return build_lag_panel(centered, autocov_centered(centered, bw.lags), pairs, bw);
}

double qs_weight(double u) noexcept {
    const double x = 1.2 * kPi * u;
    const double x2 = x * x;
    if (std::abs(u) < 1e-4) return 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
    if (std::abs(x) < 1.0) {
        // 3 sum_{k>=1} (-1)^{k+1} 2k x^{2k-2} / (2k+1)!
        double sum = 0.0;
        double power = 1.0;
        double factorial = 6.0;
        for (int k = 1; k <= 12; ++k) {
            const double term = 2.0 * k * power / factorial;
            sum += (k % 2 == 1) ? term : -term;
            power *= x2;
            factorial *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
        return 3.0 * sum;
    }
    return 3.0 / x2 * (std::sin(x) / x - std::cos(x));
}

Vector qs_toeplitz_row(std::size_t size, double bandwidth, double truncation) {
    Vector row(static_cast<Eigen::Index>(size));
    for (std::size_t q = 0; q < size; ++q) {
        const double k = qs_weight(static_cast<double>(q) / bandwidth);
        row(static_cast<Eigen::Index>(q)) = std::abs(k) < truncation ? 0.0 : k;
    }
    return row;
}

double andrews_bandwidth(const LagPanel& lag_panel, const AndrewsOptions& options) {
    const auto length = static_cast<Eigen::Index>(lag_panel.length());
    if (length < 3) throw Error(ErrorCode::InsufficientLength, "Andrews bandwidth needs at least 3 rows");
    const auto d = static_cast<Eigen::Index>(lag_panel.dimension());
    const Matrix& c = lag_panel.rows();

    std::vector<double> numer(static_cast<std::size_t>(d), 0.0);
    std::vector<double> denom(static_cast<std::size_t>(d), 0.0);

#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto y = c.col(j);
        const auto lagged = y.head(length - 1);
        const auto current = y.tail(length - 1);
        const double sxx = lagged.squaredNorm();
        if (!(sxx > 0.0)) continue;
        const double rho_ols = lagged.dot(current) / sxx;
        const double rss = (current - rho_ols * lagged).squaredNorm();
        const double sigma2 = rss / static_cast<double>(length - 1);
        const double rho = std::clamp(rho_ols, -options.rho_clip, options.rho_clip);
        const double sigma4 = sigma2 * sigma2;
        const double one_minus = 1.0 - rho;
        const double om4 = std::pow(one_minus, 4);
        numer[static_cast<std::size_t>(j)] = 4.0 * rho * rho * sigma4 / (om4 * om4);
        denom[static_cast<std::size_t>(j)] = sigma4 / om4;
    }

    double num_sum = 0.0;
    double den_sum = 0.0;
    for (std::size_t j = 0; j < numer.size(); ++j) {
        num_sum += numer[j];
        den_sum += denom[j];
    }
    const double a_hat = den_sum > 0.0 ? num_sum / den_sum : 0.0;
    const double b = 1.3221 * std::pow(a_hat * static_cast<double>(length), 0.2);
    return std::max(b, options.min_bandwidth);
}

LongRunCov estimate_longrun(const LagPanel& lag_panel, double bandwidth, double truncation) {
    if (!(bandwidth > 0.0)) throw Error(ErrorCode::InvalidBandwidth, "long-run bandwidth must be positive");
    const auto length = static_cast<Eigen::Index>(lag_panel.length());
    const Matrix& c = lag_panel.rows();

    const Vector first_row = qs_toeplitz_row(lag_panel.length(), bandwidth, truncation);
    Matrix theta(length, length);
    for (Eigen::Index t = 0; t < length; ++t) {
        for (Eigen::Index s = 0; s < length; ++s) theta(t, s) = first_row(std::abs(t - s));
    }
    const Matrix theta_c = theta * c;
    Matrix xi = (c.transpose() * theta_c) / static_cast<double>(length);
    xi = 0.5 * (xi + xi.transpose()).eval();
    return LongRunCov{std::move(xi), bandwidth};
}

void write_longrun_csv(std::ostream& out, const LongRunCov& cov) {
    out << "row,col,value\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < cov.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.matrix.cols(); ++j) out << i + 1 << ',' << j + 1 << ',' << cov.matrix(i, j) << '\n';
    }
}

}  // namespace specfreq
