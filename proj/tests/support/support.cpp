#include "support.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace support {

specfreq::Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    specfreq::CounterRng rng(specfreq::StreamKey{seed, 0x7e57ull});
    specfreq::Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
    }
    return m;
}

specfreq::reference::PairList to_pairs(const specfreq::IndexSet& pairs) {
    specfreq::reference::PairList out;
    for (const auto& pr : pairs) out.emplace_back(pr.first, pr.second);
    return out;
}

double kolmogorov_pvalue(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

namespace {
template <class Cdf>
double ks_pvalue(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return kolmogorov_pvalue(d, sample.size());
}
}  // namespace

double ks_uniform_pvalue(std::vector<double> sample) {
    return ks_pvalue(std::move(sample), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double ks_normal_pvalue(std::vector<double> sample) {
    const boost::math::normal z;
    return ks_pvalue(std::move(sample), [&](double x) { return boost::math::cdf(z, x); });
}

}  // namespace support
