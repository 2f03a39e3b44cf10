#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reference.hpp"
#include "specfreq/specfreq.hpp"

namespace support {

/// n x p matrix of standard normals from a fixed stream.
specfreq::Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed);

specfreq::reference::PairList to_pairs(const specfreq::IndexSet& pairs);

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
    return a.size() == 0 ? 0.0 : static_cast<double>(a.cwiseAbs().maxCoeff());
}

/// Asymptotic Kolmogorov tail P(sqrt(n) D > x) with the small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);
double ks_uniform_pvalue(std::vector<double> sample);
double ks_normal_pvalue(std::vector<double> sample);

}  // namespace support
