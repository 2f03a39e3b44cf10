#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <complex>

// Literal serial implementations used as test oracles. They share no code
// with the library beyond Eigen containers.
namespace specfreq::reference {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

double flat_top(double u, double c);
double quadratic_spectral(double u);

/// gamma_ij(k) for one lag, divisor n, from raw data.
double autocov_entry(const Matrix& x, std::size_t i, std::size_t j, long k);

/// f(w) for every (i, j) by triple loop over raw data.
ComplexMatrix spectrum(const Matrix& x, std::size_t lags, double c, double omega);

/// (n / l) max over pairs and frequencies of |f_ij(w)|^2.
double statistic(const Matrix& x, const PairList& pairs, std::size_t lags, double c, const std::vector<double>& omegas);

/// Row t holds c_t for t = 0..n-2l-1, blocks of width 2l+1 per pair.
Matrix lag_panel(const Matrix& x, const PairList& pairs, std::size_t lags);

/// sum_{|q| < n} K(q / b) Pi(q) by explicit lag sums.
Matrix longrun(const Matrix& lag_rows, double bandwidth);

/// sup_w max_l |A(w) S_l|^2 with S = n^{-1/2} sum_t eps_t c_t, A built entry by entry.
double xi(const Matrix& lag_rows, std::size_t pair_count, std::size_t lags, double c,
          const std::vector<double>& omegas, const Vector& eps);

/// Pooled AR(1) bandwidth rule, one column at a time.
double andrews(const Matrix& lag_rows);

}  // namespace specfreq::reference
