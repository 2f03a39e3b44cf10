#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace specfreq;

TEST_CASE("flat-top weights") {
    const FlatTopKernel k(0.5);
    CHECK(flat_top_weight(k, 0.3) == 1.0);
    CHECK(flat_top_weight(k, 0.75) == doctest::Approx(0.5));
    CHECK(flat_top_weight(k, 1.2) == 0.0);
    CHECK(flat_top_weight(k, -0.75) == flat_top_weight(k, 0.75));
    CHECK(flat_top_weight(k, 1.0) == 0.0);
    CHECK(flat_top_weight(FlatTopKernel(1.0), 1.0) == 1.0);
    CHECK_THROWS_AS(FlatTopKernel(0.0), Error);
    CHECK_THROWS_AS(FlatTopKernel(1.5), Error);
}

TEST_CASE("default bandwidth rounds half to even") {
    CHECK(default_bandwidth(1225).lags == 1);
    CHECK(default_bandwidth(1).lags == 1);
    CHECK(std::nearbyint(2.5) == 2.0);
    CHECK(default_bandwidth(static_cast<std::size_t>(std::exp(25.0))).lags == 2);
    CHECK(default_bandwidth(static_cast<std::size_t>(std::exp(15.2))).lags == 2);
    CHECK(default_bandwidth(static_cast<std::size_t>(std::exp(14.8))).lags == 1);
    CHECK_THROWS_AS((void)default_bandwidth(0), Error);
}

TEST_CASE("bandwidth precondition") {
    CHECK_NOTHROW(Bandwidth{2}.check(6));
    CHECK_THROWS_AS(Bandwidth{2}.check(5), Error);
    CHECK_THROWS_AS(Bandwidth{0}.check(50), Error);
    CHECK(Bandwidth{3}.effective_length(20) == 14);
}

TEST_CASE("only lag zero survives with l_n = 1 and c = 0.5") {
    const TimePanel panel(support::random_matrix(12, 1, 3));
    const auto est = estimate_spectrum(panel, Bandwidth{1}, FlatTopKernel(0.5), FrequencySet::quarterly());
    const double g0 = autocov(panel, 0).at(0)(0, 0);
    for (std::size_t f = 0; f < est.frequencies().size(); ++f) {
        CHECK(std::abs(est.value(0, 0, f) - Complex(g0 / kTwoPi, 0.0)) < 1e-15);
    }
}

TEST_CASE("spectrum matches the brute-force double loop on a fixed panel") {
    const Matrix x = support::random_matrix(16, 2, 77);
    const auto est = estimate_spectrum(TimePanel(x), Bandwidth{2}, FlatTopKernel(0.5),
                                       FrequencySet::discrete({kPi / 2}));
    const ComplexMatrix ref = reference::spectrum(x, 2, 0.5, kPi / 2);
    CHECK(support::max_abs(est.at(0) - ref) < 1e-12);
}

TEST_CASE("requested pairs are computed and others are NaN except the diagonal") {
    const Matrix x = support::random_matrix(20, 3, 1);
    const IndexSet pairs({{2, 0}});
    const auto est = estimate_spectrum(TimePanel(x), Bandwidth{1}, FlatTopKernel(0.5), FrequencySet::quarterly(), pairs);
    CHECK(std::isfinite(est.value(2, 0, 1).real()));
    CHECK(std::isfinite(est.value(0, 2, 1).real()));
    CHECK(std::isfinite(est.value(1, 1, 1).real()));
    CHECK(std::isnan(est.value(1, 0, 1).real()));
}

TEST_CASE("spectral invariants: Hermitian, conjugate symmetry, scale s^2") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Matrix x = support::random_matrix(40, 3, seed);
        const auto freqs = FrequencySet::discrete({-2.0, -0.7, 0.0, 0.7, 2.0});
        const auto est = estimate_spectrum(TimePanel(x), Bandwidth{3}, FlatTopKernel(0.5), freqs);
        const double s = 1.7;
        const auto scaled = estimate_spectrum(TimePanel(s * x), Bandwidth{3}, FlatTopKernel(0.5), freqs);
        for (std::size_t f = 0; f < 5; ++f) {
            const ComplexMatrix& m = est.at(f);
            CHECK(support::max_abs(m - m.adjoint()) <= 1e-12);
            CHECK(m.diagonal().imag().cwiseAbs().maxCoeff() <= 1e-12);
            const ComplexMatrix& mirror = est.at(4 - f);
            CHECK(support::max_abs(mirror - m.conjugate()) <= 1e-12);
            const double rel = support::max_abs(scaled.at(f) - s * s * m) / support::max_abs(m);
            CHECK(rel <= 1e-12);
        }
    }
}

TEST_CASE("coherence") {
    const Matrix x = support::random_matrix(50, 2, 8);
    const auto est = estimate_spectrum(TimePanel(x), Bandwidth{1}, FlatTopKernel(0.5), FrequencySet::quarterly());
    CHECK(coherence(est, 1, 1, 0.0) == Complex(1.0, 0.0));
    const ComplexMatrix ref = reference::spectrum(x, 1, 0.5, 0.0);
    const Complex expected = ref(0, 1) / std::sqrt(ref(0, 0).real() * ref(1, 1).real());
    CHECK(std::abs(coherence(est, 0, 1, 0.0) - expected) < 1e-12);

    const auto est0 = estimate_spectrum(TimePanel(Matrix::Constant(8, 2, 1.0)), Bandwidth{1}, FlatTopKernel(0.5),
                                        FrequencySet::quarterly());
    CHECK_THROWS_AS((void)coherence(est0, 0, 1, 0.0), Error);
}

TEST_CASE("coherence is zero when the cross-spectrum vanishes") {
    // Orthogonal sign patterns: zero lag-0 cross covariance, and l_n = 1, c = 0.5 keeps only lag 0.
    Matrix x(4, 2);
    x << 1, 1, -1, 1, 1, -1, -1, -1;
    const auto est = estimate_spectrum(TimePanel(x), Bandwidth{1}, FlatTopKernel(0.5), FrequencySet::quarterly());
    CHECK(std::abs(coherence(est, 0, 1, 0.0)) < 1e-15);
}

TEST_CASE("frequency projections") {
    const auto a0 = freq_projection(Bandwidth{1}, FlatTopKernel(1.0), 0.0);
    CHECK(a0.rows.cols() == 3);
    for (int m = 0; m < 3; ++m) {
        CHECK(a0.rows(0, m) == 1.0);
        CHECK(a0.rows(1, m) == 0.0);
    }
    const auto api = freq_projection(Bandwidth{1}, FlatTopKernel(1.0), kPi);
    CHECK(api.rows(0, 0) == doctest::Approx(-1.0));
    CHECK(api.rows(0, 1) == doctest::Approx(1.0));
    CHECK(api.rows(0, 2) == doctest::Approx(-1.0));
    CHECK(std::abs(api.rows(1, 0)) < 1e-15);
    CHECK(std::abs(api.rows(1, 2)) < 1e-15);

    const Bandwidth bw{3};
    const FlatTopKernel k(0.5);
    for (double omega : {-2.5, -0.3, 0.9, 3.0}) {
        const auto a = freq_projection(bw, k, omega);
        for (int kk = 1; kk <= 3; ++kk) {
            CHECK(a.rows(0, 3 + kk) == a.rows(0, 3 - kk));
            CHECK(a.rows(1, 3 + kk) == -a.rows(1, 3 - kk));
            const double w = flat_top_weight(k, kk / 3.0) / std::sqrt(3.0);
            CHECK(a.rows(0, 3 + kk) == doctest::Approx(w * std::cos(kk * omega)));
            CHECK(a.rows(1, 3 + kk) == doctest::Approx(-w * std::sin(kk * omega)));
        }
    }
}

TEST_CASE("spectrum CSV round trip") {
    const Matrix x = support::random_matrix(30, 2, 4);
    const auto est = estimate_spectrum(TimePanel(x), Bandwidth{2}, FlatTopKernel(0.5), FrequencySet::discrete({0.0, 1.5}));
    std::stringstream buf;
    write_spectrum_csv(buf, est);
    std::string line;
    std::getline(buf, line);
    CHECK(line == "omega,i,j,re,im");
    std::size_t rows = 0;
    while (std::getline(buf, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
        const auto f = est.find(v[0]);
        REQUIRE(f.has_value());
        const Complex z = est.value(static_cast<std::size_t>(v[1]) - 1, static_cast<std::size_t>(v[2]) - 1, *f);
        CHECK(std::abs(z.real() - v[3]) <= 1e-12);
        CHECK(std::abs(z.imag() - v[4]) <= 1e-12);
        ++rows;
    }
    CHECK(rows == 2 * 4);
}
