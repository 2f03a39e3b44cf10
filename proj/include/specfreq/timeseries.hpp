#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specfreq/core.hpp"

namespace specfreq {

/// An n x p panel of observations: rows are time points, columns are series.
class TimePanel {
public:
    /// Validates shape (n >= 3, p >= 1), label count, and finiteness.
    TimePanel(Matrix values, std::vector<std::string> labels);
    explicit TimePanel(Matrix values);

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Values minus the per-series sample mean.
    [[nodiscard]] Matrix centered() const;

    [[nodiscard]] static std::vector<std::string> default_labels(std::size_t p);

private:
    Matrix values_;
    std::vector<std::string> labels_;
};

/// An ordered (row, column) series pair, zero-based.
struct SeriesPair {
    std::size_t first = 0;
    std::size_t second = 0;

    friend bool operator==(const SeriesPair&, const SeriesPair&) = default;
    friend auto operator<=>(const SeriesPair&, const SeriesPair&) = default;
};

/// Ordered list of distinct pairs; position in the list is the block index of
/// the pair inside lag panels and bootstrap vectors.
class IndexSet {
public:
    explicit IndexSet(std::vector<SeriesPair> pairs);

    /// {(i, j) : i > j}, ordered by i then j.
    [[nodiscard]] static IndexSet lower_off_diagonal(std::size_t p);
    [[nodiscard]] static IndexSet diagonal(std::size_t p);
    /// Cross pairs between two disjoint series batches.
    [[nodiscard]] static IndexSet cross(std::span<const std::size_t> rows, std::span<const std::size_t> cols);
    /// Pairs (i, j) with i <= j inside one batch (auto-spectra included).
    [[nodiscard]] static IndexSet within(std::span<const std::size_t> members);

    [[nodiscard]] std::size_t size() const noexcept { return pairs_.size(); }
    [[nodiscard]] const SeriesPair& operator[](std::size_t pos) const { return pairs_[pos]; }
    [[nodiscard]] const std::vector<SeriesPair>& pairs() const noexcept { return pairs_; }
    [[nodiscard]] auto begin() const noexcept { return pairs_.begin(); }
    [[nodiscard]] auto end() const noexcept { return pairs_.end(); }

    /// Throws InvalidArgument when any index is >= p.
    void check_dimension(std::size_t p) const;

private:
    std::vector<SeriesPair> pairs_;
};

/// Frequencies of interest, in radians within [-pi, pi).
class FrequencySet {
public:
    enum class Kind { Discrete, Interval };

    /// Strictly increasing frequencies in [-pi, pi).
    [[nodiscard]] static FrequencySet discrete(std::vector<double> omegas);
    /// Uniform grid of `grid_points` on [lo, hi]; when hi == pi the grid is
    /// half-open and excludes pi.
    [[nodiscard]] static FrequencySet interval(double lo, double hi, std::size_t grid_points);
    /// Interval with the default grid size min(n, 512).
    [[nodiscard]] static FrequencySet interval_for_length(double lo, double hi, std::size_t n);

    /// {-pi, -pi/2, 0, pi/2}
    [[nodiscard]] static FrequencySet quarterly();
    /// {-pi + k pi/6 : k = 0..11}
    [[nodiscard]] static FrequencySet monthly();

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }
    [[nodiscard]] double lower() const noexcept { return lower_; }
    [[nodiscard]] double upper() const noexcept { return upper_; }

    /// K for a discrete set, n for an interval.
    [[nodiscard]] std::size_t effective_count(std::size_t n) const noexcept;

private:
    FrequencySet(Kind kind, std::vector<double> grid, double lower, double upper);

    Kind kind_;
    std::vector<double> grid_;
    double lower_;
    double upper_;
};

/// Sample autocovariance matrices for lags -L..L.
class AutocovSet {
public:
    AutocovSet(std::size_t max_lag, std::vector<Matrix> matrices);

    [[nodiscard]] std::size_t max_lag() const noexcept { return max_lag_; }
    /// Gamma(k) for -L <= k <= L.
    [[nodiscard]] const Matrix& at(long lag) const;
    [[nodiscard]] double entry(std::size_t i, std::size_t j, long lag) const { return at(lag)(i, j); }

private:
    std::size_t max_lag_;
    std::vector<Matrix> matrices_;
};

enum class DifferenceKind { Regular, Seasonal };

[[nodiscard]] TimePanel load_csv(const std::filesystem::path& path, bool has_header);
[[nodiscard]] TimePanel parse_csv(std::istream& in, bool has_header);
void write_csv(std::ostream& out, const TimePanel& panel);

/// y_t = x_{t+lag} - x_t with lag 1 (regular) or `period` (seasonal).
/// Requires n > lag; the result may be shorter than a valid panel.
[[nodiscard]] Matrix difference_values(const Matrix& values, DifferenceKind kind, std::size_t period = 1);
/// Panel form of difference_values; the differenced panel must keep at least 3 rows.
[[nodiscard]] TimePanel difference(const TimePanel& panel, DifferenceKind kind, std::size_t period = 1);

/// Gamma(k) = n^{-1} sum_t (x_{t+k} - xbar)(x_t - xbar)^T for |k| <= L; divisor n at every lag.
[[nodiscard]] AutocovSet autocov(const TimePanel& panel, std::size_t max_lag);
[[nodiscard]] AutocovSet autocov_centered(const Matrix& centered, std::size_t max_lag);

}  // namespace specfreq
