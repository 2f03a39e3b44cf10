#include "specfreq/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace specfreq {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    std::string_view body = cell;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (body.empty() || ec != std::errc{} || ptr != body.data() + body.size()) {
        throw Error(ErrorCode::NonNumericCell, "row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                                                   ": '" + std::string(cell) + "'");
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "row " + std::to_string(row) + ", column " + std::to_string(col + 1));
    }
    return value;
}

}  // namespace

TimePanel::TimePanel(Matrix values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.size() == 0) throw Error(ErrorCode::EmptyInput, "panel has no observations");
    if (values_.rows() < 3) {
        throw Error(ErrorCode::InsufficientLength, "panel needs at least 3 time points, got " +
                                                       std::to_string(values_.rows()));
    }
    if (labels_.size() != static_cast<std::size_t>(values_.cols())) {
        throw Error(ErrorCode::DimensionMismatch, "label count does not match series count");
    }
    if (!values_.allFinite()) throw Error(ErrorCode::NonFiniteValue, "panel contains NaN or Inf");
}

TimePanel::TimePanel(Matrix values) : TimePanel(values, default_labels(static_cast<std::size_t>(values.cols()))) {}

std::vector<std::string> TimePanel::default_labels(std::size_t p) {
    std::vector<std::string> labels;
    labels.reserve(p);
    for (std::size_t j = 0; j < p; ++j) labels.push_back("s" + std::to_string(j + 1));
    return labels;
}

Matrix TimePanel::centered() const {
    const Eigen::RowVectorXd mean = values_.colwise().mean();
    return values_.rowwise() - mean;
}

IndexSet::IndexSet(std::vector<SeriesPair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw Error(ErrorCode::InvalidArgument, "index set must contain at least one pair");
    std::set<SeriesPair> seen;
    for (const auto& pair : pairs_) {
        if (!seen.insert(pair).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate pair (" + std::to_string(pair.first + 1) + "," +
                                                        std::to_string(pair.second + 1) + ")");
        }
    }
}

IndexSet IndexSet::lower_off_diagonal(std::size_t p) {
    std::vector<SeriesPair> pairs;
    pairs.reserve(p * (p - 1) / 2);
    for (std::size_t i = 1; i < p; ++i) {
        for (std::size_t j = 0; j < i; ++j) pairs.push_back({i, j});
    }
    return IndexSet(std::move(pairs));
}

IndexSet IndexSet::diagonal(std::size_t p) {
    std::vector<SeriesPair> pairs;
    pairs.reserve(p);
    for (std::size_t i = 0; i < p; ++i) pairs.push_back({i, i});
    return IndexSet(std::move(pairs));
}

IndexSet IndexSet::cross(std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    std::vector<SeriesPair> pairs;
    pairs.reserve(rows.size() * cols.size());
    for (auto i : rows) {
        for (auto j : cols) pairs.push_back({i, j});
    }
    return IndexSet(std::move(pairs));
}

IndexSet IndexSet::within(std::span<const std::size_t> members) {
    std::vector<SeriesPair> pairs;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a; b < members.size(); ++b) pairs.push_back({members[a], members[b]});
    }
    return IndexSet(std::move(pairs));
}

void IndexSet::check_dimension(std::size_t p) const {
    for (const auto& pair : pairs_) {
        if (pair.first >= p || pair.second >= p) {
            throw Error(ErrorCode::InvalidArgument, "pair (" + std::to_string(pair.first + 1) + "," +
                                                        std::to_string(pair.second + 1) + ") exceeds p=" +
                                                        std::to_string(p));
        }
    }
}

FrequencySet::FrequencySet(Kind kind, std::vector<double> grid, double lower, double upper)
    : kind_(kind), grid_(std::move(grid)), lower_(lower), upper_(upper) {}

FrequencySet FrequencySet::discrete(std::vector<double> omegas) {
    if (omegas.empty()) throw Error(ErrorCode::InvalidFrequency, "frequency set is empty");
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = omegas[k];
        if (!std::isfinite(w) || w < -kPi || w >= kPi) {
            throw Error(ErrorCode::InvalidFrequency, "frequency outside [-pi, pi)");
        }
        if (k > 0 && !(w > omegas[k - 1])) {
            throw Error(ErrorCode::InvalidFrequency, "frequencies must be strictly increasing");
        }
    }
    const double lo = omegas.front();
    const double hi = omegas.back();
    return FrequencySet(Kind::Discrete, std::move(omegas), lo, hi);
}

FrequencySet FrequencySet::interval(double lo, double hi, std::size_t grid_points) {
    if (!(lo >= -kPi) || !(hi <= kPi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidFrequency, "interval must satisfy -pi <= lo < hi <= pi");
    }
    if (grid_points < 2) throw Error(ErrorCode::InvalidFrequency, "interval grid needs at least 2 points");
    std::vector<double> grid(grid_points);
    if (hi >= kPi) {
        const double step = (kPi - lo) / static_cast<double>(grid_points);
        for (std::size_t g = 0; g < grid_points; ++g) grid[g] = lo + step * static_cast<double>(g);
    } else {
        const double step = (hi - lo) / static_cast<double>(grid_points - 1);
        for (std::size_t g = 0; g < grid_points; ++g) grid[g] = lo + step * static_cast<double>(g);
        grid.back() = hi;
    }
    return FrequencySet(Kind::Interval, std::move(grid), lo, hi);
}

FrequencySet FrequencySet::interval_for_length(double lo, double hi, std::size_t n) {
    return interval(lo, hi, std::max<std::size_t>(2, std::min<std::size_t>(n, 512)));
}

FrequencySet FrequencySet::quarterly() { return discrete({-kPi, -kPi / 2.0, 0.0, kPi / 2.0}); }

FrequencySet FrequencySet::monthly() {
    std::vector<double> omegas(12);
    for (int k = 0; k < 12; ++k) omegas[k] = -kPi + k * kPi / 6.0;
    return discrete(std::move(omegas));
}

std::size_t FrequencySet::effective_count(std::size_t n) const noexcept {
    return kind_ == Kind::Discrete ? grid_.size() : n;
}

AutocovSet::AutocovSet(std::size_t max_lag, std::vector<Matrix> matrices)
    : max_lag_(max_lag), matrices_(std::move(matrices)) {
    if (matrices_.size() != 2 * max_lag_ + 1) {
        throw Error(ErrorCode::DimensionMismatch, "autocovariance set needs 2L+1 matrices");
    }
}

const Matrix& AutocovSet::at(long lag) const {
    const long L = static_cast<long>(max_lag_);
    if (lag < -L || lag > L) throw Error(ErrorCode::InvalidArgument, "lag outside stored range");
    return matrices_[static_cast<std::size_t>(lag + L)];
}

TimePanel parse_csv(std::istream& in, bool has_header) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (trim(line).empty()) continue;
        lines.push_back(std::move(line));
    }
    if (lines.empty()) throw Error(ErrorCode::EmptyInput, "CSV input is empty");

    std::vector<std::string> labels;
    std::size_t first_data = 0;
    if (has_header) {
        for (auto cell : split_commas(lines.front())) labels.emplace_back(cell);
        first_data = 1;
    }
    const std::size_t n = lines.size() - first_data;
    if (n == 0) throw Error(ErrorCode::EmptyInput, "CSV has a header but no data rows");

    const std::size_t p = has_header ? labels.size() : split_commas(lines[first_data]).size();
    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < n; ++t) {
        const auto cells = split_commas(lines[first_data + t]);
        const std::size_t row = first_data + t + 1;
        if (cells.size() != p) {
            throw Error(ErrorCode::RaggedRows, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                                   " cells, expected " + std::to_string(p));
        }
        for (std::size_t j = 0; j < p; ++j) values(t, j) = parse_cell(cells[j], row, j);
    }
    if (n < 3) throw Error(ErrorCode::InsufficientLength, "need at least 3 rows, got " + std::to_string(n));
    if (!has_header) labels = TimePanel::default_labels(p);
    return TimePanel(std::move(values), std::move(labels));
}

TimePanel load_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_csv(in, has_header);
}

void write_csv(std::ostream& out, const TimePanel& panel) {
    const auto& labels = panel.labels();
    for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
    out << '\n' << std::setprecision(17);
    for (Eigen::Index t = 0; t < panel.values().rows(); ++t) {
        for (Eigen::Index j = 0; j < panel.values().cols(); ++j) out << (j ? "," : "") << panel.values()(t, j);
        out << '\n';
    }
}

Matrix difference_values(const Matrix& values, DifferenceKind kind, std::size_t period) {
    std::size_t lag = 1;
    if (kind == DifferenceKind::Seasonal) {
        if (period < 2) throw Error(ErrorCode::InvalidArgument, "seasonal period must be at least 2");
        lag = period;
    }
    const auto n = static_cast<std::size_t>(values.rows());
    if (n <= lag) {
        throw Error(ErrorCode::InsufficientLength, "series length " + std::to_string(n) +
                                                       " does not exceed differencing lag " + std::to_string(lag));
    }
    const auto rows = static_cast<Eigen::Index>(n - lag);
    return values.bottomRows(rows) - values.topRows(rows);
}

TimePanel difference(const TimePanel& panel, DifferenceKind kind, std::size_t period) {
    Matrix diff = difference_values(panel.values(), kind, period);
    if (diff.rows() < 3) {
        throw Error(ErrorCode::InsufficientLength, "differenced panel has fewer than 3 rows");
    }
    return TimePanel(std::move(diff), panel.labels());
}

AutocovSet autocov_centered(const Matrix& centered, std::size_t max_lag) {
    const auto n = static_cast<std::size_t>(centered.rows());
    if (max_lag >= n) {
        throw Error(ErrorCode::InvalidArgument, "max lag " + std::to_string(max_lag) + " must be below n=" +
                                                    std::to_string(n));
    }
    const long L = static_cast<long>(max_lag);
    std::vector<Matrix> matrices(2 * max_lag + 1);
    const double inv_n = 1.0 / static_cast<double>(n);

#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k <= L; ++k) {
        const auto overlap = static_cast<Eigen::Index>(n - static_cast<std::size_t>(k));
        Matrix gamma = inv_n * (centered.bottomRows(overlap).transpose() * centered.topRows(overlap));
        if (k == 0) gamma = 0.5 * (gamma + gamma.transpose()).eval();
        matrices[static_cast<std::size_t>(L + k)] = std::move(gamma);
    }
    for (long k = 1; k <= L; ++k) {
        matrices[static_cast<std::size_t>(L - k)] = matrices[static_cast<std::size_t>(L + k)].transpose();
    }
    return AutocovSet(max_lag, std::move(matrices));
}

AutocovSet autocov(const TimePanel& panel, std::size_t max_lag) {
    return autocov_centered(panel.centered(), max_lag);
}

}  // namespace specfreq
