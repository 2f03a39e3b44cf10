#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "specfreq/global_test.hpp"

namespace specfreq {

/// One hypothesis H_{0,q}: f_{ij}(w) = 0 for all (i, j) in `pairs`, w in `freqs`.
struct HypothesisSpec {
    std::uint64_t id = 0;
    IndexSet pairs;
    FrequencySet freqs;
    /// Optional display labels, e.g. block names in batch mode.
    std::string label_i;
    std::string label_j;
};

struct HypothesisOutcome {
    std::uint64_t id = 0;
    double statistic = 0.0;
    double p_value = 1.0;
    /// Phi^{-1}(1 - pv) with pv clamped to [1/(B+1), B/(B+1)].
    double v = 0.0;
    bool rejected = false;
    std::size_t lag_bandwidth = 1;
    double longrun_bandwidth = 0.0;
};

/// Per-hypothesis (T, pv). Each hypothesis draws from StreamKey{seed, id}, so
/// its result does not depend on the other hypotheses. Rows follow `hyps`.
[[nodiscard]] std::vector<HypothesisOutcome> marginal_pvalues(const TimePanel& panel,
                                                              std::span<const HypothesisSpec> hyps,
                                                              const TestConfig& cfg);

[[nodiscard]] double normal_quantile_transform(double p_value, std::size_t replicates);

/// Q (1 - Phi(t)) / max(1, #{q : V_q >= t}).
[[nodiscard]] double fdp_hat(double t, std::size_t q_count, std::span<const double> v_values);

struct Threshold {
    double t_hat = 0.0;
    bool fallback_used = false;
};

/// Smallest t in the candidate set {V_q in (0, t_max]} U {t_max} with
/// FDP(t) <= alpha, t_max = sqrt(2 log Q - 2 log log Q); otherwise
/// sqrt(2 log Q) with the fallback flag. Requires Q >= 2.
[[nodiscard]] Threshold select_threshold(std::span<const double> v_values, std::size_t q_count, double alpha);

struct FdrReport {
    double alpha = 0.05;
    double t_hat = 0.0;
    bool fallback_used = false;
    std::size_t replicates = 0;
    std::vector<HypothesisOutcome> outcomes;

    [[nodiscard]] std::vector<std::uint64_t> rejected_ids() const;
};

/// Thresholding step on precomputed outcomes. With Q = 1 the threshold is
/// Phi^{-1}(1 - alpha), which rejects exactly when pv <= alpha.
[[nodiscard]] FdrReport apply_threshold(std::vector<HypothesisOutcome> outcomes, double alpha,
                                        std::size_t replicates);

[[nodiscard]] FdrReport fdr_procedure(const TimePanel& panel, std::span<const HypothesisSpec> hyps, double alpha,
                                      const TestConfig& cfg);

/// Groups series by the label prefix before `separator` (whole label when
/// absent), in order of first appearance.
struct LabelGroups {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> members;
};
[[nodiscard]] LabelGroups group_by_prefix(const std::vector<std::string>& labels, char separator = '_');

/// One hypothesis per group pair g < h over all cross pairs; ids count from 0.
[[nodiscard]] std::vector<HypothesisSpec> block_hypotheses(const LabelGroups& groups, const FrequencySet& freqs);

/// CSV columns: q,label_i,label_j,T,pv,V,rejected,star (star = not rejected).
void write_fdr_csv(std::ostream& out, const FdrReport& report, std::span<const HypothesisSpec> hyps,
                   const std::vector<std::string>& series_labels);

/// Square p-value matrix over groups; the diagonal is left empty.
void write_pvalue_matrix_csv(std::ostream& out, const FdrReport& report, std::span<const HypothesisSpec> hyps,
                             const LabelGroups& groups);

}  // namespace specfreq
