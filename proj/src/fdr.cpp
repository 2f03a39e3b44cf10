#include "specfreq/fdr.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>

namespace specfreq {

namespace {

const boost::math::normal kStandardNormal;

double upper_tail(double t) { return boost::math::cdf(boost::math::complement(kStandardNormal, t)); }

std::string pair_label(const HypothesisSpec& h, const std::vector<std::string>& labels, bool first) {
    const std::string& given = first ? h.label_i : h.label_j;
    if (!given.empty()) return given;
    if (h.pairs.size() != 1) return "";
    const std::size_t idx = first ? h.pairs[0].first : h.pairs[0].second;
    return idx < labels.size() ? labels[idx] : std::to_string(idx + 1);
}

}  // namespace

std::vector<HypothesisOutcome> marginal_pvalues(const TimePanel& panel, std::span<const HypothesisSpec> hyps,
                                                const TestConfig& cfg) {
    if (hyps.empty()) throw Error(ErrorCode::EmptyInput, "no hypotheses");
    std::size_t max_lag = 1;
    for (const auto& h : hyps) {
        try {
            h.pairs.check_dimension(panel.p());
            const Bandwidth bw = resolve_lag_bandwidth(cfg, h.pairs.size());
            bw.check(panel.n());
            max_lag = std::max(max_lag, bw.lags);
        } catch (const Error& e) {
            throw Error(e.code(), "hypothesis " + std::to_string(h.id) + ": " + e.what());
        }
    }
    const Matrix centered = panel.centered();
    const AutocovSet gamma = autocov_centered(centered, max_lag);

    std::vector<HypothesisOutcome> out(hyps.size());
    std::vector<std::exception_ptr> failures(hyps.size());
    const auto count = static_cast<long>(hyps.size());
#pragma omp parallel for schedule(dynamic)
    for (long q = 0; q < count; ++q) {
        const auto& h = hyps[static_cast<std::size_t>(q)];
        try {
            const HypothesisRun run = run_hypothesis(centered, gamma, h.pairs, h.freqs, cfg, h.id);
            auto& o = out[static_cast<std::size_t>(q)];
            o.id = h.id;
            o.statistic = run.statistic.value;
            o.p_value = run.p_value;
            o.v = normal_quantile_transform(run.p_value, run.draws.xi.size());
            o.lag_bandwidth = run.lag_bandwidth.lags;
            o.longrun_bandwidth = run.longrun_bandwidth;
        } catch (...) {
            failures[static_cast<std::size_t>(q)] = std::current_exception();
        }
    }
    for (std::size_t q = 0; q < failures.size(); ++q) {
        if (!failures[q]) continue;
        try {
            std::rethrow_exception(failures[q]);
        } catch (const Error& e) {
            throw Error(e.code(), "hypothesis " + std::to_string(hyps[q].id) + ": " + e.what());
        }
    }
    return out;
}

double normal_quantile_transform(double p_value, std::size_t replicates) {
    const double b = static_cast<double>(replicates);
    const double pv = std::clamp(p_value, 1.0 / (b + 1.0), b / (b + 1.0));
    return boost::math::quantile(boost::math::complement(kStandardNormal, pv));
}

double fdp_hat(double t, std::size_t q_count, std::span<const double> v_values) {
    const auto r = std::count_if(v_values.begin(), v_values.end(), [&](double v) { return v >= t; });
    return static_cast<double>(q_count) * upper_tail(t) / std::max(1.0, static_cast<double>(r));
}

Threshold select_threshold(std::span<const double> v_values, std::size_t q_count, double alpha) {
    if (q_count < 2) throw Error(ErrorCode::InvalidArgument, "threshold search needs Q >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    const double log_q = std::log(static_cast<double>(q_count));
    const double t_max = std::sqrt(2.0 * log_q - 2.0 * std::log(log_q));

    std::vector<double> candidates;
    for (double v : v_values) {
        if (v > 0.0 && v <= t_max) candidates.push_back(v);
    }
    candidates.push_back(t_max);
    std::sort(candidates.begin(), candidates.end());
    for (double t : candidates) {
        if (fdp_hat(t, q_count, v_values) <= alpha) return Threshold{t, false};
    }
    return Threshold{std::sqrt(2.0 * log_q), true};
}

std::vector<std::uint64_t> FdrReport::rejected_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& o : outcomes) {
        if (o.rejected) ids.push_back(o.id);
    }
    return ids;
}

FdrReport apply_threshold(std::vector<HypothesisOutcome> outcomes, double alpha, std::size_t replicates) {
    if (outcomes.empty()) throw Error(ErrorCode::EmptyInput, "no hypotheses");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    FdrReport report;
    report.alpha = alpha;
    report.replicates = replicates;
    if (outcomes.size() == 1) {
        report.t_hat = boost::math::quantile(boost::math::complement(kStandardNormal, alpha));
    } else {
        std::vector<double> v(outcomes.size());
        for (std::size_t q = 0; q < outcomes.size(); ++q) v[q] = outcomes[q].v;
        const Threshold th = select_threshold(v, outcomes.size(), alpha);
        report.t_hat = th.t_hat;
        report.fallback_used = th.fallback_used;
    }
    for (auto& o : outcomes) o.rejected = o.v >= report.t_hat;
    report.outcomes = std::move(outcomes);
    return report;
}

FdrReport fdr_procedure(const TimePanel& panel, std::span<const HypothesisSpec> hyps, double alpha,
                        const TestConfig& cfg) {
    return apply_threshold(marginal_pvalues(panel, hyps, cfg), alpha, cfg.multipliers.replicates);
}

LabelGroups group_by_prefix(const std::vector<std::string>& labels, char separator) {
    LabelGroups groups;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto cut = labels[i].find(separator);
        const std::string name = cut == std::string::npos ? labels[i] : labels[i].substr(0, cut);
        auto [it, inserted] = index.try_emplace(name, groups.names.size());
        if (inserted) {
            groups.names.push_back(name);
            groups.members.emplace_back();
        }
        groups.members[it->second].push_back(i);
    }
    return groups;
}

std::vector<HypothesisSpec> block_hypotheses(const LabelGroups& groups, const FrequencySet& freqs) {
    if (groups.names.size() < 2) throw Error(ErrorCode::InvalidArgument, "block mode needs at least two label groups");
    std::vector<HypothesisSpec> hyps;
    std::uint64_t id = 0;
    for (std::size_t g = 0; g < groups.names.size(); ++g) {
        for (std::size_t h = g + 1; h < groups.names.size(); ++h) {
            hyps.push_back(HypothesisSpec{id++, IndexSet::cross(groups.members[g], groups.members[h]), freqs,
                                          groups.names[g], groups.names[h]});
        }
    }
    return hyps;
}

void write_fdr_csv(std::ostream& out, const FdrReport& report, std::span<const HypothesisSpec> hyps,
                   const std::vector<std::string>& series_labels) {
    if (hyps.size() != report.outcomes.size()) throw Error(ErrorCode::DimensionMismatch, "report and hypotheses differ");
    out << "q,label_i,label_j,T,pv,V,rejected,star\n" << std::setprecision(17);
    for (std::size_t q = 0; q < hyps.size(); ++q) {
        const auto& o = report.outcomes[q];
        out << o.id << ',' << pair_label(hyps[q], series_labels, true) << ','
            << pair_label(hyps[q], series_labels, false) << ',' << o.statistic << ',' << o.p_value << ',' << o.v
            << ',' << (o.rejected ? 1 : 0) << ',' << (o.rejected ? 0 : 1) << '\n';
    }
}

void write_pvalue_matrix_csv(std::ostream& out, const FdrReport& report, std::span<const HypothesisSpec> hyps,
                             const LabelGroups& groups) {
    if (hyps.size() != report.outcomes.size()) throw Error(ErrorCode::DimensionMismatch, "report and hypotheses differ");
    std::map<std::string, std::size_t> index;
    for (std::size_t g = 0; g < groups.names.size(); ++g) index[groups.names[g]] = g;
    const std::size_t size = groups.names.size();
    std::vector<double> matrix(size * size, std::nan(""));
    for (std::size_t q = 0; q < hyps.size(); ++q) {
        const auto a = index.find(hyps[q].label_i);
        const auto b = index.find(hyps[q].label_j);
        if (a == index.end() || b == index.end()) continue;
        matrix[a->second * size + b->second] = report.outcomes[q].p_value;
        matrix[b->second * size + a->second] = report.outcomes[q].p_value;
    }
    out << "group";
    for (const auto& name : groups.names) out << ',' << name;
    out << '\n' << std::setprecision(17);
    for (std::size_t g = 0; g < size; ++g) {
        out << groups.names[g];
        for (std::size_t h = 0; h < size; ++h) {
            out << ',';
            const double v = matrix[g * size + h];
            if (!std::isnan(v)) out << v;
        }
        out << '\n';
    }
}

}  // namespace specfreq
