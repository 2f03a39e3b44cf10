#include "cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace specfreq::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto cut = s.find(sep, start);
        parts.push_back(trim(s.substr(start, cut == std::string_view::npos ? std::string_view::npos : cut - start)));
        if (cut == std::string_view::npos) break;
        start = cut + 1;
    }
    return parts;
}

double parse_number(std::string_view s, ErrorCode code, std::string_view what) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(code, "invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

std::size_t parse_index(std::string_view s, const std::vector<std::string>& labels) {
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == s) return k;
    }
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1 || value > labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "unknown series '" + std::string(s) + "'");
    }
    return value - 1;
}

struct Common {
    std::string input;
    bool no_header = false;
    std::string difference = "none";
    std::size_t period = 12;
    std::string output;
    int threads = 0;
};

struct Options {
    Common common;
    std::string freqs = "quarterly";
    std::string pairs;
    double alpha = 0.05;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    std::optional<std::size_t> lags;
    double c = 0.5;
    std::optional<double> bn;
    std::string sampler = "auto";
    std::string mode = "block";
    char separator = '_';
    std::string matrix;

    std::string model = "M1";
    std::string experiment = "size";
    std::size_t n = 300;
    std::size_t p = 10;
    double param = 0.2;
    std::size_t burn_in = 200;
    std::size_t reps = 100;
    std::size_t blocks = 10;
};

void add_common(CLI::App* cmd, Common& c, bool needs_input) {
    auto* in = cmd->add_option("-i,--input", c.input, "CSV panel, one column per series");
    if (needs_input) in->required();
    cmd->add_flag("--no-header", c.no_header, "Input has no header row");
    cmd->add_option("--difference", c.difference, "none, regular or seasonal")
        ->check(CLI::IsMember({"none", "regular", "seasonal"}));
    cmd->add_option("--period", c.period, "Seasonal differencing period")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--output", c.output, "Output path (default stdout)");
    cmd->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::NonNegativeNumber);
}

void add_test_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--alpha", o.alpha, "Nominal level");
    cmd->add_option("-B,--B", o.replicates, "Bootstrap replicates")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--bn", o.bn, "Long-run bandwidth override");
    cmd->add_option("--sampler", o.sampler, "auto, time or longrun")->check(CLI::IsMember({"auto", "time", "longrun"}));
}

TimePanel load_input(const Common& c) {
    TimePanel panel = load_csv(c.input, !c.no_header);
    if (c.difference == "regular") return difference(panel, DifferenceKind::Regular);
    if (c.difference == "seasonal") return difference(panel, DifferenceKind::Seasonal, c.period);
    return panel;
}

TestConfig test_config(const Options& o) {
    TestConfig cfg;
    cfg.lag_bandwidth = o.lags;
    cfg.flat_top_c = o.c;
    cfg.longrun_bandwidth = o.bn;
    cfg.multipliers.replicates = o.replicates;
    cfg.multipliers.seed = o.seed;
    if (o.sampler == "time") cfg.multipliers.route = MultiplierRoute::TimeDomain;
    if (o.sampler == "longrun") cfg.multipliers.route = MultiplierRoute::LongRun;
    return cfg;
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
            out_ = file_.get();
        }
    }
    std::ostream& get() { return *out_; }
    void finish() {
        out_->flush();
        if (!*out_) throw Error(ErrorCode::Io, "write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

void cmd_estimate(const Options& o, std::ostream& out) {
    const TimePanel panel = load_input(o.common);
    const FrequencySet freqs = parse_frequencies(o.freqs, panel.n());
    std::optional<IndexSet> pairs;
    if (!o.pairs.empty()) pairs = parse_pairs(o.pairs, panel.labels());
    const std::size_t count = pairs ? pairs->size() : panel.p() * panel.p();
    const Bandwidth bw = o.lags ? Bandwidth{*o.lags} : default_bandwidth(count);
    const auto est = estimate_spectrum(panel, bw, FlatTopKernel(o.c), freqs, pairs);
    Sink sink(o.common.output, out);
    write_spectrum_csv(sink.get(), est);
    sink.finish();
}

void cmd_test(const Options& o, std::ostream& out) {
    const TimePanel panel = load_input(o.common);
    const FrequencySet freqs = parse_frequencies(o.freqs, panel.n());
    const IndexSet pairs = parse_pairs(o.pairs.empty() ? "all-off-diagonal" : o.pairs, panel.labels());
    const auto report = global_test(panel, pairs, freqs, o.alpha, test_config(o));
    Sink sink(o.common.output, out);
    sink.get() << to_json(report, panel.labels()).dump(2) << '\n';
    sink.finish();
}

void cmd_fdr(const Options& o, std::ostream& out) {
    const TimePanel panel = load_input(o.common);
    const FrequencySet freqs = parse_frequencies(o.freqs, panel.n());
    std::vector<HypothesisSpec> hyps;
    std::optional<LabelGroups> groups;
    if (o.mode == "block") {
        groups = group_by_prefix(panel.labels(), o.separator);
        hyps = block_hypotheses(*groups, freqs);
    } else {
        const IndexSet pairs = parse_pairs(o.pairs.empty() ? "all-off-diagonal" : o.pairs, panel.labels());
        std::uint64_t id = 0;
        for (const auto& pr : pairs) hyps.push_back(HypothesisSpec{id++, IndexSet({pr}), freqs, "", ""});
    }
    const FdrReport report = fdr_procedure(panel, hyps, o.alpha, test_config(o));
    Sink sink(o.common.output, out);
    write_fdr_csv(sink.get(), report, hyps, panel.labels());
    sink.finish();
    if (!o.matrix.empty()) {
        if (!groups) throw Error(ErrorCode::InvalidArgument, "--matrix needs --mode block");
        std::ofstream matrix(o.matrix);
        if (!matrix) throw Error(ErrorCode::Io, "cannot open '" + o.matrix + "' for writing");
        write_pvalue_matrix_csv(matrix, report, hyps, *groups);
        if (!matrix) throw Error(ErrorCode::Io, "write failed");
    }
}

void cmd_simulate(const Options& o, std::ostream& out) {
    DgpSpec dgp{parse_model(o.model), o.n, o.p, o.param, o.burn_in};
    Sink sink(o.common.output, out);
    if (o.experiment == "panel") {
        write_csv(sink.get(), simulate(dgp, StreamKey{o.seed, 0}));
        sink.finish();
        return;
    }
    const FrequencySet freqs = parse_frequencies(o.freqs, o.n);
    const TestConfig test = test_config(o);
    ExperimentResult result;
    if (o.experiment == "fdr") {
        FdrExperimentConfig cfg;
        cfg.dgp = dgp;
        cfg.blocks = o.blocks;
        cfg.freqs = freqs;
        cfg.alpha = o.alpha;
        cfg.test = test;
        cfg.replications = o.reps;
        cfg.seed = o.seed;
        result = run_fdr_experiment(cfg);
    } else {
        SizePowerConfig cfg;
        cfg.dgp = dgp;
        if (!o.pairs.empty()) {
            std::vector<std::string> labels;
            for (std::size_t k = 0; k < o.p; ++k) labels.push_back("s" + std::to_string(k + 1));
            cfg.pairs = parse_pairs(o.pairs, labels);
        }
        cfg.freqs = freqs;
        cfg.alpha = o.alpha;
        cfg.test = test;
        cfg.replications = o.reps;
        cfg.seed = o.seed;
        result = o.experiment == "size" ? run_size_experiment(cfg) : run_power_experiment(cfg);
    }
    write_experiment_header(sink.get());
    write_experiment_row(sink.get(), result);
    sink.finish();
}

}  // namespace

double parse_frequency_token(std::string_view token) {
    std::string_view t = trim(token);
    if (t.empty()) throw Error(ErrorCode::InvalidFrequency, "empty frequency token");
    const auto pi_at = t.find("pi");
    if (pi_at == std::string_view::npos) return parse_number(t, ErrorCode::InvalidFrequency, "frequency");

    std::string_view coef = t.substr(0, pi_at);
    std::string_view rest = t.substr(pi_at + 2);
    double scale = 1.0;
    if (coef.empty() || coef == "+") {
        scale = 1.0;
    } else if (coef == "-") {
        scale = -1.0;
    } else {
        if (coef.back() == '*') coef.remove_suffix(1);
        scale = parse_number(coef, ErrorCode::InvalidFrequency, "frequency");
    }
    if (!rest.empty()) {
        if (rest.front() != '/') throw Error(ErrorCode::InvalidFrequency, "invalid frequency '" + std::string(t) + "'");
        const double divisor = parse_number(rest.substr(1), ErrorCode::InvalidFrequency, "frequency");
        if (divisor == 0.0) throw Error(ErrorCode::InvalidFrequency, "zero divisor in '" + std::string(t) + "'");
        scale /= divisor;
    }
    return scale * kPi;
}

FrequencySet parse_frequencies(std::string_view spec, std::size_t n) {
    const std::string_view s = trim(spec);
    if (s == "quarterly") return FrequencySet::quarterly();
    if (s == "monthly") return FrequencySet::monthly();
    if (s.rfind("interval:", 0) == 0) {
        const auto parts = split(s.substr(9), ':');
        if (parts.size() != 2 && parts.size() != 3) {
            throw Error(ErrorCode::InvalidFrequency, "interval syntax is interval:LO:HI[:G]");
        }
        const double lo = parse_frequency_token(parts[0]);
        const double hi = parse_frequency_token(parts[1]);
        if (parts.size() == 2) return FrequencySet::interval_for_length(lo, hi, n);
        const double g = parse_number(parts[2], ErrorCode::InvalidFrequency, "grid size");
        if (g < 2 || g != std::floor(g)) throw Error(ErrorCode::InvalidFrequency, "grid size must be an integer >= 2");
        return FrequencySet::interval(lo, hi, static_cast<std::size_t>(g));
    }
    std::vector<double> omegas;
    for (auto token : split(s, ',')) omegas.push_back(parse_frequency_token(token));
    std::sort(omegas.begin(), omegas.end());
    return FrequencySet::discrete(std::move(omegas));
}

IndexSet parse_pairs(std::string_view spec, const std::vector<std::string>& labels) {
    const std::string_view s = trim(spec);
    const std::size_t p = labels.size();
    if (s == "all-off-diagonal") return IndexSet::lower_off_diagonal(p);
    if (s == "diagonal") return IndexSet::diagonal(p);
    if (s == "all") {
        std::vector<std::size_t> members(p);
        for (std::size_t k = 0; k < p; ++k) members[k] = k;
        return IndexSet::within(members);
    }
    std::vector<SeriesPair> pairs;
    for (auto entry : split(s, ',')) {
        const auto parts = split(entry, ':');
        if (parts.size() != 2) throw Error(ErrorCode::InvalidArgument, "pair '" + std::string(entry) + "' is not i:j");
        pairs.push_back({parse_index(parts[0], labels), parse_index(parts[1], labels)});
    }
    return IndexSet(std::move(pairs));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frequency-domain tests for high-dimensional time series"};
    app.require_subcommand(1);
    Options o;

    auto* estimate = app.add_subcommand("estimate", "Lag-window spectral density estimate as CSV");
    add_common(estimate, o.common, true);
    estimate->add_option("--freqs", o.freqs, "Frequency set");
    estimate->add_option("--pairs", o.pairs, "Pair selection (default every entry)");
    estimate->add_option("--lags", o.lags, "Lag bandwidth l_n");
    estimate->add_option("--c", o.c, "Flat-top parameter");

    auto* test = app.add_subcommand("test", "Global test for vanishing (cross-)spectra; JSON report");
    add_common(test, o.common, true);
    test->add_option("--freqs", o.freqs, "Frequency set");
    test->add_option("--pairs", o.pairs, "Pair selection (default all-off-diagonal)");
    test->add_option("--lags", o.lags, "Lag bandwidth l_n");
    test->add_option("--c", o.c, "Flat-top parameter");
    add_test_options(test, o);

    auto* fdr = app.add_subcommand("fdr", "Multiple testing with FDR control; CSV report");
    add_common(fdr, o.common, true);
    fdr->add_option("--freqs", o.freqs, "Frequency set");
    fdr->add_option("--mode", o.mode, "block (label prefixes) or pairs")->check(CLI::IsMember({"block", "pairs"}));
    fdr->add_option("--pairs", o.pairs, "Pair selection in pairs mode");
    fdr->add_option("--separator", o.separator, "Label prefix separator");
    fdr->add_option("--matrix", o.matrix, "Pairwise p-value matrix CSV (block mode)");
    fdr->add_option("--lags", o.lags, "Lag bandwidth l_n");
    fdr->add_option("--c", o.c, "Flat-top parameter");
    add_test_options(fdr, o);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo size, power and FDR experiments");
    add_common(sim, o.common, false);
    sim->add_option("--model", o.model, "M1..M6");
    sim->add_option("--experiment", o.experiment, "size, power, fdr or panel")
        ->check(CLI::IsMember({"size", "power", "fdr", "panel"}));
    sim->add_option("-n,--n", o.n, "Series length");
    sim->add_option("-p,--p", o.p, "Dimension");
    sim->add_option("--param", o.param, "Model parameter");
    sim->add_option("--burn-in", o.burn_in, "Burn-in for recursive models");
    sim->add_option("--reps", o.reps, "Replications");
    sim->add_option("--blocks", o.blocks, "Block count for fdr experiments");
    sim->add_option("--freqs", o.freqs, "Frequency set");
    sim->add_option("--pairs", o.pairs, "Pair selection for size and power");
    sim->add_option("--lags", o.lags, "Lag bandwidth l_n");
    sim->add_option("--c", o.c, "Flat-top parameter");
    add_test_options(sim, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (o.common.threads > 0) omp_set_num_threads(o.common.threads);
        if (*estimate) cmd_estimate(o, out);
        if (*test) cmd_test(o, out);
        if (*fdr) cmd_fdr(o, out);
        if (*sim) cmd_simulate(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_validation_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace specfreq::cli
