#include "specfreq/simulate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <iomanip>
#include <ostream>

namespace specfreq {

namespace {

constexpr std::uint64_t kDataTag = 0x44415441ull;
constexpr std::uint64_t kBootTag = 0x424f4f54ull;
constexpr double kM5InnovationVariance = 1.0 - 0.4 * 0.4;
constexpr double kSeriesTolerance = 1e-14;
constexpr std::size_t kSeriesCap = 100000;

Vector normals(CounterRng& rng, Eigen::Index size) {
    Vector z(size);
    rng.fill_normal(std::span<double>(z.data(), static_cast<std::size_t>(size)));
    return z;
}

void run_parallel(long count, const std::function<void(long)>& body) {
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < count; ++r) {
        try {
            body(r);
        } catch (...) {
            failures[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

TestConfig replication_test_config(const TestConfig& base, std::uint64_t seed, std::size_t rep) {
    TestConfig cfg = base;
    cfg.multipliers.seed = StreamKey{seed, kBootTag}.child(rep).stream;
    return cfg;
}

ExperimentResult run_global_experiment(const SizePowerConfig& cfg, ExperimentKind kind) {
    if (cfg.replications == 0) throw Error(ErrorCode::InvalidArgument, "replications must be positive");
    check_dgp(cfg.dgp);
    const IndexSet pairs = cfg.pairs ? *cfg.pairs : IndexSet::lower_off_diagonal(cfg.dgp.p);
    pairs.check_dimension(cfg.dgp.p);

    ExperimentResult result;
    result.kind = kind;
    result.dgp = cfg.dgp;
    result.frequency_count = cfg.freqs.size();
    result.flat_top_c = cfg.test.flat_top_c;
    result.alpha = cfg.alpha;
    result.replicates = cfg.test.multipliers.replicates;
    result.replications = cfg.replications;
    result.hypotheses = 1;
    result.p_values.assign(cfg.replications, 1.0);
    std::vector<char> rejected(cfg.replications, 0);

    const StreamKey data{cfg.seed, kDataTag};
    run_parallel(static_cast<long>(cfg.replications), [&](long r) {
        const auto rep = static_cast<std::size_t>(r);
        const TimePanel panel = simulate(cfg.dgp, data.child(rep));
        const GlobalTestReport report =
            global_test(panel, pairs, cfg.freqs, cfg.alpha, replication_test_config(cfg.test, cfg.seed, rep));
        rejected[rep] = report.reject ? 1 : 0;
        result.p_values[rep] = report.p_value;
    });

    std::size_t count = 0;
    for (char c : rejected) count += static_cast<std::size_t>(c);
    result.rate = static_cast<double>(count) / static_cast<double>(cfg.replications);
    return result;
}

}  // namespace

Model parse_model(std::string_view name) {
    static constexpr std::string_view names[] = {"M1", "M2", "M3", "M4", "M5", "M6"};
    for (std::size_t k = 0; k < 6; ++k) {
        if (name == names[k] || (name.size() == 1 && name[0] == static_cast<char>('1' + k))) {
            return static_cast<Model>(k + 1);
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "' (expected M1..M6)");
}

std::string_view to_string(Model model) noexcept {
    switch (model) {
        case Model::M1: return "M1";
        case Model::M2: return "M2";
        case Model::M3: return "M3";
        case Model::M4: return "M4";
        case Model::M5: return "M5";
        case Model::M6: return "M6";
    }
    return "unknown";
}

Matrix psi_matrix(std::size_t p, double off_diagonal) {
    const auto size = static_cast<Eigen::Index>(p);
    Matrix psi = Matrix::Zero(size, size);
    for (Eigen::Index k = 0; k < size; ++k) {
        psi(k, k) = 0.4;
        if (k + 1 < size) {
            psi(k, k + 1) = off_diagonal;
            psi(k + 1, k) = off_diagonal;
        }
    }
    return psi;
}

void check_dgp(const DgpSpec& spec) {
    if (spec.n < 3) throw Error(ErrorCode::InsufficientLength, "simulated panels need n >= 3");
    if (spec.p < 1) throw Error(ErrorCode::InvalidArgument, "simulated panels need p >= 1");
    if (!std::isfinite(spec.param)) throw Error(ErrorCode::NonFiniteValue, "model parameter must be finite");
    if (spec.model == Model::M2 && !(std::abs(spec.param) < 1.0)) {
        throw Error(ErrorCode::NonStationary, "M2 requires |a| < 1");
    }
    if (spec.model == Model::M5) {
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(psi_matrix(spec.p, spec.param), Eigen::EigenvaluesOnly);
        if (!(eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0)) {
            throw Error(ErrorCode::NonStationary, "M5 requires the spectral radius of Psi below 1");
        }
    }
}

TimePanel simulate(const DgpSpec& spec, StreamKey key) {
    check_dgp(spec);
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    const double a = spec.param;
    CounterRng rng(key);
    Matrix x(n, p);

    switch (spec.model) {
        case Model::M1:
            for (Eigen::Index t = 0; t < n; ++t) x.row(t) = a * normals(rng, p).transpose();
            break;
        case Model::M2: {
            const double scale = std::sqrt(1.0 - a * a);
            Vector state = normals(rng, p);
            for (std::size_t t = 0; t < spec.burn_in; ++t) state = a * state + scale * normals(rng, p);
            for (Eigen::Index t = 0; t < n; ++t) {
                state = a * state + scale * normals(rng, p);
                x.row(t) = state.transpose();
            }
            break;
        }
        case Model::M3: {
            Vector prev = normals(rng, p);
            for (Eigen::Index t = 0; t < n; ++t) {
                Vector cur = normals(rng, p);
                x.row(t) = (cur - a * prev).transpose();
                prev = std::move(cur);
            }
            break;
        }
        case Model::M4: {
            const Matrix psi = psi_matrix(spec.p, a);
            for (Eigen::Index t = 0; t < n; ++t) x.row(t) = (psi * normals(rng, p)).transpose();
            break;
        }
        case Model::M5: {
            const Matrix psi = psi_matrix(spec.p, a);
            const double scale = std::sqrt(kM5InnovationVariance);
            Vector state = Vector::Zero(p);
            for (std::size_t t = 0; t < spec.burn_in; ++t) state = psi * state + scale * normals(rng, p);
            for (Eigen::Index t = 0; t < n; ++t) {
                state = psi * state + scale * normals(rng, p);
                x.row(t) = state.transpose();
            }
            break;
        }
        case Model::M6: {
            const Matrix psi = psi_matrix(spec.p, a);
            Vector prev = normals(rng, p);
            for (Eigen::Index t = 0; t < n; ++t) {
                Vector cur = normals(rng, p);
                x.row(t) = (cur - psi * prev).transpose();
                prev = std::move(cur);
            }
            break;
        }
    }
    return TimePanel(std::move(x));
}

ComplexMatrix true_spectrum(const DgpSpec& spec, double omega) {
    check_dgp(spec);
    const auto p = static_cast<Eigen::Index>(spec.p);
    const double a = spec.param;
    const Matrix identity = Matrix::Identity(p, p);
    const double inv_2pi = 1.0 / kTwoPi;

    switch (spec.model) {
        case Model::M1: return (a * a * inv_2pi * identity).cast<Complex>();
        case Model::M2: {
            const double mod2 = std::norm(1.0 - a * std::polar(1.0, -omega));
            return ((1.0 - a * a) / mod2 * inv_2pi * identity).cast<Complex>();
        }
        case Model::M3: return ((1.0 + a * a - 2.0 * a * std::cos(omega)) * inv_2pi * identity).cast<Complex>();
        case Model::M4: {
            const Matrix psi = psi_matrix(spec.p, a);
            return (inv_2pi * psi * psi).cast<Complex>();
        }
        case Model::M6: {
            const Matrix psi = psi_matrix(spec.p, a);
            return (inv_2pi * (identity + psi * psi - 2.0 * std::cos(omega) * psi)).cast<Complex>();
        }
        case Model::M5: {
            const Matrix psi = psi_matrix(spec.p, a);
            const Matrix psi2 = psi * psi;
            Matrix gamma0 = identity;
            Matrix term = identity;
            for (std::size_t j = 1; j < kSeriesCap; ++j) {
                term = term * psi2;
                gamma0 += term;
                if (term.cwiseAbs().maxCoeff() < kSeriesTolerance) break;
            }
            ComplexMatrix lagsum = identity.cast<Complex>();
            term = identity;
            for (std::size_t k = 1; k < kSeriesCap; ++k) {
                term = term * psi;
                lagsum += (2.0 * std::cos(static_cast<double>(k) * omega) * term).cast<Complex>();
                if (term.cwiseAbs().maxCoeff() < kSeriesTolerance) break;
            }
            return (kM5InnovationVariance * inv_2pi * gamma0).cast<Complex>() * lagsum;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model");
}

ExperimentResult run_size_experiment(const SizePowerConfig& cfg) {
    return run_global_experiment(cfg, ExperimentKind::Size);
}

ExperimentResult run_power_experiment(const SizePowerConfig& cfg) {
    return run_global_experiment(cfg, ExperimentKind::Power);
}

std::vector<HypothesisSpec> block_design(std::size_t p, std::size_t blocks, const FrequencySet& freqs) {
    if (blocks < 1 || p % blocks != 0) {
        throw Error(ErrorCode::InvalidArgument, "p must be a positive multiple of the block count");
    }
    const std::size_t size = p / blocks;
    std::vector<std::vector<std::size_t>> members(blocks);
    for (std::size_t g = 0; g < blocks; ++g) {
        for (std::size_t k = 0; k < size; ++k) members[g].push_back(g * size + k);
    }
    std::vector<HypothesisSpec> hyps;
    std::uint64_t id = 0;
    for (std::size_t g = 0; g < blocks; ++g) {
        for (std::size_t h = g; h < blocks; ++h) {
            const IndexSet pairs = g == h ? IndexSet::within(members[g]) : IndexSet::cross(members[g], members[h]);
            for (double omega : freqs.grid()) {
                hyps.push_back(HypothesisSpec{id++, pairs, FrequencySet::discrete({omega}),
                                              "B" + std::to_string(g + 1), "B" + std::to_string(h + 1)});
            }
        }
    }
    return hyps;
}

std::vector<bool> true_null_mask(const DgpSpec& spec, std::span<const HypothesisSpec> hyps) {
    std::vector<bool> mask(hyps.size(), true);
    for (std::size_t q = 0; q < hyps.size(); ++q) {
        for (double omega : hyps[q].freqs.grid()) {
            const ComplexMatrix f = true_spectrum(spec, omega);
            for (const auto& pr : hyps[q].pairs) {
                if (std::abs(f(static_cast<Eigen::Index>(pr.first), static_cast<Eigen::Index>(pr.second))) >
                    kNullTolerance) {
                    mask[q] = false;
                }
            }
        }
    }
    return mask;
}

ExperimentResult run_fdr_experiment(const FdrExperimentConfig& cfg) {
    if (cfg.replications == 0) throw Error(ErrorCode::InvalidArgument, "replications must be positive");
    check_dgp(cfg.dgp);
    const std::vector<HypothesisSpec> hyps = block_design(cfg.dgp.p, cfg.blocks, cfg.freqs);
    const std::vector<bool> null = true_null_mask(cfg.dgp, hyps);
    std::size_t q0 = 0;
    for (bool b : null) q0 += b ? 1 : 0;
    const std::size_t q1 = hyps.size() - q0;

    ExperimentResult result;
    result.kind = ExperimentKind::Fdr;
    result.dgp = cfg.dgp;
    result.frequency_count = cfg.freqs.size();
    result.flat_top_c = cfg.test.flat_top_c;
    result.alpha = cfg.alpha;
    result.replicates = cfg.test.multipliers.replicates;
    result.replications = cfg.replications;
    result.hypotheses = hyps.size();
    result.true_nulls = q0;

    std::vector<double> fdp(cfg.replications, 0.0);
    std::vector<double> power(cfg.replications, 0.0);
    const StreamKey data{cfg.seed, kDataTag};
    run_parallel(static_cast<long>(cfg.replications), [&](long r) {
        const auto rep = static_cast<std::size_t>(r);
        const TimePanel panel = simulate(cfg.dgp, data.child(rep));
        const FdrReport report =
            fdr_procedure(panel, hyps, cfg.alpha, replication_test_config(cfg.test, cfg.seed, rep));
        std::size_t rejections = 0;
        std::size_t false_rejections = 0;
        std::size_t true_rejections = 0;
        for (std::size_t q = 0; q < hyps.size(); ++q) {
            if (!report.outcomes[q].rejected) continue;
            ++rejections;
            if (null[q]) {
                ++false_rejections;
            } else {
                ++true_rejections;
            }
        }
        fdp[rep] = static_cast<double>(false_rejections) / static_cast<double>(std::max<std::size_t>(1, rejections));
        power[rep] = q1 > 0 ? static_cast<double>(true_rejections) / static_cast<double>(q1) : 0.0;
    });

    for (std::size_t r = 0; r < cfg.replications; ++r) {
        result.fdr += fdp[r];
        result.power += power[r];
    }
    result.fdr /= static_cast<double>(cfg.replications);
    result.power /= static_cast<double>(cfg.replications);
    return result;
}

void write_experiment_header(std::ostream& out) {
    out << "experiment,model,n,p,param,K,c,alpha,B,reps,rate,fdr,power\n";
}

void write_experiment_row(std::ostream& out, const ExperimentResult& r) {
    static constexpr const char* kinds[] = {"size", "power", "fdr"};
    out << std::setprecision(17) << kinds[static_cast<int>(r.kind)] << ',' << to_string(r.dgp.model) << ','
        << r.dgp.n << ',' << r.dgp.p << ',' << r.dgp.param << ',' << r.frequency_count << ',' << r.flat_top_c << ','
        << r.alpha << ',' << r.replicates << ',' << r.replications << ',';
    if (r.kind == ExperimentKind::Fdr) {
        out << ',' << r.fdr << ',' << r.power << '\n';
    } else {
        out << r.rate << ",,\n";
    }
}

}  // namespace specfreq
