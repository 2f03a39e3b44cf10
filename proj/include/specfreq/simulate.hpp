#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specfreq/fdr.hpp"
#include "specfreq/global_test.hpp"
#include "specfreq/rng.hpp"

namespace specfreq {

/// M1 iid N(0, a^2 I); M2 VAR(1) a x_{t-1} + e, e ~ N(0, (1 - a^2) I);
/// M3 e_t - a e_{t-1}; M4 Psi e_t; M5 Psi x_{t-1} + e, e ~ N(0, 0.84 I);
/// M6 e_t - Psi e_{t-1}. Psi is tridiagonal with 0.4 on the diagonal and
/// `param` next to it.
enum class Model { M1 = 1, M2, M3, M4, M5, M6 };

[[nodiscard]] Model parse_model(std::string_view name);
[[nodiscard]] std::string_view to_string(Model model) noexcept;

struct DgpSpec {
    Model model = Model::M1;
    std::size_t n = 300;
    std::size_t p = 10;
    double param = 0.2;
    std::size_t burn_in = 200;
};

[[nodiscard]] Matrix psi_matrix(std::size_t p, double off_diagonal);

/// Throws NonStationary (or InvalidArgument for malformed shapes).
void check_dgp(const DgpSpec& spec);

[[nodiscard]] TimePanel simulate(const DgpSpec& spec, StreamKey key);

/// True spectral density matrix F(w) of the model.
[[nodiscard]] ComplexMatrix true_spectrum(const DgpSpec& spec, double omega);

/// Tolerance under which a true cross-spectrum entry counts as zero.
inline constexpr double kNullTolerance = 1e-12;

struct SizePowerConfig {
    DgpSpec dgp;
    /// Pairs I; defaults to all (i, j) with i > j.
    std::optional<IndexSet> pairs;
    FrequencySet freqs = FrequencySet::quarterly();
    double alpha = 0.05;
    TestConfig test;
    std::size_t replications = 100;
    std::uint64_t seed = 0;
};

struct FdrExperimentConfig {
    DgpSpec dgp;
    /// The p series are cut into `blocks` equal groups; each block pair
    /// (g <= h) and each frequency forms one hypothesis.
    std::size_t blocks = 10;
    FrequencySet freqs = FrequencySet::quarterly();
    double alpha = 0.05;
    TestConfig test;
    std::size_t replications = 100;
    std::uint64_t seed = 0;
};

enum class ExperimentKind { Size, Power, Fdr };

struct ExperimentResult {
    ExperimentKind kind = ExperimentKind::Size;
    DgpSpec dgp;
    std::size_t frequency_count = 0;
    double flat_top_c = 0.5;
    double alpha = 0.05;
    std::size_t replicates = 0;
    std::size_t replications = 0;
    /// Rejection rate for size and power runs.
    double rate = 0.0;
    /// Mean false discovery proportion and mean fraction of true alternatives rejected.
    double fdr = 0.0;
    double power = 0.0;
    std::size_t hypotheses = 0;
    std::size_t true_nulls = 0;
    /// Per-replication p-values of the global test (size and power runs).
    std::vector<double> p_values;
};

/// Replication r draws its panel from StreamKey{seed, data}.child(r) and its
/// multipliers from a key derived from (seed, r).
[[nodiscard]] ExperimentResult run_size_experiment(const SizePowerConfig& cfg);
[[nodiscard]] ExperimentResult run_power_experiment(const SizePowerConfig& cfg);

/// Block hypotheses: diagonal blocks test pairs i <= j inside the block,
/// off-diagonal blocks test all cross pairs. Ids follow (g, h, k) order.
[[nodiscard]] std::vector<HypothesisSpec> block_design(std::size_t p, std::size_t blocks, const FrequencySet& freqs);

/// true for hypotheses whose true cross-spectra vanish on every pair and frequency.
[[nodiscard]] std::vector<bool> true_null_mask(const DgpSpec& spec, std::span<const HypothesisSpec> hyps);

[[nodiscard]] ExperimentResult run_fdr_experiment(const FdrExperimentConfig& cfg);

/// CSV header and one row: experiment,model,n,p,param,K,c,alpha,B,reps,rate,fdr,power.
void write_experiment_header(std::ostream& out);
void write_experiment_row(std::ostream& out, const ExperimentResult& result);

}  // namespace specfreq
