#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmtlab/counting.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/table.hpp"

namespace rmtlab {

inline constexpr const char* kVersion = "rmtlab 0.1.0";

// ---------------------------------------------------------------------------
// Configuration

struct EnsembleConfig {
  enum class Kind { kGue, kWignerThreePoint };

  Kind kind = Kind::kGue;
  double m4 = 3.0;
  /// Interpolation X^t = (1-t)^{1/2} W + t^{1/2} U toward an independent GUE.
  std::optional<double> t;
  /// Unset: kUnitary for GUE, kWigner for Wigner ensembles.
  std::optional<DiagonalVariance> diagonal;

  DiagonalVariance diagonal_variance() const noexcept;
  std::string name() const;

  static EnsembleConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

HermitianMatrix sample_ensemble(const EnsembleConfig& ens, int N, Engine& rng);

/// Eigenvalues of one draw. Plain GUE (unitary diagonal, no interpolation)
/// goes through the tridiagonal model; everything else is diagonalized.
Spectrum sample_ensemble_spectrum(const EnsembleConfig& ens, int N, Engine& rng);

/// A window given either by its raw width c (units of 1/N) or by its length
/// in mean spacings at the anchor energy.
struct WindowSpec {
  double E = 0.0;
  std::optional<double> c;
  std::optional<double> rescaled_length;

  /// The window anchored at `energy` (defaults to E).
  Window at(int N, std::optional<double> energy = std::nullopt) const;

  static WindowSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct AveragingSpec {
  double a = 0.0;
  double eps = 0.05;
};

struct ExperimentConfig {
  EnsembleConfig ensemble;
  /// Universality only: the ensembles compared, first is the reference.
  std::vector<EnsembleConfig> ensembles;
  std::vector<int> N_list{50, 100, 200};
  long samples = 20000;
  std::array<WindowSpec, 2> windows{};
  /// Empty, or one interval per window.
  std::vector<AveragingSpec> averaging;
  int grid = 32;
  std::string statistic = "count";
  Seed seed = 0;
  std::string output_dir = "out";
  int bootstrap = 200;
  int l_max = 4;
  int kernel_q = 40;
  int threads = 0;

  /// Throws std::invalid_argument on M < 1, N < 8, overlapping windows for
  /// any N, a bad averaging block, or an unknown statistic.
  void validate() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Parallel Monte Carlo

/// Calls fn(i, spectrum) for M independent draws; draw i uses the engine
/// make_engine(seed, group, i) so results are independent of worker count.
void for_each_sample(const EnsembleConfig& ens, int N, long M, Seed seed, std::uint64_t group,
                     const std::function<void(std::size_t, const Spectrum&)>& fn,
                     Execution exec = Execution::kOpenMP);

std::vector<Spectrum> sample_spectra(const EnsembleConfig& ens, int N, long M, Seed seed,
                                     std::uint64_t group, Execution exec = Execution::kOpenMP);

// ---------------------------------------------------------------------------
// Results

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  double predicted = 0.0;

  /// (value - predicted) / se; NaN when se == 0.
  double z() const noexcept;
};

struct VariantResult {
  std::string name;  // "fixed" or "averaged"
  JointCountHistogram histogram;
  long samples = 0;
  double gap = 0.0;
  double gap_se = 0.0;
  /// Independence gap of the kernel's joint count law (GUE prediction).
  double kernel_gap = 0.0;
  std::array<std::vector<Estimate>, 2> marginals;  // l = 0..l_max
  std::vector<std::vector<Estimate>> joint;        // [l1][l2], predicted = product of marginals
};

struct EnsembleRun {
  EnsembleConfig ensemble;
  int N = 0;
  VariantResult fixed;
  std::optional<VariantResult> averaged;
  /// Cov(C(n1, l1), C(n2, l2)) for l1, l2 in {1, 2}, i.e. the integral of
  /// rho_{l1+l2} - rho_{l1} rho_{l2} over Delta1^{l1} x Delta2^{l2} divided by
  /// l1! l2!. Index [l1 - 1][l2 - 1]; predicted from the GUE kernel.
  std::array<std::array<Estimate, 2>, 2> factorized_residual{};
};

struct RunManifest {
  nlohmann::json config;
  std::string command;
  std::string version = kVersion;
  Seed seed = 0;
  nlohmann::json seeds;  // substream derivation and group seeds
  int workers = 1;
  double wall_seconds = 0.0;
  std::vector<EmittedTable> outputs;
  nlohmann::json extra;

  nlohmann::json to_json() const;
  /// Writes manifest.json into `dir`.
  void write(const std::filesystem::path& dir) const;
};

struct ExperimentReport {
  std::vector<EnsembleRun> runs;
  RunManifest manifest;
};

/// One ensemble at one N: sampling, joint histograms (fixed and
/// energy-averaged), bootstrap standard errors, and kernel predictions.
EnsembleRun run_ensemble_pipeline(const ExperimentConfig& cfg, const EnsembleConfig& ens,
                                  std::size_t ensemble_index, int N,
                                  Execution exec = Execution::kOpenMP);

ExperimentReport run_independence_experiment(const ExperimentConfig& cfg,
                                             Execution exec = Execution::kOpenMP);

ExperimentReport run_universality_experiment(const ExperimentConfig& cfg,
                                             Execution exec = Execution::kOpenMP);

// ---------------------------------------------------------------------------
// CLI commands. Each reads a JSON config (unknown keys rejected), writes CSV
// tables plus manifest.json into `out`, and returns the manifest. `seed`
// overrides the config seed.

RunManifest run_command(const std::string& command, const nlohmann::json& config, Seed seed,
                        const std::filesystem::path& out);

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

}  // namespace rmtlab
