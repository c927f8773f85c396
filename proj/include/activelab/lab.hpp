#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "activelab/fixture.hpp"
#include "activelab/model.hpp"
#include "activelab/rng.hpp"
#include "activelab/scenarios.hpp"
#include "activelab/services.hpp"
#include "json.hpp"

namespace activelab::lab {

inline constexpr std::string_view kVersion = "0.1.0";

struct SweepSpec {
  std::vector<double> zeta_grid;
  std::vector<double> gamma_grid;
  std::vector<scenarios::PolicyVariant> variants;
  double strong_prior = 0.9;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  DuetParams params;
  engine::SelectionMode mode = engine::SelectionMode::Argmax;

  /// Throws InvalidConfig for empty or non-increasing grids, no variants or
  /// repetitions < 1.
  void validate() const;
  std::size_t cell_count() const noexcept {
    return zeta_grid.size() * gamma_grid.size() * variants.size() * static_cast<std::size_t>(repetitions);
  }
  /// Grids and variants from the fixture's "sweep" section, duet constants
  /// from its "duet" section.
  static SweepSpec from_fixture(const Fixture& fixture, std::uint64_t seed);
};

nlohmann::json to_json(const SweepSpec& spec);

struct SweepCell {
  scenarios::PolicyVariant variant = scenarios::PolicyVariant::Full;
  double zeta = 0.0;
  double gamma = 0.0;
  int rep = 0;
  double halluc_rate = 0.0;
  double miss_rate = 0.0;
  std::size_t utilized_policies = 0;
  bool operator==(const SweepCell&) const = default;
};

struct Provenance {
  std::string fixture_sha256;
  std::uint64_t seed = 0;
  std::string version;
  nlohmann::json spec;  ///< echo of the sweep spec and fixture document
  bool operator==(const Provenance&) const = default;
};

struct SweepResult {
  std::vector<SweepCell> cells;  ///< ordered by (variant, zeta, gamma, rep)
  Provenance provenance;
  bool operator==(const SweepResult&) const = default;
};

/// base_seed XOR (cell_index * 0x9E3779B97F4A7C15).
constexpr std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t cell_index) noexcept {
  return base_seed ^ (static_cast<std::uint64_t>(cell_index) * 0x9E3779B97F4A7C15ULL);
}

/// Runs every cell on up to `threads` workers (0 = hardware concurrency).
/// The result does not depend on the worker count. A failing cell aborts the
/// sweep; the error names the cell.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0, std::string fixture_sha256 = {},
                      const nlohmann::json& fixture_document = {});

enum class Regime { Healthy, Hallucinating };
std::string_view to_string(Regime r) noexcept;

struct RegimeCell {
  scenarios::PolicyVariant variant = scenarios::PolicyVariant::Full;
  double zeta = 0.0;
  double gamma = 0.0;
  double mean_rate = 0.0;
  Regime regime = Regime::Healthy;
};

/// Mean rate over repetitions per (variant, zeta, gamma); hallucinating iff
/// mean >= threshold. Throws InvalidConfig unless 0 < threshold < 1.
std::vector<RegimeCell> regime_table(const SweepResult& result, double threshold = 0.5);

/// Filtered marginals P(s_t | o_0..o_t) by summing over every hidden-state
/// path. The state at t = 0 is drawn from D; action_seq[t] moves the state
/// from t to t + 1 through the prior-weighted transitions, which are rebuilt
/// here from the base matrices. Throws OracleInfeasible when
/// |S|^T > 10^6 and ShapeError for mismatched sequence lengths.
std::vector<CategoricalDist> oracle_exact_posterior(const GenerativeModel& model,
                                                    const std::vector<std::string>& action_seq,
                                                    const std::vector<std::string>& obs_seq, double zeta);

/// The same marginals by chaining engine::state_update and engine::predict.
std::vector<CategoricalDist> engine_filter(const GenerativeModel& model, const std::vector<std::string>& action_seq,
                                           const std::vector<std::string>& obs_seq, double zeta);

/// Random model with Dirichlet-like rows (some entries driven near zero), for
/// oracle and property tests.
GenerativeModel random_model(Rng& rng, std::size_t n_states, std::size_t n_obs, std::size_t n_actions,
                             std::size_t horizon, double prior_weight);

enum class Format { Csv, Json, SvgHeatmap };
std::string_view to_string(Format f) noexcept;
Format parse_format(std::string_view name);

std::string to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);
SweepResult sweep_result_from_json(const nlohmann::json& doc);
/// Throws InvalidVisualization when the zeta or gamma axis has fewer than two values.
std::string to_svg_heatmap(const SweepResult& result, scenarios::PolicyVariant variant);

std::string to_csv(const services::CourseRecord& course);
nlohmann::json to_json(const services::CourseRecord& course);
std::string to_csv(const scenarios::TrialRecord& record);
nlohmann::json to_json(const scenarios::TrialRecord& record);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

void export_results(const SweepResult& result, Format format, const std::filesystem::path& path,
                    scenarios::PolicyVariant heatmap_variant = scenarios::PolicyVariant::Full);
/// Throws InvalidVisualization for SvgHeatmap.
void export_results(const services::CourseRecord& course, Format format, const std::filesystem::path& path);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Engine filtering against the enumeration oracle on `n_random` random models
/// plus the duet and song fixtures.
std::vector<Check> oracle_suite(const Fixture& fixture, std::uint64_t seed, std::size_t n_random = 50);
/// The duet regime matrix on the fixture's constants.
std::vector<Check> regime_suite(const Fixture& fixture);

}  // namespace activelab::lab
