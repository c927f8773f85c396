#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "activelab/fixture.hpp"
#include "activelab/model.hpp"
#include "activelab/scenarios.hpp"

namespace activelab::services {

struct BoostSensoryPrecision {
  double delta_zeta = 0.0;
};
struct ExpandPolicySpace {
  std::vector<Policy> added;
};
struct ReducePolicyPrecision {
  double delta_gamma = 0.0;
};
/// D' = (1 - lambda) D + lambda * uniform.
struct FlattenPerceptualPrior {
  double lambda = 0.0;
};

using InterventionSpec =
    std::variant<BoostSensoryPrecision, ExpandPolicySpace, ReducePolicyPrecision, FlattenPerceptualPrior>;

/// Throws InvalidConfig on an out-of-range parameter and DuplicatePolicy on
/// repeated ids in ExpandPolicySpace::added.
void validate(const InterventionSpec& spec);
std::string describe(const InterventionSpec& spec);

enum class Severity { Mild, Severe };
std::string_view to_string(Severity s) noexcept;
Severity parse_severity(std::string_view name);

enum class ProgramKind { ACT, CSC, TreatmentAsUsual };
std::string_view to_string(ProgramKind k) noexcept;
ProgramKind parse_program_kind(std::string_view name);

/// A service bundle. Precision and policy components take effect at
/// enrollment and stay in force while enrolled; FlattenPerceptualPrior acts on
/// every active episode. With adherence < 1 the precision components are not
/// applied at enrollment but per episode, each episode independently with
/// probability `adherence` (medication taken or not).
struct ServiceProgram {
  ProgramKind kind = ProgramKind::ACT;
  std::vector<InterventionSpec> components;
  double adherence = 1.0;

  /// ACT: boost zeta, reduce gamma, expand with `expansion`.
  static ServiceProgram act(const ServiceDefaults& d, std::vector<Policy> expansion);
  /// CSC: the ACT bundle plus prior flattening.
  static ServiceProgram csc(const ServiceDefaults& d, std::vector<Policy> expansion);
  /// Gamma reduction only, partially adhered to.
  static ServiceProgram treatment_as_usual(const ServiceDefaults& d);
  static ServiceProgram standard(ProgramKind kind, const ServiceDefaults& d, std::vector<Policy> expansion);
};

/// What enrollment changed, so that withdrawal can undo it.
struct Enrollment {
  ProgramKind kind = ProgramKind::ACT;
  double zeta_before = 0.0;
  double zeta_after = 0.0;
  double gamma_before = 0.0;
  double gamma_after = 0.0;
  std::vector<Policy> policies_before;
  std::vector<double> policy_prior_before;
};

struct PatientAgent {
  GenerativeModel model;
  PrecisionSet precisions;
  std::vector<double> prior_counts;  ///< Dirichlet concentration for D, one entry per state
  double eta = 0.0;                  ///< count added per experienced percept
  double p_learn = 0.0;              ///< per-episode probability of internalizing a supplemented policy
  std::set<std::string> supplemented_ids;
  Severity severity = Severity::Mild;
  std::optional<Enrollment> enrollment;

  /// Installs normalize(prior_counts) as the model's D.
  static PatientAgent create(const GenerativeModel& model, const PrecisionSet& precisions,
                             std::vector<double> prior_counts, double eta, double p_learn,
                             Severity severity = Severity::Mild);

  CategoricalDist perceptual_prior() const { return model.state_prior(); }
  bool enrolled() const noexcept { return enrollment.has_value(); }
};

/// Returns the modified patient; the input is untouched. Severe patients have
/// FlattenPerceptualPrior's lambda capped at `defaults.severe_flatten_cap`.
PatientAgent apply_intervention(const PatientAgent& patient, const InterventionSpec& spec,
                                const ServiceDefaults& defaults = ServiceDefaults{});

/// Adds `eta` to the count of the state each percept points to (the state
/// that most likely emits the perceived observation). Severe patients only
/// accumulate counts on sound-class states.
PatientAgent update_perceptual_prior(const PatientAgent& patient, const scenarios::TrialRecord& record,
                                     const scenarios::LabelClasses& classes = scenarios::LabelClasses::duet());

/// Each supplemented policy, in id order, is internalized with probability p_learn.
PatientAgent policy_learning_step(const PatientAgent& patient, std::uint64_t rng_seed);

/// Applies the program's enrollment-time components and records the deltas.
/// Throws InvalidConfig when the patient is already enrolled.
PatientAgent enroll_service(const PatientAgent& patient, const ServiceProgram& program,
                            const ServiceDefaults& defaults = ServiceDefaults{});

/// Undoes enrollment: zeta and gamma move back by the recorded deltas, still
/// supplemented policies are dropped, internalized ones stay. Prior counts are
/// kept. Throws NotEnrolled.
PatientAgent withdraw_service(const PatientAgent& patient, const ServiceProgram& program);

struct EpisodeConfig {
  scenarios::WorldScript world;
  std::size_t length = 0;
  engine::SelectionMode mode = engine::SelectionMode::Argmax;
  scenarios::LabelClasses classes = scenarios::LabelClasses::duet();
  ServiceDefaults defaults;
};

struct EpisodeRecord {
  std::size_t index = 0;
  std::optional<ProgramKind> program;
  bool adherent = false;  ///< per-episode precision components were in force
  double zeta = 0.0;
  double gamma = 0.0;
  double halluc_rate = 0.0;
  double miss_rate = 0.0;
  bool relapse = false;
  std::vector<double> prior_counts;  ///< after this episode's learning
  double d_sound = 0.0;              ///< D mass on sound-class states after learning
  std::size_t utilized_policies = 0;
  std::size_t available_policies = 0;
};

/// One clinical episode: withdraw a program no longer scheduled, enroll a newly
/// scheduled one, per-episode components, run_trial, update_perceptual_prior,
/// then policy_learning_step while enrolled.
std::pair<PatientAgent, EpisodeRecord> run_episode(const PatientAgent& patient, const ServiceProgram* program,
                                                   const EpisodeConfig& config, std::uint64_t seed,
                                                   std::size_t index = 0);

struct RecoveryEvent {
  std::size_t relapse_end = 0;             ///< last episode of the relapse run
  std::optional<std::size_t> episodes;     ///< episodes after relapse_end until rate < remission; none if never
};

struct CourseRecord {
  std::vector<EpisodeRecord> episodes;
  std::size_t relapse_count = 0;
  std::vector<RecoveryEvent> recoveries;
};

/// schedule[e] names the program active in episode e (nullopt = untreated).
/// Episode seeds are mix_seed(seed, e). Throws InvalidConfig when the
/// schedule is empty.
CourseRecord run_course(const PatientAgent& patient, const std::vector<std::optional<ServiceProgram>>& schedule,
                        const EpisodeConfig& config, std::uint64_t seed);

/// Duet course as described by the fixture's "course" section.
struct CourseSpec {
  double zeta = 0.2;
  double gamma = 8.0;
  scenarios::PolicyVariant variant = scenarios::PolicyVariant::Lesioned;
  std::vector<double> prior_counts{1.0, 9.0};
  double eta = 0.1;
  double p_learn = 0.5;
  Severity severity = Severity::Mild;
  std::vector<std::optional<ProgramKind>> schedule;

  /// Throws InvalidConfig on unknown keys or bad values.
  static CourseSpec from_fixture(const Fixture& fixture);
};

PatientAgent make_duet_patient(const CourseSpec& spec, const DuetParams& params);
std::vector<std::optional<ServiceProgram>> make_schedule(const CourseSpec& spec, const ServiceDefaults& defaults,
                                                         const DuetParams& params);
EpisodeConfig make_duet_episode_config(const Fixture& fixture);

}  // namespace activelab::services
