#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "activelab/engine.hpp"
#include "activelab/fixture.hpp"
#include "activelab/model.hpp"

namespace activelab::scenarios {

// Duet labels. Silence-class labels come first so percept ties resolve to
// the non-hallucinatory label.
inline constexpr std::string_view kSilence = "silence";
inline constexpr std::string_view kOtherSpeaking = "other_speaking";
inline constexpr std::string_view kQuiet = "quiet";
inline constexpr std::string_view kHear = "hear";
inline constexpr std::string_view kListen = "listen";
inline constexpr std::string_view kSpeak = "speak";

/// Policy spaces of the duet agent.
///  - Full: all 2^H action sequences, uniform E.
///  - MatchedOnly: the single speak/listen alternation that matches the partner.
///  - ListeningBiased: all sequences, E ∝ exp(w * #listen).
///  - Lesioned: ListeningBiased with the matched policy removed.
///  - ListenHeavy: Full restricted to sequences with at most one speak.
enum class PolicyVariant { Full, MatchedOnly, ListeningBiased, Lesioned, ListenHeavy };

std::string_view to_string(PolicyVariant v) noexcept;
/// Throws InvalidConfig.
PolicyVariant parse_policy_variant(std::string_view name);

/// Id of a duet/song policy: action initials, e.g. "SLSL".
std::string policy_id(const std::vector<std::string>& actions);
std::string matched_policy_id(int horizon);

/// Turn-taking duet. States {silence, other_speaking}; observations {quiet,
/// hear}; actions {listen, speak}. D(other_speaking) = strong_prior.
/// Throws InvalidConfig for an odd or < 2 horizon, PolicySpaceTooLarge for
/// an enumerated space with horizon > 8.
GenerativeModel build_duet_model(double strong_prior, PolicyVariant variant, int horizon,
                                 const DuetParams& params = DuetParams{});
GenerativeModel build_duet_model(double strong_prior, PolicyVariant variant, const DuetParams& params = DuetParams{});

/// Removes the listed policies and renormalizes E over the survivors.
/// Throws UnknownLabel for an absent id and EmptyPolicySpace when nothing survives.
GenerativeModel lesion_policy_space(const GenerativeModel& model, const std::vector<std::string>& remove_ids);

/// Scripted world: hidden-state sequence plus a state -> observation emission
/// map, optionally corrupted with probability `emission_noise` (the corrupted
/// observation is drawn uniformly from the other labels).
struct WorldScript {
  DomainPtr states;
  DomainPtr observations;
  std::vector<std::string> true_states;
  std::vector<std::string> emission;  ///< emission[state index] = observation label
  double emission_noise = 0.0;

  std::size_t length() const noexcept { return true_states.size(); }
  const std::string& clean_observation(std::size_t t) const;
  std::vector<std::string> observations_for(std::uint64_t seed) const;
};

/// silence, other_speaking, silence, ... Throws InvalidConfig for T < 2.
WorldScript build_duet_world(int length, double emission_noise = 0.0);

enum class OrderBelief { Standard, Altered };
std::string_view to_string(OrderBelief b) noexcept;

/// Song with n_words distinct words w1..wN sung in standard order, looping.
/// The hidden state is the word being sung. The altered belief swaps the last
/// two words of the expected order. D is the word sung just before the trial,
/// so D enters only as an initial prior (prior_weight 0).
/// Throws InvalidConfig unless 2 <= n_words <= 5.
GenerativeModel build_song_model(OrderBelief belief, int n_words, const SongParams& params = SongParams{});
WorldScript build_song_world(int n_words, int repeats);

/// Which labels count as "silence". Hallucination: sound-class percept on a
/// silence-class world step; miss: the reverse.
struct LabelClasses {
  std::set<std::string> silence_states;
  std::set<std::string> silence_observations;

  static LabelClasses duet();
  static LabelClasses none() { return {}; }
};

struct TrialConfig {
  GenerativeModel model;
  WorldScript world;
  PrecisionSet precisions;
  std::size_t length = 0;  ///< 0 means the whole world script
  std::uint64_t seed = 0;
  engine::SelectionMode mode = engine::SelectionMode::Argmax;
  LabelClasses classes = LabelClasses::duet();
};

struct TrialStep {
  std::string world_state;
  std::string observation;
  CategoricalDist q_state;  ///< posterior after the observation
  engine::Percept percept;
  std::string action;         ///< action in effect at this step
  std::string argmax_policy;  ///< id of the maximal policy in the plan made at this step
  bool hallucination = false;
  bool miss = false;
  bool content_error = false;  ///< percept differs from the noise-free emission of the world state
};

struct TrialRecord {
  std::vector<TrialStep> steps;
  std::size_t hallucinations = 0;
  std::size_t misses = 0;
  std::size_t content_errors = 0;
  std::size_t silent_steps = 0;
  std::size_t sound_steps = 0;
};

TrialRecord run_trial(const TrialConfig& config);

/// Hallucinations per silence-class world step. Throws UndefinedRate when
/// the record has no silent step.
double hallucination_rate(const TrialRecord& record);
/// Misses per sound-class world step (0 when there is none).
double miss_rate(const TrialRecord& record);

struct PolicySpaceSize {
  std::size_t available = 0;
  std::size_t utilized = 0;
  bool operator==(const PolicySpaceSize&) const = default;
};

/// available = |policies|; utilized = distinct argmax policies across records.
PolicySpaceSize policy_space_size_metric(const GenerativeModel& model, const std::vector<TrialRecord>& records);

/// Convenience: duet trial of `params.trial_length` steps on the default world.
TrialRecord run_duet(const GenerativeModel& model, const PrecisionSet& precisions, const DuetParams& params,
                     std::uint64_t seed = 0, engine::SelectionMode mode = engine::SelectionMode::Argmax);

}  // namespace activelab::scenarios
