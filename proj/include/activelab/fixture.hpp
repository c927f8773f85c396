#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace activelab {

/// Duet scenario constants. These are the frozen matrices of the turn-taking
/// model; docs/fixtures.md lists them as a table.
struct DuetParams {
  double likelihood_reliability = 0.9;  ///< P(quiet | silence) = P(hear | other_speaking)
  double listen_sound_prob = 0.59;      ///< P(other_speaking at t | listen at t)
  double speak_sound_prob = 0.03;       ///< P(other_speaking at t | speak at t)
  double preference_hear = 0.55;        ///< C(hear)
  double listen_bias_log_weight = 2.0;  ///< listening_biased: log E(pi) = w * #listen + const
  double prior_weight = 1.0;            ///< exponent on D in prediction weighting
  double strong_prior = 0.9;            ///< D(other_speaking) of the strong-prior fixtures
  int horizon = 4;
  int trial_length = 40;
  double emission_noise = 0.0;
};

struct SongParams {
  int n_words = 4;
  double transition_reliability = 0.6;  ///< P(next word = expected next word)
  double likelihood_reliability = 0.9;  ///< P(hear word w | word w sung)
  int repeats = 2;                      ///< passes through the song per trial
  int horizon = 2;
};

struct ServiceDefaults {
  double relapse_threshold = 0.5;
  double remission_threshold = 0.05;
  double act_delta_zeta = 0.6;
  double act_delta_gamma = 6.0;
  double csc_flatten_lambda = 0.5;
  double tau_delta_gamma = 6.0;
  double tau_adherence = 0.7;
  double severe_flatten_cap = 0.2;
};

/// Parsed fixture document. Unknown keys are rejected.
struct Fixture {
  DuetParams duet;
  SongParams song;
  ServiceDefaults services;
  nlohmann::json document;  ///< full parsed document (for provenance echo)
  std::string sha256;       ///< hash of the raw bytes the fixture was read from

  static Fixture defaults();
  static Fixture from_json_text(const std::string& text);
  static Fixture load(const std::filesystem::path& path);

  /// Applies a `section.key=value` override (strict: unknown keys throw InvalidConfig).
  void set(const std::string& key, const std::string& value);
};

nlohmann::json to_json(const DuetParams& p);
nlohmann::json to_json(const SongParams& p);
nlohmann::json to_json(const ServiceDefaults& p);

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

/// Compiled-in copy of fixtures/default.json.
std::string default_fixture_text();

}  // namespace activelab
