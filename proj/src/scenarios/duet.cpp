#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>

#include "activelab/error.hpp"
#include "activelab/rng.hpp"
#include "activelab/scenarios.hpp"

namespace activelab::scenarios {

namespace {

DomainPtr duet_states() {
  static const DomainPtr d = make_domain({std::string(kSilence), std::string(kOtherSpeaking)});
  return d;
}

DomainPtr duet_observations() {
  static const DomainPtr d = make_domain({std::string(kQuiet), std::string(kHear)});
  return d;
}

DomainPtr duet_actions() {
  static const DomainPtr d = make_domain({std::string(kListen), std::string(kSpeak)});
  return d;
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidConfig, std::string(what) + " must lie in [0, 1]");
}

// All 2^H sequences in lexicographic order (listen before speak).
std::vector<Policy> enumerate_policies(int horizon) {
  std::vector<Policy> out;
  const std::size_t n = std::size_t{1} << horizon;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> actions;
    for (int k = horizon - 1; k >= 0; --k) {
      actions.emplace_back((i >> k) & 1U ? kSpeak : kListen);
    }
    out.push_back(Policy{policy_id(actions), std::move(actions)});
  }
  return out;
}

std::size_t count_listens(const Policy& p) {
  return static_cast<std::size_t>(std::count(p.actions.begin(), p.actions.end(), kListen));
}

CategoricalDist listening_weights(const std::vector<Policy>& policies, double log_weight) {
  std::size_t max_listen = 0;
  for (const auto& p : policies) max_listen = std::max(max_listen, count_listens(p));
  std::vector<double> w;
  w.reserve(policies.size());
  for (const auto& p : policies) {
    w.push_back(std::exp(log_weight * (static_cast<double>(count_listens(p)) - static_cast<double>(max_listen))));
  }
  return normalize(w, policy_domain(policies));
}

}  // namespace

std::string_view to_string(PolicyVariant v) noexcept {
  switch (v) {
    case PolicyVariant::Full: return "full";
    case PolicyVariant::MatchedOnly: return "matched_only";
    case PolicyVariant::ListeningBiased: return "listening_biased";
    case PolicyVariant::Lesioned: return "lesioned";
    case PolicyVariant::ListenHeavy: return "listen_heavy";
  }
  return "full";
}

PolicyVariant parse_policy_variant(std::string_view name) {
  for (auto v : {PolicyVariant::Full, PolicyVariant::MatchedOnly, PolicyVariant::ListeningBiased,
                 PolicyVariant::Lesioned, PolicyVariant::ListenHeavy}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown policy variant '" + std::string(name) + "'");
}

std::string policy_id(const std::vector<std::string>& actions) {
  std::string id;
  id.reserve(actions.size());
  for (const auto& a : actions) {
    id.push_back(a.empty() ? '?' : static_cast<char>(std::toupper(static_cast<unsigned char>(a.front()))));
  }
  return id;
}

std::string matched_policy_id(int horizon) {
  std::string id;
  for (int k = 0; k < horizon; ++k) id.push_back(k % 2 == 0 ? 'S' : 'L');
  return id;
}

GenerativeModel build_duet_model(double strong_prior, PolicyVariant variant, int horizon, const DuetParams& params) {
  require_probability(strong_prior, "strong_prior");
  require_probability(params.likelihood_reliability, "likelihood_reliability");
  require_probability(params.listen_sound_prob, "listen_sound_prob");
  require_probability(params.speak_sound_prob, "speak_sound_prob");
  require_probability(params.preference_hear, "preference_hear");
  if (horizon < 2 || horizon % 2 != 0) throw Error(ErrorKind::InvalidConfig, "duet horizon must be even and >= 2");
  if (variant != PolicyVariant::MatchedOnly && horizon > 8) {
    throw Error(ErrorKind::PolicySpaceTooLarge, "enumerated policy space needs horizon <= 8");
  }

  const double r = params.likelihood_reliability;
  Eigen::MatrixXd a(2, 2);
  a << r, 1.0 - r,  // silence -> quiet, hear
      1.0 - r, r;   // other_speaking
  LikelihoodMatrix likelihood(duet_states(), duet_observations(), a);

  // rows are state-independent: the action alone sets the expected partner state
  Eigen::MatrixXd listen(2, 2);
  listen << 1.0 - params.listen_sound_prob, params.listen_sound_prob, 1.0 - params.listen_sound_prob,
      params.listen_sound_prob;
  Eigen::MatrixXd speak(2, 2);
  speak << 1.0 - params.speak_sound_prob, params.speak_sound_prob, 1.0 - params.speak_sound_prob,
      params.speak_sound_prob;
  TransitionSet transitions(duet_states(), duet_actions(), {listen, speak});

  std::vector<double> c{1.0 - params.preference_hear, params.preference_hear};
  std::vector<double> d{1.0 - strong_prior, strong_prior};

  std::vector<Policy> policies;
  std::optional<CategoricalDist> e;
  switch (variant) {
    case PolicyVariant::MatchedOnly: {
      std::vector<std::string> actions;
      for (int k = 0; k < horizon; ++k) actions.emplace_back(k % 2 == 0 ? kSpeak : kListen);
      policies.push_back(Policy{policy_id(actions), std::move(actions)});
      break;
    }
    case PolicyVariant::ListenHeavy: {
      for (auto& p : enumerate_policies(horizon)) {
        if (count_listens(p) + 1 >= p.actions.size()) policies.push_back(std::move(p));
      }
      break;
    }
    case PolicyVariant::Full:
    case PolicyVariant::ListeningBiased:
    case PolicyVariant::Lesioned:
      policies = enumerate_policies(horizon);
      if (variant != PolicyVariant::Full) e = listening_weights(policies, params.listen_bias_log_weight);
      break;
  }
  if (!e) e = uniform(policy_domain(policies));

  GenerativeModel model(std::move(likelihood), std::move(transitions), normalize(c, duet_observations()),
                        normalize(d, duet_states()), std::move(policies), std::move(*e), params.prior_weight);
  if (variant == PolicyVariant::Lesioned) return lesion_policy_space(model, {matched_policy_id(horizon)});
  return model;
}

GenerativeModel build_duet_model(double strong_prior, PolicyVariant variant, const DuetParams& params) {
  return build_duet_model(strong_prior, variant, params.horizon, params);
}

GenerativeModel lesion_policy_space(const GenerativeModel& model, const std::vector<std::string>& remove_ids) {
  std::vector<bool> removed(model.policies().size(), false);
  for (const auto& id : remove_ids) removed[model.policy_index(id)] = true;
  std::vector<Policy> survivors;
  std::vector<double> weights;
  for (std::size_t i = 0; i < model.policies().size(); ++i) {
    if (removed[i]) continue;
    survivors.push_back(model.policies()[i]);
    weights.push_back(model.policy_prior()[i]);
  }
  if (survivors.empty()) throw Error(ErrorKind::EmptyPolicySpace, "lesion would remove every policy");
  auto domain = policy_domain(survivors);
  return model.with_policies(std::move(survivors), normalize(weights, std::move(domain)));
}

const std::string& WorldScript::clean_observation(std::size_t t) const {
  return emission.at(states->index(true_states.at(t)));
}

std::vector<std::string> WorldScript::observations_for(std::uint64_t seed) const {
  std::vector<std::string> out;
  out.reserve(true_states.size());
  Rng rng(seed);
  for (std::size_t t = 0; t < true_states.size(); ++t) {
    const std::string& clean = clean_observation(t);
    if (emission_noise > 0.0 && observations->size() > 1 && rng.uniform() < emission_noise) {
      std::size_t clean_idx = observations->index(clean);
      auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(observations->size() - 1));
      pick = std::min(pick, observations->size() - 2);
      if (pick >= clean_idx) ++pick;
      out.push_back(observations->label(pick));
    } else {
      out.push_back(clean);
    }
  }
  return out;
}

WorldScript build_duet_world(int length, double emission_noise) {
  if (length < 2) throw Error(ErrorKind::InvalidConfig, "duet world needs T >= 2");
  require_probability(emission_noise, "emission_noise");
  WorldScript w;
  w.states = duet_states();
  w.observations = duet_observations();
  w.emission = {std::string(kQuiet), std::string(kHear)};
  w.emission_noise = emission_noise;
  w.true_states.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) w.true_states.emplace_back(t % 2 == 0 ? kSilence : kOtherSpeaking);
  return w;
}

LabelClasses LabelClasses::duet() {
  return LabelClasses{{std::string(kSilence)}, {std::string(kQuiet)}};
}

TrialRecord run_duet(const GenerativeModel& model, const PrecisionSet& precisions, const DuetParams& params,
                     std::uint64_t seed, engine::SelectionMode mode) {
  TrialConfig config{model,
                     build_duet_world(params.trial_length, params.emission_noise),
                     precisions,
                     static_cast<std::size_t>(params.trial_length),
                     seed,
                     mode,
                     LabelClasses::duet()};
  return run_trial(config);
}

}  // namespace activelab::scenarios
