#include <set>

#include "activelab/error.hpp"
#include "activelab/rng.hpp"
#include "activelab/scenarios.hpp"

namespace activelab::scenarios {

TrialRecord run_trial(const TrialConfig& config) {
  const auto& model = config.model;
  const auto& world = config.world;
  const std::size_t length = config.length == 0 ? world.length() : config.length;
  if (length == 0 || length > world.length()) throw Error(ErrorKind::InvalidConfig, "trial length exceeds the world script");
  if (!(*world.observations == *model.observations())) {
    throw Error(ErrorKind::ShapeError, "world and model observation domains differ");
  }
  config.precisions.validate();

  const auto observations = world.observations_for(mix_seed(config.seed, 0));
  engine::BeliefState belief = engine::initial_belief(model, config.precisions, config.mode, mix_seed(config.seed, 1));

  TrialRecord record;
  record.steps.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    engine::StepResult r =
        engine::step(belief, observations[t], model, config.precisions, config.mode, mix_seed(config.seed, t + 2));
    const std::string& world_state = world.true_states[t];
    const bool silent_world = config.classes.silence_states.count(world_state) > 0;
    const bool silent_percept = config.classes.silence_observations.count(r.percept.label) > 0;
    const bool classified = !config.classes.silence_states.empty();

    TrialStep s{world_state,
                observations[t],
                r.posterior,
                r.percept,
                belief.action,
                r.next.q_policy.domain()->label(r.next.q_policy.argmax()),
                classified && silent_world && !silent_percept,
                classified && !silent_world && silent_percept,
                r.percept.label != world.clean_observation(t)};
    record.hallucinations += s.hallucination;
    record.misses += s.miss;
    record.content_errors += s.content_error;
    if (classified) {
      if (silent_world) {
        ++record.silent_steps;
      } else {
        ++record.sound_steps;
      }
    }
    record.steps.push_back(std::move(s));
    belief = std::move(r.next);
  }
  return record;
}

double hallucination_rate(const TrialRecord& record) {
  if (record.silent_steps == 0) throw Error(ErrorKind::UndefinedRate, "no silence-class world step");
  return static_cast<double>(record.hallucinations) / static_cast<double>(record.silent_steps);
}

double miss_rate(const TrialRecord& record) {
  if (record.sound_steps == 0) return 0.0;
  return static_cast<double>(record.misses) / static_cast<double>(record.sound_steps);
}

PolicySpaceSize policy_space_size_metric(const GenerativeModel& model, const std::vector<TrialRecord>& records) {
  std::set<std::string> used;
  for (const auto& r : records) {
    for (const auto& s : r.steps) used.insert(s.argmax_policy);
  }
  return PolicySpaceSize{model.policies().size(), used.size()};
}

}  // namespace activelab::scenarios
