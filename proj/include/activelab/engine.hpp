#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "activelab/categorical.hpp"
#include "activelab/model.hpp"

namespace activelab::engine {

enum class SelectionMode { Argmax, Sample };

struct Percept {
  std::size_t index = 0;
  std::string label;
  double confidence = 0.0;
  CategoricalDist source_posterior;
};

/// Agent state carried between steps. `q_state` is the predictive prior for
/// step `t`; `action` is the action in effect at step `t`.
struct BeliefState {
  CategoricalDist q_state;
  CategoricalDist q_policy;
  std::size_t t = 0;
  std::string action;
};

/// Precision-weighted Bayes: posterior ∝ prior ⊙ A[:, obs]^zeta.
/// zeta = 0 returns the prior unchanged; zeta = 1 is exact conditioning.
CategoricalDist state_update(const CategoricalDist& prior, std::string_view obs, const LikelihoodMatrix& likelihood,
                             double zeta);
CategoricalDist state_update(const CategoricalDist& prior, std::size_t obs, const LikelihoodMatrix& likelihood,
                             double zeta);

/// belief mapped through the action's transition matrix.
CategoricalDist predict(const CategoricalDist& belief, std::string_view action, const TransitionSet& transitions);
CategoricalDist predict(const CategoricalDist& belief, std::size_t action, const TransitionSet& transitions);

/// q(o) = sum_s belief(s) A[s, o].
CategoricalDist expected_observations(const CategoricalDist& belief, const LikelihoodMatrix& likelihood);

/// Risk plus ambiguity summed over the policy's actions from epoch step
/// `start` to the end of the horizon, rolling `belief` forward with the
/// model's (prior-weighted) transitions:
///   G = sum_tau KL(q(o_tau) || C) + sum_s q(s_tau) H(A[s, .])
double expected_free_energy(const GenerativeModel& model, const Policy& policy, const CategoricalDist& belief,
                            std::size_t start = 0);

/// q(pi) ∝ exp(gamma * (log E(pi) - G(pi))) over E's support.
CategoricalDist policy_posterior(const CategoricalDist& policy_prior, std::span<const double> efe, double gamma);

/// Action at epoch step `step` of the maximal policy (argmax, lowest index on
/// ties) or of a policy drawn with the seeded generator (sample).
std::string select_action(const CategoricalDist& q_policy, const std::vector<Policy>& policies, std::size_t step,
                          SelectionMode mode, std::uint64_t seed);

/// Percept = argmax of the posterior predictive over observations.
Percept percept_readout(const CategoricalDist& q_state, const LikelihoodMatrix& likelihood);

/// Plan for epoch step `step` from `belief`: the policy posterior and the
/// policy-averaged predictive prior sum_pi q(pi) predict(belief, pi[step]).
struct Plan {
  CategoricalDist q_policy;
  CategoricalDist next_prior;
  std::string action;
};
Plan plan(const CategoricalDist& belief, const GenerativeModel& model, const PrecisionSet& precisions,
          std::size_t step, SelectionMode mode, std::uint64_t seed);

/// Belief before the first observation: the plan for epoch step 0 made from D.
BeliefState initial_belief(const GenerativeModel& model, const PrecisionSet& precisions, SelectionMode mode,
                           std::uint64_t seed);

struct StepResult {
  BeliefState next;
  CategoricalDist posterior;
  Percept percept;
  std::string action;
};

/// One perception-action cycle: state_update, percept_readout, EFE for every
/// policy from the posterior, policy_posterior, select_action, then the
/// policy-averaged prediction that becomes the prior of step t + 1.
StepResult step(const BeliefState& belief, std::string_view obs, const GenerativeModel& model,
                const PrecisionSet& precisions, SelectionMode mode, std::uint64_t seed);

}  // namespace activelab::engine
