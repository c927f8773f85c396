#include <algorithm>
#include <cmath>
#include <limits>

#include "activelab/engine.hpp"
#include "activelab/error.hpp"
#include "activelab/rng.hpp"

namespace activelab::engine {

namespace {

void check_state_domain(const CategoricalDist& belief, const DomainPtr& states) {
  if (belief.size() != states->size()) {
    throw Error(ErrorKind::ShapeError, "belief has " + std::to_string(belief.size()) + " entries, model has " +
                                           std::to_string(states->size()) + " states");
  }
}

double kl_divergence(const CategoricalDist& q, const CategoricalDist& c) {
  double kl = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    kl += q[i] * (std::log(q[i]) - std::log(std::max(c[i], std::numeric_limits<double>::min())));
  }
  return kl;
}

}  // namespace

CategoricalDist state_update(const CategoricalDist& prior, std::size_t obs, const LikelihoodMatrix& likelihood,
                             double zeta) {
  if (!std::isfinite(zeta) || zeta < 0.0) throw Error(ErrorKind::InvalidPrecision, "zeta must be finite and >= 0");
  check_state_domain(prior, likelihood.states());
  if (obs >= likelihood.observations()->size()) throw Error(ErrorKind::UnknownLabel, "observation index out of range");
  if (zeta == 0.0) return prior;
  std::vector<double> post(prior.size());
  for (std::size_t s = 0; s < prior.size(); ++s) post[s] = prior[s] * std::pow(likelihood(s, obs), zeta);
  return normalize(post, prior.domain());
}

CategoricalDist state_update(const CategoricalDist& prior, std::string_view obs, const LikelihoodMatrix& likelihood,
                             double zeta) {
  return state_update(prior, likelihood.observations()->index(obs), likelihood, zeta);
}

CategoricalDist predict(const CategoricalDist& belief, std::size_t action, const TransitionSet& transitions) {
  check_state_domain(belief, transitions.states());
  if (action >= transitions.actions()->size()) throw Error(ErrorKind::UnknownLabel, "action index out of range");
  const auto& m = transitions.matrix(action);
  std::vector<double> next(belief.size(), 0.0);
  for (std::size_t s = 0; s < belief.size(); ++s) {
    if (belief[s] == 0.0) continue;
    for (std::size_t n = 0; n < next.size(); ++n) {
      next[n] += belief[s] * m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(n));
    }
  }
  return normalize(next, belief.domain());
}

CategoricalDist predict(const CategoricalDist& belief, std::string_view action, const TransitionSet& transitions) {
  return predict(belief, transitions.actions()->index(action), transitions);
}

CategoricalDist expected_observations(const CategoricalDist& belief, const LikelihoodMatrix& likelihood) {
  check_state_domain(belief, likelihood.states());
  std::vector<double> q(likelihood.observations()->size(), 0.0);
  for (std::size_t s = 0; s < belief.size(); ++s) {
    for (std::size_t o = 0; o < q.size(); ++o) q[o] += belief[s] * likelihood(s, o);
  }
  return normalize(q, likelihood.observations());
}

double expected_free_energy(const GenerativeModel& model, const Policy& policy, const CategoricalDist& belief,
                            std::size_t start) {
  if (policy.actions.empty()) throw Error(ErrorKind::InvalidConfig, "policy horizon must be >= 1");
  if (start > policy.actions.size()) throw Error(ErrorKind::HorizonExceeded, "EFE start beyond policy horizon");
  const auto& A = model.likelihood();
  std::vector<double> ambiguity(model.states()->size());
  for (std::size_t s = 0; s < ambiguity.size(); ++s) ambiguity[s] = A.row_entropy(s);

  double g = 0.0;
  CategoricalDist q = belief;
  for (std::size_t tau = start; tau < policy.actions.size(); ++tau) {
    q = predict(q, policy.actions[tau], model.transitions());
    g += kl_divergence(expected_observations(q, A), model.preferences());
    for (std::size_t s = 0; s < q.size(); ++s) g += q[s] * ambiguity[s];
  }
  return g;
}

CategoricalDist policy_posterior(const CategoricalDist& policy_prior, std::span<const double> efe, double gamma) {
  if (efe.size() != policy_prior.size()) throw Error(ErrorKind::ShapeError, "EFE vector length differs from policy prior");
  if (!std::isfinite(gamma) || gamma < 0.0) throw Error(ErrorKind::InvalidPrecision, "gamma must be finite and >= 0");
  const std::size_t n = efe.size();
  std::vector<double> logit(n, -std::numeric_limits<double>::infinity());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (policy_prior[i] <= 0.0) continue;
    logit[i] = gamma * (std::log(policy_prior[i]) - efe[i]);
    best = std::max(best, logit[i]);
  }
  std::vector<double> q(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (policy_prior[i] > 0.0) q[i] = std::exp(logit[i] - best);
  }
  return normalize(q, policy_prior.domain());
}

std::string select_action(const CategoricalDist& q_policy, const std::vector<Policy>& policies, std::size_t step,
                          SelectionMode mode, std::uint64_t seed) {
  if (q_policy.size() != policies.size()) throw Error(ErrorKind::ShapeError, "policy posterior does not match policy list");
  std::size_t chosen = 0;
  if (mode == SelectionMode::Argmax) {
    chosen = q_policy.argmax();
  } else {
    Rng rng(seed);
    double u = rng.uniform();
    double acc = 0.0;
    chosen = policies.size() - 1;
    for (std::size_t i = 0; i < q_policy.size(); ++i) {
      acc += q_policy[i];
      if (u < acc) {
        chosen = i;
        break;
      }
    }
    // rounding can leave u above the accumulated mass; fall back to the last supported policy
    while (q_policy[chosen] <= 0.0 && chosen > 0) --chosen;
  }
  const auto& actions = policies[chosen].actions;
  if (step >= actions.size()) {
    throw Error(ErrorKind::HorizonExceeded, "step " + std::to_string(step) + " >= horizon " + std::to_string(actions.size()));
  }
  return actions[step];
}

Percept percept_readout(const CategoricalDist& q_state, const LikelihoodMatrix& likelihood) {
  CategoricalDist predictive = expected_observations(q_state, likelihood);
  std::size_t idx = predictive.argmax();
  double confidence = predictive[idx];
  std::string label = predictive.domain()->label(idx);
  return Percept{idx, std::move(label), confidence, std::move(predictive)};
}

Plan plan(const CategoricalDist& belief, const GenerativeModel& model, const PrecisionSet& precisions,
          std::size_t step, SelectionMode mode, std::uint64_t seed) {
  precisions.validate();
  if (step >= model.horizon()) throw Error(ErrorKind::HorizonExceeded, "plan step beyond horizon");
  const auto& policies = model.policies();
  std::vector<double> efe(policies.size());
  for (std::size_t i = 0; i < policies.size(); ++i) efe[i] = expected_free_energy(model, policies[i], belief, step);
  CategoricalDist q_policy = policy_posterior(model.policy_prior(), efe, precisions.gamma);
  std::string action = select_action(q_policy, policies, step, mode, seed);

  // policy-averaged prediction; one predict per action, weighted by the
  // posterior mass of the policies that take it at this step
  const std::size_t n_actions = model.actions()->size();
  std::vector<double> action_mass(n_actions, 0.0);
  for (std::size_t i = 0; i < policies.size(); ++i) action_mass[model.policy_action(i, step)] += q_policy[i];
  std::vector<double> next(belief.size(), 0.0);
  for (std::size_t a = 0; a < n_actions; ++a) {
    if (action_mass[a] == 0.0) continue;
    CategoricalDist p = predict(belief, a, model.transitions());
    for (std::size_t s = 0; s < next.size(); ++s) next[s] += action_mass[a] * p[s];
  }
  return Plan{std::move(q_policy), normalize(next, belief.domain()), std::move(action)};
}

BeliefState initial_belief(const GenerativeModel& model, const PrecisionSet& precisions, SelectionMode mode,
                           std::uint64_t seed) {
  Plan p = plan(model.state_prior(), model, precisions, 0, mode, seed);
  return BeliefState{std::move(p.next_prior), std::move(p.q_policy), 0, std::move(p.action)};
}

StepResult step(const BeliefState& belief, std::string_view obs, const GenerativeModel& model,
                const PrecisionSet& precisions, SelectionMode mode, std::uint64_t seed) {
  precisions.validate();
  CategoricalDist posterior = state_update(belief.q_state, obs, model.likelihood(), precisions.zeta);
  Percept percept = percept_readout(posterior, model.likelihood());
  const std::size_t next_step = (belief.t + 1) % model.horizon();
  Plan p = plan(posterior, model, precisions, next_step, mode, seed);
  std::string action = p.action;
  BeliefState next{std::move(p.next_prior), std::move(p.q_policy), belief.t + 1, std::move(p.action)};
  return StepResult{std::move(next), std::move(posterior), std::move(percept), std::move(action)};
}

}  // namespace activelab::engine
