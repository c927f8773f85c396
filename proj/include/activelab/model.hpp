#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "activelab/categorical.hpp"

namespace activelab {

/// P(observation | state): rows are states, columns observations. Entries
/// are floored at kFloor and rows renormalized so every log-likelihood is finite.
class LikelihoodMatrix {
 public:
  static constexpr double kFloor = 1e-6;

  LikelihoodMatrix(DomainPtr states, DomainPtr observations, const Eigen::MatrixXd& values);

  const DomainPtr& states() const noexcept { return states_; }
  const DomainPtr& observations() const noexcept { return observations_; }
  const Eigen::MatrixXd& matrix() const noexcept { return values_; }
  double operator()(std::size_t state, std::size_t obs) const { return values_(state, obs); }
  /// Entropy of the observation distribution emitted by `state`.
  double row_entropy(std::size_t state) const;

 private:
  DomainPtr states_;
  DomainPtr observations_;
  Eigen::MatrixXd values_;
};

/// One row-stochastic state transition matrix per action (row = current state).
class TransitionSet {
 public:
  TransitionSet(DomainPtr states, DomainPtr actions, std::vector<Eigen::MatrixXd> matrices);

  const DomainPtr& states() const noexcept { return states_; }
  const DomainPtr& actions() const noexcept { return actions_; }
  const Eigen::MatrixXd& matrix(std::size_t action) const { return matrices_.at(action); }
  const Eigen::MatrixXd& matrix(std::string_view action) const { return matrices_.at(actions_->index(action)); }

  /// Each row reweighted by `weights`^exponent over next states and renormalized.
  TransitionSet reweighted(const CategoricalDist& weights, double exponent = 1.0) const;

 private:
  DomainPtr states_;
  DomainPtr actions_;
  std::vector<Eigen::MatrixXd> matrices_;
};

struct Policy {
  std::string id;
  std::vector<std::string> actions;

  bool operator==(const Policy&) const = default;
};

/// Sensory precision (exponent on the likelihood) and prior precision over
/// policies (inverse temperature of the policy softmax).
struct PrecisionSet {
  double zeta = 1.0;
  double gamma = 1.0;

  /// Throws InvalidPrecision when either value is negative or non-finite.
  void validate() const;
  bool operator==(const PrecisionSet&) const = default;
};

/// The agent's model of its world.
///
/// `transitions()` returns the prior-weighted transitions the agent actually
/// predicts with: B_D(a)[s, s'] ∝ B(a)[s, s'] * D(s')^k, k = prior_weight.
/// With k > 0 the perceptual prior D shapes every predicted state, not only
/// the first one.
class GenerativeModel {
 public:
  /// `prior_weight` is the exponent on D in the prediction weighting; 0 makes
  /// D a pure initial-state prior.
  GenerativeModel(LikelihoodMatrix likelihood, TransitionSet transitions, CategoricalDist preferences,
                  CategoricalDist state_prior, std::vector<Policy> policies, CategoricalDist policy_prior,
                  double prior_weight = 1.0);

  const DomainPtr& states() const noexcept { return likelihood_.states(); }
  const DomainPtr& observations() const noexcept { return likelihood_.observations(); }
  const DomainPtr& actions() const noexcept { return base_transitions_.actions(); }
  const DomainPtr& policy_ids() const noexcept { return policy_prior_.domain(); }

  const LikelihoodMatrix& likelihood() const noexcept { return likelihood_; }
  const TransitionSet& base_transitions() const noexcept { return base_transitions_; }
  const TransitionSet& transitions() const noexcept { return effective_transitions_; }
  const CategoricalDist& preferences() const noexcept { return preferences_; }
  const CategoricalDist& state_prior() const noexcept { return state_prior_; }
  const std::vector<Policy>& policies() const noexcept { return policies_; }
  const CategoricalDist& policy_prior() const noexcept { return policy_prior_; }
  std::size_t horizon() const noexcept { return horizon_; }
  double prior_weight() const noexcept { return prior_weight_; }

  /// Action index of policy `policy` at epoch step `step`.
  std::size_t policy_action(std::size_t policy, std::size_t step) const {
    return policy_action_index_.at(policy).at(step);
  }
  /// Throws UnknownLabel.
  std::size_t policy_index(std::string_view id) const { return policy_prior_.domain()->index(id); }

  GenerativeModel with_state_prior(CategoricalDist prior) const;
  /// Policy prior is rebuilt over `policy_prior`'s domain, which must list the policy ids in order.
  GenerativeModel with_policies(std::vector<Policy> policies, CategoricalDist policy_prior) const;

 private:
  LikelihoodMatrix likelihood_;
  TransitionSet base_transitions_;
  TransitionSet effective_transitions_;
  CategoricalDist preferences_;
  CategoricalDist state_prior_;
  std::vector<Policy> policies_;
  CategoricalDist policy_prior_;
  double prior_weight_ = 1.0;
  std::size_t horizon_ = 0;
  std::vector<std::vector<std::size_t>> policy_action_index_;
};

/// Uniform distribution over a domain.
CategoricalDist uniform(DomainPtr domain);

/// Domain built from the ids of `policies`.
DomainPtr policy_domain(const std::vector<Policy>& policies);

}  // namespace activelab
