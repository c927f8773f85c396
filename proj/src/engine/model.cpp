#include "activelab/model.hpp"

#include <cmath>

#include "activelab/error.hpp"

namespace activelab {

namespace {

void require_finite_nonnegative(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = m(r, c);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::DegenerateDistribution, std::string(what) + " has a negative or non-finite entry");
      }
    }
    if (!(m.row(r).sum() > 0.0)) throw Error(ErrorKind::DegenerateDistribution, std::string(what) + " has a zero row");
  }
}

void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) /= m.row(r).sum();
}

}  // namespace

LikelihoodMatrix::LikelihoodMatrix(DomainPtr states, DomainPtr observations, const Eigen::MatrixXd& values)
    : states_(std::move(states)), observations_(std::move(observations)), values_(values) {
  if (static_cast<std::size_t>(values_.rows()) != states_->size() ||
      static_cast<std::size_t>(values_.cols()) != observations_->size()) {
    throw Error(ErrorKind::ShapeError, "likelihood must be |states| x |observations|");
  }
  require_finite_nonnegative(values_, "likelihood");
  normalize_rows(values_);
  bool floored = false;
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
      if (values_(r, c) < kFloor) {
        values_(r, c) = kFloor;
        floored = true;
      }
    }
  }
  if (floored) normalize_rows(values_);
}

double LikelihoodMatrix::row_entropy(std::size_t state) const {
  double h = 0.0;
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    double p = values_(static_cast<Eigen::Index>(state), c);
    h -= p * std::log(p);
  }
  return h;
}

TransitionSet::TransitionSet(DomainPtr states, DomainPtr actions, std::vector<Eigen::MatrixXd> matrices)
    : states_(std::move(states)), actions_(std::move(actions)), matrices_(std::move(matrices)) {
  if (matrices_.size() != actions_->size()) throw Error(ErrorKind::ShapeError, "one transition matrix per action required");
  const auto n = static_cast<Eigen::Index>(states_->size());
  for (auto& m : matrices_) {
    if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::ShapeError, "transition matrix must be |states| x |states|");
    require_finite_nonnegative(m, "transition matrix");
    normalize_rows(m);
  }
}

TransitionSet TransitionSet::reweighted(const CategoricalDist& weights, double exponent) const {
  if (weights.size() != states_->size()) throw Error(ErrorKind::ShapeError, "prior weights do not match state domain");
  Eigen::RowVectorXd w(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) w(static_cast<Eigen::Index>(i)) = exponent == 0.0 ? 1.0 : std::pow(weights[i], exponent);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(matrices_.size());
  for (const auto& m : matrices_) {
    Eigen::MatrixXd t = m.array().rowwise() * w.array();
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      double s = t.row(r).sum();
      // a prior with zero mass on every reachable state keeps the raw row
      if (s > 0.0) {
        t.row(r) /= s;
      } else {
        t.row(r) = m.row(r);
      }
    }
    out.push_back(std::move(t));
  }
  return TransitionSet(states_, actions_, std::move(out));
}

void PrecisionSet::validate() const {
  if (!std::isfinite(zeta) || zeta < 0.0) throw Error(ErrorKind::InvalidPrecision, "zeta must be finite and >= 0");
  if (!std::isfinite(gamma) || gamma < 0.0) throw Error(ErrorKind::InvalidPrecision, "gamma must be finite and >= 0");
}

GenerativeModel::GenerativeModel(LikelihoodMatrix likelihood, TransitionSet transitions, CategoricalDist preferences,
                                 CategoricalDist state_prior, std::vector<Policy> policies, CategoricalDist policy_prior,
                                 double prior_weight)
    : likelihood_(std::move(likelihood)),
      base_transitions_(std::move(transitions)),
      effective_transitions_(base_transitions_),
      preferences_(std::move(preferences)),
      state_prior_(std::move(state_prior)),
      policies_(std::move(policies)),
      policy_prior_(std::move(policy_prior)),
      prior_weight_(prior_weight) {
  if (!std::isfinite(prior_weight_) || prior_weight_ < 0.0) throw Error(ErrorKind::InvalidConfig, "prior weight must be >= 0");
  if (!(*base_transitions_.states() == *likelihood_.states())) {
    throw Error(ErrorKind::ShapeError, "transition and likelihood state domains differ");
  }
  if (!(*preferences_.domain() == *likelihood_.observations())) {
    throw Error(ErrorKind::ShapeError, "preferences must be over observations");
  }
  if (!(*state_prior_.domain() == *likelihood_.states())) throw Error(ErrorKind::ShapeError, "state prior must be over states");
  if (policies_.empty()) throw Error(ErrorKind::EmptyPolicySpace, "a model needs at least one policy");
  if (policy_prior_.size() != policies_.size()) throw Error(ErrorKind::ShapeError, "policy prior must cover every policy");
  horizon_ = policies_.front().actions.size();
  if (horizon_ == 0) throw Error(ErrorKind::InvalidConfig, "policy horizon must be >= 1");
  policy_action_index_.reserve(policies_.size());
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    const auto& p = policies_[i];
    if (policy_prior_.domain()->label(i) != p.id) throw Error(ErrorKind::ShapeError, "policy prior order differs from policy list");
    if (p.actions.size() != horizon_) throw Error(ErrorKind::InvalidConfig, "policies must share one horizon");
    std::vector<std::size_t> idx;
    idx.reserve(horizon_);
    for (const auto& a : p.actions) idx.push_back(actions()->index(a));
    policy_action_index_.push_back(std::move(idx));
  }
  effective_transitions_ = base_transitions_.reweighted(state_prior_, prior_weight_);
}

GenerativeModel GenerativeModel::with_state_prior(CategoricalDist prior) const {
  return GenerativeModel(likelihood_, base_transitions_, preferences_, std::move(prior), policies_, policy_prior_,
                         prior_weight_);
}

GenerativeModel GenerativeModel::with_policies(std::vector<Policy> policies, CategoricalDist policy_prior) const {
  return GenerativeModel(likelihood_, base_transitions_, preferences_, state_prior_, std::move(policies),
                         std::move(policy_prior), prior_weight_);
}

CategoricalDist uniform(DomainPtr domain) {
  std::vector<double> p(domain->size(), 1.0 / static_cast<double>(domain->size()));
  return normalize(p, std::move(domain));
}

DomainPtr policy_domain(const std::vector<Policy>& policies) {
  std::vector<std::string> ids;
  ids.reserve(policies.size());
  for (const auto& p : policies) ids.push_back(p.id);
  return make_domain(std::move(ids));
}

}  // namespace activelab
