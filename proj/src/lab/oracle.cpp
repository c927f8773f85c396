#include <cmath>

#include "activelab/engine.hpp"
#include "activelab/error.hpp"
#include "activelab/lab.hpp"

namespace activelab::lab {

namespace {

constexpr double kMaxPaths = 1e6;

// B_D(a)[s, s'] ∝ B(a)[s, s'] D(s')^k, written out without TransitionSet::reweighted.
std::vector<std::vector<std::vector<double>>> weighted_transitions(const GenerativeModel& model) {
  const auto& base = model.base_transitions();
  const auto& d = model.state_prior();
  const double k = model.prior_weight();
  const std::size_t n = model.states()->size();
  std::vector<std::vector<std::vector<double>>> out;
  for (std::size_t a = 0; a < model.actions()->size(); ++a) {
    const auto& m = base.matrix(a);
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
      double total = 0.0;
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        double w = k == 0.0 ? 1.0 : std::pow(d[s2], k);
        rows[s][s2] = m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2)) * w;
        total += rows[s][s2];
      }
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        rows[s][s2] = total > 0.0 ? rows[s][s2] / total : m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2));
      }
    }
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace

std::vector<CategoricalDist> oracle_exact_posterior(const GenerativeModel& model,
                                                    const std::vector<std::string>& action_seq,
                                                    const std::vector<std::string>& obs_seq, double zeta) {
  if (action_seq.size() != obs_seq.size()) throw Error(ErrorKind::ShapeError, "action and observation sequences differ in length");
  if (!std::isfinite(zeta) || zeta < 0.0) throw Error(ErrorKind::InvalidPrecision, "zeta must be finite and >= 0");
  const std::size_t n = model.states()->size();
  const std::size_t T = obs_seq.size();
  if (std::pow(static_cast<double>(n), static_cast<double>(T)) > kMaxPaths) {
    throw Error(ErrorKind::OracleInfeasible, "state paths exceed 10^6");
  }
  std::vector<std::size_t> obs(T), act(T);
  for (std::size_t t = 0; t < T; ++t) {
    obs[t] = model.observations()->index(obs_seq[t]);
    act[t] = model.actions()->index(action_seq[t]);
  }
  const auto b = weighted_transitions(model);
  const auto& a = model.likelihood();
  const auto& d = model.state_prior();

  std::vector<CategoricalDist> out;
  out.reserve(T);
  std::vector<std::size_t> path;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> marginal(n, 0.0);
    std::size_t count = 1;
    for (std::size_t k = 0; k <= t; ++k) count *= n;
    path.assign(t + 1, 0);
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k <= t; ++k) {
        path[k] = c % n;
        c /= n;
      }
      double w = d[path[0]] * std::pow(a(path[0], obs[0]), zeta);
      for (std::size_t k = 1; k <= t && w > 0.0; ++k) {
        w *= b[act[k - 1]][path[k - 1]][path[k]] * std::pow(a(path[k], obs[k]), zeta);
      }
      marginal[path[t]] += w;
    }
    out.push_back(normalize(marginal, model.states()));
  }
  return out;
}

std::vector<CategoricalDist> engine_filter(const GenerativeModel& model, const std::vector<std::string>& action_seq,
                                           const std::vector<std::string>& obs_seq, double zeta) {
  if (action_seq.size() != obs_seq.size()) throw Error(ErrorKind::ShapeError, "action and observation sequences differ in length");
  std::vector<CategoricalDist> out;
  out.reserve(obs_seq.size());
  CategoricalDist q = model.state_prior();
  for (std::size_t t = 0; t < obs_seq.size(); ++t) {
    CategoricalDist post = engine::state_update(q, obs_seq[t], model.likelihood(), zeta);
    q = engine::predict(post, action_seq[t], model.transitions());
    out.push_back(std::move(post));
  }
  return out;
}

GenerativeModel random_model(Rng& rng, std::size_t n_states, std::size_t n_obs, std::size_t n_actions,
                             std::size_t horizon, double prior_weight) {
  // cubed uniforms skew mass onto a few entries; some entries are exactly zero
  auto row = [&](std::size_t n) {
    std::vector<double> r(n);
    double total = 0.0;
    for (auto& v : r) {
      double u = rng.uniform();
      v = rng.uniform() < 0.2 ? 0.0 : u * u * u;
      total += v;
    }
    if (total == 0.0) r[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n] = 1.0;
    return r;
  };
  auto fill = [&](std::size_t rows, std::size_t cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      auto r = row(cols);
      for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
    }
    return m;
  };
  auto states = Domain::indexed(n_states);
  auto observations = Domain::indexed(n_obs);
  auto actions = Domain::indexed(n_actions);
  std::vector<Eigen::MatrixXd> b;
  for (std::size_t a = 0; a < n_actions; ++a) b.push_back(fill(n_states, n_states));

  std::vector<Policy> policies;
  std::size_t count = 1;
  for (std::size_t k = 0; k < horizon; ++k) count *= n_actions;
  for (std::size_t i = 0; i < count; ++i) {
    Policy p;
    std::size_t c = i;
    for (std::size_t k = 0; k < horizon; ++k) {
      p.actions.push_back(actions->label(c % n_actions));
      p.id += (k ? "-" : "") + p.actions.back();
      c /= n_actions;
    }
    policies.push_back(std::move(p));
  }
  auto pdom = policy_domain(policies);
  return GenerativeModel(LikelihoodMatrix(states, observations, fill(n_states, n_obs)),
                         TransitionSet(states, actions, std::move(b)), normalize(row(n_obs), observations),
                         normalize(row(n_states), states), std::move(policies), normalize(row(count), pdom),
                         prior_weight);
}

}  // namespace activelab::lab
