#include <algorithm>
#include <numeric>

#include "activelab/error.hpp"
#include "activelab/scenarios.hpp"

namespace activelab::scenarios {

namespace {

constexpr std::string_view kSingAlong = "sing_along";

std::vector<std::string> word_labels(int n_words) {
  std::vector<std::string> out;
  for (int i = 1; i <= n_words; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

void require_words(int n_words) {
  if (n_words < 2 || n_words > 5) throw Error(ErrorKind::InvalidConfig, "song needs 2 <= n_words <= 5");
}

// Believed singing order as word indices.
std::vector<std::size_t> believed_order(OrderBelief belief, int n_words) {
  std::vector<std::size_t> order(static_cast<std::size_t>(n_words));
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (belief == OrderBelief::Altered) std::swap(order[order.size() - 2], order[order.size() - 1]);
  return order;
}

}  // namespace

std::string_view to_string(OrderBelief b) noexcept { return b == OrderBelief::Altered ? "altered" : "standard"; }

GenerativeModel build_song_model(OrderBelief belief, int n_words, const SongParams& params) {
  require_words(n_words);
  if (params.horizon < 1) throw Error(ErrorKind::InvalidConfig, "song horizon must be >= 1");
  if (params.horizon > 8) throw Error(ErrorKind::PolicySpaceTooLarge, "enumerated policy space needs horizon <= 8");
  const double beta = params.transition_reliability;
  const double r = params.likelihood_reliability;
  if (!(beta >= 0.0 && beta <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "song reliabilities must lie in [0, 1]");
  }
  const auto n = static_cast<Eigen::Index>(n_words);
  auto states = make_domain(word_labels(n_words));
  auto observations = make_domain(word_labels(n_words));
  auto actions = make_domain({std::string(kListen), std::string(kSingAlong)});

  const double off_a = (1.0 - r) / static_cast<double>(n - 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, off_a);
  a.diagonal().setConstant(r);

  const auto order = believed_order(belief, n_words);
  const double off_b = (1.0 - beta) / static_cast<double>(n - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n, n, off_b);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto from = static_cast<Eigen::Index>(order[k]);
    auto to = static_cast<Eigen::Index>(order[(k + 1) % order.size()]);
    b(from, to) = beta;
  }
  // singing along does not change what the partner sings
  TransitionSet transitions(states, actions, {b, b});

  // the word believed to precede the song's opening
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  d[order.back()] = 1.0;

  std::vector<Policy> policies;
  const std::size_t count = std::size_t{1} << params.horizon;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> acts;
    for (int k = params.horizon - 1; k >= 0; --k) acts.emplace_back((i >> k) & 1U ? kSingAlong : kListen);
    policies.push_back(Policy{policy_id(acts), std::move(acts)});
  }
  auto e = uniform(policy_domain(policies));
  return GenerativeModel(LikelihoodMatrix(states, observations, a), std::move(transitions), uniform(observations),
                         normalize(d, states), std::move(policies), std::move(e), 0.0);
}

WorldScript build_song_world(int n_words, int repeats) {
  require_words(n_words);
  if (repeats < 1) throw Error(ErrorKind::InvalidConfig, "song needs repeats >= 1");
  WorldScript w;
  auto labels = word_labels(n_words);
  w.states = make_domain(labels);
  w.observations = make_domain(labels);
  w.emission = labels;
  for (int k = 0; k < repeats; ++k) w.true_states.insert(w.true_states.end(), labels.begin(), labels.end());
  return w;
}

}  // namespace activelab::scenarios
