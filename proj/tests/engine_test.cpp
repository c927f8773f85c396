#include <cmath>
#include <vector>

#include "activelab/engine.hpp"
#include "activelab/lab.hpp"
#include "activelab/rng.hpp"
#include "activelab/scenarios.hpp"
#include "support.hpp"

using namespace activelab;

namespace {

DomainPtr sound_states() { return make_domain({"sound", "silence"}); }
DomainPtr hear_obs() { return make_domain({"hear", "quiet"}); }

LikelihoodMatrix symmetric_likelihood(double r = 0.9) {
  Eigen::MatrixXd a(2, 2);
  a << r, 1.0 - r, 1.0 - r, r;
  return LikelihoodMatrix(sound_states(), hear_obs(), a);
}

CategoricalDist dist(DomainPtr d, std::vector<double> p) { return CategoricalDist(std::move(d), std::move(p)); }

GenerativeModel one_step_model(const Eigen::MatrixXd& a, std::vector<double> c) {
  auto states = make_domain({"s0", "s1"});
  auto obs = make_domain({"o0", "o1"});
  auto actions = make_domain({"stay", "flip"});
  Eigen::MatrixXd stay = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  std::vector<Policy> policies{{"stay", {"stay"}}, {"flip", {"flip"}}};
  auto pdom = policy_domain(policies);
  return GenerativeModel(LikelihoodMatrix(states, obs, a), TransitionSet(states, actions, {stay, flip}),
                         normalize(c, obs), dist(states, {1.0, 0.0}), policies, uniform(pdom), 0.0);
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("normalize scales to unit mass and rejects degenerate input") {
  auto a = normalize(std::vector<double>{2, 2});
  CHECK(a[0] == 0.5);
  CHECK(a[1] == 0.5);
  auto b = normalize(std::vector<double>{1, 0, 3});
  CHECK(b[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b[1] == 0.0);
  CHECK(b[2] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_KIND(normalize(std::vector<double>{0, 0}), ErrorKind::DegenerateDistribution);
  CHECK_THROWS_KIND(normalize(std::vector<double>{1, -1, 2}), ErrorKind::DegenerateDistribution);
}

TEST_CASE("domains reject duplicate labels and unknown lookups") {
  CHECK_THROWS_KIND(make_domain({"a", "a"}), ErrorKind::InvalidConfig);
  auto d = make_domain({"a", "b"});
  CHECK(d->index("b") == 1);
  CHECK_THROWS_KIND(d->index("c"), ErrorKind::UnknownLabel);
}

TEST_CASE("likelihood entries are floored and rows renormalized") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  LikelihoodMatrix m(sound_states(), hear_obs(), a);
  CHECK(m(0, 1) > 0.0);
  CHECK(m(0, 0) + m(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isfinite(std::log(m(1, 0))));
}

TEST_CASE("state_update with full precision is Bayes' rule") {
  auto post = engine::state_update(dist(sound_states(), {0.5, 0.5}), "hear", symmetric_likelihood(), 1.0);
  CHECK(post[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("state_update with zero precision returns the prior") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> p{rng.uniform() + 0.01, rng.uniform() + 0.01};
    auto prior = normalize(p, sound_states());
    for (const char* o : {"hear", "quiet"}) CHECK(engine::state_update(prior, o, symmetric_likelihood(), 0.0) == prior);
  }
}

TEST_CASE("low sensory precision keeps a strong prior against the evidence") {
  auto post = engine::state_update(dist(sound_states(), {0.9, 0.1}), "quiet", symmetric_likelihood(), 0.2);
  // 0.9 * 0.1^0.2 against 0.1 * 0.9^0.2
  CHECK(post[0] == doctest::Approx(0.8529313603914379).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.14706863960856217).epsilon(1e-12));
  auto percept = engine::percept_readout(post, symmetric_likelihood());
  CHECK(percept.label == "hear");
  CHECK(percept.source_posterior[0] == doctest::Approx(0.7823450883131503).epsilon(1e-12));
  CHECK(percept.confidence == percept.source_posterior[0]);
}

TEST_CASE("state_update rejects bad input") {
  auto prior = dist(sound_states(), {0.5, 0.5});
  CHECK_THROWS_KIND(engine::state_update(prior, "roar", symmetric_likelihood(), 1.0), ErrorKind::UnknownLabel);
  CHECK_THROWS_KIND(engine::state_update(prior, "hear", symmetric_likelihood(), NAN), ErrorKind::InvalidPrecision);
  CHECK_THROWS_KIND(engine::state_update(prior, "hear", symmetric_likelihood(), -1.0), ErrorKind::InvalidPrecision);
}

TEST_CASE("state_update moves toward the exact posterior as precision grows") {
  auto prior = dist(sound_states(), {0.9, 0.1});
  double last = 1.0;
  for (double z = 0.0; z <= 2.0; z += 0.1) {
    double p = engine::state_update(prior, "quiet", symmetric_likelihood(), z)[0];
    CHECK(p <= last);
    last = p;
  }
}

TEST_CASE("predict maps a belief through the action's matrix") {
  auto states = sound_states();
  auto actions = make_domain({"id", "swap", "mix"});
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd swap(2, 2), mix(2, 2);
  swap << 0, 1, 1, 0;
  mix << 0.2, 0.8, 0.7, 0.3;
  TransitionSet b(states, actions, {id, swap, mix});
  CHECK(engine::predict(dist(states, {1, 0}), "id", b) == dist(states, {1, 0}));
  CHECK(approx_equal(engine::predict(dist(states, {0.5, 0.5}), "swap", b), dist(states, {0.5, 0.5})));
  auto m = engine::predict(dist(states, {1, 0}), "mix", b);
  CHECK(m[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_KIND(engine::predict(dist(states, {1, 0}), "jump", b), ErrorKind::UnknownLabel);
}

TEST_CASE("expected_observations is the belief-weighted row sum") {
  auto a = symmetric_likelihood();
  CHECK(approx_equal(engine::expected_observations(dist(sound_states(), {1, 0}), a), dist(hear_obs(), {0.9, 0.1})));
  CHECK(approx_equal(engine::expected_observations(dist(sound_states(), {0.5, 0.5}), a), dist(hear_obs(), {0.5, 0.5})));
  CHECK(approx_equal(engine::expected_observations(dist(sound_states(), {0.8, 0.2}), a), dist(hear_obs(), {0.74, 0.26})));
  CHECK_THROWS_KIND(engine::expected_observations(normalize(std::vector<double>{1, 1, 1}), a), ErrorKind::ShapeError);
}

TEST_CASE("expected free energy vanishes when predictions meet preferences") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  auto model = one_step_model(a, {1.0, 1e-12});
  double g = engine::expected_free_energy(model, model.policies()[0], model.state_prior());
  CHECK(std::abs(g) < 1e-4);  // only the likelihood floor contributes
}

TEST_CASE("expected free energy prefers the policy whose outcomes sit closer to C") {
  Eigen::MatrixXd a(2, 2);
  a << 0.9, 0.1, 0.1, 0.9;
  auto model = one_step_model(a, {0.8, 0.2});
  double stay = engine::expected_free_energy(model, model.policies()[0], model.state_prior());
  double flip = engine::expected_free_energy(model, model.policies()[1], model.state_prior());
  CHECK(stay < flip);
}

TEST_CASE("expected free energy on the duet fixture") {
  // frozen from an independent evaluation; see docs/fixtures.md
  struct Row {
    double d;
    const char* policy;
    double g;
  };
  const Row rows[] = {{0.9, "LLLL", 2.07702809815794},   {0.9, "SLSL", 2.0008794267802426},
                      {0.9, "SSSS", 1.924730755402545},  {0.9, "LLLS", 2.0389537624690908},
                      {0.5, "LLLL", 1.304255934403942},  {0.5, "SLSL", 2.09990363557213},
                      {0.5, "SSSS", 2.895551336740318},  {0.5, "LLLS", 1.7020797849880354}};
  for (const auto& r : rows) {
    auto model = scenarios::build_duet_model(r.d, scenarios::PolicyVariant::Full);
    const auto& p = model.policies()[model.policy_index(r.policy)];
    CHECK(engine::expected_free_energy(model, p, model.state_prior()) == doctest::Approx(r.g).epsilon(1e-12));
  }
}

TEST_CASE("policy posterior examples") {
  auto e = uniform(Domain::indexed(2));
  std::vector<double> g{1.0, 2.0};
  auto q0 = engine::policy_posterior(e, g, 0.0);
  CHECK(q0[0] == 0.5);
  auto q1 = engine::policy_posterior(e, g, 1.0);
  CHECK(q1[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(q1[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(engine::policy_posterior(e, g, 20.0)[0] > 0.999);
  std::vector<double> short_g{1.0};
  CHECK_THROWS_KIND(engine::policy_posterior(e, short_g, 1.0), ErrorKind::ShapeError);
}

TEST_CASE("policy posterior: zero precision is uniform on E's support, entropy falls with precision") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + trial % 6;
    std::vector<double> w(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (trial % 3 == 0 && i == 0) ? 0.0 : rng.uniform() + 1e-3;
      g[i] = 4.0 * rng.uniform();
    }
    auto e = normalize(w);
    auto flat = engine::policy_posterior(e, g, 0.0);
    std::size_t support = 0;
    for (double x : w) support += x > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(flat[i] == doctest::Approx(w[i] > 0.0 ? 1.0 / static_cast<double>(support) : 0.0).epsilon(1e-12));
    }
    double last = flat.entropy();
    for (double gamma = 0.25; gamma <= 16.0; gamma *= 2.0) {
      auto q = engine::policy_posterior(e, g, gamma);
      double sum = 0.0;
      for (double x : q.probs()) sum += x;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      CHECK(q.entropy() <= last + 1e-12);
      last = q.entropy();
    }
  }
}

TEST_CASE("select_action") {
  std::vector<Policy> policies{{"LL", {"listen", "listen"}}, {"SS", {"speak", "speak"}}};
  auto dom = policy_domain(policies);
  CHECK(engine::select_action(CategoricalDist(dom, {1, 0}), policies, 0, engine::SelectionMode::Argmax, 0) == "listen");
  CHECK(engine::select_action(CategoricalDist(dom, {0.5, 0.5}), policies, 1, engine::SelectionMode::Argmax, 0) == "listen");
  CHECK_THROWS_KIND(engine::select_action(CategoricalDist(dom, {1, 0}), policies, 2, engine::SelectionMode::Argmax, 0),
                    ErrorKind::HorizonExceeded);

  CategoricalDist q(dom, {0.3, 0.7});
  // frozen draws of the seeded sampler
  CHECK(engine::select_action(q, policies, 0, engine::SelectionMode::Sample, 42) == "speak");
  CHECK(engine::select_action(q, policies, 0, engine::SelectionMode::Sample, 7) == "speak");
  CHECK(engine::select_action(q, policies, 0, engine::SelectionMode::Sample, 1) == "listen");
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(engine::select_action(q, policies, 0, engine::SelectionMode::Sample, s) ==
          engine::select_action(q, policies, 0, engine::SelectionMode::Sample, s));
  }
}

TEST_CASE("percept readout breaks ties toward the first label") {
  auto p = engine::percept_readout(dist(sound_states(), {0.5, 0.5}), symmetric_likelihood());
  CHECK(p.index == 0);
  CHECK(p.confidence == doctest::Approx(0.5).epsilon(1e-12));
  auto q = engine::percept_readout(dist(sound_states(), {0.0, 1.0}), symmetric_likelihood());
  CHECK(q.label == "quiet");
  CHECK(q.confidence >= 0.9);
}

TEST_CASE("one step equals composing the component operations") {
  auto model = scenarios::build_duet_model(0.9, scenarios::PolicyVariant::Full);
  PrecisionSet prec{0.5, 2.0};
  auto b0 = engine::initial_belief(model, prec, engine::SelectionMode::Argmax, 0);
  auto r = engine::step(b0, "quiet", model, prec, engine::SelectionMode::Argmax, 0);

  auto post = engine::state_update(b0.q_state, "quiet", model.likelihood(), prec.zeta);
  CHECK(r.posterior == post);
  CHECK(r.percept.label == engine::percept_readout(post, model.likelihood()).label);
  std::vector<double> g;
  for (const auto& p : model.policies()) g.push_back(engine::expected_free_energy(model, p, post, 1));
  auto q = engine::policy_posterior(model.policy_prior(), g, prec.gamma);
  CHECK(r.next.q_policy == q);
  CHECK(r.action == engine::select_action(q, model.policies(), 1, engine::SelectionMode::Argmax, 0));
  std::vector<double> next(2, 0.0);
  for (std::size_t i = 0; i < model.policies().size(); ++i) {
    auto pred = engine::predict(post, model.policies()[i].actions[1], model.transitions());
    for (std::size_t s = 0; s < 2; ++s) next[s] += q[i] * pred[s];
  }
  CHECK(approx_equal(r.next.q_state, normalize(next, model.states()), 1e-12));
  CHECK(r.next.t == 1);
}

TEST_CASE("with zero sensory precision beliefs ignore observations") {
  auto model = scenarios::build_duet_model(0.9, scenarios::PolicyVariant::Full);
  PrecisionSet prec{0.0, 1.0};
  auto a = engine::initial_belief(model, prec, engine::SelectionMode::Argmax, 0);
  auto b = a;
  for (int t = 0; t < 8; ++t) {
    auto ra = engine::step(a, "quiet", model, prec, engine::SelectionMode::Argmax, 0);
    auto rb = engine::step(b, "hear", model, prec, engine::SelectionMode::Argmax, 0);
    CHECK(ra.next.q_state == rb.next.q_state);
    a = ra.next;
    b = rb.next;
  }
}

TEST_CASE("every distribution produced along a trial is normalized") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto model = lab::random_model(rng, 3, 2, 2, 2, 1.0);
    PrecisionSet prec{rng.uniform() * 2.0, rng.uniform() * 8.0};
    auto b = engine::initial_belief(model, prec, engine::SelectionMode::Argmax, 0);
    for (int t = 0; t < 6; ++t) {
      auto r = engine::step(b, t % 2 ? "1" : "0", model, prec, engine::SelectionMode::Sample, static_cast<std::uint64_t>(t));
      for (const auto* d : {&r.posterior, &r.next.q_state, &r.next.q_policy, &r.percept.source_posterior}) {
        double s = 0.0;
        for (double x : d->probs()) s += x;
        CHECK(std::abs(s - 1.0) <= 1e-9);
      }
      b = r.next;
    }
  }
}

}  // TEST_SUITE
