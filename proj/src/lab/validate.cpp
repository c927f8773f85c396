#include <algorithm>
#include <cmath>
#include <sstream>

#include "activelab/error.hpp"
#include "activelab/lab.hpp"

namespace activelab::lab {

namespace {

using scenarios::PolicyVariant;

constexpr double kOracleTolerance = 1e-9;
constexpr double kZetas[] = {0.0, 0.2, 0.5, 1.0};

double max_abs_diff(const std::vector<CategoricalDist>& a, const std::vector<CategoricalDist>& b) {
  double m = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) m = std::max(m, std::abs(a[t][i] - b[t][i]));
  }
  return m;
}

std::vector<std::string> random_labels(Rng& rng, const Domain& domain, std::size_t length) {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < length; ++t) {
    auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(domain.size()));
    out.push_back(domain.label(std::min(i, domain.size() - 1)));
  }
  return out;
}

// Worst oracle disagreement over every zeta for random action/observation sequences.
double worst_case(const GenerativeModel& model, Rng& rng, std::size_t length) {
  double worst = 0.0;
  for (double z : kZetas) {
    auto actions = random_labels(rng, *model.actions(), length);
    auto obs = random_labels(rng, *model.observations(), length);
    worst = std::max(worst, max_abs_diff(oracle_exact_posterior(model, actions, obs, z), engine_filter(model, actions, obs, z)));
  }
  return worst;
}

Check tolerance_check(std::string name, double worst) {
  std::ostringstream d;
  d << "max |engine - oracle| = " << worst;
  return Check{std::move(name), worst <= kOracleTolerance, d.str()};
}

double duet_rate(const Fixture& f, double strong_prior, PolicyVariant variant, double zeta, double gamma) {
  auto model = scenarios::build_duet_model(strong_prior, variant, f.duet);
  return scenarios::hallucination_rate(scenarios::run_duet(model, PrecisionSet{zeta, gamma}, f.duet));
}

Check rate_check(std::string name, double rate, bool passed, const std::string& rule) {
  std::ostringstream d;
  d << "rate " << rate << " (want " << rule << ")";
  return Check{std::move(name), passed, d.str()};
}

}  // namespace

std::vector<Check> oracle_suite(const Fixture& fixture, std::uint64_t seed, std::size_t n_random) {
  std::vector<Check> out;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_random; ++i) {
    const std::size_t n_states = 2 + i % 3;
    const std::size_t length = 1 + (i / 3) % 6;
    const double k = static_cast<double>(i % 3) * 0.5;
    auto model = random_model(rng, n_states, 2 + i % 2, 2, 2, k);
    worst = std::max(worst, worst_case(model, rng, length));
  }
  out.push_back(tolerance_check("oracle equivalence, " + std::to_string(n_random) + " random models", worst));

  double duet_worst = 0.0;
  for (auto v : {PolicyVariant::Full, PolicyVariant::MatchedOnly, PolicyVariant::Lesioned}) {
    for (double sp : {0.5, fixture.duet.strong_prior}) {
      duet_worst = std::max(duet_worst, worst_case(scenarios::build_duet_model(sp, v, fixture.duet), rng, 6));
    }
  }
  out.push_back(tolerance_check("oracle equivalence, duet fixtures", duet_worst));

  double song_worst = 0.0;
  for (auto b : {scenarios::OrderBelief::Standard, scenarios::OrderBelief::Altered}) {
    song_worst = std::max(song_worst, worst_case(scenarios::build_song_model(b, fixture.song.n_words, fixture.song), rng, 6));
  }
  out.push_back(tolerance_check("oracle equivalence, song fixtures", song_worst));
  return out;
}

std::vector<Check> regime_suite(const Fixture& fixture) {
  const double sp = fixture.duet.strong_prior;
  std::vector<Check> out;
  double r = duet_rate(fixture, sp, PolicyVariant::Full, 0.1, 1.0);
  out.push_back(rate_check("strong prior, low sensory precision hallucinates", r, r > 0.5, "> 0.5"));
  r = duet_rate(fixture, sp, PolicyVariant::Full, 1.0, 1.0);
  out.push_back(rate_check("strong prior, intact sensory precision is healthy", r, r < 0.05, "< 0.05"));
  r = duet_rate(fixture, sp, PolicyVariant::ListeningBiased, 0.5, 8.0);
  out.push_back(rate_check("listening bias, high policy precision hallucinates", r, r > 0.5, "> 0.5"));
  r = duet_rate(fixture, sp, PolicyVariant::ListeningBiased, 0.5, 0.5);
  out.push_back(rate_check("listening bias, low policy precision is healthy", r, r < 0.05, "< 0.05"));
  r = duet_rate(fixture, 0.5, PolicyVariant::MatchedOnly, 0.05, 1.0);
  out.push_back(rate_check("matched policy survives very low sensory precision", r, r == 0.0, "= 0"));
  r = duet_rate(fixture, 0.5, PolicyVariant::Lesioned, 0.05, 1.0);
  out.push_back(rate_check("matched policy lesioned hallucinates", r, r > 0.5, "> 0.5"));
  r = duet_rate(fixture, 0.5, PolicyVariant::Full, 1.0, 1.0);
  out.push_back(rate_check("flat prior, full space, intact precision is healthy", r, r < 0.05, "< 0.05"));
  return out;
}

}  // namespace activelab::lab
