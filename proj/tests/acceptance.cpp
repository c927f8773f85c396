// Acceptance checks. Prints one PASS/FAIL line per criterion and exits 1 if any fail.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "activelab/lab.hpp"

using namespace activelab;
using namespace activelab::services;
using scenarios::PolicyVariant;

namespace {

constexpr double kOracleTolerance = 1e-9;
constexpr double kHallucinating = 0.5;  // rate strictly above
constexpr double kHealthy = 0.05;       // rate strictly below
constexpr double kStrongPrior = 0.9;    // D(other_speaking)
constexpr int kPairedTrials = 20;

struct Result {
  bool passed = false;
  std::string detail;
};

const Fixture& fixture() {
  static const Fixture f = Fixture::defaults();
  return f;
}

double rate(const GenerativeModel& m, const PrecisionSet& p, std::uint64_t seed = 0) {
  return scenarios::hallucination_rate(scenarios::run_duet(m, p, fixture().duet, seed));
}

double rate(double strong_prior, PolicyVariant v, double zeta, double gamma) {
  return rate(scenarios::build_duet_model(strong_prior, v, fixture().duet), PrecisionSet{zeta, gamma});
}

std::vector<Policy> full_space() {
  return scenarios::build_duet_model(kStrongPrior, PolicyVariant::Full, fixture().duet).policies();
}

// zeta 0.2, gamma 8, lesioned space, D = [0.1, 0.9] (silence, other_speaking)
PatientAgent pinned_patient(double eta, double p_learn) {
  auto model = scenarios::build_duet_model(kStrongPrior, PolicyVariant::Lesioned, fixture().duet);
  return PatientAgent::create(model, PrecisionSet{0.2, 8.0}, {1.0, 9.0}, eta, p_learn);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Result oracle_equivalence() {
  auto checks = lab::oracle_suite(fixture(), 20240601, 50);
  Result r{true, {}};
  for (const auto& c : checks) {
    r.passed = r.passed && c.passed;
    r.detail += (r.detail.empty() ? "" : "; ") + c.name + " " + c.detail;
  }
  r.detail += fmt(" (tol %.0e)", kOracleTolerance);
  return r;
}

Result low_sensory_precision() {
  double low = rate(kStrongPrior, PolicyVariant::Full, 0.1, 1.0);
  double high = rate(kStrongPrior, PolicyVariant::Full, 1.0, 1.0);
  return {low > kHallucinating && high < kHealthy, fmt("zeta 0.1 -> %.3f, zeta 1.0 -> %.3f", low, high)};
}

Result high_policy_precision() {
  double high = rate(kStrongPrior, PolicyVariant::ListeningBiased, 0.5, 8.0);
  double low = rate(kStrongPrior, PolicyVariant::ListeningBiased, 0.5, 0.5);
  return {high > kHallucinating && low < kHealthy, fmt("gamma 8 -> %.3f, gamma 0.5 -> %.3f", high, low)};
}

Result lesion() {
  auto matched = scenarios::build_duet_model(0.5, PolicyVariant::MatchedOnly, fixture().duet);
  auto lesioned = scenarios::build_duet_model(0.5, PolicyVariant::Lesioned, fixture().duet);
  double before = rate(matched, PrecisionSet{0.05, 1.0}, 7);
  double after = rate(lesioned, PrecisionSet{0.05, 1.0}, 7);
  return {before == 0.0 && after > kHallucinating, fmt("matched_only %.3f, lesioned %.3f", before, after)};
}

Result single_interventions() {
  auto patient = pinned_patient(0.0, 0.0);
  double base = rate(patient.model, patient.precisions);
  std::string detail = fmt("fixture %.3f;", base);
  bool ok = base > kHallucinating;
  for (const InterventionSpec& spec : std::vector<InterventionSpec>{
           BoostSensoryPrecision{1.3}, ExpandPolicySpace{full_space()}, ReducePolicyPrecision{8.0},
           FlattenPerceptualPrior{1.0}}) {
    auto treated = apply_intervention(patient, spec, fixture().services);
    double r = rate(treated.model, treated.precisions);
    ok = ok && r < kHealthy;
    detail += " " + describe(spec) + fmt(" -> %.3f", r);
  }
  return {ok, detail};
}

Result song_factorial() {
  const auto& s = fixture().song;
  std::string detail;
  bool ok = true;
  for (auto belief : {scenarios::OrderBelief::Standard, scenarios::OrderBelief::Altered}) {
    for (double zeta : {0.1, 1.0}) {
      scenarios::TrialConfig c{scenarios::build_song_model(belief, s.n_words, s),
                               scenarios::build_song_world(s.n_words, s.repeats),
                               PrecisionSet{zeta, 1.0},
                               0,
                               0,
                               engine::SelectionMode::Argmax,
                               scenarios::LabelClasses::none()};
      auto errors = scenarios::run_trial(c).content_errors;
      bool expect = belief == scenarios::OrderBelief::Altered && zeta == 0.1;
      ok = ok && ((errors > 0) == expect);
      detail += std::string(detail.empty() ? "" : ", ") + std::string(scenarios::to_string(belief)) +
                fmt("/%.1f: %.0f", zeta, static_cast<double>(errors));
    }
  }
  return {ok, detail};
}

Result monotonicity() {
  int violations = 0;
  double prev = 2.0;
  for (int i = 0; i <= 15; ++i) {
    double r = rate(kStrongPrior, PolicyVariant::Full, 0.1 * i, 1.0);
    violations += r > prev;
    prev = r;
  }
  prev = -1.0;
  for (int g = 0; g <= 10; ++g) {
    double r = rate(kStrongPrior, PolicyVariant::ListeningBiased, 0.5, g);
    violations += r < prev;
    prev = r;
  }
  return {violations == 0, fmt("%.0f violations over 16 zeta and 11 gamma points", violations)};
}

std::vector<std::optional<ServiceProgram>> schedule(std::size_t n, std::function<bool(std::size_t)> active,
                                                    const ServiceProgram& program) {
  std::vector<std::optional<ServiceProgram>> out;
  for (std::size_t e = 0; e < n; ++e) out.push_back(active(e) ? std::optional(program) : std::nullopt);
  return out;
}

Result deepening_and_recovery() {
  auto act = ServiceProgram::act(fixture().services, full_space());
  auto config = make_duet_episode_config(fixture());
  std::optional<std::size_t> recovery[2];
  bool deepening = true;
  std::string detail;
  int slot = 0;
  for (std::size_t k : {1, 3}) {
    auto course = run_course(pinned_patient(0.1, 0.0), schedule(k + 6, [k](std::size_t e) { return e >= k; }, act),
                             config, 7);
    for (std::size_t e = 1; e < k; ++e) {
      deepening = deepening && course.episodes[e].d_sound > course.episodes[e - 1].d_sound;
    }
    for (std::size_t e = 0; e < k; ++e) deepening = deepening && course.episodes[e].relapse;
    if (!course.recoveries.empty()) recovery[slot] = course.recoveries.front().episodes;
    detail += fmt("after %.0f relapse episodes: recovery %.0f, D[sound] %.4f; ", static_cast<double>(k),
                  recovery[slot] ? static_cast<double>(*recovery[slot]) : -1.0, course.episodes[k - 1].d_sound);
    ++slot;
  }
  bool lengthening = recovery[0] && recovery[1] && *recovery[1] >= *recovery[0];
  return {deepening && lengthening, detail + (deepening ? "D deepens" : "D does not deepen")};
}

Result withdrawal() {
  // eta = 0 keeps D at the pinned [0.1, 0.9]
  auto act = ServiceProgram::act(fixture().services, full_space());
  auto config = make_duet_episode_config(fixture());
  auto plan = schedule(10, [](std::size_t e) { return e < 4; }, act);
  auto never = run_course(pinned_patient(0.0, 0.0), plan, config, 7);
  auto always = run_course(pinned_patient(0.0, 1.0), plan, config, 7);
  bool relapse = never.episodes[4].halluc_rate >= kHallucinating || never.episodes[5].halluc_rate >= kHallucinating;
  bool sustained = true;
  for (std::size_t e = 4; e < 9; ++e) sustained = sustained && always.episodes[e].halluc_rate < kHealthy;
  return {relapse && sustained, fmt("p_learn 0: %.3f, %.3f after withdrawal; p_learn 1 worst of 5: %.3f",
                                    never.episodes[4].halluc_rate, never.episodes[5].halluc_rate,
                                    std::max({always.episodes[4].halluc_rate, always.episodes[5].halluc_rate,
                                              always.episodes[6].halluc_rate, always.episodes[7].halluc_rate,
                                              always.episodes[8].halluc_rate}))};
}

Result csc_timing() {
  auto csc = ServiceProgram::csc(fixture().services, full_space());
  auto config = make_duet_episode_config(fixture());
  auto final_d = [&](std::size_t start) {
    auto course = run_course(pinned_patient(0.1, 0.5), schedule(10, [start](std::size_t e) { return e >= start; }, csc),
                             config, 7);
    return course.episodes.back().d_sound;
  };
  double early = final_d(0);
  double late = final_d(5);
  return {early <= late, fmt("final D[sound]: enrolled at episode 1 %.4f, at episode 6 %.4f", early, late)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result determinism() {
  auto dir = std::filesystem::temp_directory_path() / "activelab_acceptance";
  std::filesystem::create_directories(dir);
  auto run = [&](const std::string& name, int threads) {
    auto out = dir / name;
    std::string cmd = std::string("\"") + ACTIVELAB_CLI_PATH + "\" sweep --seed 42 --threads " +
                      std::to_string(threads) + " --out \"" + out.string() + "\"";
    int code = std::system(cmd.c_str());
    return code == 0 ? read_file(out) : std::string();
  };
  std::string a = run("a.csv", 4);
  std::string b = run("b.csv", 4);
  std::string one = run("one.csv", 1);
  std::string eight = run("eight.csv", 8);
  std::filesystem::remove_all(dir);
  bool ok = !a.empty() && a == b && a == one && a == eight;
  return {ok, fmt("%.0f bytes; repeated run ", static_cast<double>(a.size())) + (a == b ? "identical" : "differs") +
                  ", 1 vs 8 threads " + (one == eight ? "identical" : "differ")};
}

Result policy_space_proxy() {
  DuetParams p = fixture().duet;
  p.emission_noise = 0.1;
  auto lesioned = scenarios::build_duet_model(kStrongPrior, PolicyVariant::Lesioned, p);
  auto full = scenarios::build_duet_model(kStrongPrior, PolicyVariant::Full, p);
  int le = 0, lt = 0;
  for (int seed = 0; seed < kPairedTrials; ++seed) {
    PrecisionSet prec{1.0, 1.0};
    auto ul = scenarios::policy_space_size_metric(lesioned, {scenarios::run_duet(lesioned, prec, p, seed)}).utilized;
    auto uf = scenarios::policy_space_size_metric(full, {scenarios::run_duet(full, prec, p, seed)}).utilized;
    le += ul <= uf;
    lt += ul < uf;
  }
  return {le == kPairedTrials && lt >= 1,
          fmt("lesioned <= full in %.0f/%.0f trials, strictly fewer in %.0f", le, kPairedTrials, lt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"strong prior with low sensory precision", low_sensory_precision},
      {"high prior precision over policies", high_policy_precision},
      {"matched policy lesion", lesion},
      {"single interventions", single_interventions},
      {"song factorial", song_factorial},
      {"monotonicity in zeta and gamma", monotonicity},
      {"attractor deepening and recovery lengthening", deepening_and_recovery},
      {"withdrawal dichotomy", withdrawal},
      {"coordinated care timing", csc_timing},
      {"determinism", determinism},
      {"policy-space proxy", policy_space_proxy},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    failed += !r.passed;
    std::cout << (r.passed ? "PASS" : "FAIL") << ' ' << n << ' ' << name << ": " << r.detail << '\n';
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
