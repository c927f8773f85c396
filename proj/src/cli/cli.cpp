#include "activelab/cli.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "activelab/error.hpp"
#include "activelab/lab.hpp"

namespace activelab::cli {

namespace {

struct Options {
  std::string fixture;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> sets;
  std::string variant;
  std::optional<double> zeta;
  std::optional<double> gamma;
  std::string mode = "argmax";
  std::string belief = "altered";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& o, bool needs_seed) {
  cmd->add_option("--fixture", o.fixture, "fixture JSON (default: the built-in default fixture)");
  auto* seed = cmd->add_option("--seed", o.seed, "base seed");
  if (needs_seed) seed->required();
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  cmd->add_option("--set", o.sets, "section.key=value fixture override (repeatable)");
  cmd->add_option("--zeta", o.zeta, "sensory precision");
  cmd->add_option("--gamma", o.gamma, "prior precision over policies");
}

Fixture load_fixture(const Options& o) {
  Fixture f = o.fixture.empty() ? Fixture::defaults() : Fixture::load(o.fixture);
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "--set expects key=value, got " + s);
    f.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return f;
}

engine::SelectionMode parse_mode(const std::string& m) {
  return m == "sample" ? engine::SelectionMode::Sample : engine::SelectionMode::Argmax;
}

void emit(const Options& o, std::ostream& out, const std::string& content) {
  if (o.out.empty()) {
    out << content;
  } else {
    lab::write_atomic(o.out, content);
  }
}

void emit_trial(const Options& o, std::ostream& out, const scenarios::TrialRecord& record) {
  auto format = lab::parse_format(o.format);
  if (format == lab::Format::SvgHeatmap) throw Error(ErrorKind::InvalidVisualization, "trials have no heatmap form");
  emit(o, out, format == lab::Format::Csv ? lab::to_csv(record) : lab::to_json(record).dump(2) + "\n");
}

int simulate_duet(const Options& o, std::ostream& out) {
  Fixture f = load_fixture(o);
  auto variant = o.variant.empty() ? scenarios::PolicyVariant::Full : scenarios::parse_policy_variant(o.variant);
  auto model = scenarios::build_duet_model(f.duet.strong_prior, variant, f.duet);
  PrecisionSet p{o.zeta.value_or(1.0), o.gamma.value_or(1.0)};
  auto record = scenarios::run_duet(model, p, f.duet, *o.seed, parse_mode(o.mode));
  emit_trial(o, out, record);
  return 0;
}

int simulate_song(const Options& o, std::ostream& out) {
  Fixture f = load_fixture(o);
  auto belief = o.belief == "standard" ? scenarios::OrderBelief::Standard : scenarios::OrderBelief::Altered;
  auto model = scenarios::build_song_model(belief, f.song.n_words, f.song);
  scenarios::TrialConfig config{model,
                                scenarios::build_song_world(f.song.n_words, f.song.repeats),
                                PrecisionSet{o.zeta.value_or(1.0), o.gamma.value_or(1.0)},
                                0,
                                o.seed.value_or(0),
                                parse_mode(o.mode),
                                scenarios::LabelClasses::none()};
  emit_trial(o, out, scenarios::run_trial(config));
  return 0;
}

int sweep(const Options& o, std::ostream& out) {
  Fixture f = load_fixture(o);
  auto spec = lab::SweepSpec::from_fixture(f, *o.seed);
  spec.mode = parse_mode(o.mode);
  if (o.zeta) spec.zeta_grid = {*o.zeta};
  if (o.gamma) spec.gamma_grid = {*o.gamma};
  std::optional<scenarios::PolicyVariant> variant;
  if (!o.variant.empty()) variant = scenarios::parse_policy_variant(o.variant);
  auto format = lab::parse_format(o.format);
  // for heatmaps --variant picks the panel instead of restricting the sweep
  if (variant && format != lab::Format::SvgHeatmap) spec.variants = {*variant};
  auto result = lab::run_sweep(spec, o.threads, f.sha256, f.document);
  switch (format) {
    case lab::Format::Csv: emit(o, out, lab::to_csv(result)); break;
    case lab::Format::Json: emit(o, out, lab::to_json(result).dump(2) + "\n"); break;
    case lab::Format::SvgHeatmap: emit(o, out, lab::to_svg_heatmap(result, variant.value_or(spec.variants.front()))); break;
  }
  return 0;
}

int course(const Options& o, std::ostream& out) {
  Fixture f = load_fixture(o);
  auto spec = services::CourseSpec::from_fixture(f);
  if (o.zeta) spec.zeta = *o.zeta;
  if (o.gamma) spec.gamma = *o.gamma;
  if (!o.variant.empty()) spec.variant = scenarios::parse_policy_variant(o.variant);
  if (spec.schedule.empty()) throw Error(ErrorKind::InvalidConfig, "course.schedule is empty");
  auto patient = services::make_duet_patient(spec, f.duet);
  auto schedule = services::make_schedule(spec, f.services, f.duet);
  auto config = services::make_duet_episode_config(f);
  config.mode = parse_mode(o.mode);
  auto record = services::run_course(patient, schedule, config, *o.seed);
  auto format = lab::parse_format(o.format);
  if (format == lab::Format::SvgHeatmap) throw Error(ErrorKind::InvalidVisualization, "courses have no heatmap form");
  emit(o, out, format == lab::Format::Csv ? lab::to_csv(record) : lab::to_json(record).dump(2) + "\n");
  return 0;
}

int validate(const Options& o, std::ostream& out) {
  Fixture f = load_fixture(o);
  auto checks = lab::oracle_suite(f, o.seed.value_or(0));
  for (auto& c : lab::regime_suite(f)) checks.push_back(std::move(c));
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete active-inference hallucination lab", "activelab"};
  app.require_subcommand(1);
  Options o;

  auto* duet = app.add_subcommand("simulate-duet", "run one turn-taking duet trial and export the step trace");
  add_common(duet, o, true);
  duet->add_option("--variant", o.variant, "full | matched_only | listening_biased | lesioned | listen_heavy");
  duet->add_option("--mode", o.mode, "argmax | sample")->check(CLI::IsMember({"argmax", "sample"}));

  auto* song = app.add_subcommand("simulate-song", "run one song trial and export the step trace");
  add_common(song, o, false);
  song->add_option("--belief", o.belief, "standard | altered")->check(CLI::IsMember({"standard", "altered"}));
  song->add_option("--mode", o.mode, "argmax | sample")->check(CLI::IsMember({"argmax", "sample"}));

  auto* sw = app.add_subcommand("sweep", "hallucination rate over the fixture's zeta x gamma x policy-space grid");
  add_common(sw, o, true);
  sw->add_option("--variant", o.variant, "restrict to one policy space (svg: the panel to draw)");
  sw->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sw->add_option("--mode", o.mode, "argmax | sample")->check(CLI::IsMember({"argmax", "sample"}));

  auto* co = app.add_subcommand("course", "longitudinal course with the fixture's service schedule");
  add_common(co, o, true);
  co->add_option("--variant", o.variant, "patient policy space");
  co->add_option("--mode", o.mode, "argmax | sample")->check(CLI::IsMember({"argmax", "sample"}));

  auto* val = app.add_subcommand("validate", "oracle-equivalence and regime-matrix checks");
  val->add_option("--fixture", o.fixture, "fixture JSON (default: the built-in default fixture)");
  val->add_option("--seed", o.seed, "seed for the random oracle models (default 0)");
  val->add_option("--set", o.sets, "section.key=value fixture override (repeatable)");

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (duet->parsed()) return simulate_duet(o, out);
    if (song->parsed()) return simulate_song(o, out);
    if (sw->parsed()) return sweep(o, out);
    if (co->parsed()) return course(o, out);
    return validate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace activelab::cli
