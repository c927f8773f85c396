#include <cmath>

#include "activelab/error.hpp"
#include "activelab/rng.hpp"
#include "activelab/services.hpp"

namespace activelab::services {

namespace {

constexpr std::uint64_t kAdherenceSalt = 0xad;
constexpr std::uint64_t kTrialSalt = 1;
constexpr std::uint64_t kLearningSalt = 2;

double sound_mass(const CategoricalDist& d, const scenarios::LabelClasses& classes) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (classes.silence_states.count(d.domain()->label(i)) == 0) m += d[i];
  }
  return m;
}

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, "course." + key + " must be a number");
  return v.get<double>();
}

std::string text(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw Error(ErrorKind::InvalidConfig, "course." + key + " must be a string");
  return v.get<std::string>();
}

}  // namespace

std::pair<PatientAgent, EpisodeRecord> run_episode(const PatientAgent& patient, const ServiceProgram* program,
                                                   const EpisodeConfig& config, std::uint64_t seed,
                                                   std::size_t index) {
  PatientAgent p = patient;
  if (p.enrolled() && (program == nullptr || program->kind != p.enrollment->kind)) {
    p = withdraw_service(p, ServiceProgram{p.enrollment->kind, {}, 1.0});
  }
  if (program != nullptr && !p.enrolled()) p = enroll_service(p, *program, config.defaults);

  PrecisionSet trial_precisions = p.precisions;
  bool adherent = false;
  if (program != nullptr) {
    for (const auto& c : program->components) {
      if (std::holds_alternative<FlattenPerceptualPrior>(c)) p = apply_intervention(p, c, config.defaults);
    }
    adherent = program->adherence >= 1.0;
    if (!adherent) {
      Rng rng(mix_seed(seed, kAdherenceSalt));
      adherent = rng.uniform() < program->adherence;
      if (adherent) {
        PatientAgent dosed = p;
        for (const auto& c : program->components) {
          if (std::holds_alternative<BoostSensoryPrecision>(c) || std::holds_alternative<ReducePolicyPrecision>(c)) {
            dosed = apply_intervention(dosed, c, config.defaults);
          }
        }
        trial_precisions = dosed.precisions;
      }
    }
  }

  scenarios::TrialConfig trial{p.model,   config.world, trial_precisions, config.length, mix_seed(seed, kTrialSalt),
                               config.mode, config.classes};
  scenarios::TrialRecord record = scenarios::run_trial(trial);
  const auto size = scenarios::policy_space_size_metric(p.model, {record});

  p = update_perceptual_prior(p, record, config.classes);
  if (p.enrolled()) p = policy_learning_step(p, mix_seed(seed, kLearningSalt));

  EpisodeRecord r;
  r.index = index;
  if (program != nullptr) r.program = program->kind;
  r.adherent = adherent;
  r.zeta = trial_precisions.zeta;
  r.gamma = trial_precisions.gamma;
  r.halluc_rate = scenarios::hallucination_rate(record);
  r.miss_rate = scenarios::miss_rate(record);
  r.relapse = r.halluc_rate >= config.defaults.relapse_threshold;
  r.prior_counts = p.prior_counts;
  r.d_sound = sound_mass(p.perceptual_prior(), config.classes);
  r.utilized_policies = size.utilized;
  r.available_policies = size.available;
  return {std::move(p), std::move(r)};
}

CourseRecord run_course(const PatientAgent& patient, const std::vector<std::optional<ServiceProgram>>& schedule,
                        const EpisodeConfig& config, std::uint64_t seed) {
  if (schedule.empty()) throw Error(ErrorKind::InvalidConfig, "a course needs at least one episode");
  CourseRecord course;
  PatientAgent p = patient;
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    const ServiceProgram* program = schedule[e] ? &*schedule[e] : nullptr;
    auto [next, record] = run_episode(p, program, config, mix_seed(seed, e), e);
    p = std::move(next);
    course.relapse_count += record.relapse;
    course.episodes.push_back(std::move(record));
  }

  // one recovery event per maximal run of relapse episodes
  const auto& eps = course.episodes;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    if (!eps[e].relapse || (e + 1 < eps.size() && eps[e + 1].relapse)) continue;
    RecoveryEvent ev{e, std::nullopt};
    for (std::size_t k = e + 1; k < eps.size(); ++k) {
      if (eps[k].halluc_rate < config.defaults.remission_threshold) {
        ev.episodes = k - e;
        break;
      }
    }
    course.recoveries.push_back(ev);
  }
  return course;
}

CourseSpec CourseSpec::from_fixture(const Fixture& fixture) {
  CourseSpec spec;
  if (!fixture.document.contains("course")) return spec;
  const auto& doc = fixture.document.at("course");
  if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "course must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "zeta") {
      spec.zeta = number(v, key);
    } else if (key == "gamma") {
      spec.gamma = number(v, key);
    } else if (key == "variant") {
      spec.variant = scenarios::parse_policy_variant(text(v, key));
    } else if (key == "eta") {
      spec.eta = number(v, key);
    } else if (key == "p_learn") {
      spec.p_learn = number(v, key);
    } else if (key == "severity") {
      spec.severity = parse_severity(text(v, key));
    } else if (key == "prior_counts") {
      if (!v.is_object()) throw Error(ErrorKind::InvalidConfig, "course.prior_counts must map state labels to counts");
      std::vector<double> counts(2, 0.0);
      std::size_t seen = 0;
      for (const auto& [label, c] : v.items()) {
        if (label == scenarios::kSilence) {
          counts[0] = number(c, "prior_counts." + label);
        } else if (label == scenarios::kOtherSpeaking) {
          counts[1] = number(c, "prior_counts." + label);
        } else {
          throw Error(ErrorKind::InvalidConfig, "unknown state in course.prior_counts: " + label);
        }
        ++seen;
      }
      if (seen != 2) throw Error(ErrorKind::InvalidConfig, "course.prior_counts needs both duet states");
      spec.prior_counts = counts;
    } else if (key == "schedule") {
      if (!v.is_array()) throw Error(ErrorKind::InvalidConfig, "course.schedule must be a list");
      spec.schedule.clear();
      for (const auto& item : v) {
        std::string name = text(item, "schedule[]");
        if (name == "none") {
          spec.schedule.emplace_back(std::nullopt);
        } else {
          spec.schedule.emplace_back(parse_program_kind(name));
        }
      }
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown key course." + key);
    }
  }
  return spec;
}

PatientAgent make_duet_patient(const CourseSpec& spec, const DuetParams& params) {
  auto d = normalize(spec.prior_counts);
  auto model = scenarios::build_duet_model(d[1], spec.variant, params);
  return PatientAgent::create(model, PrecisionSet{spec.zeta, spec.gamma}, spec.prior_counts, spec.eta, spec.p_learn,
                              spec.severity);
}

std::vector<std::optional<ServiceProgram>> make_schedule(const CourseSpec& spec, const ServiceDefaults& defaults,
                                                         const DuetParams& params) {
  auto full = scenarios::build_duet_model(params.strong_prior, scenarios::PolicyVariant::Full, params).policies();
  std::vector<std::optional<ServiceProgram>> out;
  out.reserve(spec.schedule.size());
  for (const auto& kind : spec.schedule) {
    if (kind) {
      out.emplace_back(ServiceProgram::standard(*kind, defaults, full));
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

EpisodeConfig make_duet_episode_config(const Fixture& fixture) {
  return EpisodeConfig{scenarios::build_duet_world(fixture.duet.trial_length, fixture.duet.emission_noise),
                       static_cast<std::size_t>(fixture.duet.trial_length), engine::SelectionMode::Argmax,
                       scenarios::LabelClasses::duet(), fixture.services};
}

}  // namespace activelab::services
