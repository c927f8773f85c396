#include <algorithm>
#include <cmath>
#include <sstream>

#include "activelab/error.hpp"
#include "activelab/rng.hpp"
#include "activelab/services.hpp"

namespace activelab::services {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_precision_component(const InterventionSpec& spec) {
  return std::holds_alternative<BoostSensoryPrecision>(spec) || std::holds_alternative<ReducePolicyPrecision>(spec);
}

PatientAgent with_counts(PatientAgent p, std::vector<double> counts) {
  p.model = p.model.with_state_prior(normalize(counts, p.model.states()));
  p.prior_counts = std::move(counts);
  return p;
}

}  // namespace

void validate(const InterventionSpec& spec) {
  std::visit(Overloaded{
                 [](const BoostSensoryPrecision& s) {
                   if (!std::isfinite(s.delta_zeta) || s.delta_zeta <= 0.0) {
                     throw Error(ErrorKind::InvalidConfig, "delta_zeta must be > 0");
                   }
                 },
                 [](const ExpandPolicySpace& s) {
                   std::set<std::string> seen;
                   for (const auto& p : s.added) {
                     if (!seen.insert(p.id).second) throw Error(ErrorKind::DuplicatePolicy, "policy " + p.id + " listed twice");
                   }
                 },
                 [](const ReducePolicyPrecision& s) {
                   if (!std::isfinite(s.delta_gamma) || s.delta_gamma <= 0.0) {
                     throw Error(ErrorKind::InvalidConfig, "delta_gamma must be > 0");
                   }
                 },
                 [](const FlattenPerceptualPrior& s) {
                   if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) throw Error(ErrorKind::InvalidConfig, "lambda must lie in [0, 1]");
                 },
             },
             spec);
}

std::string describe(const InterventionSpec& spec) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const BoostSensoryPrecision& s) { out << "boost_sensory_precision(" << s.delta_zeta << ")"; },
                 [&](const ExpandPolicySpace& s) { out << "expand_policy_space(" << s.added.size() << ")"; },
                 [&](const ReducePolicyPrecision& s) { out << "reduce_policy_precision(" << s.delta_gamma << ")"; },
                 [&](const FlattenPerceptualPrior& s) { out << "flatten_perceptual_prior(" << s.lambda << ")"; },
             },
             spec);
  return out.str();
}

std::string_view to_string(Severity s) noexcept { return s == Severity::Severe ? "severe" : "mild"; }

Severity parse_severity(std::string_view name) {
  if (name == "mild") return Severity::Mild;
  if (name == "severe") return Severity::Severe;
  throw Error(ErrorKind::InvalidConfig, "unknown severity '" + std::string(name) + "'");
}

std::string_view to_string(ProgramKind k) noexcept {
  switch (k) {
    case ProgramKind::ACT: return "ACT";
    case ProgramKind::CSC: return "CSC";
    case ProgramKind::TreatmentAsUsual: return "TAU";
  }
  return "ACT";
}

ProgramKind parse_program_kind(std::string_view name) {
  if (name == "ACT") return ProgramKind::ACT;
  if (name == "CSC") return ProgramKind::CSC;
  if (name == "TAU" || name == "TreatmentAsUsual") return ProgramKind::TreatmentAsUsual;
  throw Error(ErrorKind::InvalidConfig, "unknown service program '" + std::string(name) + "'");
}

ServiceProgram ServiceProgram::act(const ServiceDefaults& d, std::vector<Policy> expansion) {
  return ServiceProgram{ProgramKind::ACT,
                        {BoostSensoryPrecision{d.act_delta_zeta}, ReducePolicyPrecision{d.act_delta_gamma},
                         ExpandPolicySpace{std::move(expansion)}},
                        1.0};
}

ServiceProgram ServiceProgram::csc(const ServiceDefaults& d, std::vector<Policy> expansion) {
  ServiceProgram p = act(d, std::move(expansion));
  p.kind = ProgramKind::CSC;
  p.components.push_back(FlattenPerceptualPrior{d.csc_flatten_lambda});
  return p;
}

ServiceProgram ServiceProgram::treatment_as_usual(const ServiceDefaults& d) {
  return ServiceProgram{ProgramKind::TreatmentAsUsual, {ReducePolicyPrecision{d.tau_delta_gamma}}, d.tau_adherence};
}

ServiceProgram ServiceProgram::standard(ProgramKind kind, const ServiceDefaults& d, std::vector<Policy> expansion) {
  switch (kind) {
    case ProgramKind::ACT: return act(d, std::move(expansion));
    case ProgramKind::CSC: return csc(d, std::move(expansion));
    case ProgramKind::TreatmentAsUsual: return treatment_as_usual(d);
  }
  return act(d, std::move(expansion));
}

PatientAgent PatientAgent::create(const GenerativeModel& model, const PrecisionSet& precisions,
                                  std::vector<double> prior_counts, double eta, double p_learn, Severity severity) {
  precisions.validate();
  if (prior_counts.size() != model.states()->size()) {
    throw Error(ErrorKind::ShapeError, "prior_counts needs one entry per state");
  }
  if (!std::isfinite(eta) || eta < 0.0) throw Error(ErrorKind::InvalidConfig, "eta must be >= 0");
  if (!(p_learn >= 0.0 && p_learn <= 1.0)) throw Error(ErrorKind::InvalidConfig, "p_learn must lie in [0, 1]");
  PatientAgent p{model, precisions, {}, eta, p_learn, {}, severity, std::nullopt};
  return with_counts(std::move(p), std::move(prior_counts));
}

PatientAgent apply_intervention(const PatientAgent& patient, const InterventionSpec& spec,
                                const ServiceDefaults& defaults) {
  validate(spec);
  PatientAgent out = patient;
  std::visit(Overloaded{
                 [&](const BoostSensoryPrecision& s) { out.precisions.zeta += s.delta_zeta; },
                 [&](const ReducePolicyPrecision& s) {
                   out.precisions.gamma = std::max(0.0, out.precisions.gamma - s.delta_gamma);
                 },
                 [&](const ExpandPolicySpace& s) {
                   std::vector<Policy> merged = out.model.policies();
                   for (const auto& p : s.added) {
                     if (!out.model.policy_ids()->contains(p.id)) merged.push_back(p);
                   }
                   auto domain = policy_domain(merged);
                   out.model = out.model.with_policies(std::move(merged), uniform(std::move(domain)));
                 },
                 [&](const FlattenPerceptualPrior& s) {
                   double lambda = s.lambda;
                   if (out.severity == Severity::Severe) lambda = std::min(lambda, defaults.severe_flatten_cap);
                   const auto& d = out.model.state_prior();
                   const double n = static_cast<double>(d.size());
                   double total = 0.0;
                   for (double c : out.prior_counts) total += c;
                   std::vector<double> counts(d.size());
                   for (std::size_t i = 0; i < d.size(); ++i) counts[i] = ((1.0 - lambda) * d[i] + lambda / n) * total;
                   out = with_counts(std::move(out), std::move(counts));
                 },
             },
             spec);
  return out;
}

PatientAgent update_perceptual_prior(const PatientAgent& patient, const scenarios::TrialRecord& record,
                                     const scenarios::LabelClasses& classes) {
  if (patient.eta == 0.0 || record.steps.empty()) return patient;
  const auto& a = patient.model.likelihood().matrix();
  const auto& states = *patient.model.states();
  std::vector<double> counts = patient.prior_counts;
  for (const auto& s : record.steps) {
    Eigen::Index state = 0;
    a.col(static_cast<Eigen::Index>(s.percept.index)).maxCoeff(&state);
    const auto idx = static_cast<std::size_t>(state);
    if (patient.severity == Severity::Severe && classes.silence_states.count(states.label(idx)) > 0) continue;
    counts[idx] += patient.eta;
  }
  return with_counts(patient, std::move(counts));
}

PatientAgent policy_learning_step(const PatientAgent& patient, std::uint64_t rng_seed) {
  PatientAgent out = patient;
  Rng rng(rng_seed);
  // std::set iterates in id order, so the draws are reproducible
  for (const auto& id : patient.supplemented_ids) {
    if (rng.uniform() < patient.p_learn) out.supplemented_ids.erase(id);
  }
  return out;
}

PatientAgent enroll_service(const PatientAgent& patient, const ServiceProgram& program,
                            const ServiceDefaults& defaults) {
  if (patient.enrolled()) throw Error(ErrorKind::InvalidConfig, "patient is already enrolled");
  if (!(program.adherence >= 0.0 && program.adherence <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "adherence must lie in [0, 1]");
  }
  Enrollment e;
  e.kind = program.kind;
  e.zeta_before = patient.precisions.zeta;
  e.gamma_before = patient.precisions.gamma;
  e.policies_before = patient.model.policies();
  e.policy_prior_before = patient.model.policy_prior().probs();

  PatientAgent out = patient;
  for (const auto& c : program.components) {
    if (std::holds_alternative<FlattenPerceptualPrior>(c)) continue;
    if (is_precision_component(c) && program.adherence < 1.0) continue;
    out = apply_intervention(out, c, defaults);
  }
  for (const auto& p : out.model.policies()) {
    if (!patient.model.policy_ids()->contains(p.id)) out.supplemented_ids.insert(p.id);
  }
  e.zeta_after = out.precisions.zeta;
  e.gamma_after = out.precisions.gamma;
  out.enrollment = std::move(e);
  return out;
}

PatientAgent withdraw_service(const PatientAgent& patient, const ServiceProgram& program) {
  if (!patient.enrolled() || patient.enrollment->kind != program.kind) {
    throw Error(ErrorKind::NotEnrolled, std::string(to_string(program.kind)) + " is not active for this patient");
  }
  const Enrollment& e = *patient.enrollment;
  PatientAgent out = patient;
  // exact restore when nothing else touched the precision since enrollment
  auto reverse = [](double now, double before, double after) {
    return now == after ? before : std::max(0.0, now - (after - before));
  };
  out.precisions.zeta = reverse(patient.precisions.zeta, e.zeta_before, e.zeta_after);
  out.precisions.gamma = reverse(patient.precisions.gamma, e.gamma_before, e.gamma_after);

  {
    double max_before = 0.0;
    for (double w : e.policy_prior_before) max_before = std::max(max_before, w);
    std::vector<Policy> kept;
    std::vector<double> weights;
    for (const auto& p : patient.model.policies()) {
      if (patient.supplemented_ids.count(p.id) > 0) continue;
      auto it = std::find_if(e.policies_before.begin(), e.policies_before.end(),
                             [&](const Policy& q) { return q.id == p.id; });
      // internalized policies join at the weight of the patient's favourite
      weights.push_back(it == e.policies_before.end()
                            ? max_before
                            : e.policy_prior_before[static_cast<std::size_t>(it - e.policies_before.begin())]);
      kept.push_back(p);
    }
    auto domain = policy_domain(kept);
    if (kept == e.policies_before) {
      out.model = patient.model.with_policies(std::move(kept), CategoricalDist(std::move(domain), e.policy_prior_before));
    } else {
      out.model = patient.model.with_policies(std::move(kept), normalize(weights, std::move(domain)));
    }
  }
  out.supplemented_ids.clear();
  out.enrollment.reset();
  return out;
}

}  // namespace activelab::services
