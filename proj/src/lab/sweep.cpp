#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "activelab/error.hpp"
#include "activelab/lab.hpp"

namespace activelab::lab {

namespace {

void require_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must be strictly increasing");
  }
}

std::vector<double> number_list(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array()) throw Error(ErrorKind::InvalidConfig, "sweep." + key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorKind::InvalidConfig, "sweep." + key + " must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

SweepCell run_cell(const SweepSpec& spec, std::size_t index) {
  const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t ng = spec.gamma_grid.size();
  const std::size_t nz = spec.zeta_grid.size();
  SweepCell cell;
  cell.rep = static_cast<int>(index % reps);
  cell.gamma = spec.gamma_grid[(index / reps) % ng];
  cell.zeta = spec.zeta_grid[(index / reps / ng) % nz];
  cell.variant = spec.variants[index / reps / ng / nz];
  try {
    auto model = scenarios::build_duet_model(spec.strong_prior, cell.variant, spec.params);
    auto record = scenarios::run_duet(model, PrecisionSet{cell.zeta, cell.gamma}, spec.params,
                                      cell_seed(spec.base_seed, index), spec.mode);
    cell.halluc_rate = scenarios::hallucination_rate(record);
    cell.miss_rate = scenarios::miss_rate(record);
    cell.utilized_policies = scenarios::policy_space_size_metric(model, {record}).utilized;
  } catch (const Error& e) {
    std::ostringstream where;
    where << "cell " << index << " (variant=" << scenarios::to_string(cell.variant) << ", zeta=" << cell.zeta
          << ", gamma=" << cell.gamma << ", rep=" << cell.rep << "): " << e.what();
    throw Error(e.kind(), where.str());
  }
  return cell;
}

}  // namespace

void SweepSpec::validate() const {
  require_increasing(zeta_grid, "zeta_grid");
  require_increasing(gamma_grid, "gamma_grid");
  if (variants.empty()) throw Error(ErrorKind::InvalidConfig, "policy_variants must not be empty");
  if (repetitions < 1) throw Error(ErrorKind::InvalidConfig, "repetitions must be >= 1");
  if (!(strong_prior >= 0.0 && strong_prior <= 1.0)) throw Error(ErrorKind::InvalidConfig, "strong_prior must lie in [0, 1]");
  for (double z : zeta_grid) PrecisionSet{z, 1.0}.validate();
  for (double g : gamma_grid) PrecisionSet{1.0, g}.validate();
}

SweepSpec SweepSpec::from_fixture(const Fixture& fixture, std::uint64_t seed) {
  SweepSpec spec;
  spec.params = fixture.duet;
  spec.strong_prior = fixture.duet.strong_prior;
  spec.base_seed = seed;
  spec.zeta_grid = {0.1, 1.0};
  spec.gamma_grid = {1.0};
  spec.variants = {scenarios::PolicyVariant::Full};
  if (fixture.document.contains("sweep")) {
    const auto& doc = fixture.document.at("sweep");
    if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "sweep must be an object");
    for (const auto& [key, v] : doc.items()) {
      if (key == "zeta_grid") {
        spec.zeta_grid = number_list(v, key);
      } else if (key == "gamma_grid") {
        spec.gamma_grid = number_list(v, key);
      } else if (key == "policy_variants") {
        if (!v.is_array()) throw Error(ErrorKind::InvalidConfig, "sweep.policy_variants must be a list");
        spec.variants.clear();
        for (const auto& name : v) {
          if (!name.is_string()) throw Error(ErrorKind::InvalidConfig, "sweep.policy_variants must hold names");
          spec.variants.push_back(scenarios::parse_policy_variant(name.get<std::string>()));
        }
      } else if (key == "strong_prior") {
        if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, "sweep.strong_prior must be a number");
        spec.strong_prior = v.get<double>();
      } else if (key == "repetitions") {
        if (!v.is_number_integer()) throw Error(ErrorKind::InvalidConfig, "sweep.repetitions must be an integer");
        spec.repetitions = v.get<int>();
      } else {
        throw Error(ErrorKind::InvalidConfig, "unknown key sweep." + key);
      }
    }
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const SweepSpec& spec) {
  nlohmann::json variants = nlohmann::json::array();
  for (auto v : spec.variants) variants.push_back(std::string(scenarios::to_string(v)));
  return {{"zeta_grid", spec.zeta_grid},
          {"gamma_grid", spec.gamma_grid},
          {"policy_variants", variants},
          {"strong_prior", spec.strong_prior},
          {"repetitions", spec.repetitions},
          {"base_seed", spec.base_seed},
          {"mode", spec.mode == engine::SelectionMode::Argmax ? "argmax" : "sample"},
          {"duet", to_json(spec.params)}};
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads, std::string fixture_sha256,
                      const nlohmann::json& fixture_document) {
  spec.validate();
  const std::size_t n = spec.cell_count();
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  std::vector<SweepCell> cells(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        cells[i] = run_cell(spec, i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // report the lowest failing cell so the message does not depend on scheduling
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.cells = std::move(cells);
  result.provenance.fixture_sha256 = std::move(fixture_sha256);
  result.provenance.seed = spec.base_seed;
  result.provenance.version = std::string(kVersion);
  result.provenance.spec = {{"sweep", to_json(spec)}, {"fixture", fixture_document}};
  return result;
}

std::string_view to_string(Regime r) noexcept { return r == Regime::Hallucinating ? "hallucinating" : "healthy"; }

std::vector<RegimeCell> regime_table(const SweepResult& result, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorKind::InvalidConfig, "threshold must lie in (0, 1)");
  std::vector<RegimeCell> out;
  std::vector<std::size_t> counts;
  for (const auto& c : result.cells) {
    if (!out.empty() && out.back().variant == c.variant && out.back().zeta == c.zeta && out.back().gamma == c.gamma) {
      out.back().mean_rate += c.halluc_rate;
      ++counts.back();
      continue;
    }
    out.push_back(RegimeCell{c.variant, c.zeta, c.gamma, c.halluc_rate, Regime::Healthy});
    counts.push_back(1);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_rate /= static_cast<double>(counts[i]);
    out[i].regime = out[i].mean_rate >= threshold ? Regime::Hallucinating : Regime::Healthy;
  }
  return out;
}

}  // namespace activelab::lab
