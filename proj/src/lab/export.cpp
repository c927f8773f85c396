#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "activelab/error.hpp"
#include "activelab/lab.hpp"

namespace activelab::lab {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// white -> dark red
std::string heat_colour(double rate) {
  rate = std::clamp(rate, 0.0, 1.0);
  auto g = static_cast<int>(255.0 * (1.0 - rate));
  auto r = static_cast<int>(255.0 - 75.0 * rate);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, g);
  return buf;
}

}  // namespace

std::string_view to_string(Format f) noexcept {
  switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::SvgHeatmap: return "svg";
  }
  return "csv";
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "svg" || name == "svg_heatmap") return Format::SvgHeatmap;
  throw Error(ErrorKind::InvalidConfig, "unknown export format '" + std::string(name) + "'");
}

std::string to_csv(const SweepResult& result) {
  std::string out = "policy_variant,zeta,gamma,rep,halluc_rate,miss_rate,utilized_policies\n";
  for (const auto& c : result.cells) {
    out += std::string(scenarios::to_string(c.variant)) + ',' + fixed6(c.zeta) + ',' + fixed6(c.gamma) + ',' +
           std::to_string(c.rep) + ',' + fixed6(c.halluc_rate) + ',' + fixed6(c.miss_rate) + ',' +
           std::to_string(c.utilized_policies) + '\n';
  }
  return out;
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"policy_variant", std::string(scenarios::to_string(c.variant))},
                     {"zeta", c.zeta},
                     {"gamma", c.gamma},
                     {"rep", c.rep},
                     {"halluc_rate", c.halluc_rate},
                     {"miss_rate", c.miss_rate},
                     {"utilized_policies", c.utilized_policies}});
  }
  const auto& p = result.provenance;
  return {{"cells", cells},
          {"provenance",
           {{"fixture_sha256", p.fixture_sha256}, {"seed", p.seed}, {"version", p.version}, {"spec", p.spec}}}};
}

SweepResult sweep_result_from_json(const nlohmann::json& doc) {
  try {
    SweepResult r;
    for (const auto& c : doc.at("cells")) {
      r.cells.push_back(SweepCell{scenarios::parse_policy_variant(c.at("policy_variant").get<std::string>()),
                                  c.at("zeta").get<double>(), c.at("gamma").get<double>(), c.at("rep").get<int>(),
                                  c.at("halluc_rate").get<double>(), c.at("miss_rate").get<double>(),
                                  c.at("utilized_policies").get<std::size_t>()});
    }
    const auto& p = doc.at("provenance");
    r.provenance.fixture_sha256 = p.at("fixture_sha256").get<std::string>();
    r.provenance.seed = p.at("seed").get<std::uint64_t>();
    r.provenance.version = p.at("version").get<std::string>();
    r.provenance.spec = p.at("spec");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("malformed sweep document: ") + e.what());
  }
}

std::string to_svg_heatmap(const SweepResult& result, scenarios::PolicyVariant variant) {
  std::vector<double> zetas, gammas;
  for (const auto& c : result.cells) {
    if (c.variant != variant) continue;
    if (std::find(zetas.begin(), zetas.end(), c.zeta) == zetas.end()) zetas.push_back(c.zeta);
    if (std::find(gammas.begin(), gammas.end(), c.gamma) == gammas.end()) gammas.push_back(c.gamma);
  }
  if (zetas.size() < 2 || gammas.size() < 2) {
    throw Error(ErrorKind::InvalidVisualization, "heatmap needs at least two zeta and two gamma values");
  }
  std::sort(zetas.begin(), zetas.end());
  std::sort(gammas.begin(), gammas.end());
  std::vector<double> sum(zetas.size() * gammas.size(), 0.0);
  std::vector<int> n(sum.size(), 0);
  for (const auto& c : result.cells) {
    if (c.variant != variant) continue;
    auto zi = static_cast<std::size_t>(std::find(zetas.begin(), zetas.end(), c.zeta) - zetas.begin());
    auto gi = static_cast<std::size_t>(std::find(gammas.begin(), gammas.end(), c.gamma) - gammas.begin());
    sum[gi * zetas.size() + zi] += c.halluc_rate;
    ++n[gi * zetas.size() + zi];
  }

  constexpr int kCell = 48, kLeft = 70, kTop = 40;
  const int width = kLeft + kCell * static_cast<int>(zetas.size()) + 20;
  const int height = kTop + kCell * static_cast<int>(gammas.size()) + 50;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << kLeft << "\" y=\"20\">hallucination rate: " << scenarios::to_string(variant) << "</text>\n";
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    // largest gamma on top
    const int y = kTop + kCell * static_cast<int>(gammas.size() - 1 - gi);
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4 << "\" text-anchor=\"end\">"
        << short_number(gammas[gi]) << "</text>\n";
    for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
      const std::size_t k = gi * zetas.size() + zi;
      const int x = kLeft + kCell * static_cast<int>(zi);
      if (n[k] == 0) continue;
      const double rate = sum[k] / n[k];
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
          << heat_colour(rate) << "\" stroke=\"#888\"><title>zeta=" << short_number(zetas[zi])
          << " gamma=" << short_number(gammas[gi]) << " rate=" << fixed6(rate) << "</title></rect>\n";
    }
  }
  const int base = kTop + kCell * static_cast<int>(gammas.size());
  for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
    svg << "<text x=\"" << kLeft + kCell * static_cast<int>(zi) + kCell / 2 << "\" y=\"" << base + 16
        << "\" text-anchor=\"middle\">" << short_number(zetas[zi]) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + kCell * static_cast<int>(zetas.size()) / 2 << "\" y=\"" << base + 36
      << "\" text-anchor=\"middle\">zeta</text>\n";
  svg << "<text x=\"14\" y=\"" << kTop + kCell * static_cast<int>(gammas.size()) / 2 << "\">gamma</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string to_csv(const services::CourseRecord& course) {
  std::string out =
      "episode,program,adherent,zeta,gamma,halluc_rate,miss_rate,relapse,d_sound,utilized_policies,"
      "available_policies,prior_counts\n";
  for (const auto& e : course.episodes) {
    std::string counts;
    for (std::size_t i = 0; i < e.prior_counts.size(); ++i) counts += (i ? ";" : "") + fixed6(e.prior_counts[i]);
    out += std::to_string(e.index) + ',' + (e.program ? std::string(services::to_string(*e.program)) : "none") + ',' +
           (e.adherent ? "1" : "0") + ',' + fixed6(e.zeta) + ',' + fixed6(e.gamma) + ',' + fixed6(e.halluc_rate) +
           ',' + fixed6(e.miss_rate) + ',' + (e.relapse ? "1" : "0") + ',' + fixed6(e.d_sound) + ',' +
           std::to_string(e.utilized_policies) + ',' + std::to_string(e.available_policies) + ',' + counts + '\n';
  }
  return out;
}

nlohmann::json to_json(const services::CourseRecord& course) {
  nlohmann::json episodes = nlohmann::json::array();
  for (const auto& e : course.episodes) {
    episodes.push_back({{"episode", e.index},
                        {"program", e.program ? nlohmann::json(std::string(services::to_string(*e.program))) : nullptr},
                        {"adherent", e.adherent},
                        {"zeta", e.zeta},
                        {"gamma", e.gamma},
                        {"halluc_rate", e.halluc_rate},
                        {"miss_rate", e.miss_rate},
                        {"relapse", e.relapse},
                        {"prior_counts", e.prior_counts},
                        {"d_sound", e.d_sound},
                        {"utilized_policies", e.utilized_policies},
                        {"available_policies", e.available_policies}});
  }
  nlohmann::json recoveries = nlohmann::json::array();
  for (const auto& r : course.recoveries) {
    recoveries.push_back({{"relapse_end", r.relapse_end},
                          {"episodes", r.episodes ? nlohmann::json(*r.episodes) : nlohmann::json(nullptr)}});
  }
  return {{"episodes", episodes}, {"relapse_count", course.relapse_count}, {"recoveries", recoveries}};
}

std::string to_csv(const scenarios::TrialRecord& record) {
  std::string out = "t,world_state,observation,percept,confidence,action,argmax_policy,hallucination,miss,content_error";
  const auto labels = record.steps.empty() ? std::vector<std::string>{} : record.steps.front().q_state.domain()->labels();
  for (const auto& l : labels) out += ",q_" + l;
  out += '\n';
  for (std::size_t t = 0; t < record.steps.size(); ++t) {
    const auto& s = record.steps[t];
    out += std::to_string(t) + ',' + s.world_state + ',' + s.observation + ',' + s.percept.label + ',' +
           fixed6(s.percept.confidence) + ',' + s.action + ',' + s.argmax_policy + ',' + (s.hallucination ? "1" : "0") +
           ',' + (s.miss ? "1" : "0") + ',' + (s.content_error ? "1" : "0");
    for (double p : s.q_state.probs()) out += ',' + fixed6(p);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const scenarios::TrialRecord& record) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : record.steps) {
    steps.push_back({{"world_state", s.world_state},
                     {"observation", s.observation},
                     {"q_state", s.q_state.probs()},
                     {"percept", s.percept.label},
                     {"confidence", s.percept.confidence},
                     {"action", s.action},
                     {"argmax_policy", s.argmax_policy},
                     {"hallucination", s.hallucination},
                     {"miss", s.miss},
                     {"content_error", s.content_error}});
  }
  return {{"steps", steps},
          {"hallucinations", record.hallucinations},
          {"misses", record.misses},
          {"content_errors", record.content_errors},
          {"silent_steps", record.silent_steps},
          {"sound_steps", record.sound_steps}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorKind::IoError, "cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorKind::IoError, "cannot move output into " + path.string() + ": " + ec.message());
  }
}

void export_results(const SweepResult& result, Format format, const std::filesystem::path& path,
                    scenarios::PolicyVariant heatmap_variant) {
  switch (format) {
    case Format::Csv: write_atomic(path, to_csv(result)); break;
    case Format::Json: write_atomic(path, to_json(result).dump(2) + "\n"); break;
    case Format::SvgHeatmap: write_atomic(path, to_svg_heatmap(result, heatmap_variant)); break;
  }
}

void export_results(const services::CourseRecord& course, Format format, const std::filesystem::path& path) {
  switch (format) {
    case Format::Csv: write_atomic(path, to_csv(course)); break;
    case Format::Json: write_atomic(path, to_json(course).dump(2) + "\n"); break;
    case Format::SvgHeatmap: throw Error(ErrorKind::InvalidVisualization, "courses have no heatmap form");
  }
}

}  // namespace activelab::lab
