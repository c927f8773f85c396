#include "activelab/fixture.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "activelab/error.hpp"

namespace activelab {

namespace {

using Field = std::variant<double*, int*>;
using FieldTable = std::vector<std::pair<std::string, Field>>;

FieldTable duet_fields(DuetParams& p) {
  return {{"likelihood_reliability", &p.likelihood_reliability},
          {"listen_sound_prob", &p.listen_sound_prob},
          {"speak_sound_prob", &p.speak_sound_prob},
          {"preference_hear", &p.preference_hear},
          {"listen_bias_log_weight", &p.listen_bias_log_weight},
          {"prior_weight", &p.prior_weight},
          {"strong_prior", &p.strong_prior},
          {"horizon", &p.horizon},
          {"trial_length", &p.trial_length},
          {"emission_noise", &p.emission_noise}};
}

FieldTable song_fields(SongParams& p) {
  return {{"n_words", &p.n_words},
          {"transition_reliability", &p.transition_reliability},
          {"likelihood_reliability", &p.likelihood_reliability},
          {"repeats", &p.repeats},
          {"horizon", &p.horizon}};
}

FieldTable service_fields(ServiceDefaults& p) {
  return {{"relapse_threshold", &p.relapse_threshold},     {"remission_threshold", &p.remission_threshold},
          {"act_delta_zeta", &p.act_delta_zeta},           {"act_delta_gamma", &p.act_delta_gamma},
          {"csc_flatten_lambda", &p.csc_flatten_lambda},   {"tau_delta_gamma", &p.tau_delta_gamma},
          {"tau_adherence", &p.tau_adherence},             {"severe_flatten_cap", &p.severe_flatten_cap}};
}

Field* find_field(FieldTable& table, const std::string& key) {
  for (auto& [name, field] : table) {
    if (name == key) return &field;
  }
  return nullptr;
}

void assign(Field& field, const nlohmann::json& value, const std::string& where) {
  if (!value.is_number()) throw Error(ErrorKind::InvalidConfig, where + " must be a number");
  if (auto* d = std::get_if<double*>(&field)) {
    **d = value.get<double>();
  } else {
    double v = value.get<double>();
    if (v != std::floor(v)) throw Error(ErrorKind::InvalidConfig, where + " must be an integer");
    *std::get<int*>(field) = static_cast<int>(v);
  }
}

void read_section(const nlohmann::json& doc, const char* name, FieldTable table) {
  if (!doc.contains(name)) return;
  const auto& section = doc.at(name);
  if (!section.is_object()) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must be an object");
  for (const auto& [key, value] : section.items()) {
    Field* f = find_field(table, key);
    if (!f) throw Error(ErrorKind::InvalidConfig, "unknown key " + std::string(name) + "." + key);
    assign(*f, value, std::string(name) + "." + key);
  }
}

nlohmann::json table_to_json(const FieldTable& table) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, field] : table) {
    if (auto* d = std::get_if<double*>(&field)) {
      out[name] = **d;
    } else {
      out[name] = *std::get<int*>(field);
    }
  }
  return out;
}

// sections consumed elsewhere (lab sweep, services course) are validated by their parsers
constexpr std::array<const char*, 6> kTopLevel{"schema", "duet", "song", "services", "sweep", "course"};

}  // namespace

Fixture Fixture::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("fixture is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "fixture must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : kTopLevel) known = known || key == k;
    if (!known) throw Error(ErrorKind::InvalidConfig, "unknown top-level key " + key);
  }
  if (doc.contains("schema") && doc.at("schema") != "activelab-fixture/1") {
    throw Error(ErrorKind::InvalidConfig, "unsupported fixture schema");
  }
  Fixture f;
  read_section(doc, "duet", duet_fields(f.duet));
  read_section(doc, "song", song_fields(f.song));
  read_section(doc, "services", service_fields(f.services));
  f.document = std::move(doc);
  f.sha256 = sha256_hex(text);
  return f;
}

Fixture Fixture::defaults() { return from_json_text(default_fixture_text()); }

Fixture Fixture::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read fixture " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void Fixture::set(const std::string& key, const std::string& value) {
  auto dot = key.find('.');
  if (dot == std::string::npos) throw Error(ErrorKind::InvalidConfig, "override key must be section.key: " + key);
  std::string section = key.substr(0, dot);
  std::string name = key.substr(dot + 1);
  FieldTable table;
  if (section == "duet") {
    table = duet_fields(duet);
  } else if (section == "song") {
    table = song_fields(song);
  } else if (section == "services") {
    table = service_fields(services);
  } else if (section == "sweep" || section == "course") {
    // free-form sections: validated when the command parses them
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      parsed = value;
    }
    document[section][name] = parsed;
    return;
  } else {
    throw Error(ErrorKind::InvalidConfig, "unknown override section " + section);
  }
  Field* f = find_field(table, name);
  if (!f) throw Error(ErrorKind::InvalidConfig, "unknown override key " + key);
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorKind::InvalidConfig, "override " + key + " needs a numeric value");
  }
  assign(*f, v, key);
  document[section][name] = v;
}

nlohmann::json to_json(const DuetParams& p) {
  DuetParams copy = p;
  return table_to_json(duet_fields(copy));
}

nlohmann::json to_json(const SongParams& p) {
  SongParams copy = p;
  return table_to_json(song_fields(copy));
}

nlohmann::json to_json(const ServiceDefaults& p) {
  ServiceDefaults copy = p;
  return table_to_json(service_fields(copy));
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace activelab
