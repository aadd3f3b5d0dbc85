#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nctopo/config.hpp"

namespace nctopo {

namespace {

FlatConfig from_node(const YAML::Node& root) {
  FlatConfig out;
  if (!root || root.IsNull()) return out;
  if (!root.IsMap()) throw ConfigError("config must be a flat key/value map");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    std::vector<std::string> vals;
    if (v.IsScalar()) {
      vals.push_back(v.as<std::string>());
    } else if (v.IsSequence()) {
      for (const auto& item : v) {
        if (!item.IsScalar()) throw ConfigError("key '" + key + "': list items must be scalars");
        vals.push_back(item.as<std::string>());
      }
    } else if (v.IsNull()) {
      throw ConfigError("key '" + key + "' has no value");
    } else {
      throw ConfigError("key '" + key + "': nested maps are not allowed");
    }
    out.set(key, std::move(vals));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& s) {
  // yaml-style special spellings are not accepted; plain decimal or exponent notation only
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  return v;
}

long parse_integer(const std::string& key, const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

FlatConfig FlatConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

FlatConfig FlatConfig::from_string(const std::string& text) {
  try {
    return from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
}

const std::vector<std::string>& FlatConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string FlatConfig::text(const std::string& key) const {
  const auto& v = raw(key);
  if (v.size() != 1) throw ConfigError("key '" + key + "' must be a scalar");
  return v.front();
}

double FlatConfig::real(const std::string& key) const { return parse_real(key, text(key)); }

long FlatConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }

std::vector<double> FlatConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : raw(key)) out.push_back(parse_real(key, s));
  return out;
}

std::vector<long> FlatConfig::integers(const std::string& key) const {
  std::vector<long> out;
  for (const auto& s : raw(key)) out.push_back(parse_integer(key, s));
  return out;
}

std::optional<double> FlatConfig::real_or_none(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return real(key);
}

std::optional<long> FlatConfig::integer_or_none(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

void FlatConfig::check_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_)
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "'");
}

std::string FlatConfig::canonical(const std::set<std::string>& exclude) const {
  std::string out;
  for (const auto& [k, v] : values_) {
    if (exclude.count(k)) continue;
    out += k;
    out += '=';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += v[i];
    }
    out += '\n';
  }
  return out;
}

const std::set<std::string>& model_keys() {
  static const std::set<std::string> keys{
      "dimension", "box_length", "sites",       "sites_per_axis",    "spacing",
      "field",     "flux_quanta", "boundary",   "internal_dofs",     "potential",
      "disorder_amplitude", "bump_radius", "wavevectors", "dof_field_sign", "dof_onsite",
      "staggered"};
  return keys;
}

ModelConfig model_from_config(const FlatConfig& cfg) {
  ModelConfig m;
  m.dim = int(cfg.integer("dimension"));
  if (m.dim < 1 || m.dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
  m.spacing = cfg.real("spacing");

  const bool has_len = cfg.has("box_length"), has_sites = cfg.has("sites"), has_axes = cfg.has("sites_per_axis");
  if (int(has_len) + int(has_sites) + int(has_axes) != 1)
    throw ConfigError("exactly one of box_length, sites, sites_per_axis is required");
  if (has_len) m.box_length = cfg.real("box_length");
  if (has_sites) {
    m.box_length = double(cfg.integer("sites")) * m.spacing;
    for (int k = 0; k < m.dim; ++k) m.sites_per_axis[k] = int(cfg.integer("sites"));
  }
  if (has_axes) {
    const auto n = cfg.integers("sites_per_axis");
    if (int(n.size()) != m.dim) throw ConfigError("sites_per_axis needs one entry per axis");
    for (int k = 0; k < m.dim; ++k) m.sites_per_axis[k] = int(n[k]);
  }

  if (m.dim >= 2) {
    if (cfg.has("field") == cfg.has("flux_quanta")) throw ConfigError("exactly one of field, flux_quanta is required");
    const bool by_flux = cfg.has("flux_quanta");
    const auto b = by_flux ? cfg.reals("flux_quanta") : cfg.reals("field");
    if (b.size() != std::size_t(m.dim * (m.dim - 1) / 2))
      throw ConfigError("field / flux_quanta need one entry per coordinate plane (12, 13, 23)");
    int idx = 0;
    for (int j = 0; j < m.dim; ++j)
      for (int k = j + 1; k < m.dim; ++k, ++idx) {
        // flux quanta through a coordinate face: B_jk = 2 pi N_jk / (L_j L_k)
        const double area = m.sites(j) * m.spacing * m.sites(k) * m.spacing;
        const double bjk = by_flux ? 2.0 * std::numbers::pi * b[idx] / area : b[idx];
        m.field[j][k] = bjk;
        m.field[k][j] = -bjk;
      }
  } else if (cfg.has("field") || cfg.has("flux_quanta")) {
    throw ConfigError("a magnetic field needs dimension >= 2");
  }

  m.boundary = boundary_from_string(cfg.text("boundary"));
  m.dofs = int(cfg.integer("internal_dofs"));
  m.potential.kind = potential_from_string(cfg.text("potential"));
  if (m.potential.kind != PotentialKind::none) m.potential.amplitude = cfg.real("disorder_amplitude");
  if (m.potential.kind == PotentialKind::random_bumps) m.potential.bump_radius = cfg.real("bump_radius");
  if (m.potential.kind == PotentialKind::quasi_periodic) {
    const auto w = cfg.reals("wavevectors");
    if (w.empty() || w.size() % std::size_t(m.dim) != 0)
      throw ConfigError("wavevectors must list dimension-many components per mode");
    for (std::size_t i = 0; i < w.size(); i += m.dim) {
      Point k{0, 0, 0};
      for (int c = 0; c < m.dim; ++c) k[c] = w[i + c];
      m.potential.wavevectors.push_back(k);
    }
  }
  if (cfg.has("dof_field_sign"))
    for (long s : cfg.integers("dof_field_sign")) m.dof_field_sign.push_back(int(s));
  if (cfg.has("dof_onsite")) m.dof_onsite = cfg.reals("dof_onsite");
  if (cfg.has("staggered")) m.staggered = cfg.real("staggered");
  m.validate();
  return m;
}

std::string describe(const ModelConfig& m) {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << m.dim << ";spacing=" << m.spacing << ";sites=";
  for (int k = 0; k < m.dim; ++k) os << m.sites(k) << ',';
  os << ";field=";
  for (int j = 0; j < m.dim; ++j)
    for (int k = j + 1; k < m.dim; ++k) os << m.field[j][k] << ',';
  os << ";boundary=" << to_string(m.boundary) << ";dofs=" << m.dofs << ";potential=" << to_string(m.potential.kind)
     << ";W=" << m.potential.amplitude << ";bump=" << m.potential.bump_radius << ";k=";
  for (const auto& k : m.potential.wavevectors)
    for (int c = 0; c < m.dim; ++c) os << k[c] << ',';
  os << ";sign=";
  for (int s : m.dof_field_sign) os << s << ',';
  os << ";onsite=";
  for (double e : m.dof_onsite) os << e << ',';
  os << ";staggered=" << m.staggered;
  return os.str();
}

std::uint64_t source_hash(const ModelConfig& m, std::uint64_t seed) {
  return fnv1a(describe(m) + ";seed=" + std::to_string(seed));
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace nctopo
