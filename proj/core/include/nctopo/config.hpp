#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nctopo/lattice_model.hpp"

namespace nctopo {

/// Flat key/value configuration: every key maps to a scalar or a list of scalars.
/// Values are kept as text and converted on access, so the same map can be hashed,
/// overridden by a sweep, and re-parsed.
class FlatConfig {
 public:
  static FlatConfig from_file(const std::filesystem::path& path);
  static FlatConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::vector<std::string> values) { values_[key] = std::move(values); }
  void set_scalar(const std::string& key, std::string value) { values_[key] = {std::move(value)}; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;

  std::optional<double> real_or_none(const std::string& key) const;
  std::optional<long> integer_or_none(const std::string& key) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void check_known(const std::set<std::string>& allowed) const;

  /// Sorted "key=v1,v2" lines, skipping `exclude`. Input to the config hash.
  std::string canonical(const std::set<std::string>& exclude = {}) const;

  const std::map<std::string, std::vector<std::string>>& entries() const { return values_; }

 private:
  const std::vector<std::string>& raw(const std::string& key) const;

  std::map<std::string, std::vector<std::string>> values_;
};

/// Keys consumed by model_from_config (documented in docs/config_schema.md).
const std::set<std::string>& model_keys();

ModelConfig model_from_config(const FlatConfig& cfg);

/// Canonical text of every field; two configs build the same operator iff their texts match.
std::string describe(const ModelConfig& m);

/// Digest of (model, seed): the eigendecomposition cache key.
std::uint64_t source_hash(const ModelConfig& m, std::uint64_t seed);

/// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

}  // namespace nctopo
