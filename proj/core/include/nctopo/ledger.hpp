#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nctopo/invariants.hpp"

namespace nctopo {

struct LedgerRow {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string task;
  std::string method;
  std::complex<double> value;
  std::optional<long> integer;
  std::optional<TraceWindow> window;
  int samples = 1;
  double standard_error = 0.0;
  /// Ordered; emitted in insertion order.
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::pair<std::string, double>> metrics;

  std::optional<std::string> label(std::string_view key) const;
  std::optional<double> metric(std::string_view key) const;
};

LedgerRow row_from(const InvariantResult& r);

/// Append-only JSON-lines record. Each append is one write(2) on an O_APPEND descriptor,
/// so a killed run leaves only complete lines behind. An in-memory ledger has no file.
class ResultLedger {
 public:
  ResultLedger() = default;
  explicit ResultLedger(std::filesystem::path file);
  ResultLedger(ResultLedger&&) noexcept;
  ResultLedger& operator=(ResultLedger&&) noexcept;
  ResultLedger(const ResultLedger&) = delete;
  ResultLedger& operator=(const ResultLedger&) = delete;
  ~ResultLedger();

  /// Header line: timestamp, code version, build environment, task, config hash and the
  /// canonical config text.
  void write_header(const std::string& task, const std::string& config_hash, const std::string& config_text);
  void append(LedgerRow row);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  const std::filesystem::path& file() const { return file_; }

  static std::string to_json_line(const LedgerRow& row);
  /// Ledger text with every "timestamp" member removed, for reproducibility comparisons.
  static std::string without_timestamps(std::string_view text);

 private:
  void write_line(const std::string& line);

  std::filesystem::path file_;
  int fd_ = -1;
  std::vector<LedgerRow> rows_;
};

/// Tidy CSV: fixed columns, then one column per label key and per metric key in order of
/// first appearance.
void write_rows_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_table_csv(const std::filesystem::path& path, const Table& table);

/// Shortest round-trip text of a double.
std::string format_real(double v);

}  // namespace nctopo
