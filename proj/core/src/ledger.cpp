#include "nctopo/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <stdexcept>
#include <system_error>

#include "nctopo/version.hpp"

namespace nctopo {

namespace {

using json = nlohmann::ordered_json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_escape(columns[i]);
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(r[i]);
    out << '\n';
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::optional<std::string> LedgerRow::label(std::string_view key) const {
  for (const auto& [k, v] : labels)
    if (k == key) return v;
  return std::nullopt;
}

std::optional<double> LedgerRow::metric(std::string_view key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  return std::nullopt;
}

LedgerRow row_from(const InvariantResult& r) {
  LedgerRow row;
  row.method = to_string(r.method);
  row.value = r.value;
  row.integer = r.integer;
  row.window = r.window;
  row.samples = r.samples;
  row.standard_error = r.standard_error;
  return row;
}

ResultLedger::ResultLedger(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  fd_ = ::open(file_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "cannot open ledger " + file_.string());
}

ResultLedger::ResultLedger(ResultLedger&& other) noexcept
    : file_(std::move(other.file_)), fd_(std::exchange(other.fd_, -1)), rows_(std::move(other.rows_)) {}

ResultLedger& ResultLedger::operator=(ResultLedger&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    file_ = std::move(other.file_);
    fd_ = std::exchange(other.fd_, -1);
    rows_ = std::move(other.rows_);
  }
  return *this;
}

ResultLedger::~ResultLedger() {
  if (fd_ >= 0) ::close(fd_);
}

void ResultLedger::write_line(const std::string& line) {
  if (fd_ < 0) return;
  const std::string buf = line + '\n';
  // O_APPEND positions every write at the end; a regular-file write of this size is not split
  const ssize_t n = ::write(fd_, buf.data(), buf.size());
  if (n != ssize_t(buf.size())) throw std::system_error(errno, std::generic_category(), "ledger write failed");
}

void ResultLedger::write_header(const std::string& task, const std::string& config_hash,
                                const std::string& config_text) {
  json h;
  h["type"] = "header";
  h["timestamp"] = utc_timestamp();
  h["version"] = version;
  h["compiler"] = __VERSION__;
  h["armadillo"] = arma::arma_version::as_string();
  h["task"] = task;
  h["config_hash"] = config_hash;
  h["config"] = config_text;
  write_line(h.dump());
}

void ResultLedger::append(LedgerRow row) {
  write_line(to_json_line(row));
  rows_.push_back(std::move(row));
}

std::string ResultLedger::to_json_line(const LedgerRow& row) {
  json j;
  j["type"] = "result";
  j["config_hash"] = row.config_hash;
  j["seed"] = row.seed;
  j["version"] = version;
  j["task"] = row.task;
  j["method"] = row.method;
  j["value"] = {{"re", row.value.real()}, {"im", row.value.imag()}};
  j["integer"] = row.integer ? json(*row.integer) : json(nullptr);
  if (row.window)
    j["window"] = {{"core_fraction", row.window->core_fraction}, {"margin", row.window->margin}};
  else
    j["window"] = nullptr;
  j["samples"] = row.samples;
  j["standard_error"] = row.standard_error;
  json labels = json::object();
  for (const auto& [k, v] : row.labels) labels[k] = v;
  j["labels"] = std::move(labels);
  json metrics = json::object();
  for (const auto& [k, v] : row.metrics) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  return j.dump();
}

std::string ResultLedger::without_timestamps(std::string_view text) {
  static const std::regex ts(R"re("timestamp":"[^"]*",?)re");
  return std::regex_replace(std::string(text), ts, "");
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows) {
  std::vector<std::string> label_keys, metric_keys;
  auto note = [](std::vector<std::string>& keys, const std::string& k) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.labels) note(label_keys, k);
    for (const auto& [k, v] : r.metrics) note(metric_keys, k);
  }
  std::vector<std::string> columns{"config_hash", "task",    "seed",          "method",       "re",
                                   "im",          "integer", "core_fraction", "margin",       "samples",
                                   "standard_error"};
  columns.insert(columns.end(), label_keys.begin(), label_keys.end());
  columns.insert(columns.end(), metric_keys.begin(), metric_keys.end());

  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    std::vector<std::string> line{r.config_hash,
                                  r.task,
                                  std::to_string(r.seed),
                                  r.method,
                                  format_real(r.value.real()),
                                  format_real(r.value.imag()),
                                  r.integer ? std::to_string(*r.integer) : "",
                                  r.window ? format_real(r.window->core_fraction) : "",
                                  r.window ? std::to_string(r.window->margin) : "",
                                  std::to_string(r.samples),
                                  format_real(r.standard_error)};
    for (const auto& k : label_keys) line.push_back(r.label(k).value_or(""));
    for (const auto& k : metric_keys) {
      const auto m = r.metric(k);
      line.push_back(m ? format_real(*m) : "");
    }
    out.push_back(std::move(line));
  }
  write_csv(path, columns, out);
}

void write_table_csv(const std::filesystem::path& path, const Table& table) {
  write_csv(path, table.columns, table.rows);
}

}  // namespace nctopo
