#include <cstring>
#include <fstream>
#include <mutex>

#include "nctopo/config.hpp"
#include "nctopo/spectral.hpp"

namespace nctopo {

namespace {

constexpr char magic[8] = {'N', 'C', 'T', 'O', 'P', 'O', 'E', 'V'};
constexpr std::uint32_t format_version = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  put_u64(out, bits);
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::uint8_t(p[i]);
  return v;
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::uint8_t(p[i]);
  return v;
}

double get_f64(const char* p) {
  const std::uint64_t bits = get_u64(p);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

constexpr std::size_t header_size = 8 + 4 + 4 + 8 + 8 + 8;

}  // namespace

EigenCache::EigenCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

std::filesystem::path EigenCache::path_for(std::uint64_t source_hash) const {
  return dir_ / (hex64(source_hash) + ".eig");
}

std::optional<SpectralData> EigenCache::load(std::uint64_t source_hash, const Grid& grid) const {
  std::shared_lock lock(mutex_);
  std::ifstream in(path_for(source_hash), std::ios::binary);
  if (!in) return std::nullopt;
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < header_size || std::memcmp(bytes.data(), magic, 8) != 0) return std::nullopt;
  const char* h = bytes.data();
  if (get_u32(h + 8) != format_version) return std::nullopt;
  if (get_u64(h + 16) != source_hash) return std::nullopt;
  const std::uint64_t n = get_u64(h + 24);
  const std::uint64_t checksum = get_u64(h + 32);
  if (n != grid.size()) return std::nullopt;
  const std::size_t payload = std::size_t(n) * 8 + std::size_t(n) * n * 16;
  if (bytes.size() != header_size + payload) return std::nullopt;
  const std::string_view body(bytes.data() + header_size, payload);
  if (fnv1a(body) != checksum) return std::nullopt;

  SpectralData sd;
  sd.grid = grid;
  sd.source_hash = source_hash;
  sd.eigenvalues.set_size(n);
  sd.eigenvectors.set_size(n, n);
  const char* p = body.data();
  for (std::uint64_t i = 0; i < n; ++i, p += 8) sd.eigenvalues(i) = get_f64(p);
  std::complex<double>* v = sd.eigenvectors.memptr();
  for (std::uint64_t i = 0; i < n * n; ++i, p += 16) v[i] = {get_f64(p), get_f64(p + 8)};
  return sd;
}

void EigenCache::store(const SpectralData& sd) const {
  const std::uint64_t n = sd.eigenvalues.n_elem;
  std::string body;
  body.reserve(std::size_t(n) * 8 + std::size_t(n) * n * 16);
  for (std::uint64_t i = 0; i < n; ++i) put_f64(body, sd.eigenvalues(i));
  const std::complex<double>* v = sd.eigenvectors.memptr();
  for (std::uint64_t i = 0; i < n * n; ++i) {
    put_f64(body, v[i].real());
    put_f64(body, v[i].imag());
  }
  std::string head(magic, 8);
  put_u32(head, format_version);
  put_u32(head, 0);
  put_u64(head, sd.source_hash);
  put_u64(head, n);
  put_u64(head, fnv1a(body));

  std::unique_lock lock(mutex_);
  const auto final_path = path_for(sd.source_hash);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(head.data(), std::streamsize(head.size()));
    out.write(body.data(), std::streamsize(body.size()));
    if (!out) throw std::runtime_error("eigen cache: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

SpectralData EigenCache::get_or_compute(const OperatorKernel& h, std::uint64_t source_hash) const {
  if (auto hit = load(source_hash, h.grid)) return std::move(*hit);
  SpectralData sd = diagonalize(h, source_hash);
  store(sd);
  return sd;
}

}  // namespace nctopo
