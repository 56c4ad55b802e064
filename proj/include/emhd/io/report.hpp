#pragma once

// Text outputs: number formatting, diagnostics CSV, SHA-256 digests and run
// manifests.

#include <array>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "emhd/diagnostics.hpp"
#include "emhd/io/atomic_file.hpp"

#ifndef EMHD_VERSION
#define EMHD_VERSION "0.1.0"
#endif

namespace emhd::io {

/// Shortest representation that round-trips.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics CSV. Column order:
//   time, E, D, E_s, E_1, D_1, E_2, D_2, E_high:<s1>..., g1, g2, g3, energy_law_residual

inline std::string csv_header(const DiagnosticsConfig& cfg) {
  std::string h = "time,E,D,E_s,E_1,D_1,E_2,D_2";
  for (double s1 : cfg.s1_list) h += ",E_high:" + format_double(s1);
  h += ",g1,g2,g3,energy_law_residual\n";
  return h;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string row = format_double(r.time);
  for (double v : {r.E, r.D, r.E_s, r.E_1, r.D_1, r.E_2, r.D_2}) row += "," + format_double(v);
  for (double v : r.E_high) row += "," + format_double(v);
  for (double v : {r.g1, r.g2, r.g3, r.energy_law_residual}) row += "," + format_double(v);
  row += "\n";
  return row;
}

inline std::string diagnostics_csv(const DiagnosticsConfig& cfg, const std::vector<DiagnosticsRecord>& rows) {
  std::string out = csv_header(cfg);
  for (const auto& r : rows) out += csv_row(r);
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct EmittedFile {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

/// Collects emitted files and writes manifest.json last. Everything except
/// the "timestamps" object is a function of the configuration alone, and
/// its digest is stored as "deterministic_sha256".
class ManifestBuilder {
 public:
  ManifestBuilder(std::filesystem::path dir, std::string subcommand)
      : dir_(std::move(dir)), subcommand_(std::move(subcommand)), started_(utc_timestamp()) {}

  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

  /// Write `bytes` atomically to dir/name and record its digest.
  void emit(const std::string& name, std::string_view bytes) {
    write_atomic(dir_ / name, bytes);
    files_.push_back({name, sha256_hex(bytes), bytes.size()});
  }

  void set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  [[nodiscard]] nlohmann::json deterministic_part() const {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : files_) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    nlohmann::json m = extra_;
    m["schema_version"] = 1;
    m["code_version"] = EMHD_VERSION;
    m["subcommand"] = subcommand_;
    m["files"] = files;
    return m;
  }

  /// Write manifest.json and return its content.
  nlohmann::json finish() {
    nlohmann::json m = deterministic_part();
    const std::string digest = sha256_hex(m.dump());
    m["deterministic_sha256"] = digest;
    m["timestamps"] = {{"start", started_}, {"end", utc_timestamp()}};
    write_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
    return m;
  }

 private:
  std::filesystem::path dir_;
  std::string subcommand_;
  std::string started_;
  std::vector<EmittedFile> files_;
  nlohmann::json extra_ = nlohmann::json::object();
};

/// Manifest content without the run timestamps; equal for identical runs.
inline nlohmann::json manifest_without_timestamps(nlohmann::json m) {
  m.erase("timestamps");
  return m;
}

}  // namespace emhd::io
