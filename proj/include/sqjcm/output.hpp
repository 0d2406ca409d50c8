// Deterministic artifact emission: CSV tables at 17 significant digits,
// plain polyline SVG plots, and a manifest listing every emitted file with
// its checksum.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sqjcm::cli {

/// FNV-1a 64-bit checksum (manifest bookkeeping, not cryptographic).
std::uint64_t fnv1a64(const std::string& bytes);

/// %.17g formatting: round-trips doubles exactly, locale-independent.
std::string format_g17(double x);

struct CsvColumn {
  std::string header;
  const std::vector<double>* values;
};

/// Writes comma-separated columns with a header row and LF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns);

/// Reads back a CSV written by write_csv (round-trip checks and tooling).
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* headers = nullptr);

/// Fixed-viewport polyline plot of y(x), y expected in [0, 1].
void write_svg_curve(const std::filesystem::path& path, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& title);

struct ManifestEntry {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint64_t checksum = 0;
};

struct Manifest {
  std::string command;
  std::string config_json;  // serialized effective config
  std::vector<ManifestEntry> files;
  std::vector<std::pair<std::string, std::string>> diagnostics;  // key, value
  double wall_seconds = 0.0;
  std::string status = "ok";

  void add_file(const std::filesystem::path& dir, const std::string& name);
  void write(const std::filesystem::path& dir) const;  // emits manifest.json
};

}  // namespace sqjcm::cli
