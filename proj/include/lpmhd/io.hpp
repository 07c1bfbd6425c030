#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lpmhd/mhd.hpp"
#include "lpmhd/spectral_field.hpp"

namespace lpmhd {

using Json = nlohmann::ordered_json;

// --- CSV -------------------------------------------------------------------

/// Shortest-round-trip-safe decimal text (%.17g); "nan", "inf", "-inf" for
/// non-finite values.
std::string format_double(double x);

/// Quotes a cell when it contains a comma, quote, CR or LF; embedded quotes
/// are doubled.
std::string csv_escape(std::string_view cell);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& row(const std::vector<double>& values);
  CsvWriter& row(const std::vector<std::string>& cells);

  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

// --- JSON ------------------------------------------------------------------

/// Two-space indented document with a trailing newline.
void save_json(const std::filesystem::path& path, const Json& doc);
Json load_json(const std::filesystem::path& path);

// --- binary checkpoints ----------------------------------------------------
//
// Layout, all little-endian:
//   bytes 0-3   magic "LPMH"
//   byte  4     format version (1)
//   byte  5     dimension n
//   u32         N (points per axis)
//   u32         number of fields F
//   f64         time
//   F times:    u32 component count C, then C·N^n pairs (re, im) of f64 in
//               grid flat order, component-major.

struct Checkpoint {
  int dimension = 0;
  int points = 0;
  double time = 0.0;
  std::vector<SpectralField> fields;
};

inline constexpr std::uint8_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const std::vector<const SpectralField*>& fields, double time);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const MhdState& state);
/// Reads a two-field (u, b) checkpoint; both fields are re-checked for
/// realness and solenoidality.
MhdState load_state(const std::filesystem::path& path);

// --- fitted-constant table -------------------------------------------------

struct ConstantEntry {
  std::string name;
  double value = 0.0;
  std::string ensemble;
  int samples = 0;
  std::string grid;
  std::optional<double> drift;  // relative change under N doubling, when measured
  double drift_tolerance = 0.0;
  bool flagged = false;         // drift exceeded the tolerance
};

class ConstantTable {
 public:
  void set(ConstantEntry entry);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const ConstantEntry& get(const std::string& name) const;
  double value(const std::string& name) const { return get(name).value; }
  const std::map<std::string, ConstantEntry>& entries() const { return entries_; }

  Json to_json() const;
  static ConstantTable from_json(const Json& doc);
  void save(const std::filesystem::path& path) const { save_json(path, to_json()); }
  static ConstantTable load(const std::filesystem::path& path) { return from_json(load_json(path)); }

 private:
  std::map<std::string, ConstantEntry> entries_;
};

// --- provenance ------------------------------------------------------------

/// Hex SHA-1 of "blob <size>\0" + content, as `git hash-object` prints.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// Writes <dir>/manifest.json: config echo, seed, and the blob hash of every
/// listed file (paths relative to dir, sorted).
void write_manifest(const std::filesystem::path& dir, const Json& config, std::uint64_t seed,
                    const std::vector<std::string>& files);

}  // namespace lpmhd
