#include "lpmhd/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "lpmhd/error.hpp"

namespace lpmhd {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw ParameterError("csv: empty header");
  row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ParameterError("csv: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_escape(cells[i]);
  }
  text_ += "\r\n";
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return row(cells);
}

namespace {

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void CsvWriter::save(const std::filesystem::path& path) const { write_bytes(path, text_); }

void save_json(const std::filesystem::path& path, const Json& doc) { write_bytes(path, doc.dump(2) + "\n"); }

Json load_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_bytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// --- checkpoints -------------------------------------------------------------

namespace {

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError(std::string("checkpoint truncated reading ") + what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const std::vector<const SpectralField*>& fields, double time) {
  if (fields.empty()) throw ParameterError("checkpoint: no fields");
  const Grid& g = fields.front()->grid();
  std::vector<std::uint8_t> out = {'L', 'P', 'M', 'H', kCheckpointVersion, static_cast<std::uint8_t>(g.dimension())};
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  put<double>(out, time);
  for (const SpectralField* f : fields) {
    require_same_grid(g, f->grid(), "checkpoint");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f->components()));
    for (int c = 0; c < f->components(); ++c) {
      for (const Complex& z : f->component(c)) {
        put<double>(out, z.real());
        put<double>(out, z.imag());
      }
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[4];
  for (char& m : magic) m = static_cast<char>(r.get<std::uint8_t>("magic"));
  if (std::memcmp(magic, "LPMH", 4) != 0) throw FormatError("checkpoint: bad magic bytes");
  const auto version = r.get<std::uint8_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint cp;
  cp.dimension = r.get<std::uint8_t>("dimension");
  cp.points = static_cast<int>(r.get<std::uint32_t>("N"));
  const auto count = r.get<std::uint32_t>("field count");
  cp.time = r.get<double>("time");
  if (cp.dimension != 2 && cp.dimension != 3) throw FormatError("checkpoint: dimension must be 2 or 3");
  if (cp.points < 2 || cp.points > 4096) throw FormatError("checkpoint: implausible N");
  const Grid grid(cp.dimension, cp.points);
  for (std::uint32_t f = 0; f < count; ++f) {
    const auto comps = r.get<std::uint32_t>("component count");
    if (comps == 0 || comps > 3) throw FormatError("checkpoint: component count must be 1..3");
    SpectralField field(grid, static_cast<int>(comps));
    for (int c = 0; c < field.components(); ++c) {
      for (Complex& z : field.component(c)) {
        const double re = r.get<double>("coefficient");
        const double im = r.get<double>("coefficient");
        z = Complex(re, im);
      }
    }
    cp.fields.push_back(std::move(field));
  }
  if (!r.done()) throw FormatError("checkpoint: trailing bytes");
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const MhdState& state) {
  const auto bytes = encode_checkpoint({&state.u.field(), &state.b.field()}, state.t);
  write_bytes(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

MhdState load_state(const std::filesystem::path& path) {
  const std::string raw = read_bytes(path);
  Checkpoint cp = decode_checkpoint(std::vector<std::uint8_t>(raw.begin(), raw.end()));
  if (cp.fields.size() != 2) throw FormatError("checkpoint: expected two fields (u, b)");
  for (const auto& f : cp.fields) {
    if (f.components() != cp.dimension) throw FormatError("checkpoint: field is not an n-vector");
  }
  SolenoidalField u = SolenoidalField::check(std::move(cp.fields[0]));
  SolenoidalField b = SolenoidalField::check(std::move(cp.fields[1]));
  return {std::move(u), std::move(b), cp.time};
}

// --- constant table ------------------------------------------------------------

void ConstantTable::set(ConstantEntry entry) {
  if (entry.name.empty()) throw ParameterError("constant table: empty name");
  entries_[entry.name] = std::move(entry);
}

const ConstantEntry& ConstantTable::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("constant table has no entry '" + name + "'");
  return it->second;
}

Json ConstantTable::to_json() const {
  Json doc;
  doc["format"] = "lpmhd-constants";
  doc["version"] = 1;
  Json consts = Json::object();
  for (const auto& [name, e] : entries_) {
    Json j;
    j["value"] = e.value;
    j["ensemble"] = e.ensemble;
    j["samples"] = e.samples;
    j["grid"] = e.grid;
    j["drift"] = e.drift ? Json(*e.drift) : Json(nullptr);
    j["drift_tolerance"] = e.drift_tolerance;
    j["flagged"] = e.flagged;
    j["provenance"] = "measured";
    consts[name] = std::move(j);
  }
  doc["constants"] = std::move(consts);
  return doc;
}

ConstantTable ConstantTable::from_json(const Json& doc) {
  try {
    if (doc.at("format") != "lpmhd-constants") throw FormatError("constant table: unknown format");
    if (doc.at("version") != 1) throw FormatError("constant table: unsupported version");
    ConstantTable t;
    for (const auto& [name, j] : doc.at("constants").items()) {
      ConstantEntry e;
      e.name = name;
      e.value = j.at("value").get<double>();
      e.ensemble = j.value("ensemble", "");
      e.samples = j.value("samples", 0);
      e.grid = j.value("grid", "");
      if (j.contains("drift") && !j["drift"].is_null()) e.drift = j["drift"].get<double>();
      e.drift_tolerance = j.value("drift_tolerance", 0.0);
      e.flagged = j.value("flagged", false);
      t.set(std::move(e));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("constant table: ") + e.what());
  }
}

// --- provenance ------------------------------------------------------------------

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) && EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_hash_file(const std::filesystem::path& path) { return git_blob_hash(read_bytes(path)); }

void write_manifest(const std::filesystem::path& dir, const Json& config, std::uint64_t seed,
                    const std::vector<std::string>& files) {
  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  Json doc;
  doc["config"] = config;
  doc["seed"] = seed;
  Json list = Json::array();
  for (const auto& f : sorted) {
    const auto p = dir / f;
    list.push_back({{"path", f}, {"bytes", std::filesystem::file_size(p)}, {"sha1", git_blob_hash_file(p)}});
  }
  doc["files"] = std::move(list);
  save_json(dir / "manifest.json", doc);
}

}  // namespace lpmhd
