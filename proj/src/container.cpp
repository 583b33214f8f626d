#include "dirtk/container.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "dirtk/directivity.hpp"

namespace dirtk {
namespace {

static_assert(std::endian::native == std::endian::little,
              "container encoding is little-endian");

constexpr char kMagic[8] = {'S', 'O', 'F', 'A', 'L', 'I', 'T', 'E'};
constexpr uint32_t kVersion = 1;

void put32(std::string& b, uint32_t v) { b.append(reinterpret_cast<const char*>(&v), 4); }
void put64(std::string& b, uint64_t v) { b.append(reinterpret_cast<const char*>(&v), 8); }
void putf64(std::string& b, Real v) { b.append(reinterpret_cast<const char*>(&v), 8); }

// Sequential decoder with bounds checking; all failures name the file.
struct Cursor {
  const std::string& bytes;
  const std::filesystem::path& path;
  size_t at = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(path.string() + ": " + what);
  }
  const char* take(size_t n, const char* what) {
    if (at + n > bytes.size()) fail(std::string("truncated ") + what);
    const char* p = bytes.data() + at;
    at += n;
    return p;
  }
  uint32_t u32(const char* what) {
    uint32_t v;
    std::memcpy(&v, take(4, what), 4);
    return v;
  }
  uint64_t u64(const char* what) {
    uint64_t v;
    std::memcpy(&v, take(8, what), 8);
    return v;
  }
  Real f64(const char* what) {
    Real v;
    std::memcpy(&v, take(8, what), 8);
    return v;
  }
  std::string str(const char* what) {
    const uint32_t n = u32(what);
    return std::string(take(n, what), n);
  }
};

bool has(const DirectivityDocument& doc, std::string_view key) {
  return doc.metadata.count(std::string(key)) != 0;
}

void require_key(const DirectivityDocument& doc, std::string_view key) {
  if (!has(doc, key))
    throw std::invalid_argument("missing metadata key " + std::string(key));
}

void forbid_key(const DirectivityDocument& doc, std::string_view key) {
  if (has(doc, key))
    throw std::invalid_argument("metadata key " + std::string(key) +
                                " is not part of the one-third octave representation");
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument(std::string(what) + " is not an integer: '" +
                                std::string(s) + "'");
  return v;
}

}  // namespace

void validate(const DirectivityDocument& doc) {
  const Index r = doc.data_real.rows();
  const Index n = doc.data_real.cols();
  if (r < 1 || n < 1) throw std::invalid_argument("document data is empty");
  if (doc.data_imag.rows() != r || doc.data_imag.cols() != n)
    throw std::invalid_argument("data_real and data_imag dimensions differ");
  if (doc.frequencies.size() != n)
    throw std::invalid_argument("frequency axis does not match the data width");
  if (doc.receivers.size() != r)
    throw std::invalid_argument("receiver grid does not match the data height");
  if (doc.receivers.weights.size() != r)
    throw std::invalid_argument("receiver grid is missing quadrature weights");
  if (!doc.data_real.allFinite() || !doc.data_imag.allFinite() ||
      !doc.frequencies.allFinite() || !doc.receivers.weights.allFinite())
    throw std::invalid_argument("document contains non-finite values");
  for (Index k = 0; k + 1 < n; ++k)
    if (doc.frequencies(k) >= doc.frequencies(k + 1))
      throw std::invalid_argument("frequencies must be strictly increasing");
  if (doc.frequencies(0) < 0) throw std::invalid_argument("negative frequency");
  for (const auto& [k, v] : doc.metadata)
    if (k.empty()) throw std::invalid_argument("empty metadata key");

  for (const auto key : {keys::source_name, keys::musician, keys::manufacturer,
                         keys::source_view, keys::description})
    require_key(doc, key);

  switch (doc.kind) {
    case DocumentKind::recordings: {
      require_key(doc, keys::midi_note);
      require_key(doc, keys::tuning_frequency);
      require_key(doc, keys::steady_part);
      const int midi = parse_int(doc.metadata.at(std::string(keys::midi_note)), keys::midi_note);
      if (midi < 0 || midi > 127)
        throw std::invalid_argument("MidiNote out of range: " + std::to_string(midi));
      // single-sided spectrum of a real signal: DC and Nyquist bins are real
      if (doc.data_imag.col(0).cwiseAbs().maxCoeff() != 0 ||
          doc.data_imag.col(n - 1).cwiseAbs().maxCoeff() != 0)
        throw std::invalid_argument(
            "recordings data does not originate from a real signal (complex DC/Nyquist bin)");
      break;
    }
    case DocumentKind::single_note:
      require_key(doc, keys::midi_note);
      require_key(doc, keys::tuning_frequency);
      if (doc.data_imag.cwiseAbs().maxCoeff() != 0)
        throw std::invalid_argument("single-note imaginary part must contain only zeros");
      break;
    case DocumentKind::third_octave: {
      forbid_key(doc, keys::midi_note);
      forbid_key(doc, keys::tuning_frequency);
      forbid_key(doc, keys::steady_part);
      if (doc.data_imag.cwiseAbs().maxCoeff() != 0)
        throw std::invalid_argument("one-third octave imaginary part must contain only zeros");
      if (n != kBandCount)
        throw std::invalid_argument("one-third octave document must carry " +
                                    std::to_string(kBandCount) + " bands, got " +
                                    std::to_string(n));
      const Vector centers = nominal_band_centers();
      if ((doc.frequencies.array() != centers.array()).any())
        throw std::invalid_argument(
            "one-third octave frequency axis must be the nominal centre frequencies");
      break;
    }
  }
}

void write_document(const DirectivityDocument& doc, const std::filesystem::path& path) {
  validate(doc);
  const auto r = static_cast<uint64_t>(doc.data_real.rows());
  const auto n = static_cast<uint64_t>(doc.data_real.cols());

  std::string out;
  out.reserve(64 + 8 * (n + 4 * r + 2 * r * n));
  out.append(kMagic, 8);
  put32(out, kVersion);
  put32(out, static_cast<uint32_t>(doc.kind));
  put64(out, 1);  // M
  put64(out, r);
  put64(out, n);
  for (Index k = 0; k < doc.frequencies.size(); ++k) putf64(out, doc.frequencies(k));
  for (Index i = 0; i < doc.receivers.size(); ++i) {
    const auto& p = doc.receivers.points[static_cast<size_t>(i)];
    putf64(out, p.azimuth);
    putf64(out, p.colatitude);
    putf64(out, p.radius);
    putf64(out, doc.receivers.weights(i));
  }
  for (Index i = 0; i < doc.data_real.rows(); ++i)
    for (Index k = 0; k < doc.data_real.cols(); ++k) putf64(out, doc.data_real(i, k));
  for (Index i = 0; i < doc.data_imag.rows(); ++i)
    for (Index k = 0; k < doc.data_imag.cols(); ++k) putf64(out, doc.data_imag(i, k));
  put32(out, static_cast<uint32_t>(doc.metadata.size()));
  for (const auto& [k, v] : doc.metadata) {  // std::map order: deterministic bytes
    put32(out, static_cast<uint32_t>(k.size()));
    out += k;
    put32(out, static_cast<uint32_t>(v.size()));
    out += v;
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot create " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path.string());
}

DirectivityDocument read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Cursor c{bytes, path};

  if (std::memcmp(c.take(8, "magic"), kMagic, 8) != 0)
    c.fail("not a portable directivity container (bad magic)");
  const uint32_t version = c.u32("version");
  if (version != kVersion)
    c.fail("unsupported container version " + std::to_string(version));
  const uint32_t kind = c.u32("kind");
  if (kind > 2) c.fail("unknown document kind " + std::to_string(kind));
  const uint64_t m = c.u64("dimension M");
  if (m != 1) c.fail("dimension M must be 1, got " + std::to_string(m));
  const uint64_t r64 = c.u64("dimension R");
  const uint64_t n64 = c.u64("dimension N");
  if (r64 == 0 || n64 == 0 || r64 > 1u << 20 || n64 > 1u << 26)
    c.fail("implausible dimensions R=" + std::to_string(r64) +
           " N=" + std::to_string(n64));
  const auto r = static_cast<Index>(r64);
  const auto n = static_cast<Index>(n64);

  DirectivityDocument doc;
  doc.kind = static_cast<DocumentKind>(kind);
  doc.frequencies.resize(n);
  for (Index k = 0; k < n; ++k) doc.frequencies(k) = c.f64("frequency axis");
  doc.receivers.points.resize(static_cast<size_t>(r));
  doc.receivers.weights.resize(r);
  for (Index i = 0; i < r; ++i) {
    auto& p = doc.receivers.points[static_cast<size_t>(i)];
    p.azimuth = c.f64("receiver positions");
    p.colatitude = c.f64("receiver positions");
    p.radius = c.f64("receiver positions");
    doc.receivers.weights(i) = c.f64("receiver weights");
  }
  doc.data_real.resize(r, n);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < n; ++k) doc.data_real(i, k) = c.f64("real data");
  doc.data_imag.resize(r, n);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < n; ++k) doc.data_imag(i, k) = c.f64("imaginary data");
  const uint32_t entries = c.u32("metadata table");
  for (uint32_t e = 0; e < entries; ++e) {
    std::string key = c.str("metadata key");
    std::string value = c.str("metadata value");
    if (!doc.metadata.emplace(std::move(key), std::move(value)).second)
      c.fail("duplicate metadata key");
  }
  if (c.at != bytes.size()) c.fail("trailing bytes after document");

  try {
    validate(doc);
  } catch (const std::invalid_argument& err) {
    c.fail(err.what());
  }
  return doc;
}

void write_fir_bank(const FirBank& bank, const std::filesystem::path& path) {
  const auto r = static_cast<uint64_t>(bank.taps.rows());
  const auto l = static_cast<uint64_t>(bank.taps.cols());
  if (r == 0 || l == 0) throw std::invalid_argument("empty filter bank");
  if (bank.grid.size() != bank.taps.rows() || bank.grid.weights.size() != bank.taps.rows())
    throw std::invalid_argument("filter bank grid does not match the tap matrix");
  if (!(bank.sample_rate > 0)) throw std::invalid_argument("filter bank needs a sample rate");
  if (!bank.taps.allFinite()) throw std::invalid_argument("filter bank contains non-finite taps");

  std::string out;
  out.reserve(64 + 8 * (4 * r + r * l));
  out.append("DIRTKFIR", 8);
  put32(out, kVersion);
  putf64(out, bank.sample_rate);
  put64(out, r);
  put64(out, l);
  for (Index i = 0; i < bank.grid.size(); ++i) {
    const auto& p = bank.grid.points[static_cast<size_t>(i)];
    putf64(out, p.azimuth);
    putf64(out, p.colatitude);
    putf64(out, p.radius);
    putf64(out, bank.grid.weights(i));
  }
  for (Index i = 0; i < bank.taps.rows(); ++i)
    for (Index k = 0; k < bank.taps.cols(); ++k) putf64(out, bank.taps(i, k));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot create " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path.string());
}

FirBank read_fir_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Cursor c{bytes, path};
  if (std::memcmp(c.take(8, "magic"), "DIRTKFIR", 8) != 0)
    c.fail("not a filter bank (bad magic)");
  if (const uint32_t v = c.u32("version"); v != kVersion)
    c.fail("unsupported filter bank version " + std::to_string(v));
  FirBank bank;
  bank.sample_rate = c.f64("sample rate");
  const uint64_t r64 = c.u64("direction count");
  const uint64_t l64 = c.u64("filter length");
  if (r64 == 0 || l64 == 0 || r64 > 1u << 20 || l64 > 1u << 24)
    c.fail("implausible dimensions R=" + std::to_string(r64) +
           " L=" + std::to_string(l64));
  const auto r = static_cast<Index>(r64);
  const auto l = static_cast<Index>(l64);
  bank.grid.points.resize(static_cast<size_t>(r));
  bank.grid.weights.resize(r);
  for (Index i = 0; i < r; ++i) {
    auto& p = bank.grid.points[static_cast<size_t>(i)];
    p.azimuth = c.f64("directions");
    p.colatitude = c.f64("directions");
    p.radius = c.f64("directions");
    bank.grid.weights(i) = c.f64("direction weights");
  }
  bank.taps.resize(r, l);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < l; ++k) bank.taps(i, k) = c.f64("taps");
  if (c.at != bytes.size()) c.fail("trailing bytes after filter bank");
  if (!(bank.sample_rate > 0)) c.fail("nonpositive sample rate");
  return bank;
}

std::string_view to_string(Dynamic d) { return d == Dynamic::pp ? "pp" : "ff"; }

Dynamic dynamic_from_string(std::string_view s) {
  if (s == "pp") return Dynamic::pp;
  if (s == "ff") return Dynamic::ff;
  throw std::invalid_argument("unknown dynamic '" + std::string(s) + "' (expected pp or ff)");
}

std::string note_name(int midi) {
  if (midi < 0 || midi > 127)
    throw std::invalid_argument("MIDI note out of range: " + std::to_string(midi));
  static constexpr const char* names[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                            "F#", "G",  "G#", "A",  "A#", "B"};
  return std::string(names[midi % 12]) + std::to_string(midi / 12 - 1);
}

std::string document_filename(std::string_view source_name, DocumentKind kind,
                              Dynamic dynamic, int midi) {
  if (source_name.empty()) throw std::invalid_argument("empty source name");
  if (source_name.find('/') != std::string_view::npos ||
      source_name.find('\0') != std::string_view::npos)
    throw std::invalid_argument("source name must not contain path separators");
  if (midi < 0 || midi > 127)
    throw std::invalid_argument("MIDI note out of range: " + std::to_string(midi));
  std::string base(source_name);
  switch (kind) {
    case DocumentKind::recordings:
      return base + "_" + std::string(to_string(dynamic)) + "_" +
             std::to_string(midi) + "_recordings.sofalite";
    case DocumentKind::single_note:
      return base + "_" + std::to_string(midi) + "_singleTones.sofalite";
    case DocumentKind::third_octave:
      return base + "_3rdOctave.sofalite";
  }
  throw std::invalid_argument("unknown document kind");
}

ParsedName parse_document_filename(std::string_view filename) {
  std::string_view stem = filename;
  if (const auto slash = stem.rfind('/'); slash != std::string_view::npos)
    stem.remove_prefix(slash + 1);
  if (stem.ends_with(".sofalite")) stem.remove_suffix(9);

  // the scheme is parsed from the right so source names may contain '_'
  std::vector<std::string_view> tokens;
  size_t start = 0;
  while (true) {
    const size_t us = stem.find('_', start);
    if (us == std::string_view::npos) {
      tokens.push_back(stem.substr(start));
      break;
    }
    tokens.push_back(stem.substr(start, us - start));
    start = us + 1;
  }
  const auto join_head = [&](size_t count) {
    std::string s;
    for (size_t i = 0; i < count; ++i) {
      if (i) s += '_';
      s += tokens[i];
    }
    return s;
  };

  ParsedName parsed;
  const std::string_view tail = tokens.back();
  if (tail == "recordings" && tokens.size() >= 4) {
    parsed.kind = DocumentKind::recordings;
    parsed.midi = parse_int(tokens[tokens.size() - 2], "MIDI note in filename");
    parsed.dynamic = dynamic_from_string(tokens[tokens.size() - 3]);
    parsed.source_name = join_head(tokens.size() - 3);
  } else if (tail == "singleTones" && tokens.size() >= 3) {
    parsed.kind = DocumentKind::single_note;
    parsed.midi = parse_int(tokens[tokens.size() - 2], "MIDI note in filename");
    parsed.source_name = join_head(tokens.size() - 2);
  } else if (tail == "3rdOctave" && tokens.size() >= 2) {
    parsed.kind = DocumentKind::third_octave;
    parsed.source_name = join_head(tokens.size() - 1);
  } else {
    throw std::invalid_argument("unrecognized document filename: '" +
                                std::string(filename) + "'");
  }
  if (parsed.source_name.empty())
    throw std::invalid_argument("document filename has an empty source name: '" +
                                std::string(filename) + "'");
  return parsed;
}

}  // namespace dirtk
