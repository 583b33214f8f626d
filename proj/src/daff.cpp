#include "dirtk/daff.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace dirtk {
namespace {

static_assert(std::endian::native == std::endian::little && sizeof(float) == 4);

constexpr int32_t kDaffVersion = 170;  // v1.7 structures
constexpr int32_t kBlockMainHeader = 1;
constexpr int32_t kBlockContentHeader = 2;
constexpr int32_t kBlockData = 4;
constexpr int32_t kBlockMetadata = 5;
constexpr int32_t kContentMagnitudeSpectrum = 1;
constexpr int32_t kQuantizationFloat32 = 2;
constexpr int32_t kMetadataString = 3;

void put_i32(std::string& b, int32_t v) { b.append(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::string& b, uint64_t v) { b.append(reinterpret_cast<const char*>(&v), 8); }
void put_f32(std::string& b, float v) { b.append(reinterpret_cast<const char*>(&v), 4); }

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
  int32_t i32(const char* what) {
    int32_t v;
    std::memcpy(&v, take(4, what), 4);
    return v;
  }
  uint64_t u64(const char* what) {
    uint64_t v;
    std::memcpy(&v, take(8, what), 8);
    return v;
  }
  float f32(const char* what) {
    float v;
    std::memcpy(&v, take(4, what), 4);
    return v;
  }
  std::string cstr(const char* what) {
    const size_t end = bytes.find('\0', at);
    if (end == std::string::npos) fail(std::string("unterminated string in ") + what);
    std::string s = bytes.substr(at, end - at);
    at = end + 1;
    return s;
  }
};

// Identifies the lattice step of a full-sphere equiangular grid in
// make_equiangular_grid order; throws if the grid is anything else.
Real equiangular_step(const SphericalGrid& grid) {
  const auto reject = [] {
    throw std::invalid_argument(
        "grid is not a full-sphere equiangular lattice; interpolate onto one first");
  };
  if (grid.size() < 3) reject();
  const Real step = grid.points[1].colatitude;
  const Real ratio = 180 / step;
  if (!(step > 0) || std::abs(ratio - std::round(ratio)) > 1e-9) reject();
  const SphericalGrid reference = make_equiangular_grid(step);
  if (reference.size() != grid.size()) reject();
  for (Index i = 0; i < grid.size(); ++i)
    if (!same_direction(grid.points[static_cast<size_t>(i)],
                        reference.points[static_cast<size_t>(i)], 1e-6))
      reject();
  return step;
}

}  // namespace

Index grid_row_of_record(Index record, Real step_deg) {
  const auto n_az = static_cast<Index>(std::round(360 / step_deg));
  const auto n_col = static_cast<Index>(std::round(180 / step_deg));
  const Index records = (n_col - 1) * n_az + 2;
  if (record < 0 || record >= records)
    throw std::out_of_range("DAFF record index out of range");
  if (record == 0) return records - 1;        // beta 0: south pole, last grid row
  if (record == records - 1) return 0;        // beta 180: north pole, first grid row
  const Index ib = (record - 1) / n_az + 1;   // beta ring, 1..n_col-1
  const Index ia = (record - 1) % n_az;
  return 1 + (n_col - ib - 1) * n_az + ia;    // ring at colatitude 180 - ib*step
}

void write_daff(const Matrix& magnitudes, const Vector& frequencies,
                const SphericalGrid& grid, const std::filesystem::path& path,
                const std::map<std::string, std::string>& metadata) {
  const Real step = equiangular_step(grid);
  if (magnitudes.rows() != grid.size())
    throw std::invalid_argument("magnitude row count does not match the grid");
  if (magnitudes.cols() != frequencies.size() || frequencies.size() < 1)
    throw std::invalid_argument("magnitude column count does not match the frequency axis");
  if (!magnitudes.allFinite() || magnitudes.minCoeff() < 0)
    throw std::invalid_argument("magnitudes must be finite and nonnegative");
  for (Index k = 0; k + 1 < frequencies.size(); ++k)
    if (frequencies(k) >= frequencies(k + 1))
      throw std::invalid_argument("frequencies must be strictly increasing");

  const auto n_az = static_cast<int32_t>(std::round(360 / step));
  const auto n_col = static_cast<int32_t>(std::round(180 / step));
  const Index records = grid.size();
  const auto nf = static_cast<int32_t>(frequencies.size());

  std::string main_header;
  put_i32(main_header, kContentMagnitudeSpectrum);
  put_i32(main_header, kQuantizationFloat32);
  put_i32(main_header, 1);  // channels
  put_i32(main_header, static_cast<int32_t>(records));
  put_i32(main_header, nf);
  put_i32(main_header, 0);  // metadata index
  put_i32(main_header, n_az);
  put_f32(main_header, 0);
  put_f32(main_header, 360);
  put_i32(main_header, n_col + 1);
  put_f32(main_header, 0);
  put_f32(main_header, 180);

  std::string content_header;
  put_f32(content_header, static_cast<float>(magnitudes.maxCoeff()));
  put_i32(content_header, nf);
  for (Index k = 0; k < frequencies.size(); ++k)
    put_f32(content_header, static_cast<float>(frequencies(k)));

  std::string data;
  data.reserve(static_cast<size_t>(records) * static_cast<size_t>(nf) * 4);
  for (Index rec = 0; rec < records; ++rec) {
    const Index row = grid_row_of_record(rec, step);
    for (Index k = 0; k < frequencies.size(); ++k)
      put_f32(data, static_cast<float>(magnitudes(row, k)));
  }

  std::map<std::string, std::string> meta = metadata;
  meta.emplace("ANGLE_CONVENTION",
               "alpha = azimuth (0 deg towards +x, the direction the musician faces); "
               "beta = 180 deg - colatitude (beta 0 = -z)");
  meta.emplace("QUADRATURE", "equiangular, poles stored once");
  std::string metadata_block;
  put_i32(metadata_block, static_cast<int32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    put_i32(metadata_block, kMetadataString);
    metadata_block += k;
    metadata_block.push_back('\0');
    metadata_block += v;
    metadata_block.push_back('\0');
  }

  // file header + four-entry block table, then the blocks back to back
  const std::string* blocks[4] = {&main_header, &content_header, &data, &metadata_block};
  const int32_t ids[4] = {kBlockMainHeader, kBlockContentHeader, kBlockData, kBlockMetadata};
  std::string out;
  out += "FW";
  put_i32(out, kDaffVersion);
  put_i32(out, 4);
  uint64_t offset = 2 + 4 + 4 + 4 * (4 + 8 + 8);
  for (int b = 0; b < 4; ++b) {
    put_i32(out, ids[b]);
    put_u64(out, offset);
    put_u64(out, blocks[b]->size());
    offset += blocks[b]->size();
  }
  for (const auto* b : blocks) out += *b;

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot create " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path.string());
}

void write_daff(const InterpolatedDirectivity& hi, const std::filesystem::path& path,
                const std::map<std::string, std::string>& metadata) {
  if (hi.pressures.cols() != kBandCount)
    throw std::invalid_argument("balloon must carry all one-third octave bands");
  write_daff(hi.pressures, nominal_band_centers(), hi.grid, path, metadata);
}

DaffContent read_daff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Cursor c{bytes, path};

  if (std::memcmp(c.take(2, "signature"), "FW", 2) != 0)
    c.fail("not a DAFF file (bad signature)");
  DaffContent content;
  content.version = c.i32("version");
  if (content.version != kDaffVersion)
    c.fail("unsupported DAFF version " + std::to_string(content.version));
  const int32_t n_blocks = c.i32("block count");
  if (n_blocks < 3 || n_blocks > 64) c.fail("implausible block count");
  struct Block {
    uint64_t offset = 0, size = 0;
    bool present = false;
  };
  Block main, header, data, meta;
  for (int32_t b = 0; b < n_blocks; ++b) {
    const int32_t id = c.i32("block table");
    const uint64_t off = c.u64("block table");
    const uint64_t size = c.u64("block table");
    if (off + size > bytes.size()) c.fail("block extends past end of file");
    Block* target = id == kBlockMainHeader     ? &main
                    : id == kBlockContentHeader ? &header
                    : id == kBlockData          ? &data
                    : id == kBlockMetadata      ? &meta
                                                : nullptr;
    if (target) *target = {off, size, true};
  }
  if (!main.present || !header.present || !data.present)
    c.fail("missing mandatory block");

  c.at = main.offset;
  content.content_type = c.i32("main header");
  content.quantization = c.i32("main header");
  content.channels = c.i32("main header");
  const int32_t records = c.i32("main header");
  const int32_t elements = c.i32("main header");
  c.i32("main header");  // metadata index
  content.alpha_points = c.i32("main header");
  content.alpha_start = c.f32("main header");
  content.alpha_end = c.f32("main header");
  content.beta_points = c.i32("main header");
  content.beta_start = c.f32("main header");
  content.beta_end = c.f32("main header");

  if (content.content_type != kContentMagnitudeSpectrum)
    c.fail("content type " + std::to_string(content.content_type) +
           " is not a magnitude spectrum");
  if (content.quantization != kQuantizationFloat32) c.fail("unsupported quantization");
  if (content.channels != 1) c.fail("multi-channel balloons are not supported");
  if (records < 2 || elements < 1) c.fail("implausible record layout");
  const int64_t expected =
      static_cast<int64_t>(content.alpha_points) * (content.beta_points - 2) + 2;
  if (content.beta_start != 0 || content.beta_end != 180 || expected != records)
    c.fail("not a full-sphere balloon with collapsed poles");

  c.at = header.offset;
  content.max_magnitude = c.f32("content header");
  const int32_t nf = c.i32("content header");
  if (nf != elements) c.fail("frequency count disagrees with the record layout");
  content.frequencies.resize(nf);
  for (int32_t k = 0; k < nf; ++k)
    content.frequencies(k) = c.f32("frequency table");

  if (data.size != static_cast<uint64_t>(records) * static_cast<uint64_t>(nf) * 4)
    c.fail("data block size disagrees with the record layout");
  c.at = data.offset;
  content.magnitudes.resize(records, nf);
  for (int32_t r = 0; r < records; ++r)
    for (int32_t k = 0; k < nf; ++k)
      content.magnitudes(r, k) = c.f32("record data");

  if (meta.present) {
    c.at = meta.offset;
    const int32_t entries = c.i32("metadata");
    for (int32_t e = 0; e < entries; ++e) {
      if (c.i32("metadata") != kMetadataString) c.fail("unsupported metadata type");
      std::string key = c.cstr("metadata");
      std::string value = c.cstr("metadata");
      content.metadata.emplace(std::move(key), std::move(value));
    }
  }
  return content;
}

}  // namespace dirtk
