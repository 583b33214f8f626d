#include "dirtk/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dirtk {
namespace {

constexpr Real kPcm24Scale = Real(8388607);  // 2^23 - 1, positive full scale

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

uint32_t le32(const std::string& b, size_t at) {
  return static_cast<uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

uint16_t le16(const std::string& b, size_t at) {
  return static_cast<uint16_t>(static_cast<unsigned char>(b[at]) |
                               static_cast<unsigned char>(b[at + 1]) << 8);
}

void put16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& b, uint32_t v) {
  put16(b, static_cast<uint16_t>(v & 0xffff));
  put16(b, static_cast<uint16_t>(v >> 16));
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

}  // namespace

Recording read_wav(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    fail(path, "not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_at = 0, data_size = 0;
  bool have_fmt = false;

  size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::string id = bytes.substr(at, 4);
    const uint32_t size = le32(bytes, at + 4);
    const size_t body = at + 8;
    if (body + size > bytes.size()) fail(path, "truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) fail(path, "fmt chunk too short");
      format = le16(bytes, body);
      channels = le16(bytes, body + 2);
      rate = le32(bytes, body + 4);
      bits = le16(bytes, body + 14);
      if (format == 0xfffe) {  // extensible: actual format leads the GUID
        if (size < 40) fail(path, "extensible fmt chunk too short");
        format = le16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_at = body;
      data_size = size;
    }
    at = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) fail(path, "missing fmt chunk");
  if (data_at == 0) fail(path, "missing data chunk");
  if (channels == 0 || rate == 0) fail(path, "malformed fmt chunk");
  const bool pcm24 = format == 1 && bits == 24;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm24 && !float32)
    fail(path, "unsupported encoding (format tag " + std::to_string(format) +
                   ", " + std::to_string(bits) +
                   " bits): expected 24-bit PCM or 32-bit float");

  const size_t bytes_per_sample = static_cast<size_t>(bits) / 8;
  const size_t frame_size = bytes_per_sample * channels;
  if (data_size % frame_size != 0) fail(path, "data size is not a whole number of frames");
  const Index frames = static_cast<Index>(data_size / frame_size);

  Recording rec;
  rec.sample_rate = static_cast<Real>(rate);
  rec.samples.resize(frames, channels);
  const char* p = bytes.data() + data_at;
  for (Index i = 0; i < frames; ++i) {
    for (Index c = 0; c < channels; ++c) {
      if (pcm24) {
        int32_t v = static_cast<unsigned char>(p[0]) |
                    static_cast<unsigned char>(p[1]) << 8 |
                    static_cast<unsigned char>(p[2]) << 16;
        if (v & 0x800000) v -= 0x1000000;
        rec.samples(i, c) = static_cast<Real>(v) / kPcm24Scale;
      } else {
        static_assert(sizeof(float) == 4 && std::endian::native == std::endian::little);
        float v;
        std::memcpy(&v, p, 4);
        rec.samples(i, c) = static_cast<Real>(v);
      }
      p += bytes_per_sample;
    }
  }
  return rec;
}

void write_wav(const std::filesystem::path& path, const Recording& rec,
               int bits_per_sample) {
  if (bits_per_sample != 24 && bits_per_sample != 32)
    throw std::invalid_argument("bits_per_sample must be 24 (PCM) or 32 (float)");
  if (rec.samples.cols() < 1 || rec.sample_rate <= 0)
    throw std::invalid_argument("recording needs at least one channel and a sample rate");
  const Index frames = rec.samples.rows();
  const Index channels = rec.samples.cols();
  const uint32_t bytes_per_sample = static_cast<uint32_t>(bits_per_sample) / 8;
  const uint32_t block_align = bytes_per_sample * static_cast<uint32_t>(channels);
  const uint32_t data_size = block_align * static_cast<uint32_t>(frames);
  const bool pcm = bits_per_sample == 24;

  std::string out;
  out.reserve(64 + data_size);
  out += "RIFF";
  put32(out, 0);  // patched below
  out += "WAVE";
  out += "fmt ";
  put32(out, 16);
  put16(out, pcm ? 1 : 3);
  put16(out, static_cast<uint16_t>(channels));
  put32(out, static_cast<uint32_t>(rec.sample_rate));
  put32(out, static_cast<uint32_t>(rec.sample_rate) * block_align);
  put16(out, static_cast<uint16_t>(block_align));
  put16(out, static_cast<uint16_t>(bits_per_sample));
  if (!pcm) {  // float data carries a fact chunk with the frame count
    out += "fact";
    put32(out, 4);
    put32(out, static_cast<uint32_t>(frames));
  }
  out += "data";
  put32(out, data_size);
  for (Index i = 0; i < frames; ++i) {
    for (Index c = 0; c < channels; ++c) {
      const Real x = rec.samples(i, c);
      if (pcm) {
        const Real clipped = std::clamp(x, Real(-1), Real(1));
        auto v = static_cast<int32_t>(std::llround(clipped * kPcm24Scale));
        v = std::clamp(v, int32_t(-8388608), int32_t(8388607));
        const auto u = static_cast<uint32_t>(v);
        out.push_back(static_cast<char>(u & 0xff));
        out.push_back(static_cast<char>((u >> 8) & 0xff));
        out.push_back(static_cast<char>((u >> 16) & 0xff));
      } else {
        const auto v = static_cast<float>(x);
        char raw[4];
        std::memcpy(raw, &v, 4);
        out.append(raw, 4);
      }
    }
  }
  if (data_size & 1) out.push_back(0);  // word alignment pad
  const uint32_t riff_size = static_cast<uint32_t>(out.size()) - 8;
  for (int i = 0; i < 4; ++i) out[4 + static_cast<size_t>(i)] = static_cast<char>((riff_size >> (8 * i)) & 0xff);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot create " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace dirtk
