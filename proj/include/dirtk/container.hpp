#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "dirtk/firgen.hpp"
#include "dirtk/geometry.hpp"
#include "dirtk/partials.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

enum class DocumentKind { recordings, single_note, third_octave };

// One directivity product in the portable container encoding (see
// /docs/container.md). The logical schema mirrors the SOFA
// FreeFieldDirectivityTF layout: M (measurement) is always 1, so the
// M x R x N data arrays are stored as R x N matrices, one row per receiver.
//
// Kind invariants (enforced by validate):
//  - recordings:   single-sided transfer function of a real signal; the DC
//                  and Nyquist columns of data_imag are zero.
//  - single_note:  per-partial pressures, data_imag identically zero.
//  - third_octave: 30 one-third octave band pressures at the nominal centre
//                  frequencies 25 Hz .. 20 kHz, data_imag identically zero;
//                  MidiNote, SourceTuningFrequency and SteadyPart absent.
struct DirectivityDocument {
  DocumentKind kind = DocumentKind::recordings;
  Matrix data_real;    // R x N
  Matrix data_imag;    // R x N
  Vector frequencies;  // N, Hz, strictly increasing
  SphericalGrid receivers;
  std::map<std::string, std::string> metadata;  // UTF-8 key -> value
};

// Metadata keys with kind-dependent presence rules.
namespace keys {
inline constexpr std::string_view source_name = "GLOBAL_SourceName";
inline constexpr std::string_view musician = "GLOBAL_Musician";
inline constexpr std::string_view manufacturer = "GLOBAL_SourceManufacturer";
inline constexpr std::string_view source_view = "SourceView_Reference";
inline constexpr std::string_view description = "GLOBAL_Description";
inline constexpr std::string_view midi_note = "MidiNote";
inline constexpr std::string_view tuning_frequency = "SourceTuningFrequency";
inline constexpr std::string_view steady_part = "SteadyPart";
}  // namespace keys

// Throws std::invalid_argument naming the first violated invariant.
void validate(const DirectivityDocument& doc);

// Serialization; write refuses documents that fail validate, read validates
// after decoding. read(write(doc)) reproduces doc bit-exactly.
void write_document(const DirectivityDocument& doc, const std::filesystem::path& path);
DirectivityDocument read_document(const std::filesystem::path& path);

// FIR banks use a sibling encoding (".dfir", see /docs/container.md) with
// the same bit-exact round-trip guarantee.
void write_fir_bank(const FirBank& bank, const std::filesystem::path& path);
FirBank read_fir_bank(const std::filesystem::path& path);

// Filename scheme (pure in its arguments, parsed back unambiguously even
// when the source name itself contains underscores):
//   recordings:   <SourceName>_<dynamic>_<midi>_recordings.sofalite
//   single_note:  <SourceName>_<midi>_singleTones.sofalite
//   third_octave: <SourceName>_3rdOctave.sofalite
std::string document_filename(std::string_view source_name, DocumentKind kind,
                              Dynamic dynamic = Dynamic::ff, int midi = 0);

struct ParsedName {
  std::string source_name;
  DocumentKind kind = DocumentKind::recordings;
  Dynamic dynamic = Dynamic::ff;  // recordings only
  int midi = 0;                   // recordings and single_note
};
ParsedName parse_document_filename(std::string_view filename);

std::string_view to_string(Dynamic d);
Dynamic dynamic_from_string(std::string_view s);

// Scientific pitch name, e.g. 69 -> "A4", 61 -> "C#4".
std::string note_name(int midi);

}  // namespace dirtk
