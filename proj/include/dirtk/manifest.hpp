#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dirtk/partials.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

// One recorded note of a corpus. The steady range is half-open [begin, end)
// in samples, chosen by a human listening to the recording (attack and
// decay are excluded upstream of this toolkit).
struct NoteEntry {
  int midi = 0;
  std::filesystem::path wav;
  Index steady_begin = 0;
  Index steady_end = 0;
};

// A corpus description parsed from the manifest text format documented in
// /docs/manifest.md.
struct CorpusManifest {
  std::string instrument;  // e.g. "Oboe"
  std::string era;         // e.g. "modern" / "historical"
  std::string musician;
  std::string manufacturer;
  std::string position =
      "instrument at the array centre, musician facing +x";
  Real tuning = 442;                // Hz, for A4
  Dynamic dynamic = Dynamic::ff;
  Real grid_step = 5;               // degrees, interpolation target
  Real smoothing = 0;               // spline smoothing parameter
  Index fir_length = 8192;
  std::vector<NoteEntry> notes;

  // The SourceName used in document names and metadata, e.g. "Oboe_modern".
  std::string source_name() const { return instrument + "_" + era; }
};

// Parses the manifest text; errors carry the 1-based line number. WAV paths
// are kept as written (relative paths are relative to the manifest file).
CorpusManifest parse_manifest(std::istream& is);

// Reads and parses a manifest file and resolves relative WAV paths against
// the manifest's directory.
CorpusManifest read_manifest(const std::filesystem::path& path);

// Structural checks beyond syntax: mandatory fields present, ranges sane,
// note list non-empty and free of duplicate MIDI notes. parse_manifest and
// read_manifest run this before returning.
void validate(const CorpusManifest& manifest);

}  // namespace dirtk
