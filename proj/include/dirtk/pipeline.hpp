#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dirtk/container.hpp"
#include "dirtk/directivity.hpp"
#include "dirtk/manifest.hpp"
#include "dirtk/wav.hpp"

namespace dirtk {

// Everything derived from one recorded note.
struct NoteProduct {
  NoteContext context;
  PartialSet partials;
  SingleToneDirectivity tone;
  Matrix steady;  // Q x L steady-part samples, Pa (calibration input)
  DirectivityDocument recordings_doc;
  DirectivityDocument single_note_doc;
};

// Per-note analysis: Welch spectra of the steady part, fundamental and
// partial scan, per-partial balloon, plus the two per-note documents.
// Throws (with the note named) on channel-count or bounds mismatches.
NoteProduct process_note(const Recording& rec, const NoteEntry& note,
                         const CorpusManifest& manifest, const SphericalGrid& grid);

struct ProcessOptions {
  std::filesystem::path output_dir = ".";
  int jobs = 0;  // worker threads, 0 = logical cores
};

struct ProcessReport {
  std::vector<std::filesystem::path> written;  // fixed, documented order
  std::vector<std::string> failures;           // one line per skipped note

  bool ok() const { return failures.empty(); }
};

// The batch pipeline over one corpus: per-note recordings and singleTones
// documents, one band-averaged, diffuse-equalized and calibrated 3rdOctave
// document, one upsampled DAFF balloon, one minimum-phase FIR bank.
// Notes are analyzed concurrently; outputs are written in note order and
// are byte-identical across reruns and jobs settings. Notes that fail are
// reported and skipped; the corpus products are built from the survivors.
ProcessReport process_corpus(const CorpusManifest& manifest, const ProcessOptions& options);

}  // namespace dirtk
