#include "dirtk/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dirtk/daff.hpp"
#include "testutil.hpp"

using namespace dirtk;

namespace {

const std::filesystem::path tmp = std::filesystem::temp_directory_path();

constexpr Real kRate = 44100;
constexpr Index kFrames = 44100;
// 39690 steady samples give eight half-overlapping Welch segments of exactly
// 8820 samples, i.e. a 5 Hz bin grid that the A-based note frequencies land
// on without scalloping.
constexpr Index kSteadyBegin = 2205;
constexpr Index kSteadyEnd = 2205 + 39690;

// Monopole note: the same three-harmonic tone on every channel.
Recording monopole_note(Real f0, Index channels) {
  Recording rec;
  rec.sample_rate = kRate;
  rec.samples.resize(kFrames, channels);
  Vector one(kFrames);
  for (Index t = 0; t < kFrames; ++t) {
    const Real arg = 2 * kPi * f0 * static_cast<Real>(t) / kRate;
    one(t) = 0.3 * std::sin(arg) + 0.15 * std::sin(2 * arg) + 0.075 * std::sin(3 * arg);
  }
  rec.samples.colwise() = one;
  return rec;
}

CorpusManifest toy_manifest(const std::filesystem::path& dir) {
  CorpusManifest m;
  m.instrument = "Monopole";
  m.era = "modern";
  m.musician = "nobody";
  m.manufacturer = "synthetic";
  m.tuning = 440;
  m.grid_step = 30;
  m.fir_length = 1024;
  for (int midi : {57, 69, 81}) {
    const Real f0 = 440 * std::pow(2.0, (midi - 69) / 12.0);
    const auto wav = dir / ("note_" + std::to_string(midi) + ".wav");
    write_wav(wav, monopole_note(f0, 32));
    m.notes.push_back({midi, wav, kSteadyBegin, kSteadyEnd});
  }
  return m;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("process_note analyses one synthetic note" * doctest::timeout(120)) {
  const SphericalGrid grid = make_equiangular_grid(90);  // 6 channels
  const Recording rec = monopole_note(220, grid.size());
  CorpusManifest m;
  m.instrument = "Mono";
  m.era = "modern";
  m.musician = "nobody";
  m.manufacturer = "synthetic";
  m.tuning = 440;
  const NoteEntry note{57, "unused.wav", kSteadyBegin, kSteadyEnd};

  const NoteProduct product = process_note(rec, note, m, grid);

  REQUIRE(product.partials.partial_frequencies.size() == 3);
  CHECK(product.partials.f0 == doctest::Approx(220).epsilon(1e-12));
  for (Index i = 0; i < 3; ++i)
    CHECK(product.partials.partial_frequencies(i) ==
          doctest::Approx(220.0 * static_cast<Real>(i + 1)).epsilon(1e-12));
  CHECK(product.steady.rows() == grid.size());
  CHECK(product.steady.cols() == kSteadyEnd - kSteadyBegin);

  // monopole: every channel carries the same partial pressures
  REQUIRE(product.tone.pressures.rows() == grid.size());
  REQUIRE(product.tone.pressures.cols() == 3);
  for (Index c = 0; c < 3; ++c) {
    const Vector col = product.tone.pressures.col(c);
    CHECK(col.maxCoeff() - col.minCoeff() <= 1e-12 * col.maxCoeff());
  }
  // harmonic amplitudes 0.3 / 0.15 / 0.075 -> rms pressures in ratio 1 : 1/2 : 1/4
  CHECK(product.tone.pressures(0, 0) == doctest::Approx(0.3 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(product.tone.pressures(0, 1) / product.tone.pressures(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-3));

  const auto& rdoc = product.recordings_doc;
  CHECK(rdoc.kind == DocumentKind::recordings);
  CHECK(rdoc.data_real.rows() == grid.size());
  CHECK(rdoc.metadata.at(std::string(keys::midi_note)) == "57");
  CHECK(rdoc.metadata.at(std::string(keys::description)) == "note = A3; dynamic = ff");
  CHECK(rdoc.metadata.at(std::string(keys::steady_part)) == "2205:41895");
  CHECK(rdoc.metadata.at(std::string(keys::tuning_frequency)) == "440");
  CHECK(rdoc.metadata.at(std::string(keys::source_name)) == "Mono_modern");
  CHECK_NOTHROW(validate(rdoc));

  const auto& sdoc = product.single_note_doc;
  CHECK(sdoc.kind == DocumentKind::single_note);
  CHECK(sdoc.frequencies.size() == 3);
  CHECK(sdoc.data_imag.isZero(0));
  CHECK(sdoc.metadata.count(std::string(keys::steady_part)) == 0);
  CHECK_NOTHROW(validate(sdoc));
}

TEST_CASE("process_note rejects mismatched input" * doctest::timeout(60)) {
  const SphericalGrid grid = make_equiangular_grid(90);
  CorpusManifest m;
  m.tuning = 440;
  const Recording rec = monopole_note(220, grid.size());

  Recording narrow = rec;
  narrow.samples.conservativeResize(Eigen::NoChange, grid.size() - 1);
  CHECK_THROWS_WITH_AS(process_note(narrow, {57, "x.wav", 0, kFrames}, m, grid),
                       doctest::Contains("channels"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(process_note(rec, {57, "x.wav", 0, kFrames + 1}, m, grid),
                       doctest::Contains("steady"), std::invalid_argument);
}

TEST_CASE("process_corpus writes the full document set" * doctest::timeout(300)) {
  const auto dir = tmp / "dirtk_pipeline_corpus";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const CorpusManifest m = toy_manifest(dir);

  ProcessOptions opt;
  opt.output_dir = dir / "out";
  const ProcessReport report = process_corpus(m, opt);
  for (const auto& f : report.failures) MESSAGE(f);
  REQUIRE(report.ok());

  const std::vector<std::string> expected = {
      "Monopole_modern_ff_57_recordings.sofalite", "Monopole_modern_57_singleTones.sofalite",
      "Monopole_modern_ff_69_recordings.sofalite", "Monopole_modern_69_singleTones.sofalite",
      "Monopole_modern_ff_81_recordings.sofalite", "Monopole_modern_81_singleTones.sofalite",
      "Monopole_modern_3rdOctave.sofalite",        "Monopole_modern_3rdOctave.daff",
      "Monopole_modern_fir.dfir"};
  REQUIRE(report.written.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(report.written[i].filename().string() == expected[i]);
    CHECK(std::filesystem::exists(report.written[i]));
  }

  // third-octave balloon: only the bands hit by some harmonic are populated,
  // and the monopole source leaves every populated band constant over channels
  const DirectivityDocument third = read_document(opt.output_dir / expected[6]);
  CHECK(third.kind == DocumentKind::third_octave);
  REQUIRE(third.data_real.rows() == 32);
  REQUIRE(third.data_real.cols() == kBandCount);
  const std::vector<int> populated = {9, 12, 14, 15, 17, 18, 20};
  for (int b = 0; b < kBandCount; ++b) {
    const Vector col = third.data_real.col(b);
    const bool hit = std::count(populated.begin(), populated.end(), b) != 0;
    if (!hit) {
      CHECK(col.isZero(0));
      continue;
    }
    REQUIRE(col.minCoeff() > 0);
    const Real spread_db = 20 * std::log10(col.maxCoeff() / col.minCoeff());
    CHECK(spread_db < 1e-9);
  }

  // singleTones output equals an independent serial recomputation, bit for bit
  const SphericalGrid grid = pentakis_dodecahedron();
  const NoteProduct again = process_note(read_wav(m.notes[1].wav), m.notes[1], m, grid);
  const DirectivityDocument sdoc = read_document(opt.output_dir / expected[3]);
  REQUIRE(sdoc.data_real.rows() == again.single_note_doc.data_real.rows());
  REQUIRE(sdoc.data_real.cols() == again.single_note_doc.data_real.cols());
  CHECK(std::memcmp(sdoc.data_real.data(), again.single_note_doc.data_real.data(),
                    sizeof(Real) * static_cast<size_t>(sdoc.data_real.size())) == 0);

  const DaffContent daff = read_daff(opt.output_dir / expected[7]);
  CHECK(daff.alpha_points == 12);
  CHECK(daff.beta_points == 7);
  CHECK(daff.magnitudes.rows() == 62);
  CHECK(daff.frequencies.size() == kBandCount);

  const FirBank bank = read_fir_bank(opt.output_dir / expected[8]);
  CHECK(bank.taps.rows() == 62);
  CHECK(bank.taps.cols() == 1024);
  CHECK(bank.sample_rate == kRate);
}

TEST_CASE("process_corpus is deterministic across reruns and jobs" * doctest::timeout(300)) {
  const auto dir = tmp / "dirtk_pipeline_det";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const CorpusManifest m = toy_manifest(dir);

  ProcessOptions serial;
  serial.output_dir = dir / "serial";
  serial.jobs = 1;
  ProcessOptions parallel;
  parallel.output_dir = dir / "parallel";
  parallel.jobs = 4;

  const ProcessReport a = process_corpus(m, serial);
  const ProcessReport b = process_corpus(m, parallel);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  REQUIRE(a.written.size() == b.written.size());
  for (size_t i = 0; i < a.written.size(); ++i) {
    CHECK(a.written[i].filename() == b.written[i].filename());
    CHECK(file_bytes(a.written[i]) == file_bytes(b.written[i]));
  }

  // rerun into the same directory: byte-identical overwrite
  const ProcessReport c = process_corpus(m, serial);
  REQUIRE(c.ok());
  for (size_t i = 0; i < a.written.size(); ++i)
    CHECK(file_bytes(a.written[i]) == file_bytes(c.written[i]));
}

TEST_CASE("process_corpus skips failing notes and reports them" * doctest::timeout(300)) {
  const auto dir = tmp / "dirtk_pipeline_fail";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  CorpusManifest m = toy_manifest(dir);
  m.grid_step = 45;
  m.fir_length = 256;
  m.notes[1].wav = dir / "missing.wav";  // unreadable second note

  ProcessOptions opt;
  opt.output_dir = dir / "out";
  const ProcessReport report = process_corpus(m, opt);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("note 69") != std::string::npos);
  CHECK(report.failures[0].find("missing.wav") != std::string::npos);
  CHECK_FALSE(report.ok());

  // the surviving notes still produce per-note and aggregate documents
  REQUIRE(report.written.size() == 7);
  CHECK(report.written[0].filename().string() == "Monopole_modern_ff_57_recordings.sofalite");
  CHECK(report.written[2].filename().string() == "Monopole_modern_ff_81_recordings.sofalite");
  CHECK(report.written[4].filename().string() == "Monopole_modern_3rdOctave.sofalite");
  const DirectivityDocument third = read_document(report.written[4]);
  // with the 440 Hz note gone, its fundamental band is fed only by the
  // 220 Hz note's second harmonic; band 12 stays populated, band 17 empties
  CHECK(third.data_real.col(12).minCoeff() > 0);
  CHECK(third.data_real.col(17).isZero(0));

  // and when nothing survives at all, only the failure report remains
  CorpusManifest all_bad = m;
  for (auto& note : all_bad.notes) note.wav = dir / "missing.wav";
  ProcessOptions opt2;
  opt2.output_dir = dir / "out2";
  const ProcessReport empty = process_corpus(all_bad, opt2);
  CHECK(empty.written.empty());
  REQUIRE(empty.failures.size() == 4);
  CHECK(empty.failures.back().find("no note survived") != std::string::npos);
}

TEST_CASE("process_corpus rejects a mixed-rate corpus" * doctest::timeout(300)) {
  const auto dir = tmp / "dirtk_pipeline_rate";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  CorpusManifest m = toy_manifest(dir);
  m.grid_step = 45;
  m.fir_length = 256;

  Recording odd = monopole_note(440, 32);
  odd.sample_rate = 48000;
  write_wav(m.notes[1].wav, odd);

  ProcessOptions opt;
  opt.output_dir = dir / "out";
  const ProcessReport report = process_corpus(m, opt);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("note 69") != std::string::npos);
  CHECK(report.failures[0].find("48000") != std::string::npos);
  CHECK(report.written.size() == 7);
}
