#include "dirtk/pipeline.hpp"

#include <atomic>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dirtk/daff.hpp"
#include "dirtk/firgen.hpp"
#include "dirtk/interpolate.hpp"
#include "dirtk/spectral.hpp"

namespace dirtk {
namespace {

std::string format_number(Real v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::map<std::string, std::string> corpus_metadata(const CorpusManifest& m) {
  return {{std::string(keys::source_name), m.source_name()},
          {std::string(keys::musician), m.musician},
          {std::string(keys::manufacturer), m.manufacturer},
          {std::string(keys::source_view), m.position}};
}

std::map<std::string, std::string> note_metadata(const CorpusManifest& m,
                                                 const NoteEntry& note) {
  auto meta = corpus_metadata(m);
  meta[std::string(keys::description)] = "note = " + note_name(note.midi) +
                                         "; dynamic = " +
                                         std::string(to_string(m.dynamic));
  meta[std::string(keys::midi_note)] = std::to_string(note.midi);
  meta[std::string(keys::tuning_frequency)] = format_number(m.tuning);
  return meta;
}

}  // namespace

NoteProduct process_note(const Recording& rec, const NoteEntry& note,
                         const CorpusManifest& manifest, const SphericalGrid& grid) {
  const Index frames = rec.samples.rows();
  const Index channels = rec.samples.cols();
  if (channels != grid.size())
    throw std::invalid_argument("expected " + std::to_string(grid.size()) +
                                " channels, got " + std::to_string(channels));
  if (note.steady_end > frames)
    throw std::invalid_argument("steady range ends at sample " +
                                std::to_string(note.steady_end) + " but the file has " +
                                std::to_string(frames));

  NoteProduct product;
  product.context = {note.midi, manifest.tuning, manifest.dynamic,
                     note.steady_begin, note.steady_end};
  const Index steady_len = note.steady_end - note.steady_begin;
  product.steady = rec.samples.middleRows(note.steady_begin, steady_len).transpose();

  // per-channel Welch spectra of the steady part, scaled to component power
  Matrix powers;
  Vector frequencies;
  for (Index q = 0; q < channels; ++q) {
    TimeSignal x{product.steady.row(q).transpose(), rec.sample_rate};
    const PsdEstimate psd = welch_psd(x);
    if (q == 0) {
      frequencies = psd.frequencies;
      powers.resize(channels, frequencies.size());
    }
    powers.row(q) = scale_to_power(psd).transpose();
  }

  const Matrix magnitudes = powers.cwiseSqrt();
  const Real f0 = estimate_f0(magnitudes, frequencies, product.context);
  product.partials = find_partials(magnitudes, frequencies, f0, rec.sample_rate / 2);
  product.tone = extract_single_tone(powers, frequencies, product.partials, grid);

  // recordings document: the full take as single-sided transfer functions
  auto& rdoc = product.recordings_doc;
  rdoc.kind = DocumentKind::recordings;
  for (Index q = 0; q < channels; ++q) {
    TimeSignal x{rec.samples.col(q), rec.sample_rate};
    const Spectrum ss = to_single_sided(forward_spectrum(x));
    if (q == 0) {
      rdoc.frequencies = ss.frequencies;
      rdoc.data_real.resize(channels, ss.bins.size());
      rdoc.data_imag.resize(channels, ss.bins.size());
    }
    rdoc.data_real.row(q) = ss.bins.real().transpose();
    rdoc.data_imag.row(q) = ss.bins.imag().transpose();
  }
  rdoc.receivers = grid;
  rdoc.metadata = note_metadata(manifest, note);
  rdoc.metadata[std::string(keys::steady_part)] =
      std::to_string(note.steady_begin) + ":" + std::to_string(note.steady_end);

  auto& sdoc = product.single_note_doc;
  sdoc.kind = DocumentKind::single_note;
  sdoc.data_real = product.tone.pressures;
  sdoc.data_imag = Matrix::Zero(channels, product.tone.pressures.cols());
  sdoc.frequencies = product.tone.partial_frequencies;
  sdoc.receivers = grid;
  sdoc.metadata = note_metadata(manifest, note);
  return product;
}

ProcessReport process_corpus(const CorpusManifest& manifest, const ProcessOptions& options) {
  const SphericalGrid grid = pentakis_dodecahedron();
  const Index n_notes = static_cast<Index>(manifest.notes.size());
  std::filesystem::create_directories(options.output_dir);

  ProcessReport report;
  std::vector<std::optional<NoteProduct>> products(static_cast<size_t>(n_notes));
  std::vector<std::string> errors(static_cast<size_t>(n_notes));
  std::vector<Real> rates(static_cast<size_t>(n_notes), 0);

  const int workers = std::clamp<int>(
      options.jobs > 0 ? options.jobs
                       : static_cast<int>(std::thread::hardware_concurrency()),
      1, static_cast<int>(n_notes));
  std::atomic<Index> cursor(0);
  const auto work = [&] {
    for (Index i = cursor.fetch_add(1); i < n_notes; i = cursor.fetch_add(1)) {
      const auto& note = manifest.notes[static_cast<size_t>(i)];
      try {
        const Recording rec = read_wav(note.wav);
        rates[static_cast<size_t>(i)] = rec.sample_rate;
        products[static_cast<size_t>(i)] = process_note(rec, note, manifest, grid);
      } catch (const std::exception& err) {
        errors[static_cast<size_t>(i)] = err.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // serial aggregation in note order keeps reporting and outputs stable
  std::vector<SingleToneDirectivity> tones;
  std::vector<Matrix> steady_notes;
  Real sample_rate = 0;
  for (Index i = 0; i < n_notes; ++i) {
    const auto& note = manifest.notes[static_cast<size_t>(i)];
    auto& product = products[static_cast<size_t>(i)];
    std::string error = errors[static_cast<size_t>(i)];
    if (product && sample_rate == 0) sample_rate = rates[static_cast<size_t>(i)];
    if (product && rates[static_cast<size_t>(i)] != sample_rate)
      error = "sample rate " + format_number(rates[static_cast<size_t>(i)]) +
              " differs from the corpus rate " + format_number(sample_rate);
    if (!error.empty()) {
      report.failures.push_back("note " + std::to_string(note.midi) + " (" +
                                note.wav.filename().string() + "): " + error);
      product.reset();
      continue;
    }

    const auto rec_path =
        options.output_dir / document_filename(manifest.source_name(), DocumentKind::recordings,
                                               manifest.dynamic, note.midi);
    write_document(product->recordings_doc, rec_path);
    report.written.push_back(rec_path);
    const auto single_path =
        options.output_dir / document_filename(manifest.source_name(),
                                               DocumentKind::single_note,
                                               manifest.dynamic, note.midi);
    write_document(product->single_note_doc, single_path);
    report.written.push_back(single_path);

    tones.push_back(std::move(product->tone));
    steady_notes.push_back(std::move(product->steady));
  }
  if (tones.empty()) {
    report.failures.push_back("corpus: no note survived analysis");
    return report;
  }

  const BandDirectivity calibrated =
      calibrate(diffuse_equalize(band_average(tones)), steady_notes);

  DirectivityDocument third;
  third.kind = DocumentKind::third_octave;
  third.data_real = calibrated.pressures;
  third.data_imag = Matrix::Zero(calibrated.pressures.rows(), kBandCount);
  third.frequencies = nominal_band_centers();
  third.receivers = grid;
  third.metadata = corpus_metadata(manifest);
  third.metadata[std::string(keys::description)] =
      "content = one-third octave band directivity; dynamic = " +
      std::string(to_string(manifest.dynamic));
  const auto third_path =
      options.output_dir / document_filename(manifest.source_name(), DocumentKind::third_octave);
  write_document(third, third_path);
  report.written.push_back(third_path);

  const InterpolatedDirectivity hi =
      upsample(calibrated, make_equiangular_grid(manifest.grid_step), manifest.smoothing);
  const auto daff_path =
      options.output_dir / (manifest.source_name() + "_3rdOctave.daff");
  write_daff(hi, daff_path, corpus_metadata(manifest));
  report.written.push_back(daff_path);

  const FirBank bank = make_fir_bank(hi, sample_rate, options.jobs, manifest.fir_length);
  const auto fir_path = options.output_dir / (manifest.source_name() + "_fir.dfir");
  write_fir_bank(bank, fir_path);
  report.written.push_back(fir_path);
  return report;
}

}  // namespace dirtk
