// dirtk: batch mapper from anechoic note recordings to directivity artifacts.
#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>

#include "dirtk/container.hpp"
#include "dirtk/daff.hpp"
#include "dirtk/directivity.hpp"
#include "dirtk/firgen.hpp"
#include "dirtk/interpolate.hpp"
#include "dirtk/manifest.hpp"
#include "dirtk/pipeline.hpp"

using namespace dirtk;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;     // some work item failed
constexpr int kUsage = 2;    // bad invocation or unusable request

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int run_process(const std::filesystem::path& manifest_path, const std::filesystem::path& out,
                int jobs) {
  CorpusManifest manifest;
  try {
    manifest = read_manifest(manifest_path);
  } catch (const std::exception& err) {
    throw Usage(err.what());
  }
  ProcessOptions options;
  options.output_dir = out;
  options.jobs = jobs;
  const ProcessReport report = process_corpus(manifest, options);
  for (const auto& path : report.written) std::cout << "wrote " << path.string() << "\n";
  for (const auto& failure : report.failures) std::cerr << "failed: " << failure << "\n";
  std::cout << report.written.size() << " file(s), " << report.failures.size()
            << " failure(s)\n";
  return report.ok() ? kOk : kFail;
}

int run_validate(const std::vector<std::filesystem::path>& paths) {
  int bad = 0;
  for (const auto& path : paths) {
    try {
      read_document(path);
      std::cout << path.string() << ": ok\n";
    } catch (const std::exception& err) {
      std::cout << path.string() << ": FAIL (" << err.what() << ")\n";
      ++bad;
    }
  }
  return bad ? kFail : kOk;
}

int run_balloon(const std::filesystem::path& path, int band, Real freq) {
  const DirectivityDocument doc = read_document(path);
  if (doc.kind == DocumentKind::recordings)
    throw Usage("balloon needs a singleTones or 3rdOctave document");
  if (freq > 0) {
    if (doc.kind != DocumentKind::third_octave)
      throw Usage("--freq applies to 3rdOctave documents only");
    band = band_index(freq);
    if (band < 0) throw Usage("no band contains " + std::to_string(freq) + " Hz");
  }
  if (band < 0 || band >= doc.frequencies.size())
    throw Usage("index " + std::to_string(band) + " out of range, document has " +
                std::to_string(doc.frequencies.size()) + " columns");

  std::cout << "# " << doc.frequencies(band) << " Hz, level dB re 20 uPa\n";
  std::cout << "# azimuth_deg colatitude_deg level_db\n";
  std::cout << std::fixed << std::setprecision(6);
  for (Index q = 0; q < doc.receivers.size(); ++q) {
    const auto& p = doc.receivers.points[static_cast<size_t>(q)];
    const Real level = 20 * std::log10(doc.data_real(q, band) / kRefPressure);
    std::cout << std::setw(12) << p.azimuth << " " << std::setw(12) << p.colatitude << " "
              << std::setw(12) << level << "\n";
  }
  return kOk;
}

BandDirectivity band_directivity_of(const DirectivityDocument& doc) {
  if (doc.kind != DocumentKind::third_octave)
    throw Usage("expected a 3rdOctave document");
  BandDirectivity d;
  d.band_centers = doc.frequencies;
  d.pressures = doc.data_real;
  d.grid = doc.receivers;
  // a stored 3rdOctave document is the pipeline's calibrated end product
  d.state = BalloonState::calibrated;
  return d;
}

int run_interpolate(const std::filesystem::path& in, const std::filesystem::path& out,
                    Real step, Real smoothing) {
  const DirectivityDocument doc = read_document(in);
  const InterpolatedDirectivity hi =
      upsample(band_directivity_of(doc), make_equiangular_grid(step), smoothing);
  DirectivityDocument up = doc;
  up.data_real = hi.pressures;
  up.data_imag = Matrix::Zero(hi.pressures.rows(), hi.pressures.cols());
  up.receivers = hi.grid;
  write_document(up, out);
  std::cout << "wrote " << out.string() << " (" << hi.grid.size() << " points";
  if (hi.clamped) std::cout << ", " << hi.clamped << " negative values clamped";
  std::cout << ")\n";
  return kOk;
}

int run_fir(const std::filesystem::path& in, const std::filesystem::path& out, Real rate,
            Index length, int jobs) {
  const DirectivityDocument doc = read_document(in);
  InterpolatedDirectivity hi;
  hi.pressures = band_directivity_of(doc).pressures;
  hi.grid = doc.receivers;
  const FirBank bank = make_fir_bank(hi, rate, jobs, length);
  write_fir_bank(bank, out);
  std::cout << "wrote " << out.string() << " (" << bank.taps.rows() << " filters x "
            << bank.taps.cols() << " taps)\n";
  return kOk;
}

int run_export_daff(const std::filesystem::path& in, const std::filesystem::path& out) {
  const DirectivityDocument doc = read_document(in);
  if (doc.kind != DocumentKind::third_octave) throw Usage("expected a 3rdOctave document");
  write_daff(doc.data_real, doc.frequencies, doc.receivers, out, doc.metadata);
  std::cout << "wrote " << out.string() << "\n";
  return kOk;
}

int run_info(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".daff") {
    const DaffContent daff = read_daff(path);
    std::cout << "OpenDAFF magnitude spectrum, version " << daff.version << "\n"
              << "records: " << daff.magnitudes.rows() << " (" << daff.alpha_points
              << " x " << daff.beta_points << " grid)\n"
              << "frequencies: " << daff.frequencies.size() << " (" << daff.frequencies(0)
              << " .. " << daff.frequencies(daff.frequencies.size() - 1) << " Hz)\n";
    for (const auto& [key, value] : daff.metadata)
      std::cout << "  " << key << " = " << value << "\n";
    return kOk;
  }
  if (ext == ".dfir") {
    const FirBank bank = read_fir_bank(path);
    std::cout << "FIR bank: " << bank.taps.rows() << " filters x " << bank.taps.cols()
              << " taps @ " << bank.sample_rate << " Hz\n";
    return kOk;
  }
  const DirectivityDocument doc = read_document(path);
  const char* kind = doc.kind == DocumentKind::recordings     ? "recordings"
                     : doc.kind == DocumentKind::single_note ? "singleTones"
                                                             : "3rdOctave";
  std::cout << "kind: " << kind << "\n"
            << "receivers: " << doc.receivers.size() << "\n"
            << "bins: " << doc.frequencies.size() << " (" << doc.frequencies(0) << " .. "
            << doc.frequencies(doc.frequencies.size() - 1) << " Hz)\n";
  for (const auto& [key, value] : doc.metadata)
    std::cout << "  " << key << " = " << value << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"musical-instrument directivity toolkit"};
  app.require_subcommand(1);

  std::filesystem::path manifest_path, input, output = ".";
  std::vector<std::filesystem::path> inputs;
  int jobs = 0, band = -1;
  Real freq = 0, step = 5, smoothing = 0, rate = 44100;
  Index length = kFirLength;

  auto* process = app.add_subcommand("process", "run the full pipeline over a corpus manifest");
  process->add_option("manifest", manifest_path, "corpus manifest file")->required();
  process->add_option("-o,--output", output, "output directory");
  process->add_option("-j,--jobs", jobs, "worker threads, 0 = logical cores");

  auto* validate_cmd = app.add_subcommand("validate", "check document invariants");
  validate_cmd->add_option("files", inputs, "documents to check")->required();

  auto* balloon = app.add_subcommand("balloon", "dump one balloon as a plot-ready table");
  balloon->add_option("file", input, "singleTones or 3rdOctave document")->required();
  balloon->add_option("-b,--band", band, "band (3rdOctave) or partial (singleTones) index");
  balloon->add_option("-f,--freq", freq, "pick the 3rdOctave band containing this frequency");

  auto* interpolate = app.add_subcommand("interpolate", "upsample a balloon to a dense grid");
  interpolate->add_option("file", input, "3rdOctave document")->required();
  interpolate->add_option("-o,--output", output, "output document")->required();
  interpolate->add_option("-s,--step", step, "equiangular grid step, degrees");
  interpolate->add_option("-l,--smoothing", smoothing, "spline smoothing parameter");

  auto* fir = app.add_subcommand("fir", "design a minimum-phase FIR bank from a balloon");
  fir->add_option("file", input, "3rdOctave document")->required();
  fir->add_option("-o,--output", output, "output FIR bank")->required();
  fir->add_option("-r,--rate", rate, "sample rate, Hz");
  fir->add_option("-n,--length", length, "taps per filter");
  fir->add_option("-j,--jobs", jobs, "worker threads, 0 = logical cores");

  auto* export_daff = app.add_subcommand("export-daff", "write an OpenDAFF magnitude balloon");
  export_daff->add_option("file", input, "3rdOctave document on an equiangular grid")->required();
  export_daff->add_option("-o,--output", output, "output DAFF file")->required();

  auto* info = app.add_subcommand("info", "describe a document, DAFF file, or FIR bank");
  info->add_option("file", input, "file to describe")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (process->parsed()) return run_process(manifest_path, output, jobs);
    if (validate_cmd->parsed()) return run_validate(inputs);
    if (balloon->parsed()) return run_balloon(input, band, freq);
    if (interpolate->parsed()) return run_interpolate(input, output, step, smoothing);
    if (fir->parsed()) return run_fir(input, output, rate, length, jobs);
    if (export_daff->parsed()) return run_export_daff(input, output);
    if (info->parsed()) return run_info(input);
  } catch (const Usage& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFail;
  }
  return kUsage;
}
