#include "dirtk/manifest.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dirtk/container.hpp"

namespace dirtk {
namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("manifest line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Real parse_real(std::string_view s, int line, std::string_view what) {
  try {
    size_t used = 0;
    const Real v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, std::string(what) + " is not a number: '" + std::string(s) + "'");
  }
}

long parse_integer(std::string_view s, int line, std::string_view what) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(line, std::string(what) + " is not an integer: '" + std::string(s) + "'");
  return v;
}

// Splits "key=value" at the first '='.
std::pair<std::string_view, std::string_view> key_value(std::string_view token, int line) {
  const size_t eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0)
    fail(line, "expected key=value, got '" + std::string(token) + "'");
  return {trim(token.substr(0, eq)), trim(token.substr(eq + 1))};
}

NoteEntry parse_note(std::string_view rest, int line) {
  NoteEntry note;
  bool have_midi = false, have_wav = false, have_steady = false;
  std::istringstream tokens{std::string(rest)};
  std::string token;
  while (tokens >> token) {
    const auto [key, value] = key_value(token, line);
    if (key == "midi") {
      note.midi = static_cast<int>(parse_integer(value, line, "midi"));
      have_midi = true;
    } else if (key == "wav") {
      note.wav = std::string(value);
      have_wav = true;
    } else if (key == "steady") {
      const size_t colon = value.find(':');
      if (colon == std::string_view::npos)
        fail(line, "steady bounds must be first:last samples, got '" + std::string(value) + "'");
      note.steady_begin = parse_integer(value.substr(0, colon), line, "steady begin");
      note.steady_end = parse_integer(value.substr(colon + 1), line, "steady end");
      have_steady = true;
    } else {
      fail(line, "unknown note field '" + std::string(key) + "'");
    }
  }
  if (!have_midi || !have_wav || !have_steady)
    fail(line, "a note needs midi=, wav= and steady= fields");
  return note;
}

}  // namespace

CorpusManifest parse_manifest(std::istream& is) {
  CorpusManifest m;
  std::set<std::string> seen;
  bool have_instrument = false, have_era = false, have_musician = false,
       have_manufacturer = false, have_tuning = false, have_dynamic = false;

  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view text{raw};
    if (const size_t hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;

    if (text.starts_with("note ") || text == "note") {
      m.notes.push_back(parse_note(text.substr(4), line));
      continue;
    }

    const auto [key, value] = key_value(text, line);
    if (value.empty()) fail(line, "empty value for '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      fail(line, "duplicate key '" + std::string(key) + "'");

    if (key == "instrument") {
      m.instrument = std::string(value);
      have_instrument = true;
    } else if (key == "era") {
      m.era = std::string(value);
      have_era = true;
    } else if (key == "musician") {
      m.musician = std::string(value);
      have_musician = true;
    } else if (key == "manufacturer") {
      m.manufacturer = std::string(value);
      have_manufacturer = true;
    } else if (key == "position") {
      m.position = std::string(value);
    } else if (key == "tuning") {
      m.tuning = parse_real(value, line, "tuning");
      have_tuning = true;
    } else if (key == "dynamic") {
      try {
        m.dynamic = dynamic_from_string(value);
      } catch (const std::invalid_argument& err) {
        fail(line, err.what());
      }
      have_dynamic = true;
    } else if (key == "grid_step") {
      m.grid_step = parse_real(value, line, "grid_step");
    } else if (key == "smoothing") {
      m.smoothing = parse_real(value, line, "smoothing");
    } else if (key == "fir_length") {
      m.fir_length = parse_integer(value, line, "fir_length");
    } else {
      fail(line, "unknown key '" + std::string(key) + "'");
    }
  }

  if (!have_instrument) throw std::invalid_argument("manifest: missing 'instrument'");
  if (!have_era) throw std::invalid_argument("manifest: missing 'era'");
  if (!have_musician) throw std::invalid_argument("manifest: missing 'musician'");
  if (!have_manufacturer) throw std::invalid_argument("manifest: missing 'manufacturer'");
  if (!have_tuning) throw std::invalid_argument("manifest: missing 'tuning'");
  if (!have_dynamic) throw std::invalid_argument("manifest: missing 'dynamic'");
  validate(m);
  return m;
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CorpusManifest m;
  try {
    m = parse_manifest(in);
  } catch (const std::invalid_argument& err) {
    throw std::invalid_argument(path.string() + ": " + err.what());
  }
  for (auto& note : m.notes)
    if (note.wav.is_relative()) note.wav = path.parent_path() / note.wav;
  return m;
}

void validate(const CorpusManifest& m) {
  const auto check = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("manifest: " + what);
  };
  check(!m.instrument.empty(), "instrument name is empty");
  check(m.instrument.find('/') == std::string::npos &&
            m.era.find('/') == std::string::npos,
        "instrument and era must not contain path separators");
  check(!m.era.empty(), "era tag is empty");
  check(m.tuning >= 400 && m.tuning <= 466,
        "tuning " + std::to_string(m.tuning) + " Hz is outside [400, 466]");
  check(m.grid_step > 0, "grid_step must be positive");
  check(m.smoothing >= 0, "smoothing must be nonnegative");
  check(m.fir_length >= 2, "fir_length must be at least 2");
  check(!m.notes.empty(), "note list is empty");
  std::set<int> midis;
  for (const auto& note : m.notes) {
    check(note.midi >= 0 && note.midi <= 127,
          "MIDI note " + std::to_string(note.midi) + " out of range");
    check(!note.wav.empty(), "note is missing its WAV path");
    check(note.steady_begin >= 0 && note.steady_begin < note.steady_end,
          "steady bounds of note " + std::to_string(note.midi) +
              " are not an ascending sample range");
    check(midis.insert(note.midi).second,
          "duplicate MIDI note " + std::to_string(note.midi));
  }
}

}  // namespace dirtk
