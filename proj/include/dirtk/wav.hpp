#pragma once

#include <filesystem>

#include "dirtk/types.hpp"

namespace dirtk {

// Calibrated multichannel audio: digital full scale 1.0 corresponds to a
// sound pressure of 1 Pa (94 dB SPL calibrator convention).
struct Recording {
  Matrix samples;  // frames x channels, Pa
  Real sample_rate = 0;
};

// Reads a RIFF/WAVE file. Accepted encodings: 24-bit integer PCM and 32-bit
// IEEE float, plain or WAVE_FORMAT_EXTENSIBLE, any channel count. Integer
// samples are mapped to [-1, 1] with positive full scale exactly 1.0.
Recording read_wav(const std::filesystem::path& path);

// Writes a RIFF/WAVE file; bits_per_sample is 24 (PCM, values clipped to
// [-1, 1]) or 32 (IEEE float, values kept verbatim).
void write_wav(const std::filesystem::path& path, const Recording& rec,
               int bits_per_sample = 24);

}  // namespace dirtk
