#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "dirtk/directivity.hpp"
#include "dirtk/geometry.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

// OpenDAFF magnitude-spectrum balloon export (format v1.7 structure, see
// /docs/daff.md). DAFF spans the sphere with alpha in [0, 360) and beta in
// [0, 180], beta 0 at the south pole; our directions map as
//   alpha = azimuth, beta = 180 - colatitude.
// Records run beta-major from the south pole up, alpha ascending within a
// ring, the two poles stored once each — a 5 degree grid gives
// 72 * 35 + 2 = 2522 records.

// Decoded DAFF content as stored in the file (record order preserved,
// magnitudes are the float32 values, one row per record).
struct DaffContent {
  int version = 0;
  int content_type = 0;  // 1 = magnitude spectrum
  int quantization = 0;  // 2 = float32
  int channels = 0;
  int alpha_points = 0;
  int beta_points = 0;
  Real alpha_start = 0, alpha_end = 0;
  Real beta_start = 0, beta_end = 0;
  Real max_magnitude = 0;
  Vector frequencies;
  Matrix magnitudes;  // records x frequencies
  std::map<std::string, std::string> metadata;
};

// Writes per-direction magnitudes sampled on an equiangular grid. Throws if
// the grid is not a full-sphere equiangular lattice (as produced by
// make_equiangular_grid), if magnitudes are negative or non-finite, or if
// dimensions disagree.
void write_daff(const Matrix& magnitudes, const Vector& frequencies,
                const SphericalGrid& grid, const std::filesystem::path& path,
                const std::map<std::string, std::string>& metadata = {});

// Convenience overload: an upsampled balloon's band pressures as magnitudes
// at the nominal band centre frequencies.
void write_daff(const InterpolatedDirectivity& hi, const std::filesystem::path& path,
                const std::map<std::string, std::string>& metadata = {});

// Structural reader, written against the documented byte layout rather than
// the writer's code; serves as the conformance oracle for the writer.
DaffContent read_daff(const std::filesystem::path& path);

// Grid row (make_equiangular_grid order) stored in the given DAFF record.
Index grid_row_of_record(Index record, Real step_deg);

}  // namespace dirtk
