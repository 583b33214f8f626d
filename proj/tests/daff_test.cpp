#include "dirtk/daff.hpp"

#include <doctest.h>

#include <fstream>

#include "testutil.hpp"

using namespace dirtk;

namespace {

const std::filesystem::path tmp = std::filesystem::temp_directory_path();

InterpolatedDirectivity synthetic_balloon(Real step_deg, int seed) {
  testutil::rng(seed);
  InterpolatedDirectivity hi;
  hi.grid = make_equiangular_grid(step_deg);
  hi.source_state = BalloonState::calibrated;
  hi.pressures.resize(hi.grid.size(), kBandCount);
  for (Index i = 0; i < hi.pressures.size(); ++i)
    hi.pressures(i % hi.pressures.rows(), i / hi.pressures.rows()) =
        testutil::uniform(0, 2);
  return hi;
}

}  // namespace

TEST_CASE("5 degree balloon writes 2522 records of 30 magnitudes") {
  const auto hi = synthetic_balloon(5, 4041);
  const auto path = tmp / "balloon5.daff";
  write_daff(hi, path, {{"CUSTOM", "value"}});
  const DaffContent content = read_daff(path);

  CHECK(content.version == 170);
  CHECK(content.content_type == 1);
  CHECK(content.quantization == 2);
  CHECK(content.channels == 1);
  CHECK(content.alpha_points == 72);
  CHECK(content.beta_points == 37);
  CHECK(content.alpha_start == 0);
  CHECK(content.alpha_end == 360);
  REQUIRE(content.magnitudes.rows() == 2522);
  REQUIRE(content.magnitudes.cols() == 30);
  REQUIRE(content.frequencies.size() == 30);

  const Vector centers = nominal_band_centers();
  for (Index k = 0; k < 30; ++k)
    CHECK(content.frequencies(k) ==
          doctest::Approx(centers(k)).epsilon(1e-6));  // float32 storage

  CHECK(content.max_magnitude ==
        doctest::Approx(hi.pressures.maxCoeff()).epsilon(1e-6));
  CHECK(content.metadata.at("CUSTOM") == "value");
  CHECK(content.metadata.count("ANGLE_CONVENTION") == 1);
}

TEST_CASE("record order: south pole first, rings upward, values conform") {
  const auto hi = synthetic_balloon(30, 4042);  // 62 directions
  const auto path = tmp / "balloon30.daff";
  write_daff(hi, path);
  const DaffContent content = read_daff(path);
  REQUIRE(content.magnitudes.rows() == 62);
  CHECK(content.alpha_points == 12);
  CHECK(content.beta_points == 7);

  // poles are stored once: first record = colatitude 180, last = colatitude 0
  CHECK(grid_row_of_record(0, 30) == 61);
  CHECK(grid_row_of_record(61, 30) == 0);
  // record 1 is beta = 30 -> colatitude 150 -> last interior ring, azimuth 0
  CHECK(grid_row_of_record(1, 30) == 1 + 4 * 12);

  // every record matches its grid row to float32 precision (the in-repo
  // reader is an independent decode of the documented layout)
  for (Index rec = 0; rec < 62; ++rec) {
    const Index row = grid_row_of_record(rec, 30);
    for (Index k = 0; k < kBandCount; ++k)
      CHECK(content.magnitudes(rec, k) ==
            static_cast<Real>(static_cast<float>(hi.pressures(row, k))));
  }
  CHECK_THROWS_AS(grid_row_of_record(62, 30), std::out_of_range);
}

TEST_CASE("sampled-direction conformance on the 5 degree balloon") {
  testutil::rng(4043);
  const auto hi = synthetic_balloon(5, 4043);
  const auto path = tmp / "conform.daff";
  write_daff(hi, path);
  const DaffContent content = read_daff(path);
  for (int s = 0; s < 10; ++s) {
    const auto rec = static_cast<Index>(testutil::uniform(0, 2521.99));
    const Index row = grid_row_of_record(rec, 5);
    for (Index k = 0; k < kBandCount; ++k)
      CHECK(content.magnitudes(rec, k) ==
            static_cast<Real>(static_cast<float>(hi.pressures(row, k))));
  }
}

TEST_CASE("uniform balloon produces identical records") {
  auto hi = synthetic_balloon(30, 4044);
  hi.pressures.setConstant(0.75);
  const auto path = tmp / "uniform.daff";
  write_daff(hi, path);
  const DaffContent content = read_daff(path);
  for (Index rec = 0; rec < content.magnitudes.rows(); ++rec)
    CHECK((content.magnitudes.row(rec) - content.magnitudes.row(0)).cwiseAbs().maxCoeff() == 0);
  CHECK(content.magnitudes(0, 0) == 0.75f);
}

TEST_CASE("non-equiangular and malformed inputs are refused") {
  const auto hi = synthetic_balloon(30, 4045);

  InterpolatedDirectivity pentakis;
  pentakis.grid = pentakis_dodecahedron();
  pentakis.source_state = BalloonState::calibrated;
  pentakis.pressures = Matrix::Ones(32, kBandCount);
  CHECK_THROWS_WITH_AS(write_daff(pentakis, tmp / "x.daff"),
                       doctest::Contains("equiangular"), std::invalid_argument);

  auto negative = hi;
  negative.pressures(3, 3) = -0.1;
  CHECK_THROWS_WITH_AS(write_daff(negative, tmp / "x.daff"),
                       doctest::Contains("nonnegative"), std::invalid_argument);

  CHECK_THROWS_AS(write_daff(hi.pressures.leftCols(7), nominal_band_centers().head(7),
                             make_equiangular_grid(45), tmp / "x.daff"),
                  std::invalid_argument);  // row count vs 62-point grid

  Vector nonmono = nominal_band_centers();
  nonmono(5) = nonmono(4);
  CHECK_THROWS_WITH_AS(write_daff(hi.pressures, nonmono, hi.grid, tmp / "x.daff"),
                       doctest::Contains("strictly increasing"), std::invalid_argument);
}

TEST_CASE("reader diagnoses corrupted DAFF files") {
  const auto hi = synthetic_balloon(30, 4046);
  const auto path = tmp / "good.daff";
  write_daff(hi, path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  const auto patch = [&](std::string b, const std::string& name) {
    const auto p = tmp / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    return p;
  };

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(read_daff(patch(bad, "sig.daff")),
                       doctest::Contains("signature"), std::runtime_error);

  bad = bytes;
  bad.resize(bytes.size() / 2);
  CHECK_THROWS_AS(read_daff(patch(bad, "short.daff")), std::runtime_error);

  bad = bytes;
  bad[2] = 99;  // version low byte
  CHECK_THROWS_WITH_AS(read_daff(patch(bad, "ver.daff")),
                       doctest::Contains("version"), std::runtime_error);

  CHECK_THROWS_WITH_AS(read_daff(tmp / "missing.daff"),
                       doctest::Contains("cannot open"), std::runtime_error);
}
