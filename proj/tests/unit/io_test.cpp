#include <gtest/gtest.h>

#include <filesystem>

#include "ucontract/io.hpp"
#include "ucontract/sampling.hpp"

namespace ucontract {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ucontract_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-17), "-2.5e-17");
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(MeasureJson, RoundTripsExactly) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto mu = random_measure(rng, 9, false);
    const auto text = to_json(mu).dump();
    const auto back = measure_from_json(Json::parse(text));
    EXPECT_TRUE(back.approx_equal(mu, 0.0, 0.0));
  }
}

TEST(MeasureJson, RejectsWrongVersionAndBadMass) {
  EXPECT_THROW(measure_from_json(Json{{"version", 2}, {"atoms", Json::array()}}), InvalidArgument);
  EXPECT_THROW(measure_from_json(Json{{"atoms", Json::array()}}), InvalidArgument);
  const Json half = {{"version", 1}, {"atoms", {{{"angle", 0.0}, {"weight", 0.5}}}}};
  EXPECT_THROW(measure_from_json(half), InvalidArgument);
}

TEST(PlanJson, RoundTrips) {
  Rng rng(3);
  const auto mu = random_measure(rng, 5, false);
  const auto nu = random_measure(rng, 5, false);
  const auto r = w2_exact(mu, nu);
  const auto back = plan_from_json(Json::parse(to_json(r.plan).dump()));
  ASSERT_EQ(back.pairs.size(), r.plan.pairs.size());
  for (std::size_t i = 0; i < back.pairs.size(); ++i) {
    EXPECT_EQ(back.pairs[i].source, r.plan.pairs[i].source);
    EXPECT_EQ(back.pairs[i].target, r.plan.pairs[i].target);
    EXPECT_EQ(back.pairs[i].mass, r.plan.pairs[i].mass);
  }
  EXPECT_EQ(back.cost, r.plan.cost);
  EXPECT_EQ(validate_plan(back, mu, nu), "");
}

TEST(TraceIo, CsvHeaderAndJsonRoundTrip) {
  HomotopyTrace trace;
  trace.n = 8;
  trace.seed = 42;
  trace.grid = 16;
  trace.label = "identity";
  trace.samples = {{0.0, 1.4142135623730951, 0.0, 0.0}, {0.5, 0.3, 0.25, 0.5}};
  const auto csv = trace_csv(trace);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,dist_to_haar,norm_to_identity,schedule_s");
  EXPECT_NE(csv.find("\n0.5,0.3,0.25,0.5\n"), std::string::npos);
  const auto back = trace_from_json(Json::parse(to_json(trace).dump()));
  EXPECT_EQ(back.n, 8u);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.label, "identity");
  ASSERT_EQ(back.samples.size(), 2u);
  EXPECT_EQ(back.samples[0].dist_to_haar, 1.4142135623730951);
  EXPECT_EQ(trace_csv(back), csv);
}

TEST(MatrixContainer, RoundTripsBitExactWithLineage) {
  const auto u = sample_haar_unitary(13, 9);
  const auto path = scratch("haar.ucmx");
  write_matrix(path, u.matrix(), {{"op", "haar"}, {"seed", 9}});
  const Matrix back = read_matrix(path);
  EXPECT_EQ(back, u.matrix());
  EXPECT_EQ(read_matrix_lineage(path).at("seed").get<int>(), 9);

  // Header layout: magic, u32 version, u64 rows, u64 cols.
  const auto bytes = read_text(path);
  EXPECT_EQ(bytes.substr(0, 4), "UCMX");
  EXPECT_EQ(bytes.size(), 4u + 4u + 8u + 8u + 13u * 13u * 16u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 13u);
}

TEST(MatrixContainer, RejectsCorruptFiles) {
  const auto path = scratch("bad.ucmx");
  write_text(path, "NOPE");
  EXPECT_THROW(read_matrix(path), IoError);
  write_matrix(path, Matrix::Identity(3, 3), Json::object());
  auto bytes = read_text(path);
  write_text(path, bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_matrix(path), IoError);
  EXPECT_THROW(read_matrix(scratch("missing.ucmx")), IoError);
}

}  // namespace
}  // namespace ucontract
