#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "szwalk/io.hpp"

using namespace szwalk;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("szwalk_io_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("matrix CSV round trip is exact") {
  TempDir dir;
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<Real> uniform(-2.0, 2.0);
  RealMatrix m(5, 5);
  for (Index j = 0; j < 5; ++j) {
    for (Index i = 0; i < 5; ++i) m(i, j) = uniform(rng);
  }
  const std::string path = dir.file("m.csv");
  io::write_matrix_csv(path, m);
  const RealMatrix back = io::read_matrix_csv(path);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  // LF endings, no header, '.' decimals.
  const std::string text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("matrix CSV accepts hand-written decimals") {
  TempDir dir;
  const std::string path = dir.file("hand.csv");
  std::ofstream(path) << "0,1\n1,0\n";
  const RealMatrix m = io::read_matrix_csv(path);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 1.0);
}

TEST_CASE("matrix CSV errors carry file and line") {
  TempDir dir;
  const std::string path = dir.file("bad.csv");
  std::ofstream(path) << "0,1\n1\n";
  try {
    io::read_matrix_csv(path);
    FAIL("expected ragged-row error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  std::ofstream(dir.file("junk.csv")) << "0,abc\n";
  CHECK_THROWS_AS(io::read_matrix_csv(dir.file("junk.csv")), Error);
  CHECK_THROWS_AS(io::read_matrix_csv(dir.file("missing.csv")), Error);
  std::ofstream(dir.file("empty.csv")) << "";
  CHECK_THROWS_AS(io::read_matrix_csv(dir.file("empty.csv")), Error);
}

TEST_CASE("vector files") {
  TempDir dir;
  RealVector v(3);
  v << 0.25, 0.5, 0.25;
  const std::string path = dir.file("v.csv");
  io::write_vector(path, v);
  const RealVector back = io::read_vector(path);
  CHECK((back - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state vector files hold re,im pairs in block order") {
  TempDir dir;
  std::mt19937_64 rng(77);
  std::normal_distribution<Real> gauss;
  ComplexVector v(9);
  for (Index i = 0; i < 9; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v /= v.norm();

  const std::string path = dir.file("state.csv");
  io::write_state_vector(path, v);
  const ComplexVector back = io::read_state_vector(path);
  REQUIRE(back.size() == 9);
  for (Index i = 0; i < 9; ++i) {
    CHECK(back(i).real() == v(i).real());
    CHECK(back(i).imag() == v(i).imag());
  }

  std::ofstream(dir.file("triple.csv")) << "1,2,3\n";
  CHECK_THROWS_AS(io::read_state_vector(dir.file("triple.csv")), Error);
}

TEST_CASE("trace files") {
  TempDir dir;
  RealVector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.25, 0.75;
  const std::vector<ProbabilityVector> trace = {
      ProbabilityVector::validated(a), ProbabilityVector::validated(b)};
  const std::string path = dir.file("trace.csv");
  io::write_trace_csv(path, trace);
  const RealMatrix m = io::read_matrix_csv(path);
  CHECK(m.rows() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 0.75);
}

TEST_CASE("ranking files") {
  TempDir dir;
  RealVector scores(3);
  scores << 0.2, 0.5, 0.3;
  const auto p = ProbabilityVector::validated(scores);

  io::write_ranking_csv(dir.file("rank.csv"), p);
  CHECK(slurp(dir.file("rank.csv")) == "0,0.2\n1,0.5\n2,0.3\n");

  io::write_ranking_csv(dir.file("sorted.csv"), p, true);
  CHECK(slurp(dir.file("sorted.csv")) == "1,0.5\n2,0.3\n0,0.2\n");
}
