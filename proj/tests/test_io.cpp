#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "qxlab/io.hpp"

using namespace qxlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    const auto tick =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path = std::filesystem::temp_directory_path() /
           ("qxlab_io_test_" + std::to_string(tick));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ComplexMatrix sample(int n, std::uint64_t seed) {
  RngStream s(seed, 0);
  return sample_ginibre(n, s);
}

}  // namespace

TEST_CASE("matrix json round trip") {
  TempDir dir;
  const ComplexMatrix a = sample(5, 11);
  write_matrix_json(dir.file("a.json"), a);
  const ComplexMatrix b = read_matrix_json(dir.file("a.json"));
  CHECK(a.rows() == b.rows());
  CHECK((a - b).norm() == 0.0);  // doubles survive the round trip exactly

  CHECK_THROWS(matrix_from_json_text("{\"n\": 2, \"entries\": [[1,0]]}"));
  CHECK_THROWS(matrix_from_json_text("not json"));
}

TEST_CASE("matrix binary format") {
  TempDir dir;
  const ComplexMatrix a = sample(6, 12);
  write_matrix_binary(dir.file("a.qxm"), a);
  const ComplexMatrix b = read_matrix_binary(dir.file("a.qxm"));
  CHECK((a - b).norm() == 0.0);

  // header layout: magic, then rows and cols as little-endian u64
  std::ifstream in(dir.file("a.qxm"), std::ios::binary);
  char head[20];
  in.read(head, 20);
  CHECK(std::string(head, 4) == "QXM1");
  CHECK(static_cast<unsigned char>(head[4]) == 6);  // rows LSB first
  CHECK(static_cast<unsigned char>(head[12]) == 6);

  std::ofstream bad(dir.file("bad.qxm"), std::ios::binary);
  bad << "NOPE";
  bad.close();
  CHECK_THROWS(read_matrix_binary(dir.file("bad.qxm")));
}

TEST_CASE("tuple manifest round trip") {
  TempDir dir;
  const UnitaryTuple t = sample_tuple(4, 3, 99);
  const std::string manifest =
      write_tuple(dir.file("tup"), t, MatrixFileFormat::binary);
  const UnitaryTuple r = read_tuple_manifest(manifest);
  CHECK(r.n == t.n);
  CHECK(r.d == t.d);
  CHECK(r.seed == t.seed);
  for (int j = 0; j < t.d; ++j)
    CHECK((r.unitaries[j] - t.unitaries[j]).norm() == 0.0);

  const std::string manifest2 =
      write_tuple(dir.file("tupj"), t, MatrixFileFormat::json);
  const UnitaryTuple rj = read_tuple_manifest(manifest2);
  for (int j = 0; j < t.d; ++j)
    CHECK((rj.unitaries[j] - t.unitaries[j]).norm() == 0.0);
}
