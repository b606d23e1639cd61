#include "qxlab/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qxlab {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(buf), std::end(buf));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw std::runtime_error("matrix binary: truncated file");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(buf), std::end(buf));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::string matrix_to_json_text(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix JSON format is square-only");
  nlohmann::json j;
  j["n"] = a.rows();
  auto& entries = j["entries"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      entries.push_back({a(i, k).real(), a(i, k).imag()});
  return j.dump();
}

ComplexMatrix matrix_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("matrix JSON: ") + e.what());
  }
  if (!j.contains("n") || !j.contains("entries"))
    throw std::runtime_error("matrix JSON: missing n/entries");
  const Eigen::Index n = j["n"].get<Eigen::Index>();
  const auto& entries = j["entries"];
  if (n < 1 || !entries.is_array() || Eigen::Index(entries.size()) != n * n)
    throw std::runtime_error("matrix JSON: entries must have n^2 pairs");
  ComplexMatrix a(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k, ++idx) {
      const auto& e = entries[std::size_t(idx)];
      if (!e.is_array() || e.size() != 2)
        throw std::runtime_error("matrix JSON: entry is not a [re, im] pair");
      a(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return a;
}

void write_matrix_json(const std::string& path, const ComplexMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << matrix_to_json_text(a);
}

ComplexMatrix read_matrix_json(const std::string& path) {
  return matrix_from_json_text(slurp(path));
}

void write_matrix_binary(const std::string& path, const ComplexMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write("QXM1", 4);
  put_le<std::uint64_t>(out, std::uint64_t(a.rows()));
  put_le<std::uint64_t>(out, std::uint64_t(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      put_le<double>(out, a(i, k).real());
      put_le<double>(out, a(i, k).imag());
    }
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

ComplexMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "QXM1", 4) != 0)
    throw std::runtime_error("matrix binary: bad magic in " + path);
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20))
    throw std::runtime_error("matrix binary: implausible shape");
  ComplexMatrix a;
  a.resize(Eigen::Index(rows), Eigen::Index(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      a(i, k) = Complex(re, im);
    }
  return a;
}

std::string write_tuple(const std::string& stem, const UnitaryTuple& t,
                        MatrixFileFormat format) {
  nlohmann::json manifest;
  manifest["n"] = t.n;
  manifest["d"] = t.d;
  manifest["seed"] = t.seed;
  manifest["stream_ids"] = t.stream_ids;
  auto& files = manifest["files"] = nlohmann::json::array();
  for (int j = 0; j < t.d; ++j) {
    const std::string ext = format == MatrixFileFormat::json ? ".json" : ".qxm";
    const std::string path = stem + "_" + std::to_string(j) + ext;
    if (format == MatrixFileFormat::json)
      write_matrix_json(path, t.unitaries[std::size_t(j)]);
    else
      write_matrix_binary(path, t.unitaries[std::size_t(j)]);
    files.push_back(std::filesystem::path(path).filename().string());
  }
  const std::string manifest_path = stem + "_manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + manifest_path);
  out << manifest.dump();
  return manifest_path;
}

UnitaryTuple read_tuple_manifest(const std::string& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(slurp(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("tuple manifest: ") + e.what());
  }
  UnitaryTuple t;
  t.n = manifest.at("n").get<int>();
  t.d = manifest.at("d").get<int>();
  t.seed = manifest.value("seed", std::uint64_t(0));
  if (manifest.contains("stream_ids"))
    t.stream_ids = manifest["stream_ids"].get<std::vector<std::uint64_t>>();
  const auto dir = std::filesystem::path(manifest_path).parent_path();
  for (const auto& f : manifest.at("files")) {
    const auto path = (dir / f.get<std::string>()).string();
    ComplexMatrix u;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
      u = read_matrix_json(path);
    else
      u = read_matrix_binary(path);
    if (u.rows() != t.n || u.cols() != t.n)
      throw std::runtime_error("tuple manifest: member size mismatch");
    t.unitaries.push_back(std::move(u));
  }
  if (int(t.unitaries.size()) != t.d)
    throw std::runtime_error("tuple manifest: wrong member count");
  while (int(t.stream_ids.size()) < t.d)
    t.stream_ids.push_back(std::uint64_t(t.stream_ids.size()));
  return t;
}

}  // namespace qxlab
