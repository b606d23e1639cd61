#include "qxlab/haar.hpp"

#include <Eigen/QR>

#include <stdexcept>
#include <unordered_set>

namespace qxlab {

ComplexMatrix sample_ginibre(int n, RngStream& stream) {
  if (n < 1) throw std::invalid_argument("sample_ginibre: n must be >= 1");
  ComplexMatrix g(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = stream.next_gaussian();
      const double im = stream.next_gaussian();
      g(i, j) = Complex(re * s, im * s);
    }
  return g;
}

ComplexMatrix sample_haar_unitary(int n, RngStream& stream) {
  if (n < 1) throw std::invalid_argument("sample_haar_unitary: n must be >= 1");
  for (;;) {
    const ComplexMatrix g = sample_ginibre(n, stream);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    bool ok = true;
    for (int i = 0; i < n; ++i)
      if (std::abs(r(i, i)) < 1e-300) ok = false;
    if (!ok) continue;  // probability-zero event; retry on the next substate
    ComplexMatrix u = qr.householderQ();
    for (int i = 0; i < n; ++i) u.col(i) *= r(i, i) / std::abs(r(i, i));
    return u;
  }
}

std::uint64_t tuple_stream_id(std::uint64_t master_seed, int n, int d, int j) {
  return mix64(master_seed, std::uint64_t(n), std::uint64_t(d),
               std::uint64_t(j));
}

UnitaryTuple sample_tuple(int n, int d, std::uint64_t master_seed) {
  if (n < 1 || d < 1)
    throw std::invalid_argument("sample_tuple: need n >= 1 and d >= 1");
  UnitaryTuple t;
  t.n = n;
  t.d = d;
  t.seed = master_seed;
  t.stream_ids.reserve(d);
  std::unordered_set<std::uint64_t> seen;
  for (int j = 0; j < d; ++j) {
    std::uint64_t id = tuple_stream_id(master_seed, n, d, j);
    while (!seen.insert(id).second) id = mix64(id);  // keep ids distinct
    t.stream_ids.push_back(id);
    RngStream s(master_seed, id);
    t.unitaries.push_back(sample_haar_unitary(n, s));
  }
  return t;
}

}  // namespace qxlab
