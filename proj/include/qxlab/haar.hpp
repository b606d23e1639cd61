#pragma once

// Haar-distributed random unitaries: Ginibre sample, QR, then the diagonal
// phase correction diag(R)/|diag(R)| (Mezzadri's recipe). Without the phase
// step the QR factor is not Haar distributed.

#include <cstdint>
#include <vector>

#include "qxlab/hs.hpp"
#include "qxlab/rng.hpp"

namespace qxlab {

/// d Haar unitaries of size n drawn from independent derived streams.
struct UnitaryTuple {
  int n = 0;
  int d = 0;
  std::vector<ComplexMatrix> unitaries;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> stream_ids;
};

/// n x n matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1).
ComplexMatrix sample_ginibre(int n, RngStream& stream);

/// Haar-distributed unitary, unitary to ~1e-14 in HS norm.
ComplexMatrix sample_haar_unitary(int n, RngStream& stream);

/// Stream id used for member j of a (n, d, master_seed) tuple.
std::uint64_t tuple_stream_id(std::uint64_t master_seed, int n, int d, int j);

/// d independent Haar unitaries; member j comes from tuple_stream_id(.., j).
UnitaryTuple sample_tuple(int n, int d, std::uint64_t master_seed);

}  // namespace qxlab
