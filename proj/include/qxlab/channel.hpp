#pragma once

// The unitary-conjugation channel and the iterative eigenvalue engine used by
// every spectral computation. The symmetrized channel is self-adjoint in the
// HS inner product with spectrum in [-1, 1]; on restricted subspaces its
// dominant eigenvalue in magnitude is what all gap constants are made of.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qxlab/haar.hpp"
#include "qxlab/hs.hpp"

namespace qxlab {

/// symmetrized: (1/2d) sum_j (Uj A Uj* + Uj* A Uj); otherwise (1/d) sum_j Uj A Uj*.
ComplexMatrix channel_apply(const UnitaryTuple& t, const ComplexMatrix& a,
                            bool symmetrized);

struct PowerIterOptions {
  double rel_tol = 1e-9;       // relative change of the eigenvalue estimate
  double residual_tol = 1e-7;  // ||op(v) - lambda v||_2 for the extracted pair
  int max_iter = 5000;
  std::uint64_t start_seed = 0;  // start vector stream (reproducibility)
  bool hermitian_start = true;
};

struct EigEstimate {
  double magnitude = 0.0;     // |lambda| of the dominant restricted eigenvalue
  double signed_value = 0.0;  // same with the extracted sign
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool multiplicity_warning = false;  // near-degenerate +|l|/-|l| pair
};

using MatrixOp = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Dominant eigenvalue in magnitude of a self-adjoint operator on the
/// HS-orthocomplement of span(onb) (onb must already be HS-orthonormal).
/// Plain power iteration with per-step re-projection; the signed eigenvector
/// is extracted from the last two iterates, so a spectrum with a
/// near-symmetric +-lambda pair converges in estimate even while the
/// iterates oscillate.
EigEstimate dominant_restricted_eig(const MatrixOp& op,
                                    const std::vector<ComplexMatrix>& onb,
                                    int n, const PowerIterOptions& opts);

/// Top eigenvalue of a positive semidefinite operator restricted the same
/// way (Rayleigh quotient estimate; no sign extraction needed).
EigEstimate psd_top_restricted_eig(const MatrixOp& op,
                                   const std::vector<ComplexMatrix>& onb,
                                   int n, const PowerIterOptions& opts);

}  // namespace qxlab
