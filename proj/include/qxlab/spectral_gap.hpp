#pragma once

// Quantum-channel spectra, quantum-expander constants, and commutant-distance
// spectral-gap constants for unitary tuples, plus the identities tying them
// together. Large n goes through the implicit power iteration of channel.hpp;
// n <= 12 additionally has a dense matricization lane used as an oracle.

#include <vector>

#include "qxlab/channel.hpp"

namespace qxlab {

struct ChannelSpectrum {
  double lambda2 = 0.0;  // dominant |eigenvalue| of the restricted channel
  int iterations = 0;
  double residual = 0.0;
  int restricted_space_dim = 0;
  bool certified = false;  // residual within tolerance
  bool multiplicity_warning = false;
};

struct GapReport {
  double epsilon = 0.0;     // min restricted eigenvalue of T*T, via 2d(1 - lambda2)
  double constant_C = 0.0;  // 1/epsilon
  double lambda2_sym = 0.0;
  bool certified = false;
  int d = 0;
  int n = 0;
  int iterations = 0;
  double residual = 0.0;
  int restricted_space_dim = 0;
  bool multiplicity_warning = false;
};

struct ExpanderReport {
  double epsilon = 0.0;  // d - (top restricted singular value of A -> sum Uj A Uj*)
  int iterations = 0;
  double residual = 0.0;
  bool certified = false;
};

struct DoublingReport {
  double eps_sg = 0.0;
  double eps_qe = 0.0;
  double discrepancy = 0.0;
};

/// Dominant |eigenvalue| of the symmetrized channel on the HS-orthocomplement
/// of the identity. Throws for n = 1 (empty restricted space).
ChannelSpectrum lambda2(const UnitaryTuple& t, const PowerIterOptions& opts = {});

/// Quantum-expander constant: epsilon = d - s with s the largest singular
/// value of A -> sum_j Uj A Uj* on traceless matrices.
ExpanderReport expander_epsilon(const UnitaryTuple& t,
                                const PowerIterOptions& opts = {});

/// Spectral-gap constant for the commutant spanned by commutant_basis.
/// The basis must be annihilated by all commutators [Uj, .] (validated to
/// commutant_tol); epsilon = 2d(1 - lambda2) on the orthocomplement.
GapReport commutant_gap(const UnitaryTuple& t,
                        const std::vector<ComplexMatrix>& commutant_basis,
                        const PowerIterOptions& opts = {},
                        double commutant_tol = 1e-10);

/// Dense-lane check of the T*T identity: |min eig of matricized T*T on the
/// orthocomplement - 2d(1 - top eig of the matricized symmetrized channel)|.
/// Only for n <= 12.
double verify_gap_equivalence(const UnitaryTuple& t,
                              const std::vector<ComplexMatrix>& commutant_basis);

/// The doubled tuple (U1..Ud, U1*..Ud*) realizes the symmetrized channel
/// scaled by 2d; its expander constant must match the spectral-gap epsilon.
DoublingReport verify_corollary_doubling(const UnitaryTuple& t,
                                         const PowerIterOptions& opts = {});

/// (U1..Ud, U1*..Ud*) as a tuple of 2d unitaries.
UnitaryTuple doubled_tuple(const UnitaryTuple& t);

// ---- dense matricization lane (n <= 12) ----------------------------------

/// n^2 x n^2 matrix of the channel on vec(A) (column-major vec).
ComplexMatrix dense_channel_matrix(const UnitaryTuple& t, bool symmetrized);

/// n^2 x n^2 matrix of T*T, T(a) = ([U1,a], ..., [Ud,a]).
ComplexMatrix dense_tstar_t_matrix(const UnitaryTuple& t);

/// W with orthonormal columns spanning the orthocomplement of span(basis)
/// inside C^{n^2} (basis given as matrices, vectorized column-major).
ComplexMatrix dense_orthocomplement(const std::vector<ComplexMatrix>& basis,
                                    int n);

/// Eigenvalues of W* M W (ascending) for a self-adjoint matricized map.
Eigen::VectorXd dense_restricted_spectrum(const ComplexMatrix& m,
                                          const ComplexMatrix& w);

}  // namespace qxlab
