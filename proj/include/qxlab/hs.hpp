#pragma once

// Dense complex matrices with the normalized-trace (Hilbert-Schmidt) geometry:
// tr_n(a) = Tr(a)/n, <a,b> = tr_n(a* b), ||a||_2 = tr_n(a* a)^{1/2}.
// All other modules are built on top of these free functions.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qxlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

namespace detail {
inline void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(who) + ": matrix is not square");
}
inline void require_same_size(const ComplexMatrix& a, const ComplexMatrix& b,
                              const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}
}  // namespace detail

/// Normalized trace tr_n(a) = Tr(a)/n.
template <typename Derived>
typename Derived::Scalar normalized_trace(const Eigen::MatrixBase<Derived>& a) {
  return a.trace() / typename Derived::Scalar(double(a.rows()));
}

/// HS inner product <a,b> = tr_n(a* b). Linear in the second argument.
template <typename DA, typename DB>
typename DA::Scalar hs_inner(const Eigen::MatrixBase<DA>& a,
                             const Eigen::MatrixBase<DB>& b) {
  return a.conjugate().cwiseProduct(b).sum() /
         typename DA::Scalar(double(a.rows()));
}

/// ||a||_2 = (tr_n(a* a))^{1/2} = Frobenius norm / sqrt(n).
template <typename Derived>
double hs_norm2(const Eigen::MatrixBase<Derived>& a) {
  return a.norm() / std::sqrt(double(a.rows()));
}

/// [a, b] = ab - ba. Throws on dimension mismatch.
inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_size(a, b, "commutator");
  return a * b - b * a;
}

/// 2n x 2n block diagonal diag(u, v). Throws on dimension mismatch.
inline ComplexMatrix block_double(const ComplexMatrix& u, const ComplexMatrix& v) {
  detail::require_same_size(u, v, "block_double");
  detail::require_square(u, "block_double");
  const Eigen::Index n = u.rows();
  ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = u;
  out.bottomRightCorner(n, n) = v;
  return out;
}

/// Gram-Schmidt in the HS inner product. Throws if the span is rank
/// deficient (residual below rank_tol relative to the input norm).
inline std::vector<ComplexMatrix> orthonormalize_hs(
    std::vector<ComplexMatrix> basis, double rank_tol = 1e-8) {
  std::vector<ComplexMatrix> out;
  out.reserve(basis.size());
  for (auto& b : basis) {
    const double original = hs_norm2(b);
    for (const auto& q : out) b -= hs_inner(q, b) * q;
    // second pass for numerical orthogonality
    for (const auto& q : out) b -= hs_inner(q, b) * q;
    const double left = hs_norm2(b);
    if (left <= rank_tol * (original > 0 ? original : 1.0))
      throw std::invalid_argument(
          "orthonormalize_hs: basis is (numerically) linearly dependent");
    out.push_back(b / left);
  }
  return out;
}

/// a minus its HS-orthogonal projection onto an already orthonormal span.
inline ComplexMatrix project_off_orthonormal(
    const ComplexMatrix& a, const std::vector<ComplexMatrix>& onb) {
  ComplexMatrix r = a;
  for (const auto& q : onb) r -= hs_inner(q, a) * q;
  return r;
}

/// a minus its HS-orthogonal projection onto span(basis).
/// The basis is orthonormalized internally; dependent bases throw.
inline ComplexMatrix project_offspan(const ComplexMatrix& a,
                                     const std::vector<ComplexMatrix>& basis,
                                     double rank_tol = 1e-8) {
  for (const auto& b : basis) detail::require_same_size(a, b, "project_offspan");
  return project_off_orthonormal(a, orthonormalize_hs(basis, rank_tol));
}

/// a - tr_n(a) * I, the projection onto the HS-orthocomplement of the identity.
inline ComplexMatrix project_traceless(const ComplexMatrix& a) {
  detail::require_square(a, "project_traceless");
  ComplexMatrix r = a;
  r.diagonal().array() -= normalized_trace(a);
  return r;
}

}  // namespace qxlab
