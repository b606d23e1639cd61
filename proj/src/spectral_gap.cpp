#include "qxlab/spectral_gap.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <stdexcept>

namespace qxlab {

namespace {

std::vector<ComplexMatrix> identity_basis(int n) {
  return {ComplexMatrix::Identity(n, n)};
}

ChannelSpectrum spectrum_from(const EigEstimate& e, int restricted_dim,
                              const PowerIterOptions& opts) {
  ChannelSpectrum s;
  s.lambda2 = e.magnitude;
  s.iterations = e.iterations;
  s.residual = e.residual;
  s.restricted_space_dim = restricted_dim;
  s.certified = e.residual <= opts.residual_tol;
  s.multiplicity_warning = e.multiplicity_warning;
  return s;
}

}  // namespace

ChannelSpectrum lambda2(const UnitaryTuple& t, const PowerIterOptions& opts) {
  if (t.n < 2)
    throw std::invalid_argument("lambda2: restricted space is empty for n < 2");
  PowerIterOptions o = opts;
  if (o.start_seed == 0) o.start_seed = t.seed;
  const auto onb = orthonormalize_hs(identity_basis(t.n));
  const auto e = dominant_restricted_eig(
      [&](const ComplexMatrix& a) { return channel_apply(t, a, true); }, onb,
      t.n, o);
  return spectrum_from(e, t.n * t.n - 1, o);
}

ExpanderReport expander_epsilon(const UnitaryTuple& t,
                                const PowerIterOptions& opts) {
  if (t.n < 2)
    throw std::invalid_argument(
        "expander_epsilon: restricted space is empty for n < 2");
  PowerIterOptions o = opts;
  if (o.start_seed == 0) o.start_seed = t.seed;
  const auto onb = orthonormalize_hs(identity_basis(t.n));
  const double d = double(t.d);
  // Psi*Psi where Psi(A) = sum Uj A Uj* (PSD, restricted to traceless).
  auto psistar_psi = [&](const ComplexMatrix& a) {
    ComplexMatrix b = ComplexMatrix::Zero(t.n, t.n);
    for (const auto& u : t.unitaries) b.noalias() += u * a * u.adjoint();
    ComplexMatrix c = ComplexMatrix::Zero(t.n, t.n);
    for (const auto& u : t.unitaries) c.noalias() += u.adjoint() * b * u;
    return c;
  };
  const auto e = psd_top_restricted_eig(psistar_psi, onb, t.n, o);
  ExpanderReport r;
  r.epsilon = d - std::sqrt(std::max(e.signed_value, 0.0));
  r.iterations = e.iterations;
  r.residual = e.residual;
  r.certified = e.residual <= o.residual_tol;
  return r;
}

GapReport commutant_gap(const UnitaryTuple& t,
                        const std::vector<ComplexMatrix>& commutant_basis,
                        const PowerIterOptions& opts, double commutant_tol) {
  PowerIterOptions o = opts;
  if (o.start_seed == 0) o.start_seed = t.seed;
  if (commutant_basis.empty())
    throw std::invalid_argument("commutant_gap: empty commutant basis");
  for (const auto& b : commutant_basis) {
    if (b.rows() != t.n || b.cols() != t.n)
      throw std::invalid_argument("commutant_gap: basis dimension mismatch");
    const double nb = hs_norm2(b);
    if (nb == 0.0)
      throw std::invalid_argument("commutant_gap: zero basis element");
    double viol = 0.0;
    for (const auto& u : t.unitaries) {
      const double c = hs_norm2(commutator(u, b)) / nb;
      viol += c * c;
    }
    if (viol > commutant_tol)
      throw std::invalid_argument("commutant_gap: basis not in commutant");
  }
  const auto onb = orthonormalize_hs(commutant_basis);
  const int restricted = t.n * t.n - int(onb.size());
  if (restricted < 1)
    throw std::invalid_argument("commutant_gap: restricted space is empty");
  const auto e = dominant_restricted_eig(
      [&](const ComplexMatrix& a) { return channel_apply(t, a, true); }, onb,
      t.n, o);

  GapReport g;
  g.lambda2_sym = e.magnitude;
  g.epsilon = 2.0 * t.d * (1.0 - e.magnitude);
  g.constant_C = g.epsilon > 0 ? 1.0 / g.epsilon
                               : std::numeric_limits<double>::infinity();
  g.certified = e.residual <= o.residual_tol;
  g.d = t.d;
  g.n = t.n;
  g.iterations = e.iterations;
  g.residual = e.residual;
  g.restricted_space_dim = restricted;
  g.multiplicity_warning = e.multiplicity_warning;
  return g;
}

UnitaryTuple doubled_tuple(const UnitaryTuple& t) {
  UnitaryTuple s;
  s.n = t.n;
  s.d = 2 * t.d;
  s.seed = t.seed;
  s.unitaries = t.unitaries;
  s.stream_ids = t.stream_ids;
  for (int j = 0; j < t.d; ++j) {
    s.unitaries.push_back(t.unitaries[j].adjoint());
    s.stream_ids.push_back(mix64(t.stream_ids[j]));
  }
  return s;
}

DoublingReport verify_corollary_doubling(const UnitaryTuple& t,
                                         const PowerIterOptions& opts) {
  if (t.n > 128)
    throw std::invalid_argument("verify_corollary_doubling: n too large");
  DoublingReport r;
  r.eps_sg = commutant_gap(t, identity_basis(t.n), opts).epsilon;
  r.eps_qe = expander_epsilon(doubled_tuple(t), opts).epsilon;
  r.discrepancy = std::abs(r.eps_sg - r.eps_qe);
  return r;
}

// ---- dense lane -----------------------------------------------------------

namespace {

// kron(A, B)(i*rB+k, j*cB+l) = A(i,j) B(k,l); with column-major vec this
// realizes vec(B X A^T) -> no: vec(A X C) = (C^T kron A) vec(X).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

void require_dense_size(const UnitaryTuple& t, const char* who) {
  if (t.n > 12)
    throw std::invalid_argument(std::string(who) + ": n too large for the dense path");
}

}  // namespace

ComplexMatrix dense_channel_matrix(const UnitaryTuple& t, bool symmetrized) {
  require_dense_size(t, "dense_channel_matrix");
  const int n = t.n;
  ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& u : t.unitaries) {
    m += kron(u.conjugate(), u);  // vec(U A U*) = (conj(U) kron U) vec(A)
    if (symmetrized) m += kron(u.transpose(), u.adjoint());
  }
  return m / double(symmetrized ? 2 * t.d : t.d);
}

ComplexMatrix dense_tstar_t_matrix(const UnitaryTuple& t) {
  require_dense_size(t, "dense_tstar_t_matrix");
  const int n = t.n;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& u : t.unitaries) {
    const ComplexMatrix k = kron(id, u) - kron(u.transpose(), id);  // [U, .]
    m += k.adjoint() * k;
  }
  return m;
}

ComplexMatrix dense_orthocomplement(const std::vector<ComplexMatrix>& basis,
                                    int n) {
  const int nn = n * n;
  const int k = int(basis.size());
  ComplexMatrix b(nn, k);
  for (int j = 0; j < k; ++j)
    b.col(j) = Eigen::Map<const Eigen::VectorXcd>(basis[j].data(), nn);
  Eigen::HouseholderQR<ComplexMatrix> qr(b);
  ComplexMatrix q = qr.householderQ();
  return q.rightCols(nn - k);
}

Eigen::VectorXd dense_restricted_spectrum(const ComplexMatrix& m,
                                          const ComplexMatrix& w) {
  const ComplexMatrix r = w.adjoint() * m * w;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix((r + r.adjoint()) / 2.0));
  return es.eigenvalues();
}

double verify_gap_equivalence(const UnitaryTuple& t,
                              const std::vector<ComplexMatrix>& commutant_basis) {
  require_dense_size(t, "verify_gap_equivalence");
  const auto onb = orthonormalize_hs(commutant_basis);
  const ComplexMatrix w = dense_orthocomplement(onb, t.n);
  const Eigen::VectorXd tt = dense_restricted_spectrum(dense_tstar_t_matrix(t), w);
  const Eigen::VectorXd ch =
      dense_restricted_spectrum(dense_channel_matrix(t, true), w);
  const double eps_direct = tt.minCoeff();
  const double eps_channel = 2.0 * t.d * (1.0 - ch.maxCoeff());
  return std::abs(eps_direct - eps_channel);
}

}  // namespace qxlab
