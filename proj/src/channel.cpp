#include "qxlab/channel.hpp"

#include <stdexcept>

#include "qxlab/rng.hpp"

namespace qxlab {

ComplexMatrix channel_apply(const UnitaryTuple& t, const ComplexMatrix& a,
                            bool symmetrized) {
  if (a.rows() != t.n || a.cols() != t.n)
    throw std::invalid_argument("channel_apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(t.n, t.n);
  for (const auto& u : t.unitaries) {
    out.noalias() += u * a * u.adjoint();
    if (symmetrized) out.noalias() += u.adjoint() * a * u;
  }
  return out / double(symmetrized ? 2 * t.d : t.d);
}

namespace {

constexpr std::uint64_t kStartStream = 0x706f776572697465ULL;  // start vectors

ComplexMatrix start_vector(const std::vector<ComplexMatrix>& onb, int n,
                           const PowerIterOptions& opts) {
  RngStream stream(opts.start_seed, kStartStream);
  for (int attempt = 0; attempt < 64; ++attempt) {
    ComplexMatrix v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        v(i, j) = Complex(stream.next_gaussian(), stream.next_gaussian());
    if (opts.hermitian_start) v = ComplexMatrix((v + v.adjoint()) / 2.0);
    v = project_off_orthonormal(v, onb);
    const double nv = hs_norm2(v);
    if (nv > 1e-8) return v / nv;
  }
  throw std::runtime_error("power iteration: could not build a start vector");
}

}  // namespace

EigEstimate dominant_restricted_eig(const MatrixOp& op,
                                    const std::vector<ComplexMatrix>& onb,
                                    int n, const PowerIterOptions& opts) {
  EigEstimate est;
  ComplexMatrix v = start_vector(onb, n, opts);
  ComplexMatrix prev = v;
  double s_prev = -1.0;

  auto extract = [&](double s) {
    // With op(prev) == s*v (approximately), v + prev and v - prev are the
    // candidates for eigenvalue +s and -s.
    const ComplexMatrix cp = v + prev;
    const ComplexMatrix cm = v - prev;
    const double np = hs_norm2(cp);
    const double nm = hs_norm2(cm);
    ComplexMatrix cand = (np >= nm) ? ComplexMatrix(cp / (np > 0 ? np : 1.0))
                                    : ComplexMatrix(cm / (nm > 0 ? nm : 1.0));
    const double lambda = (np >= nm) ? s : -s;
    const double res =
        hs_norm2(project_off_orthonormal(op(cand), onb) - lambda * cand);
    est.magnitude = s;
    est.signed_value = lambda;
    est.residual = res;
    est.multiplicity_warning =
        std::min(np, nm) > 0.1 * std::max({np, nm, 1e-300});
    return res;
  };

  for (int k = 1; k <= opts.max_iter; ++k) {
    est.iterations = k;
    ComplexMatrix w = project_off_orthonormal(op(v), onb);
    const double s = hs_norm2(w);
    if (s < 1e-300) {
      // the operator annihilates the iterate: dominant restricted value is 0
      est.magnitude = 0.0;
      est.signed_value = 0.0;
      est.residual = 0.0;
      est.converged = true;
      return est;
    }
    prev = v;
    v = w / s;
    const double rel = std::abs(s - s_prev) / s;
    s_prev = s;
    if (rel < opts.rel_tol || k % 32 == 0 || k == opts.max_iter) {
      const double res = extract(s);
      if (rel < opts.rel_tol && res < opts.residual_tol) {
        est.converged = true;
        return est;
      }
    }
  }
  return est;
}

EigEstimate psd_top_restricted_eig(const MatrixOp& op,
                                   const std::vector<ComplexMatrix>& onb,
                                   int n, const PowerIterOptions& opts) {
  EigEstimate est;
  ComplexMatrix v = start_vector(onb, n, opts);
  double mu_prev = -1.0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    est.iterations = k;
    ComplexMatrix w = project_off_orthonormal(op(v), onb);
    const double mu = std::real(hs_inner(v, w));  // Rayleigh quotient
    const double res = hs_norm2(w - mu * v);
    est.magnitude = std::abs(mu);
    est.signed_value = mu;
    est.residual = res;
    const double nw = hs_norm2(w);
    if (nw < 1e-300) {
      est.magnitude = 0.0;
      est.signed_value = 0.0;
      est.converged = true;
      return est;
    }
    v = w / nw;
    const double rel = std::abs(mu - mu_prev) / std::max(std::abs(mu), 1e-300);
    mu_prev = mu;
    if (rel < opts.rel_tol && res < opts.residual_tol) {
      est.converged = true;
      return est;
    }
  }
  return est;
}

}  // namespace qxlab
