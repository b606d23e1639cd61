#include "qxlab/separation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qxlab {

XYPair build_xy(int n, std::uint64_t master_seed) {
  if (n < 2) throw std::invalid_argument("build_xy: need n >= 2");
  const UnitaryTuple base = sample_tuple(n, 4, master_seed);
  XYPair p;
  p.n = n;
  p.seed = master_seed;
  p.u4 = base.unitaries[3];

  p.x.n = n;
  p.x.d = 3;
  p.x.seed = master_seed;
  p.x.unitaries = {base.unitaries[0], base.unitaries[1], base.unitaries[2]};
  p.x.stream_ids = {base.stream_ids[0], base.stream_ids[1], base.stream_ids[2]};

  p.y.n = 2 * n;
  p.y.d = 3;
  p.y.seed = master_seed;
  p.y.unitaries = {block_double(base.unitaries[0], base.unitaries[0]),
                   block_double(base.unitaries[1], base.unitaries[1]),
                   block_double(base.unitaries[2], base.unitaries[3])};
  p.y.stream_ids = {base.stream_ids[0], base.stream_ids[1],
                    mix64(base.stream_ids[2], base.stream_ids[3])};
  return p;
}

GapReport check_x_gap(const XYPair& p, const PowerIterOptions& opts) {
  return commutant_gap(p.x, {ComplexMatrix::Identity(p.n, p.n)}, opts);
}

GapReport check_y_gap(const XYPair& p, const PowerIterOptions& opts) {
  const int n = p.n;
  ComplexMatrix e1 = ComplexMatrix::Zero(2 * n, 2 * n);
  e1.topLeftCorner(n, n) = ComplexMatrix::Identity(n, n);
  ComplexMatrix e2 = ComplexMatrix::Zero(2 * n, 2 * n);
  e2.bottomRightCorner(n, n) = ComplexMatrix::Identity(n, n);
  return commutant_gap(p.y, {e1, e2}, opts);
}

namespace {

constexpr std::uint64_t kB12Stream = 0x6231325f72617469ULL;
constexpr std::uint64_t kSpotStream = 0x73706f745f636865ULL;

// R*R(B) = 6B - sum_{j=1,2}(Uj* B Uj + Uj B Uj*) - (U3* B U4 + U3 B U4*)
ComplexMatrix rstar_r(const XYPair& p, const ComplexMatrix& b) {
  const auto& u1 = p.x.unitaries[0];
  const auto& u2 = p.x.unitaries[1];
  const auto& u3 = p.x.unitaries[2];
  const auto& u4 = p.u4;
  ComplexMatrix out = 6.0 * b;
  out.noalias() -= u1.adjoint() * b * u1;
  out.noalias() -= u1 * b * u1.adjoint();
  out.noalias() -= u2.adjoint() * b * u2;
  out.noalias() -= u2 * b * u2.adjoint();
  out.noalias() -= u3.adjoint() * b * u4;
  out.noalias() -= u3 * b * u4.adjoint();
  return out;
}

double b12_denominator(const XYPair& p, const ComplexMatrix& b) {
  const auto& u1 = p.x.unitaries[0];
  const auto& u2 = p.x.unitaries[1];
  const auto& u3 = p.x.unitaries[2];
  const auto& u4 = p.u4;
  const double c1 = hs_norm2(commutator(b, u1));
  const double c2 = hs_norm2(commutator(b, u2));
  const double c3 = hs_norm2(ComplexMatrix(u3 * b - b * u4));
  return c1 * c1 + c2 * c2 + c3 * c3;
}

}  // namespace

B12Report check_b12_estimate(const XYPair& p, int trials,
                             const PowerIterOptions& opts) {
  if (trials < 1) throw std::invalid_argument("check_b12_estimate: trials >= 1");
  PowerIterOptions o = opts;
  if (o.start_seed == 0) o.start_seed = p.seed;
  o.hermitian_start = false;  // R*R does not preserve the Hermitian sector

  // ||R*R|| <= 12 (three constraint maps of norm <= 2), so 12 - R*R is PSD.
  const auto e = psd_top_restricted_eig(
      [&](const ComplexMatrix& b) {
        return ComplexMatrix(12.0 * b - rstar_r(p, b));
      },
      {}, p.n, o);

  B12Report r;
  r.b12_epsilon = 12.0 - e.signed_value;
  r.worst_ratio = r.b12_epsilon > 0 ? 1.0 / r.b12_epsilon
                                    : std::numeric_limits<double>::infinity();
  r.trials = trials;
  r.iterations = e.iterations;
  r.residual = e.residual;
  r.certified = e.residual <= o.residual_tol;

  RngStream stream(p.seed, kB12Stream);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix b = sample_ginibre(p.n, stream);
    const double num = hs_norm2(b);
    const double den = b12_denominator(p, b);
    if (num < 1e-300 || den < 1e-300) continue;  // degenerate draw, skip
    worst = std::max(worst, num * num / den);
  }
  r.sampled_max_ratio = worst;
  return r;
}

std::pair<double, double> check_u34(const XYPair& p) {
  const auto& u3 = p.x.unitaries[2];
  const Complex tr = normalized_trace(ComplexMatrix(u3.adjoint() * p.u4));
  const double dist = hs_norm2(ComplexMatrix(u3 - p.u4));
  return {std::abs(tr), dist * dist};
}

ComplexMatrix random_contraction(int n, RngStream& stream) {
  ComplexMatrix g = sample_ginibre(n, stream);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ComplexMatrix(g.adjoint() * g));
  const double top = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  if (top > 0) g /= top;
  return g;
}

SeparationReport certify_separation(const XYPair& p, const GapReport& x_gap,
                                    const GapReport& y_gap,
                                    const B12Report& b12,
                                    const CertifyOptions& copts) {
  SeparationReport rep;
  rep.n = p.n;
  rep.seed = p.seed;
  rep.x_epsilon = x_gap.epsilon;
  rep.y_epsilon = y_gap.epsilon;
  rep.b12_epsilon = b12.b12_epsilon;
  const auto [tr_abs, dist2] = check_u34(p);
  rep.tr_u3star_u4_abs = tr_abs;
  rep.u34_dist2 = dist2;

  std::ostringstream why;
  const double threshold = 1.0 / 7.0;
  bool ok = true;
  if (!(x_gap.epsilon >= threshold)) {
    ok = false;
    why << "x_epsilon " << x_gap.epsilon << " < 1/7; ";
  }
  if (!(y_gap.epsilon >= threshold)) {
    ok = false;
    why << "y_epsilon " << y_gap.epsilon << " < 1/7; ";
  }
  if (!(x_gap.residual <= copts.sub_residual_tol)) {
    ok = false;
    why << "x gap residual " << x_gap.residual << " above tolerance; ";
  }
  if (!(y_gap.residual <= copts.sub_residual_tol)) {
    ok = false;
    why << "y gap residual " << y_gap.residual << " above tolerance; ";
  }
  if (!(b12.residual <= copts.sub_residual_tol)) {
    ok = false;
    why << "b12 residual " << b12.residual << " above tolerance; ";
  }

  const int n = p.n;
  const int nn = 2 * n;

  // Branch (a): z1 = diag(I, -I) is a trace-zero self-adjoint unitary
  // commuting with Y. With the Y gap, every unit-ball z2 satisfies
  // ||[z1,z2]||^2 <= 4 d(z2,B)^2 <= 28 sum ||[Yj,z2]||^2, so psi(Y) = 0.
  ComplexMatrix z1 = ComplexMatrix::Identity(nn, nn);
  z1.bottomRightCorner(n, n) *= -1.0;
  {
    const double norm2 = hs_norm2(z1);
    const Complex tr = normalized_trace(z1);
    double comm2 = 0.0;
    for (const auto& yj : p.y.unitaries) {
      const double c = hs_norm2(commutator(yj, z1));
      comm2 += c * c;
    }
    if (std::abs(norm2 * norm2 - 1.0) > 1e-12 || std::abs(tr) > 1e-13 ||
        comm2 > 1e-13) {
      ok = false;
      why << "z1 block identities violated; ";
    }
  }
  if (ok) {
    RngStream stream(p.seed, kSpotStream);
    for (int t = 0; t < copts.spot_trials; ++t) {
      const ComplexMatrix z2 = random_contraction(nn, stream);
      const double lhs = hs_norm2(commutator(z1, z2));
      double rhs = 0.0;
      for (const auto& yj : p.y.unitaries) {
        const double c = hs_norm2(commutator(yj, z2));
        rhs += c * c;
      }
      if (lhs * lhs > 28.0 * rhs + copts.spot_slack) {
        ok = false;
        why << "y spot check failed at trial " << t << "; ";
        break;
      }
    }
  }

  // Branch (b): with x_epsilon >= 1/7, for every z1 we have
  // 7 sum ||[Xj,z1]||^2 >= ||z1||^2 - |tr z1|^2, so the inner expression of
  // psi is >= 1, while z1 = 0 gives exactly 1.
  if (ok) {
    RngStream stream(p.seed, mix64(kSpotStream));
    for (int t = 0; t < copts.spot_trials; ++t) {
      const ComplexMatrix z = random_contraction(n, stream);
      const double norm2 = hs_norm2(z);
      const double trabs = std::abs(normalized_trace(z));
      double comm2 = 0.0;
      for (const auto& xj : p.x.unitaries) {
        const double c = hs_norm2(commutator(xj, z));
        comm2 += c * c;
      }
      const double expr = 1.0 - norm2 * norm2 + trabs * trabs + 7.0 * comm2;
      if (expr < 1.0 - copts.spot_slack) {
        ok = false;
        why << "x spot check failed at trial " << t << "; ";
        break;
      }
    }
  }

  rep.certified = ok;
  if (ok) {
    rep.psi_x_lower = 1.0;
    rep.psi_y_upper = 0.0;
  } else {
    rep.psi_x_lower = 0.0;  // trivial bounds only
    rep.psi_y_upper = 1.0;
    rep.reason = why.str();
  }
  return rep;
}

// ---- word statistics ------------------------------------------------------

Word parse_word(const std::string& text, int d) {
  Word w;
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    WordLetter l;
    std::size_t digits = token.size();
    if (token.back() == '*') {
      l.star = true;
      digits -= 1;
    }
    if (digits == 0)
      throw std::invalid_argument("parse_word: malformed token '" + token + "'");
    for (std::size_t i = 0; i < digits; ++i)
      if (!std::isdigit(static_cast<unsigned char>(token[i])))
        throw std::invalid_argument("parse_word: malformed token '" + token + "'");
    l.index = std::stoi(token.substr(0, digits));
    if (l.index < 1 || l.index > d)
      throw std::invalid_argument("parse_word: letter index out of range in '" +
                                  token + "'");
    w.push_back(l);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t')
      flush();
    else
      token.push_back(c);
  }
  flush();
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i].index == w[i - 1].index && w[i].star != w[i - 1].star)
      throw std::invalid_argument("parse_word: word is not reduced");
  return w;
}

ComplexMatrix evaluate_word(const std::vector<ComplexMatrix>& tuple,
                            const Word& w, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(n, n);
  for (const auto& l : w) {
    const auto& u = tuple.at(std::size_t(l.index - 1));
    if (l.star)
      out = out * u.adjoint();
    else
      out = out * u;
  }
  return out;
}

std::vector<MomentRow> moment_match(const XYPair& p,
                                    const std::vector<std::string>& words) {
  std::vector<MomentRow> rows;
  rows.reserve(words.size());
  for (const auto& text : words) {
    const Word w = parse_word(text, 3);
    MomentRow row;
    row.word = text;
    row.tr_x = normalized_trace(evaluate_word(p.x.unitaries, w, p.n));
    row.tr_y = normalized_trace(evaluate_word(p.y.unitaries, w, 2 * p.n));
    row.diff_abs = std::abs(row.tr_x - row.tr_y);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConcentrationRow> concentration_scan(const std::string& word,
                                                 const std::vector<int>& ns,
                                                 int trials,
                                                 std::uint64_t seed) {
  if (trials < 30)
    throw std::invalid_argument("concentration_scan: need trials >= 30");
  int d = 1;
  const Word w = parse_word(word, 3);
  for (const auto& l : w) d = std::max(d, l.index);

  std::vector<ConcentrationRow> rows;
  for (int n : ns) {
    if (n < 1) throw std::invalid_argument("concentration_scan: n >= 1");
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      const UnitaryTuple tup =
          sample_tuple(n, d, mix64(seed, std::uint64_t(n), std::uint64_t(t)));
      const double v =
          std::real(normalized_trace(evaluate_word(tup.unitaries, w, n)));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / trials;
    const double var =
        std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1));
    rows.push_back({n, std::sqrt(var), trials});
  }
  return rows;
}

}  // namespace qxlab
