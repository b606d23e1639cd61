#pragma once

// The X/Y construction: X = (U1, U2, U3) of size n, Y = (U1+U1, U2+U2, U3+U4)
// of size 2n built from four independent Haar unitaries. X has a scalar
// relative commutant, Y a two-dimensional one; the module measures the gap
// constants on both sides, the off-diagonal block estimate, and certifies the
// values of the separating two-quantifier sentence in the matrix model.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qxlab/spectral_gap.hpp"

namespace qxlab {

struct XYPair {
  int n = 0;
  UnitaryTuple x;       // d = 3, size n
  UnitaryTuple y;       // d = 3, size 2n
  ComplexMatrix u4;     // the fresh fourth unitary
  std::uint64_t seed = 0;
};

struct B12Report {
  double b12_epsilon = 0.0;    // min eigenvalue of R*R
  double worst_ratio = 0.0;    // 1 / b12_epsilon
  double sampled_max_ratio = 0.0;
  int trials = 0;
  int iterations = 0;
  double residual = 0.0;
  bool certified = false;
};

struct SeparationReport {
  int n = 0;
  std::uint64_t seed = 0;
  double x_epsilon = 0.0;
  double y_epsilon = 0.0;
  double b12_epsilon = 0.0;
  double u34_dist2 = 0.0;
  double tr_u3star_u4_abs = 0.0;
  double psi_x_lower = 0.0;  // certified lower bound for psi(X); 1 on success
  double psi_y_upper = 1.0;  // certified upper bound for psi(Y); 0 on success
  bool certified = false;
  std::string reason;  // empty when certified
};

struct CertifyOptions {
  int spot_trials = 100;          // random z1/z2 spot checks per branch
  double sub_residual_tol = 5e-3; // what "sub-residuals within tolerance" means
  double spot_slack = 1e-9;
};

XYPair build_xy(int n, std::uint64_t master_seed);

/// commutant_gap of X with basis {I_n}.
GapReport check_x_gap(const XYPair& p, const PowerIterOptions& opts = {});

/// commutant_gap of Y with basis {I_n + 0, 0 + I_n}.
GapReport check_y_gap(const XYPair& p, const PowerIterOptions& opts = {});

/// Worst-case constant for R(B) = ([B,U1], [B,U2], U3 B - B U4): the minimum
/// eigenvalue of R*R by power iteration on 12 - R*R (PSD shift; no kernel
/// deflation), plus ratio sampling over random Ginibre B.
B12Report check_b12_estimate(const XYPair& p, int trials,
                             const PowerIterOptions& opts = {});

/// (|tr_n(U3* U4)|, ||U3 - U4||_2^2).
std::pair<double, double> check_u34(const XYPair& p);

/// Certify psi(X) = 1 / psi(Y) = 0 in the matrix model from the measured gap
/// constants (both must be >= 1/7 with residuals within tolerance).
SeparationReport certify_separation(const XYPair& p, const GapReport& x_gap,
                                    const GapReport& y_gap,
                                    const B12Report& b12,
                                    const CertifyOptions& copts = {});

// ---- word statistics ------------------------------------------------------

struct WordLetter {
  int index = 0;  // 1-based tuple index
  bool star = false;
};
using Word = std::vector<WordLetter>;

/// Parse "1,2,1*,2*" (commas or spaces); empty string is the empty word.
/// Throws on malformed tokens or adjacent cancelling letters.
Word parse_word(const std::string& text, int d = 3);

ComplexMatrix evaluate_word(const std::vector<ComplexMatrix>& tuple,
                            const Word& w, int n);

struct MomentRow {
  std::string word;
  Complex tr_x;
  Complex tr_y;
  double diff_abs = 0.0;
};

/// Per word: tr_n(w(X)), tr_{2n}(w(Y)) and |difference|.
std::vector<MomentRow> moment_match(const XYPair& p,
                                    const std::vector<std::string>& words);

struct ConcentrationRow {
  int n = 0;
  double sample_std = 0.0;
  int trials = 0;
};

/// Sample standard deviation of Re tr_n(w(U)) over fresh tuples per n.
std::vector<ConcentrationRow> concentration_scan(const std::string& word,
                                                 const std::vector<int>& ns,
                                                 int trials,
                                                 std::uint64_t seed);

/// Ginibre matrix scaled to operator norm <= 1 (spectral normalization).
ComplexMatrix random_contraction(int n, RngStream& stream);

}  // namespace qxlab
