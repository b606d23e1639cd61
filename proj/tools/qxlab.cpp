// qxlab command line: spectral-gap sweeps, the X/Y separation experiment,
// the exact QE decider, and the genericity/concentration scans. stdout is
// machine-readable records only; progress goes to stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qxlab/io.hpp"
#include "qxlab/qe.hpp"
#include "qxlab/runconfig.hpp"
#include "qxlab/separation.hpp"
#include "qxlab/spectral_gap.hpp"

namespace {

using namespace qxlab;
namespace qc = qxlab::cli;

struct CommonOpts {
  std::string n_text;
  std::string seeds_text;
  int d = 3;
  double tol = 1e-9;
  double residual_tol = 1e-7;
  int max_iter = 5000;
  int jobs = qc::default_jobs();
  std::string out;
  std::string format = "json";
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_nd = true,
                bool with_power = true) {
  if (with_nd) {
    cmd->add_option("--n", o.n_text, "matrix sizes, e.g. 64,128 or 2..6");
    cmd->add_option("--seeds", o.seeds_text, "seeds, e.g. 1,2,3 or 1..5");
    cmd->add_option("--d", o.d, "tuple size");
  }
  if (with_power) {
    cmd->add_option("--tol", o.tol, "power iteration relative tolerance");
    cmd->add_option("--residual-tol", o.residual_tol, "residual tolerance");
    cmd->add_option("--max-iter", o.max_iter, "power iteration cap");
  }
  cmd->add_option("--jobs", o.jobs, "worker pool size (env QXLAB_JOBS)");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "json or csv");
  cmd->add_flag("--deterministic", o.deterministic,
                "suppress the timestamp field");
}

struct Sink {
  std::ofstream file;
  std::ostream* stream = &std::cout;
};

Sink open_sink(const CommonOpts& o) {
  Sink s;
  if (!o.out.empty()) {
    s.file.open(o.out, std::ios::binary);
    if (!s.file) throw std::runtime_error("cannot write " + o.out);
    s.stream = &s.file;
  }
  return s;
}

PowerIterOptions power_options(const CommonOpts& o) {
  PowerIterOptions p;
  p.rel_tol = o.tol;
  p.residual_tol = o.residual_tol;
  p.max_iter = o.max_iter;
  return p;
}

int run_gap(const CommonOpts& o) {
  const auto ns = qc::parse_int_list(o.n_text);
  const auto seeds = qc::parse_seed_list(o.seeds_text);
  const auto popts = power_options(o);

  struct Task {
    int n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : ns)
    for (auto s : seeds) tasks.push_back({n, s});

  std::vector<GapReport> reports(tasks.size());
  qc::run_indexed(int(tasks.size()), o.jobs, [&](int i) {
    const auto& t = tasks[std::size_t(i)];
    std::cerr << "gap: n=" << t.n << " seed=" << t.seed << "\n";
    const UnitaryTuple tup = sample_tuple(t.n, o.d, t.seed);
    reports[std::size_t(i)] =
        commutant_gap(tup, {ComplexMatrix::Identity(t.n, t.n)}, popts);
  });

  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  const double target = std::sqrt(2.0 * o.d - 1.0) / o.d;
  double dev_sum = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& g = reports[i];
    dev_sum += std::abs(g.lambda2_sym - target);
    w.write({{"n", g.n},
             {"d", g.d},
             {"seed", tasks[i].seed},
             {"lambda2", g.lambda2_sym},
             {"epsilon", g.epsilon},
             {"C", g.constant_C},
             {"iterations", g.iterations},
             {"residual", g.residual},
             {"certified", g.certified}});
  }
  w.write({{"summary", true},
           {"d", o.d},
           {"target_lambda2", target},
           {"mean_abs_dev", dev_sum / double(tasks.size())},
           {"runs", tasks.size()}});
  return qc::kExitOk;
}

int run_separation(const CommonOpts& o, int b12_trials, int spot_trials,
                   double min_certified, double sub_residual_tol) {
  const auto ns = qc::parse_int_list(o.n_text);
  const auto seeds = qc::parse_seed_list(o.seeds_text);
  const auto popts = power_options(o);

  struct Task {
    int n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : ns)
    for (auto s : seeds) tasks.push_back({n, s});

  std::vector<SeparationReport> reports(tasks.size());
  qc::run_indexed(int(tasks.size()), o.jobs, [&](int i) {
    const auto& t = tasks[std::size_t(i)];
    std::cerr << "separation: n=" << t.n << " seed=" << t.seed << "\n";
    const XYPair p = build_xy(t.n, t.seed);
    const GapReport xg = check_x_gap(p, popts);
    const GapReport yg = check_y_gap(p, popts);
    const B12Report b12 = check_b12_estimate(p, b12_trials, popts);
    CertifyOptions copts;
    copts.spot_trials = spot_trials;
    copts.sub_residual_tol = sub_residual_tol;
    reports[std::size_t(i)] = certify_separation(p, xg, yg, b12, copts);
  });

  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  int certified = 0;
  for (const auto& r : reports) {
    certified += r.certified ? 1 : 0;
    w.write({{"n", r.n},
             {"seed", r.seed},
             {"x_epsilon", r.x_epsilon},
             {"y_epsilon", r.y_epsilon},
             {"b12_epsilon", r.b12_epsilon},
             {"u34_dist2", r.u34_dist2},
             {"tr_u3star_u4_abs", r.tr_u3star_u4_abs},
             {"psi_x_lower", r.psi_x_lower},
             {"psi_y_upper", r.psi_y_upper},
             {"certified", r.certified},
             {"reason", r.reason}});
  }
  const double fraction = double(certified) / double(reports.size());
  w.write({{"summary", true},
           {"runs", reports.size()},
           {"certified", certified},
           {"fraction", fraction}});
  return fraction >= min_certified ? qc::kExitOk : qc::kExitUncertified;
}

int run_expander_check(const CommonOpts& o, const std::string& manifest) {
  const UnitaryTuple t = read_tuple_manifest(manifest);
  const auto rep = expander_epsilon(t, power_options(o));
  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  w.write({{"n", t.n},
           {"d", t.d},
           {"seed", t.seed},
           {"epsilon", rep.epsilon},
           {"iterations", rep.iterations},
           {"residual", rep.residual},
           {"certified", rep.certified}});
  return qc::kExitOk;
}

int run_sample(const CommonOpts& o, int n, std::uint64_t seed,
               const std::string& stem, const std::string& member_format) {
  const UnitaryTuple t = sample_tuple(n, o.d, seed);
  MatrixFileFormat f = MatrixFileFormat::binary;
  if (member_format == "json")
    f = MatrixFileFormat::json;
  else if (member_format != "binary")
    throw std::invalid_argument("member format must be json or binary");
  const std::string manifest = write_tuple(stem, t, f);
  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  w.write({{"n", n}, {"d", o.d}, {"seed", seed}, {"manifest", manifest}});
  return qc::kExitOk;
}

int run_qe(const CommonOpts& o, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "qe: cannot open " << path << "\n";
    return qc::kExitConfigError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const Decomposition dec = decomposition_from_json_text(buf.str());
  const QEVerdict v = decide_qe(dec);

  qc::Record rec;
  rec["qe"] = v.qe;
  switch (v.obstruction) {
    case Obstruction::none: rec["obstruction"] = nullptr; break;
    case Obstruction::type_II_present: rec["obstruction"] = "type_II_present"; break;
    case Obstruction::diffuse_matrix_present:
      rec["obstruction"] = "diffuse_matrix_present";
      break;
    case Obstruction::weight_relation: rec["obstruction"] = "weight_relation"; break;
  }
  if (!v.witness.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : v.witness)
      arr.push_back({{"summand", e.summand_index}, {"r", e.r}});
    rec["witness"] = arr;
  }
  if (v.witness_sum) rec["witness_sum"] = rational_to_string(*v.witness_sum);

  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  w.write(rec);
  return v.qe ? qc::kExitOk : qc::kExitNotQE;
}

int run_genericity(const CommonOpts& o, int k, long long trials,
                   const std::string& mode, double tol, int dyadic_bits,
                   std::uint64_t seed) {
  GenericityMode m;
  if (mode == "float")
    m = GenericityMode::float_tolerance;
  else if (mode == "exact")
    m = GenericityMode::exact_rational;
  else
    throw std::invalid_argument("mode must be float or exact");
  const auto res = genericity_sample(k, trials, m, tol, seed, dyadic_bits);
  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  w.write({{"k", k},
           {"trials", res.trials},
           {"mode", mode},
           {"tol", tol},
           {"qe_count", res.qe_count},
           {"fraction", res.fraction}});
  return qc::kExitOk;
}

int run_moments(const CommonOpts& o, int n, std::uint64_t seed,
                const std::vector<std::string>& words) {
  const XYPair p = build_xy(n, seed);
  const auto rows = moment_match(p, words);
  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  for (const auto& r : rows)
    w.write({{"n", n},
             {"seed", seed},
             {"word", r.word},
             {"tr_x_abs", std::abs(r.tr_x)},
             {"tr_y_abs", std::abs(r.tr_y)},
             {"diff_abs", r.diff_abs}});
  return qc::kExitOk;
}

int run_concentration(const CommonOpts& o, const std::string& word, int trials,
                      std::uint64_t seed) {
  const auto ns = qc::parse_int_list(o.n_text);
  const auto rows = concentration_scan(word, ns, trials, seed);
  Sink sink = open_sink(o);
  qc::RecordWriter w(*sink.stream, qc::format_from_string(o.format),
                     o.deterministic);
  for (const auto& r : rows)
    w.write({{"n", r.n},
             {"word", word},
             {"trials", r.trials},
             {"sample_std", r.sample_std}});
  return qc::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum expander / quantifier elimination laboratory"};
  app.require_subcommand(1);

  CommonOpts gap_opts;
  auto* gap = app.add_subcommand("gap", "Hastings channel gap sweep");
  add_common(gap, gap_opts);

  CommonOpts sep_opts;
  int b12_trials = 16, spot_trials = 50;
  double min_certified = 0.8, sub_residual_tol = 5e-3;
  auto* sep = app.add_subcommand("separation", "X/Y separation experiment");
  add_common(sep, sep_opts);
  sep->add_option("--b12-trials", b12_trials, "random B ratio samples");
  sep->add_option("--spot-trials", spot_trials, "random z spot checks");
  sep->add_option("--min-certified", min_certified,
                  "exit 0 only if this fraction of runs certify");
  sep->add_option("--cert-residual-tol", sub_residual_tol,
                  "sub-residual tolerance for certification");

  CommonOpts exp_opts;
  std::string manifest;
  auto* exp = app.add_subcommand("expander-check",
                                 "expander constant of a stored tuple");
  add_common(exp, exp_opts, false);
  exp->add_option("--manifest", manifest, "tuple manifest path")->required();

  CommonOpts smp_opts;
  int sample_n = 8;
  std::uint64_t sample_seed = 1;
  std::string sample_stem, member_format = "binary";
  auto* smp = app.add_subcommand("sample", "sample a tuple and export it");
  add_common(smp, smp_opts, false, false);
  smp->add_option("--n", sample_n, "matrix size")->required();
  smp->add_option("--d", smp_opts.d, "tuple size");
  smp->add_option("--seed", sample_seed, "master seed");
  smp->add_option("--stem", sample_stem, "output path stem")->required();
  smp->add_option("--member-format", member_format, "json or binary");

  CommonOpts qe_opts;
  std::string qe_file;
  auto* qe = app.add_subcommand("qe", "quantifier elimination decision");
  add_common(qe, qe_opts, false, false);
  qe->add_option("file", qe_file, "decomposition JSON")->required();

  CommonOpts gen_opts;
  int gen_k = 3, dyadic_bits = 12;
  long long gen_trials = 10000;
  std::string gen_mode = "float";
  double gen_tol = 1e-9;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("genericity", "weight-simplex QE sampling");
  add_common(gen, gen_opts, false, false);
  gen->add_option("--k", gen_k, "summand count");
  gen->add_option("--trials", gen_trials, "sample count");
  gen->add_option("--mode", gen_mode, "float or exact");
  gen->add_option("--tol", gen_tol, "float-mode relation tolerance");
  gen->add_option("--dyadic-bits", dyadic_bits, "exact-mode rounding bits");
  gen->add_option("--seed", gen_seed, "master seed");

  CommonOpts con_opts;
  std::string con_word = "1,2,1*,2*";
  int con_trials = 200;
  std::uint64_t con_seed = 1;
  auto* con = app.add_subcommand("concentration", "trace statistic spread scan");
  add_common(con, con_opts, false, false);
  con->add_option("--n", con_opts.n_text, "matrix sizes, e.g. 32,256");
  con->add_option("--word", con_word, "word, e.g. 1,2,1*,2*");
  con->add_option("--trials", con_trials, "tuples per size");
  con->add_option("--seed", con_seed, "master seed");

  CommonOpts mom_opts;
  int mom_n = 64;
  std::uint64_t mom_seed = 1;
  std::vector<std::string> mom_words = {"1,2,1*,2*"};
  auto* mom = app.add_subcommand("moments", "word traces of the X/Y pair");
  add_common(mom, mom_opts, false, false);
  mom->add_option("--n", mom_n, "matrix size");
  mom->add_option("--seed", mom_seed, "master seed");
  mom->add_option("--word", mom_words, "words (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qxlab::cli::kExitConfigError;
  }

  try {
    if (gap->parsed()) return run_gap(gap_opts);
    if (sep->parsed())
      return run_separation(sep_opts, b12_trials, spot_trials, min_certified,
                            sub_residual_tol);
    if (exp->parsed()) return run_expander_check(exp_opts, manifest);
    if (smp->parsed())
      return run_sample(smp_opts, sample_n, sample_seed, sample_stem,
                        member_format);
    if (qe->parsed()) return run_qe(qe_opts, qe_file);
    if (gen->parsed())
      return run_genericity(gen_opts, gen_k, gen_trials, gen_mode, gen_tol,
                            dyadic_bits, gen_seed);
    if (con->parsed()) return run_concentration(con_opts, con_word, con_trials,
                                                con_seed);
    if (mom->parsed()) return run_moments(mom_opts, mom_n, mom_seed, mom_words);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qxlab::cli::kExitConfigError;
  }
  return qxlab::cli::kExitConfigError;
}
