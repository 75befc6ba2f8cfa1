#pragma once

// Command dispatch for the ucfactor tool. Reports go to `out` as JSON, a
// short human-readable summary goes to `err`.
//
// Exit codes: 0 success, 2 input error, 3 numeric non-certification or a
// violated numeric precondition, 4 verification failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>

#include "ucfactor/io.hpp"
#include "ucfactor/oracle.hpp"

namespace ucfactor::cli {

using io::json;

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInputError = 2,
  kNotCertified = 3,
  kVerificationFailed = 4,
};

inline constexpr std::size_t kVerifyBruteSignMaxN = 12;
inline constexpr std::size_t kVerifyResolution = 2000;

struct Options {
  std::string command;
  std::string path;
  std::string kind;
  std::string csv;
  std::string mode = "exact";
  double tol = 1e-8;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_enum;
};

/// Flag value, else UCFACTOR_MAX_ENUM, else the per-operation default.
inline std::size_t resolve_max_enum(const Options& opt, std::size_t fallback) {
  if (opt.max_enum) return *opt.max_enum;
  if (const char* env = std::getenv("UCFACTOR_MAX_ENUM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
  }
  return fallback;
}

inline SignSearch sign_search(const Options& opt, std::size_t fallback_cap) {
  SignSearch s;
  s.mode = opt.mode == "sampled" ? NormMode::sampled : NormMode::exact;
  s.trials = opt.trials;
  s.seed = opt.seed;
  s.max_enum = resolve_max_enum(opt, fallback_cap);
  return s;
}

/// Accumulates pass/fail invariant checks for a report.
class Checks {
 public:
  void add(const std::string& name, bool pass, double measured, double limit) {
    entries_.push_back({{"name", name}, {"status", pass ? "pass" : "fail"},
                        {"measured", measured}, {"limit", limit}});
    if (!pass) failed_ = true;
  }
  void skip(const std::string& name, const std::string& reason) {
    entries_.push_back({{"name", name}, {"status", "skipped"}, {"reason", reason}});
  }
  bool failed() const noexcept { return failed_; }
  const json& entries() const noexcept { return entries_; }

 private:
  json entries_ = json::array();
  bool failed_ = false;
};

struct Outcome {
  json report;
  int code = kSuccess;
  std::string summary;
};

inline json flags_json(const Options& opt, std::size_t max_enum) {
  json f{{"tol", opt.tol}, {"mode", opt.mode}, {"trials", opt.trials},
         {"seed", opt.seed}, {"max_enum", max_enum}};
  if (!opt.kind.empty()) f["kind"] = opt.kind;
  return f;
}

inline json problem_echo(const io::ProblemFile& p) {
  json e{{"dim", p.dim}};
  if (p.phi) e["phi"] = io::to_json(*p.phi);
  return e;
}

inline void write_csv(const std::string& path, const Weights& alpha,
                      const ScalarSequence* a, const ScalarSequence* b) {
  std::ofstream csv(path);
  if (!csv) throw io::InputError("cannot write " + path);
  csv << "n,alpha_n,abs_a_n,abs_b_n\n";
  csv << std::setprecision(17);
  for (Eigen::Index n = 0; n < alpha.size(); ++n) {
    csv << n << ',' << alpha(n) << ',';
    if (a) csv << std::abs((*a)(n));
    csv << ',';
    if (b) csv << std::abs((*b)(n));
    csv << '\n';
  }
}

// ---------------------------------------------------------------------------
// factorize

inline Outcome cmd_factorize(const Options& opt, const io::ProblemFile& p) {
  if (!p.phi) throw io::InputError("factorize: 'phi' is required");
  const VectorSequence& phi = *p.phi;
  SolverConfig cfg;
  cfg.tol = opt.tol;
  const SignSearch search = sign_search(opt, kDefaultC0EnumerationCap);

  const Factorization fac = factorize(phi, cfg);
  const double residual = reconstruction_residual(phi, fac.alpha, fac.frame);
  const double scale = max_term_norm(phi);
  const double trace = orlicz_sum(phi);
  const double bessel_phi = bessel_bound(phi);

  Outcome out;
  json results{{"alpha", io::to_json(fac.alpha)},
               {"frame", io::to_json(fac.frame)},
               {"bessel", fac.bessel},
               {"pi2_sq", fac.solution.pi2_sq},
               {"cost", fac.cost},
               {"reconstruction_residual", residual},
               {"orlicz_sum", trace},
               {"bessel_bound_phi", bessel_phi}};
  try {
    const auto c0 = c0_operator_norm_detailed(phi, search);
    results["c0_norm"] = {{"value", c0.value}, {"witness", io::signs_to_json(c0.witness)},
                          {"mode", opt.mode}};
  } catch (const EnumerationCapError& e) {
    results["c0_norm"] = {{"status", "skipped"}, {"reason", e.what()}};
  }

  Checks checks;
  checks.add("reconstruction", residual <= 1e-10 * scale, residual, 1e-10 * scale);
  checks.add("frame_bessel", fac.bessel <= 1.0 + 1e-8, fac.bessel, 1.0 + 1e-8);
  const double cost_rel = std::abs(fac.cost - fac.solution.pi2_sq) /
                          std::max(fac.solution.pi2_sq, std::numeric_limits<double>::min());
  checks.add("cost_equals_pi2_sq", fac.solution.pi2_sq == 0.0 || cost_rel <= 1e-8, cost_rel, 1e-8);
  checks.add("orlicz", trace <= fac.solution.pi2_sq + 1e-8, trace - fac.solution.pi2_sq, 1e-8);
  const double gap_limit = opt.tol * std::max(1.0, fac.solution.pi2_sq);
  checks.add("duality_gap", fac.solution.gap <= gap_limit, fac.solution.gap, gap_limit);

  out.report = {{"command", "factorize"},
                {"flags", flags_json(opt, search.max_enum)},
                {"problem", problem_echo(p)},
                {"results", results},
                {"certificate", io::certificate_to_json(fac.solution)},
                {"checks", checks.entries()}};
  if (!fac.solution.certified) out.code = kNotCertified;

  if (!opt.csv.empty()) write_csv(opt.csv, fac.alpha, nullptr, nullptr);

  std::ostringstream s;
  s << "factorize: N=" << phi.size() << " d=" << phi.dim() << " pi2_sq=" << fac.solution.pi2_sq
    << " bessel=" << fac.bessel << " gap=" << fac.solution.gap
    << (fac.solution.certified ? " certified" : " NOT certified");
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------------------
// split

inline MultiplierSpec build_spec(const io::ProblemFile& p) {
  if (p.op && (!p.phi || !p.psi)) {
    VectorSequence basis = p.basis ? *p.basis : [&] {
      std::vector<HVector> e;
      for (Eigen::Index k = 0; k < p.dim; ++k) e.push_back(unit_vector(p.dim, k));
      return VectorSequence(std::move(e));
    }();
    MultiplierSpec spec = from_operator(*p.op, basis);
    if (p.m) return spec.with_symbol(*p.m);
    return spec;
  }
  if (!p.m) throw io::InputError("split: 'm' is required");
  if (!p.phi) throw io::InputError("split: 'phi' is required");
  if (!p.psi) throw io::InputError("split: 'psi' is required");
  return MultiplierSpec(*p.m, *p.phi, *p.psi);
}

inline json split_json(const SymbolSplit& s) {
  return json{{"a", io::scalars_to_json(s.a)},
              {"b", io::scalars_to_json(s.b)},
              {"weights", io::to_json(s.weights)},
              {"bessel_a_phi", s.bessel_a_phi},
              {"bessel_b_psi", s.bessel_b_psi},
              {"max_residual", s.max_residual}};
}

inline Outcome cmd_split(const Options& opt, const io::ProblemFile& p) {
  if (opt.kind != "weak" && opt.kind != "absolute" && opt.kind != "measure")
    throw io::InputError("split: --kind must be weak, absolute or measure");
  MultiplierSpec spec = [&] {
    try {
      return build_spec(p);
    } catch (const io::InputError&) {
      throw;
    } catch (const Error& e) {
      throw io::InputError(e.what());
    }
  }();
  if (opt.kind == "weak" && !p.witness) throw io::InputError("split weak: 'witness' is required");
  if (opt.kind == "measure" && !p.measure_points)
    throw io::InputError("split measure: 'measure' is required");

  SolverConfig cfg;
  cfg.tol = opt.tol;
  const SignSearch search = sign_search(opt, kDefaultUCEnumerationCap);
  const double m_scale = std::max(1.0, spec.m().cwiseAbs().maxCoeff());

  Outcome out;
  out.report = {{"command", "split"}, {"flags", flags_json(opt, search.max_enum)}};
  Checks checks;
  json results;
  SymbolSplit split;
  try {
    if (opt.kind == "weak") {
      const WeakWitness w = verify_witness(spec.psi(), *p.witness);
      split = split_weak(spec, *p.witness, cfg);
      results = split_json(split);
      results["margin"] = w.margin;
      double psi_bound = split.weights.squaredNorm();
      for (Eigen::Index k = 0; k < split.weights.size(); ++k)
        if (split.weights(k) == 0.0 && split.b(k) != Complex(0.0))
          psi_bound += std::norm(split.b(k)) * spec.psi()[static_cast<std::size_t>(k)].squaredNorm();
      checks.add("bessel_a_phi", split.bessel_a_phi <= 1.0 + 1e-8, split.bessel_a_phi, 1.0 + 1e-8);
      checks.add("bessel_b_psi", split.bessel_b_psi <= psi_bound + 1e-8, split.bessel_b_psi,
                 psi_bound + 1e-8);
    } else if (opt.kind == "absolute") {
      split = split_absolute(spec, cfg);
      results = split_json(split);
      std::vector<HVector> probes;
      for (Eigen::Index k = 0; k < spec.dim(); ++k) probes.push_back(unit_vector(spec.dim(), k));
      results["absolute_profile"] = absolute_profile(spec, probes);
      double max_phi = 0.0;
      for (const auto& x : spec.phi()) max_phi = std::max(max_phi, x.squaredNorm());
      const double ceiling = split.weights.squaredNorm() * max_phi + 1e-8;
      checks.add("bessel_b_psi", split.bessel_b_psi <= 1.0 + 1e-8, split.bessel_b_psi, 1.0 + 1e-8);
      checks.add("bessel_a_phi", split.bessel_a_phi <= ceiling, split.bessel_a_phi, ceiling);
    } else {
      const DiscreteMeasure mu(*p.measure_points, *p.measure_weights);
      const MeasureSplit ms = split_measure(spec, mu, cfg);
      split = ms.split;
      results = split_json(split);
      results["alpha"] = io::to_json(ms.alpha);
      results["measure_identity"] = ms.measure_identity;
      results["alpha_sq_sum"] = ms.alpha_sq_sum;
      results["hs_bessel"] = ms.hs_bessel;
      results["bessel_a_psi"] = ms.bessel_a_psi;
      results["jmu_bessel"] = ms.jmu_bessel;
      const double rel = std::abs(ms.measure_identity - ms.alpha_sq_sum) /
                         std::max(ms.alpha_sq_sum, std::numeric_limits<double>::min());
      checks.add("measure_identity", ms.alpha_sq_sum == 0.0 || rel <= 1e-8, rel, 1e-8);
      checks.add("hs_bessel", ms.hs_bessel <= 1.0 + 1e-8, ms.hs_bessel, 1.0 + 1e-8);
    }
  } catch (const PreconditionError& e) {
    json err{{"message", e.what()}};
    if (e.index()) err["index"] = *e.index();
    out.report["error"] = err;
    out.code = kNotCertified;
    out.summary = std::string("split ") + opt.kind + ": precondition failed: " + e.what();
    return out;
  }

  checks.add("residual", split.max_residual <= 1e-10 * m_scale, split.max_residual, 1e-10 * m_scale);
  const double gap_limit = opt.tol * std::max(1.0, split.solution.pi2_sq);
  checks.add("duality_gap", split.solution.gap <= gap_limit, split.solution.gap, gap_limit);

  try {
    const UCReport uc = uc_constant(spec, search);
    results["uc_constant"] = {{"value", uc.constant}, {"witness", io::signs_to_json(uc.witness_signs)},
                              {"mode", opt.mode}};
  } catch (const EnumerationCapError& e) {
    results["uc_constant"] = {{"status", "skipped"}, {"reason", e.what()}};
  }

  out.report["results"] = results;
  out.report["certificate"] = io::certificate_to_json(split.solution);
  out.report["checks"] = checks.entries();
  if (!split.solution.certified) out.code = kNotCertified;
  if (!opt.csv.empty()) write_csv(opt.csv, split.weights, &split.a, &split.b);

  std::ostringstream s;
  s << "split " << opt.kind << ": N=" << spec.size() << " residual=" << split.max_residual
    << " bessel(a phi)=" << split.bessel_a_phi << " bessel(b psi)=" << split.bessel_b_psi
    << (split.solution.certified ? " certified" : " NOT certified");
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------------------
// verify

inline Outcome cmd_verify(const Options& opt, const io::ProblemFile& p) {
  if (!p.phi) throw io::InputError("verify: 'phi' is required");
  const VectorSequence& phi = *p.phi;
  const std::size_t n = phi.size();
  const DenseMatrix g = gram(phi);
  SolverConfig cfg;
  cfg.tol = opt.tol;

  Weights v;
  DenseMatrix x;
  std::optional<double> reported_gap;
  std::string source;
  if (p.certificate) {
    if (static_cast<std::size_t>(p.certificate->v.size()) != n)
      throw io::InputError("verify: certificate size does not match phi");
    v = p.certificate->v;
    x = p.certificate->X;
    reported_gap = p.certificate->gap;
    source = "file";
  } else {
    const PietschSolution sol = min_dominating_diagonal(g, cfg);
    v = sol.v;
    x = sol.dualX;
    reported_gap = sol.gap;
    source = "computed";
  }

  Checks checks;
  const double g_norm = std::max(max_eigenvalue(g), 0.0);
  const double pi2 = v.sum();
  const double scale = std::max(1.0, pi2);

  const oracle::DualCheck dual = oracle::dual_value(g, x);
  checks.add("dual_psd", dual.min_eigenvalue >= -1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff()),
             dual.min_eigenvalue, -1e-10);
  checks.add("dual_unit_diagonal", dual.max_diag_defect <= 1e-12, dual.max_diag_defect, 1e-12);
  checks.add("dual_feasible", dual.feasible, dual.feasible ? 1.0 : 0.0, 1.0);

  DenseMatrix slack = -g;
  slack.diagonal() += v.cast<Complex>();
  const double primal_min = min_eigenvalue(slack);
  checks.add("primal_psd", primal_min >= -1e-10 * g_norm, primal_min, -1e-10 * g_norm);
  checks.add("primal_nonnegative", (v.array() >= 0.0).all(), v.minCoeff(), 0.0);

  const double gap = pi2 - dual.value;
  checks.add("duality_gap", gap <= opt.tol * scale && gap >= -opt.tol * scale, gap, opt.tol * scale);
  if (reported_gap)
    checks.add("reported_gap", std::abs(*reported_gap - std::max(gap, 0.0)) <= opt.tol * scale,
               std::abs(*reported_gap - std::max(gap, 0.0)), opt.tol * scale);
  const double trace = orlicz_sum(phi);
  checks.add("orlicz", trace <= pi2 + 1e-8, trace - pi2, 1e-8);

  if (n <= oracle::kBrutePietschMaxN) {
    const double brute = oracle::brute_pietsch(g, kVerifyResolution);
    const double tol = 3.0 / static_cast<double>(kVerifyResolution) * std::max(pi2, 1e-300);
    checks.add("brute_pietsch", std::abs(brute - pi2) <= tol, std::abs(brute - pi2), tol);
  } else {
    checks.skip("brute_pietsch", "N > 3");
  }

  if (n <= kVerifyBruteSignMaxN) {
    const double brute = oracle::brute_sign_norm(phi);
    SignSearch exact;
    exact.max_enum = kVerifyBruteSignMaxN;
    const double c0 = c0_operator_norm(phi, exact);
    const double diff = std::abs(brute - c0);
    checks.add("brute_sign_norm", diff <= 1e-12 * std::max(1.0, brute), diff, 1e-12 * std::max(1.0, brute));
    const double bessel = bessel_bound(phi);
    const double c0sq = c0 * c0;
    checks.add("sandwich_bessel_c0", bessel <= c0sq + 1e-8, bessel - c0sq, 1e-8);
    checks.add("sandwich_c0_pi2", c0sq <= pi2 + 1e-8, c0sq - pi2, 1e-8);
    checks.add("sandwich_pi2_nbessel", pi2 <= static_cast<double>(n) * bessel + 1e-8,
               pi2 - static_cast<double>(n) * bessel, 1e-8);
  } else {
    checks.skip("brute_sign_norm", "N > 12");
    checks.skip("sandwich", "N > 12");
  }

  Outcome out;
  out.report = {{"command", "verify"},
                {"flags", flags_json(opt, resolve_max_enum(opt, kDefaultC0EnumerationCap))},
                {"certificate_source", source},
                {"results", {{"pi2_sq", pi2}, {"dual_value", dual.value}, {"gap", gap}}},
                {"checks", checks.entries()}};
  out.code = checks.failed() ? kVerificationFailed : kSuccess;
  out.summary = std::string("verify: ") + (checks.failed() ? "FAILED" : "all checks passed") +
                " (certificate " + source + ")";
  return out;
}

// ---------------------------------------------------------------------------
// entry point

/// A factorize report is accepted wherever a problem file is: its embedded
/// problem and certificate are used.
inline io::ProblemFile load_problem(const io::json& doc) {
  if (doc.is_object() && doc.contains("problem")) {
    json p = doc["problem"];
    if (doc.contains("certificate")) p["certificate"] = doc["certificate"];
    return io::parse_problem(p);
  }
  return io::parse_problem(doc);
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Optimal factorization of unconditionally summable sequences", "ucfactor"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("path", opt.path, "problem file (JSON)")->required();
    sub->add_option("--tol", opt.tol, "duality-gap tolerance")->capture_default_str();
    sub->add_option("--mode", opt.mode, "sign search mode")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    sub->add_option("--trials", opt.trials, "sampled-mode trials")->capture_default_str();
    sub->add_option("--seed", opt.seed, "sampled-mode seed")->capture_default_str();
    sub->add_option("--max-enum", opt.max_enum, "sign enumeration cap");
    sub->add_option("--csv", opt.csv, "write n, alpha_n, |a_n|, |b_n| as CSV");
  };
  auto* fac = app.add_subcommand("factorize", "factorize phi_n = alpha_n f_n");
  add_common(fac);
  auto* split = app.add_subcommand("split", "split a multiplier symbol m_n = a_n conj(b_n)");
  add_common(split);
  split->add_option("--kind", opt.kind, "weak | absolute | measure")
      ->required()
      ->check(CLI::IsMember({"weak", "absolute", "measure"}));
  auto* ver = app.add_subcommand("verify", "cross-check a certificate against the oracles");
  add_common(ver);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kSuccess;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (fac->parsed()) opt.command = "factorize";
  if (split->parsed()) opt.command = "split";
  if (ver->parsed()) opt.command = "verify";

  const auto started = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    const std::string text = io::read_file(opt.path);
    const io::ProblemFile problem = load_problem(io::parse_json_text(text));
    if (opt.command == "factorize")
      outcome = cmd_factorize(opt, problem);
    else if (opt.command == "split")
      outcome = cmd_split(opt, problem);
    else
      outcome = cmd_verify(opt, problem);
    outcome.report["input"] = {{"path", opt.path}, {"digest", io::digest(text)}};
  } catch (const io::InputError& e) {
    outcome.report = {{"command", opt.command}, {"error", {{"message", e.what()}}}};
    outcome.code = kInputError;
    outcome.summary = std::string("input error: ") + e.what();
  } catch (const DimensionError& e) {
    outcome.report = {{"command", opt.command}, {"error", {{"message", e.what()}}}};
    outcome.code = kInputError;
    outcome.summary = std::string("input error: ") + e.what();
  } catch (const PreconditionError& e) {
    json er{{"message", e.what()}};
    if (e.index()) er["index"] = *e.index();
    outcome.report = {{"command", opt.command}, {"error", er}};
    outcome.code = kNotCertified;
    outcome.summary = std::string("precondition failed: ") + e.what();
  } catch (const std::exception& e) {
    outcome.report = {{"command", opt.command}, {"error", {{"message", e.what()}}}};
    outcome.code = kInternalError;
    outcome.summary = std::string("internal error: ") + e.what();
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  out << outcome.report.dump(2) << "\n";
  err << outcome.summary << " [" << std::fixed << std::setprecision(1) << ms << " ms, exit "
      << outcome.code << "]\n";
  return outcome.code;
}

}  // namespace ucfactor::cli
