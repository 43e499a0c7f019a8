#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "framekit/errors.hpp"
#include "framekit/frame.hpp"
#include "framekit/io.hpp"
#include "framekit/linalg.hpp"
#include "framekit/reconstruct.hpp"
#include "framekit/verifier.hpp"

namespace framekit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kDegenerateSpan = 3,
};

enum class Format { text, structured };

struct CommonOptions {
  std::optional<double> tolerance;
  double rank_rel = Tolerance{}.rank_rel;
  std::string format = "text";
  bool strict = false;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(const Complex& z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

inline std::string fmt(const Vector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

inline const char* yes_no(bool b) { return b ? "true" : "false"; }

// --tolerance wins over FRAMEKIT_TOL, which wins over the built-in default.
inline Tolerance resolve_tolerance(const CommonOptions& o) {
  Tolerance t;
  t.rank_rel = o.rank_rel;
  if (o.tolerance) {
    t.identity_abs = *o.tolerance;
  } else if (const char* env = std::getenv("FRAMEKIT_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0') throw InvalidInput("FRAMEKIT_TOL: not a number: " + std::string(env));
    t.identity_abs = v;
  }
  t.validate();
  return t;
}

inline std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open input file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Format parse_format(const std::string& s) { return s == "structured" ? Format::structured : Format::text; }

inline void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--tolerance", o.tolerance, "Absolute tolerance for identity checks (default 1e-10)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--rank-rel", o.rank_rel, "Relative singular-value cutoff, scaled by max(rows, cols)")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
}

}  // namespace detail

inline int cmd_analyze(const std::string& path, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Tolerance tol = detail::resolve_tolerance(o);
  const InputDocument doc = parse_document(detail::read_input(path));
  const FrameClassification c = classify(doc.frame(), tol);

  if (detail::parse_format(o.format) == Format::structured) {
    Json j = Json::object();
    j["command"] = "analyze";
    j["ambient_dim"] = doc.ambient_dim;
    j["count"] = c.count;
    j["span_dim"] = c.span_dim;
    j["degenerate"] = c.degenerate();
    j["frame_for_H"] = c.is_frame_for_space;
    j["riesz_basis"] = c.is_riesz_basis;
    j["tight"] = c.is_tight;
    j["parseval"] = c.is_parseval;
    j["redundancy"] = c.redundancy ? Json(*c.redundancy) : Json(nullptr);
    if (c.bounds) {
      Json b = Json::object();
      b["A"] = c.bounds->lower;
      b["B"] = c.bounds->upper;
      j["bounds"] = std::move(b);
    } else {
      j["bounds"] = nullptr;
    }
    out << dump_structured(j);
  } else {
    out << "ambient_dim: " << doc.ambient_dim << "\n"
        << "count: " << c.count << "\n"
        << "span_dim: " << c.span_dim << "\n";
    if (c.degenerate()) {
      out << "verdict: degenerate (all vectors are numerically zero; bounds undefined)\n";
    } else {
      out << "redundancy: " << detail::fmt(*c.redundancy) << "\n"
          << "A: " << detail::fmt(c.bounds->lower) << "\n"
          << "B: " << detail::fmt(c.bounds->upper) << "\n";
    }
    out << "frame_for_H: " << detail::yes_no(c.is_frame_for_space) << "\n"
        << "riesz_basis: " << detail::yes_no(c.is_riesz_basis) << "\n"
        << "tight: " << detail::yes_no(c.is_tight) << "\n"
        << "parseval: " << detail::yes_no(c.is_parseval) << "\n";
  }
  if (c.degenerate() && o.strict) {
    err << "analyze: degenerate span\n";
    return kDegenerateSpan;
  }
  return kSuccess;
}

inline int cmd_dual(const std::string& path, const CommonOptions& o, std::ostream& out, std::ostream&) {
  const Tolerance tol = detail::resolve_tolerance(o);
  const InputDocument doc = parse_document(detail::read_input(path));
  const FrameSequence dual = canonical_dual(doc.frame(), tol);
  if (detail::parse_format(o.format) == Format::structured) {
    out << dump_structured(to_json(dual));
  } else {
    out << "ambient_dim: " << dual.ambient_dim() << "\n";
    for (std::size_t k = 0; k < dual.size(); ++k) out << "dual[" << k << "]: " << detail::fmt(dual[k]) << "\n";
  }
  return kSuccess;
}

inline int cmd_reconstruct(const std::string& path, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Tolerance tol = detail::resolve_tolerance(o);
  const InputDocument doc = parse_document(detail::read_input(path));
  if (doc.signal.has_value() == doc.coefficients.has_value()) {
    err << "reconstruct: the document needs exactly one of \"signal\" or \"coefficients\"\n";
    return kInputError;
  }
  const OperatorBundle b = build_bundle(doc.frame(), tol);
  const bool structured = detail::parse_format(o.format) == Format::structured;
  Json j = Json::object();
  j["command"] = "reconstruct";
  if (doc.signal) {
    const MinNormSolution s = min_norm_coefficients(b, *doc.signal);
    j["mode"] = "signal";
    j["coefficients"] = to_json(s.solution);
    j["residual"] = s.residual_norm;
    if (!structured)
      out << "coefficients: " << detail::fmt(s.solution) << "\n"
          << "residual: " << detail::fmt(s.residual_norm) << "\n";
  } else {
    const MinNormSolution s = min_norm_preimage(b, CoefficientVector(*doc.coefficients));
    j["mode"] = "coefficients";
    j["signal"] = to_json(s.solution);
    j["residual"] = s.residual_norm;
    if (!structured)
      out << "signal: " << detail::fmt(s.solution) << "\n"
          << "residual: " << detail::fmt(s.residual_norm) << "\n";
  }
  if (structured) out << dump_structured(j);
  return kSuccess;
}

struct VerifyOptions {
  std::string kind = "gaussian";
  std::size_t n = 4;
  std::size_t m = 6;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  double condition = 1e3;
  std::size_t samples = 10000;
};

inline int cmd_verify(const VerifyOptions& v, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const auto kind = parse_generator_kind(v.kind);
  if (!kind) {
    err << "verify: unknown --kind " << v.kind << "\n";
    return kInputError;
  }
  const Tolerance base = detail::resolve_tolerance(o);
  SuiteConfig cfg;
  cfg.samples = v.samples;

  bool all_passed = true;
  Json frames = Json::array();
  std::ostringstream text;
  for (std::size_t t = 0; t < v.trials; ++t) {
    GeneratorSpec spec{*kind, v.n, v.m, *kind == GeneratorKind::ill_conditioned ? v.condition : 1.0, v.seed + t};
    const FrameSequence f = generate(spec);
    const Tolerance tol = tolerance_for(spec, base);
    const IdentityReport rep = run_identity_suite(f, tol, cfg);
    all_passed = all_passed && rep.passed();

    Json fj = to_json(rep);
    fj["seed"] = spec.seed;
    fj["identity_abs"] = tol.identity_abs;
    frames.push_back(std::move(fj));

    std::size_t applicable = 0;
    for (const auto& c : rep.checks) applicable += c.applicable ? 1 : 0;
    text << "frame seed=" << spec.seed << " n=" << v.n << " m=" << v.m << " span_dim=" << rep.span_dim << ": "
         << (rep.passed() ? "PASS" : "FAIL") << " (" << applicable << " checks, max deviation "
         << detail::fmt(rep.max_deviation()) << ", identity_abs " << detail::fmt(tol.identity_abs) << ")\n";
    for (const auto& c : rep.checks)
      if (!c.passed)
        text << "  FAILED " << c.name << " [" << c.anchor << "] deviation " << detail::fmt(c.deviation)
             << " > " << detail::fmt(c.threshold) << (c.detail.empty() ? "" : " " + c.detail) << "\n";
  }

  if (detail::parse_format(o.format) == Format::structured) {
    Json j = Json::object();
    j["command"] = "verify";
    j["kind"] = v.kind;
    j["n"] = v.n;
    j["m"] = v.m;
    j["seed"] = v.seed;
    j["trials"] = v.trials;
    j["passed"] = all_passed;
    j["frames"] = std::move(frames);
    out << dump_structured(j);
  } else {
    out << text.str() << (all_passed ? "all checks passed\n" : "verification FAILED\n");
  }
  return all_passed ? kSuccess : kVerificationFailed;
}

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame sequence operators, pseudoinverses, bounds and identity verification", "framekit"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string input;

  auto* analyze = app.add_subcommand("analyze", "Classify a vector collection and report optimal frame bounds");
  analyze->add_option("input", input, "Input document ('-' for stdin)")->required();
  detail::add_common(*analyze, common);
  analyze->add_flag("--strict", common.strict, "Exit with code 3 when the vectors span {0}");

  auto* dual = app.add_subcommand("dual", "Emit the canonical dual frame as a document");
  dual->add_option("input", input, "Input document ('-' for stdin)")->required();
  detail::add_common(*dual, common);
  dual->add_flag("--strict", common.strict, "Accepted for symmetry; a degenerate span always exits 3");

  auto* recon = app.add_subcommand("reconstruct", "Minimum-norm coefficients of a signal, or minimum-norm preimage of coefficients");
  recon->add_option("input", input, "Input document ('-' for stdin)")->required();
  detail::add_common(*recon, common);
  recon->add_flag("--strict", common.strict, "Accepted for symmetry; a degenerate span always exits 3");

  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Generate random frames and run the identity suite");
  verify->add_option("--kind", vopt.kind, "gaussian | tight | rank_deficient | duplicated | ill_conditioned")
      ->check(CLI::IsMember({"gaussian", "tight", "rank_deficient", "duplicated", "ill_conditioned"}));
  verify->add_option("--n", vopt.n, "Ambient dimension")->check(CLI::PositiveNumber);
  verify->add_option("--m", vopt.m, "Number of vectors")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vopt.seed, "Seed of the first frame; trial t uses seed + t");
  verify->add_option("--trials", vopt.trials, "Number of frames")->check(CLI::PositiveNumber);
  verify->add_option("--condition", vopt.condition, "Condition target for ill_conditioned")->check(CLI::Range(1.0, 1e300));
  verify->add_option("--samples", vopt.samples, "Rayleigh-quotient samples per frame")->check(CLI::PositiveNumber);
  verify->add_option("--tol,--tolerance", common.tolerance, "Absolute tolerance (scaled by the condition target for ill_conditioned)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--rank-rel", common.rank_rel, "Relative singular-value cutoff")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(input, common, out, err);
    if (dual->parsed()) return cmd_dual(input, common, out, err);
    if (recon->parsed()) return cmd_reconstruct(input, common, out, err);
    if (verify->parsed()) return cmd_verify(vopt, common, out, err);
  } catch (const DegenerateSpan& e) {
    err << "degenerate span: " << e.what() << "\n";
    return kDegenerateSpan;
  } catch (const InvalidInput& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionMismatch& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InfeasibleSpec& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kVerificationFailed;
  }
  return kInputError;
}

}  // namespace framekit::cli
