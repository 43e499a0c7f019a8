#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framekit/errors.hpp"
#include "framekit/frame.hpp"
#include "framekit/linalg.hpp"
#include "framekit/matrix.hpp"
#include "framekit/random.hpp"
#include "framekit/reconstruct.hpp"

namespace framekit {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class GeneratorKind { gaussian, tight, rank_deficient, duplicated, ill_conditioned };

inline constexpr std::array<GeneratorKind, 5> kAllGeneratorKinds = {
    GeneratorKind::gaussian, GeneratorKind::tight, GeneratorKind::rank_deficient, GeneratorKind::duplicated,
    GeneratorKind::ill_conditioned};

inline std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::gaussian: return "gaussian";
    case GeneratorKind::tight: return "tight";
    case GeneratorKind::rank_deficient: return "rank_deficient";
    case GeneratorKind::duplicated: return "duplicated";
    case GeneratorKind::ill_conditioned: return "ill_conditioned";
  }
  return "unknown";
}

inline std::optional<GeneratorKind> parse_generator_kind(std::string_view s) {
  for (GeneratorKind k : kAllGeneratorKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian;
  std::size_t n = 1;
  std::size_t m = 1;
  double condition_target = 1.0;  // sigma_max / sigma_min of T, ill_conditioned only
  std::uint64_t seed = 0;

  void validate() const {
    if (n == 0 || m == 0) throw InvalidInput("GeneratorSpec: n and m must be positive");
    if (!(condition_target >= 1.0) || !std::isfinite(condition_target))
      throw InvalidInput("GeneratorSpec: condition_target must be a finite real >= 1");
  }
};

namespace detail {

// Columns of a complex gaussian matrix orthonormalized by Gram-Schmidt with
// one reorthogonalization pass.
inline Matrix random_orthonormal_columns(Random& rng, std::size_t rows, std::size_t k) {
  Matrix q = rng.complex_gaussian_matrix(rows, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < j; ++p) {
        Complex proj{};
        for (std::size_t i = 0; i < rows; ++i) proj += std::conj(q(i, p)) * q(i, j);
        for (std::size_t i = 0; i < rows; ++i) q(i, j) -= proj * q(i, p);
      }
    double nrm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < rows; ++i) q(i, j) /= nrm;
  }
  return q;
}

// W * diag(sigma) * V^* with Haar-like W (n x r) and V (m x r).
inline Matrix random_with_spectrum(Random& rng, std::size_t n, std::size_t m, std::span<const double> sigma) {
  const std::size_t r = sigma.size();
  Matrix w = random_orthonormal_columns(rng, n, r);
  const Matrix v = random_orthonormal_columns(rng, m, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < n; ++i) w(i, j) *= sigma[j];
  return w * adjoint(v);
}

}  // namespace detail

/// Deterministic random frame of the requested kind.
///
///   gaussian        i.i.d. standard complex gaussian entries
///   tight           s * W V^* with orthonormal W, V and s in [0.5, 2): S = s^2 P
///   rank_deficient  (n x r)(r x m) gaussian product / sqrt(r), 1 <= r < min(n, m)
///   duplicated      max(1, m/2) gaussian vectors repeated cyclically
///   ill_conditioned singular values log-spaced from 1 down to 1/condition_target
inline FrameSequence generate(const GeneratorSpec& spec) {
  spec.validate();
  Random rng(spec.seed);
  const std::size_t n = spec.n;
  const std::size_t m = spec.m;
  const std::size_t r_max = std::min(n, m);

  switch (spec.kind) {
    case GeneratorKind::gaussian:
      return FrameSequence::from_synthesis(rng.complex_gaussian_matrix(n, m));

    case GeneratorKind::tight: {
      const double s = 0.5 + 1.5 * rng.uniform();
      const std::vector<double> sigma(r_max, s);
      return FrameSequence::from_synthesis(detail::random_with_spectrum(rng, n, m, sigma));
    }

    case GeneratorKind::rank_deficient: {
      if (r_max < 2)
        throw InfeasibleSpec("rank_deficient needs min(n, m) >= 2 to plant a rank below min(n, m)");
      const auto r = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(r_max - 1));
      const Matrix left = rng.complex_gaussian_matrix(n, r);
      const Matrix right = rng.complex_gaussian_matrix(r, m);
      return FrameSequence::from_synthesis((1.0 / std::sqrt(static_cast<double>(r))) * (left * right));
    }

    case GeneratorKind::duplicated: {
      if (m < 2) throw InfeasibleSpec("duplicated needs m >= 2");
      const std::size_t distinct = std::max<std::size_t>(1, m / 2);
      std::vector<Vector> base;
      for (std::size_t k = 0; k < distinct; ++k) base.push_back(rng.complex_gaussian_vector(n));
      std::vector<Vector> vectors;
      for (std::size_t k = 0; k < m; ++k) vectors.push_back(base[k % distinct]);
      return FrameSequence(n, std::move(vectors));
    }

    case GeneratorKind::ill_conditioned: {
      if (r_max < 2 && spec.condition_target > 1.1)
        throw InfeasibleSpec("ill_conditioned with condition_target > 1.1 needs min(n, m) >= 2");
      std::vector<double> sigma(r_max, 1.0);
      for (std::size_t i = 1; i < r_max; ++i)
        sigma[i] = std::pow(spec.condition_target, -static_cast<double>(i) / static_cast<double>(r_max - 1));
      return FrameSequence::from_synthesis(detail::random_with_spectrum(rng, n, m, sigma));
    }
  }
  throw InvalidInput("generate: unknown generator kind");
}

/// identity_abs scaled by the condition target for ill-conditioned frames.
inline Tolerance tolerance_for(const GeneratorSpec& spec, const Tolerance& base = {}) {
  return spec.kind == GeneratorKind::ill_conditioned ? base.scaled(spec.condition_target) : base;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct CheckRecord {
  std::string name;
  std::string anchor;
  double deviation = 0.0;
  double threshold = 0.0;
  bool applicable = true;
  bool passed = true;
  std::string detail;
};

struct IdentityReport {
  std::size_t ambient_dim = 0;
  std::size_t count = 0;
  std::size_t span_dim = 0;
  std::vector<CheckRecord> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed; });
  }

  double max_deviation() const {
    double d = 0.0;
    for (const auto& c : checks)
      if (c.applicable) d = std::max(d, c.deviation);
    return d;
  }

  const CheckRecord* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct CheckInfo {
  std::string_view name;
  std::string_view anchor;
};

/// Every identity checked by run_identity_suite, in report order.
inline constexpr std::array kCheckRegistry = {
    CheckInfo{"moore_penrose_synthesis", "TT†T = T, T†TT† = T†, (TT†)* = TT†, (T†T)* = T†T"},
    CheckInfo{"analysis_is_adjoint", "U = T*"},
    CheckInfo{"frame_operator_product", "S = TU"},
    CheckInfo{"gram_product", "G = UT"},
    CheckInfo{"closed_range_span", "R_T = span{f_k}"},
    CheckInfo{"restricted_synthesis", "T = ι_V 𝒯"},
    CheckInfo{"restricted_analysis", "U = 𝒰P"},
    CheckInfo{"restricted_frame_operator", "S = ι_V 𝒮P"},
    CheckInfo{"restricted_inverse", "𝒮𝒮⁻¹ = id_V"},
    CheckInfo{"dual_synthesis_reproduces", "TŨ = ι_V P"},
    CheckInfo{"dual_analysis_reproduces", "T̃U = ι_V P"},
    CheckInfo{"coeff_projector_cross_gram", "Q = UT̃"},
    CheckInfo{"frame_op_pinv_is_dual", "S† = S̃"},
    CheckInfo{"pinv_synthesis_is_dual_analysis", "T† = Ũ"},
    CheckInfo{"pinv_analysis_is_dual_synthesis", "U† = T̃"},
    CheckInfo{"pinv_synthesis_right_factor", "T† = T*S†"},
    CheckInfo{"pinv_synthesis_left_factor", "T† = S†T*"},
    CheckInfo{"pinv_synthesis_gramian", "(T†)*T† = S†"},
    CheckInfo{"pinv_synthesis_adjoint", "(T†)* = S†T"},
    CheckInfo{"frame_op_pinv_projector", "SS† = S†S = P"},
    CheckInfo{"frame_op_pinv_kernel", "S†(I − P) = 0"},
    CheckInfo{"frame_op_pinv_range", "S†P = PS† = S†"},
    CheckInfo{"frame_op_range", "R_S = R_T"},
    CheckInfo{"gram_pinv_projector", "GG† = Q = G†G"},
    CheckInfo{"gram_pinv_kernel", "G†(I − Q) = 0"},
    CheckInfo{"gram_pinv_range", "G†Q = QG† = G†"},
    CheckInfo{"gram_pinv_is_dual", "G† = G̃"},
    CheckInfo{"gram_range", "R_G = R_T*"},
    CheckInfo{"intertwining_analysis", "T*S = GT*"},
    CheckInfo{"intertwining_synthesis", "ST = TG"},
    CheckInfo{"pinv_adjoint_synthesis", "(T*)† = TG†"},
    CheckInfo{"pinv_outer_product", "T†(T†)* = G†"},
    CheckInfo{"pinv_synthesis_gram_factor", "T† = G†T*"},
    CheckInfo{"pinv_adjoint_commutes", "(U*)† = (U†)*"},
    CheckInfo{"norm_synthesis_frame_op", "‖T‖² = ‖S‖"},
    CheckInfo{"norm_pinv_frame_op", "‖T†‖² = ‖S†‖"},
    CheckInfo{"norm_gram_frame_op", "‖G‖ = ‖S‖ = ‖T‖²"},
    CheckInfo{"norm_pinv_gram", "‖G†‖ = ‖S†‖ = ‖T†‖²"},
    CheckInfo{"pinv_quadratic_form", "‖T†f‖² = ⟨f, S†f⟩"},
    CheckInfo{"optimal_bounds", "A = ‖T†‖⁻², B = ‖T‖²"},
    CheckInfo{"analysis_sandwich", "A‖Pf‖² ≤ ‖T*f‖² ≤ B‖Pf‖²"},
    CheckInfo{"synthesis_sandwich", "A‖Qc‖² ≤ ‖Tc‖² ≤ B‖Qc‖²"},
    CheckInfo{"frame_op_quadratic_form", "‖S†‖⁻¹‖Pf‖² ≤ ⟨Sf, f⟩ ≤ ‖S‖‖Pf‖²"},
    CheckInfo{"gram_quadratic_form", "‖S†‖⁻¹‖Qc‖² ≤ ⟨Gc, c⟩ ≤ ‖S‖‖Qc‖²"},
    CheckInfo{"dual_bounds", "Ã = 1/B, B̃ = 1/A"},
    CheckInfo{"dual_involution", "(f̃_k)~ = f_k"},
    CheckInfo{"signal_series", "Pf = Σ⟨f, S†f_k⟩f_k"},
    CheckInfo{"coefficient_series", "Qc = Σ⟨c, G†T*f_k⟩ε_k"},
    CheckInfo{"min_norm_coefficients", "c₀ = (⟨f, S†f_k⟩)"},
    CheckInfo{"min_norm_preimage", "f₀ = S†Tc, ‖f‖² = ‖f₀‖² + ‖f − f₀‖²"},
    CheckInfo{"bounds_vs_sampling", "A‖f‖² ≤ Σ|⟨f, f_k⟩|² ≤ B‖f‖²"},
    CheckInfo{"tight_operators", "S = AP, G = AQ"},
    CheckInfo{"tight_pseudoinverses", "S† = P/A, G† = Q/A"},
    CheckInfo{"polarization", "⟨Gc, d⟩ = A⟨Qc, d⟩"},
};

inline std::string_view anchor_of(std::string_view name) {
  for (const auto& c : kCheckRegistry)
    if (c.name == name) return c.anchor;
  return {};
}

struct SuiteConfig {
  std::uint64_t seed = 0x5eed5eedULL;  // random probe vectors; the suite is deterministic
  std::size_t vector_trials = 20;
  std::size_t samples = 10000;         // Rayleigh-quotient samples for bounds_vs_sampling
  std::size_t polarization_trials = 20;
  double norm_rel = 1e-8;              // relative tolerance for norm identities
  double slack_abs = 1e-9;             // admissible violation of inequalities
  double sampling_approach = 0.05;     // required relative approach of the sampled extremes
  std::size_t sampling_max_span = 8;   // approach is only required for span_dim up to this
};

// ---------------------------------------------------------------------------
// Rayleigh-quotient sampling
// ---------------------------------------------------------------------------

struct RayleighEnvelope {
  double min = std::numeric_limits<double>::infinity();
  double max = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// Orthonormal basis of span{f_k} by Gram-Schmidt with reorthogonalization on
// the frame vectors themselves. Vectors whose residual is below
// `drop_rel` * max_k ||f_k|| are treated as dependent.
inline std::vector<Vector> span_basis(const FrameSequence& f, double drop_rel = 1e-9) {
  double largest = 0.0;
  for (const auto& v : f.vectors()) largest = std::max(largest, norm(v));
  std::vector<Vector> basis;
  if (largest == 0.0) return basis;
  for (const auto& v : f.vectors()) {
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : basis) {
        const Complex proj = inner(r, e);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= proj * e[i];
      }
    const double nr = norm(r);
    if (nr <= drop_rel * largest) continue;
    for (auto& z : r) z /= nr;
    basis.push_back(std::move(r));
  }
  return basis;
}

// sum_k |<x, f_k>|^2 / ||x||^2, evaluated straight from the vectors.
inline double rayleigh_quotient(const FrameSequence& f, const Vector& x) {
  double s = 0.0;
  for (const auto& fk : f.vectors()) s += std::norm(inner(x, fk));
  return s / norm_squared(x);
}

}  // namespace detail

/// Empirical extremes of sum_k |<f, f_k>|^2 / ||f||^2 over unit f in span{f_k}.
///
/// Half of the budget draws uniform directions in the span. Uniform samples
/// concentrate away from the extremes once the span has more than a few
/// dimensions or the frame is badly conditioned, so the other half draws
/// shaped directions M^j z and M^-j z for random z, where M is the frame
/// operator compressed to the span and j runs along short chains. Every
/// sample is still a unit vector of the span evaluated straight from the
/// vectors. The basis of the span comes from Gram-Schmidt on the vectors and
/// M^-1 from a Cholesky factorization, not from the SVD.
inline RayleighEnvelope sample_rayleigh_envelope(const FrameSequence& f, std::size_t samples, std::uint64_t seed) {
  const std::vector<Vector> basis = detail::span_basis(f);
  if (basis.empty()) throw DegenerateSpan("sample_rayleigh_envelope: the vectors span {0}");
  const std::size_t r = basis.size();
  const std::size_t n = f.ambient_dim();
  Random rng(seed);
  RayleighEnvelope env;

  auto embed = [&](const Vector& z) {
    Vector x(n);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += z[j] * basis[j][i];
    return x;
  };
  auto evaluate = [&](const Vector& z) {
    const double q = detail::rayleigh_quotient(f, embed(z));
    env.min = std::min(env.min, q);
    env.max = std::max(env.max, q);
    ++env.evaluations;
  };

  const std::size_t uniform_budget = std::max<std::size_t>(1, samples / 2);
  for (std::size_t s = 0; s < uniform_budget; ++s) {
    const Vector z = rng.complex_gaussian_vector(r);
    if (norm(z) > 0.0) evaluate(z);
  }

  // M = C C^* with C(j, k) = <f_k, e_j>.
  Matrix c(r, f.size());
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < f.size(); ++k) c(j, k) = inner(f[k], basis[j]);
  const Matrix m = c * adjoint(c);
  std::optional<Matrix> m_inv;
  try {
    m_inv = inverse_hpd(m);
  } catch (const NumericalFailure&) {
    // The compressed operator is numerically singular; only the upward chains run.
  }

  constexpr std::size_t kChain = 24;
  std::size_t remaining = samples > uniform_budget ? samples - uniform_budget : 0;
  bool upward = true;
  while (remaining > 0) {
    const Matrix& op = (upward || !m_inv) ? m : *m_inv;
    Vector z = rng.complex_gaussian_vector(r);
    for (std::size_t j = 0; j < kChain && remaining > 0; ++j) {
      --remaining;
      z = op * z;
      const double nz = norm(z);
      if (!(nz > 0.0) || !std::isfinite(nz)) break;
      for (auto& x : z) x /= nz;
      evaluate(z);
    }
    upward = !upward;
  }
  return env;
}

/// <Mc, d> rebuilt from the quadratic form x -> <Mx, x> alone:
/// (1/4)(<M(c+d), c+d> - <M(c-d), c-d> + i<M(c+id), c+id> - i<M(c-id), c-id>).
inline Complex polarized_form(const Matrix& mat, const Vector& c, const Vector& d) {
  const Complex i1{0.0, 1.0};
  auto form = [&](const Vector& x) { return inner(mat * x, x); };
  return 0.25 * (form(c + d) - form(c - d) + i1 * form(c + i1 * d) - i1 * form(c - i1 * d));
}

namespace detail {

inline CheckRecord make_record(std::string_view name, double deviation, double threshold, std::string detail = {}) {
  CheckRecord rec;
  rec.name = std::string(name);
  rec.anchor = std::string(anchor_of(name));
  rec.deviation = deviation;
  rec.threshold = threshold;
  rec.passed = std::isfinite(deviation) && deviation <= threshold;
  rec.detail = std::move(detail);
  return rec;
}

inline CheckRecord not_applicable(std::string_view name, std::string reason) {
  CheckRecord rec;
  rec.name = std::string(name);
  rec.anchor = std::string(anchor_of(name));
  rec.applicable = false;
  rec.passed = true;
  rec.detail = std::move(reason);
  return rec;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

inline CheckRecord sampling_record(const OperatorBundle& b, const FrameSequence& f, std::size_t samples,
                                   std::uint64_t seed, const SuiteConfig& cfg) {
  const FrameBounds fb = frame_bounds(b);
  const RayleighEnvelope env = sample_rayleigh_envelope(f, samples, seed);
  const double slack = std::max(cfg.slack_abs, b.tol.identity_abs);
  const bool contained = env.min >= fb.lower - slack && env.max <= fb.upper + slack;
  const double gap = std::max((env.min - fb.lower) / fb.lower, (fb.upper - env.max) / fb.upper);
  const bool approach_required = b.span_dim <= cfg.sampling_max_span && samples >= 10000;
  CheckRecord rec = make_record("bounds_vs_sampling", std::max(gap, 0.0), cfg.sampling_approach);
  rec.passed = contained && (!approach_required || gap <= cfg.sampling_approach);
  char buf[256];
  std::snprintf(buf, sizeof buf, "empirical [%.17g, %.17g] vs bounds [%.17g, %.17g]%s", env.min, env.max, fb.lower,
                fb.upper, approach_required ? "" : " (approach not required)");
  rec.detail = buf;
  return rec;
}

inline double polarization_deviation(const OperatorBundle& b, double a, std::size_t trials, Random& rng) {
  const Matrix& g = b.gram;
  const Matrix& q = b.coeff_proj;
  const std::size_t m = g.rows();
  const Complex i1{0.0, 1.0};
  auto qnorm2 = [&](const Vector& x) { return norm_squared(q * x); };

  double dev = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector c = rng.complex_gaussian_vector(m);
    const Vector d = rng.complex_gaussian_vector(m);
    const Vector cpd = c + d, cmd = c - d, cpid = c + i1 * d, cmid = c - i1 * d;
    const Complex direct = inner(g * c, d);
    const Complex via_gram = polarized_form(g, c, d);
    const Complex via_proj = 0.25 * a * (qnorm2(cpd) - qnorm2(cmd) + i1 * qnorm2(cpid) - i1 * qnorm2(cmid));
    const Complex target = a * inner(q * c, d);
    const double scale = std::max({1.0, std::abs(direct), std::abs(target)});
    dev = std::max({dev, std::abs(via_gram - direct) / scale, std::abs(via_proj - target) / scale,
                    std::abs(direct - target) / scale});
  }
  dev = std::max(dev, scaled_deviation(g, a * q));
  dev = std::max(dev, scaled_deviation(b.gram_pinv, (1.0 / a) * q));
  return dev;
}

}  // namespace detail

/// Polarization reconstruction of <Gc, d> against A<Qc, d> on random (c, d),
/// plus ||G - AQ|| and ||G^+ - Q/A||. Throws NotTight unless the frame is tight.
inline CheckRecord polarization_check(const FrameSequence& f, std::size_t trials, const Tolerance& tol = {},
                                      std::uint64_t seed = SuiteConfig{}.seed) {
  if (trials == 0) throw InvalidInput("polarization_check: trials must be >= 1");
  const OperatorBundle b = build_bundle(f, tol);
  if (b.span_dim == 0) throw NotTight("polarization_check: the vectors span {0}");
  const FrameBounds fb = frame_bounds(b);
  if (!fb.tight) throw NotTight("polarization_check: frame is not tight");
  Random rng(seed);
  return detail::make_record("polarization", detail::polarization_deviation(b, fb.lower, trials, rng),
                             tol.identity_abs);
}

/// Sampled extremes of the frame ratio against the optimal bounds.
inline CheckRecord bounds_vs_sampling(const FrameSequence& f, std::size_t samples, const Tolerance& tol = {},
                                      std::uint64_t seed = SuiteConfig{}.seed) {
  const OperatorBundle b = build_bundle(f, tol);
  if (b.span_dim == 0) throw DegenerateSpan("bounds_vs_sampling: the vectors span {0}");
  return detail::sampling_record(b, f, samples, seed, SuiteConfig{});
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

/// Runs every registered identity on one frame and reports the largest
/// deviation observed for each. Matrix identities are measured with
/// scaled_deviation against identity_abs; norm identities relatively against
/// max(norm_rel, identity_abs).
inline IdentityReport run_identity_suite(const FrameSequence& f, const Tolerance& tol = {},
                                         const SuiteConfig& cfg = {}) {
  const OperatorBundle b = build_bundle(f, tol);
  const std::size_t n = f.ambient_dim();
  const std::size_t m = f.size();
  const std::size_t r = b.span_dim;
  const double eps = tol.identity_abs;
  const double rel_eps = std::max(cfg.norm_rel, tol.identity_abs);
  const double slack = std::max(cfg.slack_abs, tol.identity_abs);

  IdentityReport rep;
  rep.ambient_dim = n;
  rep.count = m;
  rep.span_dim = r;
  auto add = [&](std::string_view name, double dev, double thr) { rep.checks.push_back(detail::make_record(name, dev, thr)); };
  auto dev = [](const Matrix& a, const Matrix& c) { return scaled_deviation(a, c); };
  auto zero_dev = [](const Matrix& a, double scale) { return max_abs(a) / std::max(1.0, scale); };

  const Matrix& t = b.synthesis;
  const Matrix& u = b.analysis;
  const Matrix& s = b.frame_op;
  const Matrix& g = b.gram;
  const Matrix& p = b.signal_proj;
  const Matrix& q = b.coeff_proj;
  const Matrix& tp = b.synthesis_pinv;
  const Matrix& sp = b.frame_op_pinv;
  const Matrix& gp = b.gram_pinv;
  const Matrix id_n = Matrix::identity(n);
  const Matrix id_m = Matrix::identity(m);
  const Matrix up = pinv(u, tol);

  add("moore_penrose_synthesis",
      std::max({dev(t * tp * t, t), dev(tp * t * tp, tp), dev(adjoint(t * tp), t * tp), dev(adjoint(tp * t), tp * t)}),
      eps);
  add("analysis_is_adjoint", max_abs_diff(u, adjoint(t)), eps);
  add("frame_operator_product", dev(s, t * u), eps);
  add("gram_product", dev(g, u * t), eps);
  add("closed_range_span", dev(p * t, t), eps);

  std::optional<RestrictedOperators> ro;
  std::optional<OperatorBundle> db;
  std::optional<FrameBounds> fb;
  if (r > 0) {
    ro = restricted(f, tol);
    db = build_bundle(canonical_dual(b), tol);
    fb = frame_bounds(b);
  }
  const std::string degenerate = "span is {0}";
  auto span_check = [&](std::string_view name, const std::function<double()>& body, double thr) {
    if (r == 0)
      rep.checks.push_back(detail::not_applicable(name, degenerate));
    else
      add(name, body(), thr);
  };

  span_check("restricted_synthesis", [&] {
    const Matrix& w = ro->basis;
    return std::max(dev(w * ro->synthesis, t), dev(adjoint(w) * w, Matrix::identity(r)));
  }, eps);
  span_check("restricted_analysis", [&] { return dev(ro->analysis * adjoint(ro->basis), u); }, eps);
  span_check("restricted_frame_operator",
             [&] { return dev(ro->basis * ro->frame_op * adjoint(ro->basis), s); }, eps);
  span_check("restricted_inverse", [&] { return dev(ro->frame_op * ro->frame_op_inv, Matrix::identity(r)); }, eps);
  span_check("dual_synthesis_reproduces", [&] { return dev(t * db->analysis, p); }, eps);
  span_check("dual_analysis_reproduces", [&] { return dev(db->synthesis * u, p); }, eps);
  span_check("coeff_projector_cross_gram", [&] { return dev(u * db->synthesis, q); }, eps);
  span_check("frame_op_pinv_is_dual", [&] { return dev(sp, db->frame_op); }, eps);
  // The dual is built from T^+, so U~ is also formed from its definition S^+ f_k.
  span_check("pinv_synthesis_is_dual_analysis",
             [&] { return std::max(dev(tp, db->analysis), dev(tp, adjoint(sp * t))); }, eps);
  span_check("pinv_analysis_is_dual_synthesis", [&] { return dev(up, db->synthesis); }, eps);

  add("pinv_synthesis_right_factor", dev(tp, u * sp), eps);
  // S^+ T^* is not defined between these shapes; the identity is checked in
  // its conjugate-transposed form (T^+)^* = S^+ T.
  add("pinv_synthesis_left_factor", dev(adjoint(tp), sp * t), eps);
  add("pinv_synthesis_gramian", dev(adjoint(tp) * tp, sp), eps);
  add("pinv_synthesis_adjoint", dev(adjoint(tp), sp * t), eps);
  add("frame_op_pinv_projector", std::max(dev(s * sp, p), dev(sp * s, p)), eps);
  add("frame_op_pinv_kernel", zero_dev(sp * (id_n - p), max_abs(sp)), eps);
  add("frame_op_pinv_range", std::max(dev(sp * p, sp), dev(p * sp, sp)), eps);
  add("frame_op_range", dev(projector_from(svd_truncated(s, r)), p), eps);
  add("gram_pinv_projector", std::max(dev(g * gp, q), dev(gp * g, q)), eps);
  add("gram_pinv_kernel", zero_dev(gp * (id_m - q), max_abs(gp)), eps);
  add("gram_pinv_range", std::max(dev(gp * q, gp), dev(q * gp, gp)), eps);
  span_check("gram_pinv_is_dual", [&] { return dev(gp, db->gram); }, eps);
  add("gram_range", dev(projector_from(svd_truncated(g, r)), q), eps);
  add("intertwining_analysis", dev(u * s, g * u), eps);
  add("intertwining_synthesis", dev(s * t, t * g), eps);
  add("pinv_adjoint_synthesis", dev(up, t * gp), eps);
  add("pinv_outer_product", dev(tp * adjoint(tp), gp), eps);
  add("pinv_synthesis_gram_factor", dev(tp, gp * u), eps);
  add("pinv_adjoint_commutes", dev(up, adjoint(tp)), eps);

  const double nt = op_norm(t), ns = op_norm(s), ng = op_norm(g);
  const double ntp = op_norm(tp), nsp = op_norm(sp), ngp = op_norm(gp);
  auto norm_dev = [&](double a, double c) { return (a == 0.0 && c == 0.0) ? 0.0 : detail::rel_diff(a, c); };
  add("norm_synthesis_frame_op", norm_dev(nt * nt, ns), rel_eps);
  add("norm_pinv_frame_op", norm_dev(ntp * ntp, nsp), rel_eps);
  add("norm_gram_frame_op", std::max(norm_dev(ng, ns), norm_dev(nt * nt, ng)), rel_eps);
  add("norm_pinv_gram", std::max(norm_dev(ngp, nsp), norm_dev(ntp * ntp, ngp)), rel_eps);

  Random rng(cfg.seed);
  std::vector<Vector> signals, coeffs;
  for (std::size_t k = 0; k < cfg.vector_trials; ++k) {
    signals.push_back(rng.complex_gaussian_vector(n));
    coeffs.push_back(rng.complex_gaussian_vector(m));
  }

  {
    double d = 0.0;
    for (const auto& x : signals) {
      const double lhs = norm_squared(tp * x);
      const double rhs = inner(x, sp * x).real();
      d = std::max(d, norm_dev(lhs, rhs));
    }
    add("pinv_quadratic_form", d, rel_eps);
  }

  span_check("optimal_bounds", [&] {
    return std::max(norm_dev(fb->lower, 1.0 / (ntp * ntp)), norm_dev(fb->upper, nt * nt));
  }, rel_eps);

  // Inequalities report their worst violation relative to max(1, upper side).
  span_check("analysis_sandwich", [&] {
    double v = 0.0;
    for (const auto& x : signals) {
      const double px = norm_squared(p * x);
      const double mid = norm_squared(u * x);
      const double scale = std::max(1.0, fb->upper * px);
      v = std::max({v, (fb->lower * px - mid) / scale, (mid - fb->upper * px) / scale});
    }
    return std::max(v, 0.0);
  }, slack);
  span_check("synthesis_sandwich", [&] {
    double v = 0.0;
    for (const auto& c : coeffs) {
      const double qc = norm_squared(q * c);
      const double mid = norm_squared(t * c);
      const double scale = std::max(1.0, fb->upper * qc);
      v = std::max({v, (fb->lower * qc - mid) / scale, (mid - fb->upper * qc) / scale});
    }
    return std::max(v, 0.0);
  }, slack);
  span_check("frame_op_quadratic_form", [&] {
    double v = 0.0;
    for (const auto& x : signals) {
      const double px = norm_squared(p * x);
      const double form = inner(s * x, x).real();
      const double scale = std::max(1.0, ns * px);
      v = std::max({v, (px / nsp - form) / scale, (form - ns * px) / scale});
    }
    return std::max(v, 0.0);
  }, slack);
  span_check("gram_quadratic_form", [&] {
    double v = 0.0;
    for (const auto& c : coeffs) {
      const double qc = norm_squared(q * c);
      const double form = inner(g * c, c).real();
      const double scale = std::max(1.0, ns * qc);
      v = std::max({v, (qc / nsp - form) / scale, (form - ns * qc) / scale});
    }
    return std::max(v, 0.0);
  }, slack);

  span_check("dual_bounds", [&] {
    const FrameBounds dual = frame_bounds(*db);
    return std::max(norm_dev(dual.lower, 1.0 / fb->upper), norm_dev(dual.upper, 1.0 / fb->lower));
  }, rel_eps);
  span_check("dual_involution", [&] {
    const OperatorBundle& dual = *db;
    return dev(canonical_dual(dual).synthesis(), t);
  }, eps);

  {
    double dp = 0.0, dq = 0.0;
    for (const auto& x : signals)
      dp = std::max(dp, max_abs_diff(signal_series(b, x), p * x) / std::max(1.0, norm(x)));
    for (const auto& c : coeffs)
      dq = std::max(dq, max_abs_diff(coefficient_series(b, c), q * c) / std::max(1.0, norm(c)));
    add("signal_series", dp, eps);
    add("coefficient_series", dq, eps);
  }

  span_check("min_norm_coefficients", [&] {
    double d = 0.0;
    for (std::size_t k = 0; k < signals.size(); ++k) {
      const Vector& x = signals[k];
      const Vector c0 = min_norm_coefficients(b, x).solution;
      const double scale = std::max(1.0, norm(x));
      d = std::max(d, max_abs_diff(t * c0, p * x) / scale);
      d = std::max(d, max_abs_diff(q * c0, c0) / std::max(1.0, norm(c0)));
      // Perturb along ker T = range(I - Q); the norm may only grow.
      const Vector kernel = coeffs[k] - q * coeffs[k];
      const double grow = norm_squared(c0 + kernel) - norm_squared(c0);
      d = std::max(d, -grow / std::max(1.0, norm_squared(c0)));
    }
    return d;
  }, eps);
  span_check("min_norm_preimage", [&] {
    double d = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const CoefficientVector c(coeffs[k]);
      const Vector outside = signals[k] - p * signals[k];
      const Vector f0 = min_norm_preimage(b, c).solution;
      const MinNormSolution sol = min_norm_preimage(b, c, f0 + outside);
      d = std::max(d, max_abs_diff(u * sol.solution, q * c.entries()) / std::max(1.0, norm(c.entries())));
      const double total = norm_squared(f0 + outside);
      d = std::max(d, norm_dev(sol.split->first + sol.split->second, total));
    }
    return d;
  }, rel_eps);

  if (r == 0)
    rep.checks.push_back(detail::not_applicable("bounds_vs_sampling", degenerate));
  else
    rep.checks.push_back(detail::sampling_record(b, f, cfg.samples, cfg.seed ^ 0xa5a5a5a5ULL, cfg));

  if (r == 0 || !fb->tight) {
    const std::string reason = r == 0 ? degenerate : "frame is not tight";
    rep.checks.push_back(detail::not_applicable("tight_operators", reason));
    rep.checks.push_back(detail::not_applicable("tight_pseudoinverses", reason));
    rep.checks.push_back(detail::not_applicable("polarization", reason));
  } else {
    const double a = fb->lower;
    add("tight_operators", std::max(dev(s, a * p), dev(g, a * q)), eps);
    add("tight_pseudoinverses", std::max(dev(sp, (1.0 / a) * p), dev(gp, (1.0 / a) * q)), eps);
    add("polarization", detail::polarization_deviation(b, a, cfg.polarization_trials, rng), eps);
  }

  auto registry_index = [](const CheckRecord& c) {
    for (std::size_t i = 0; i < kCheckRegistry.size(); ++i)
      if (kCheckRegistry[i].name == c.name) return i;
    return kCheckRegistry.size();
  };
  std::stable_sort(rep.checks.begin(), rep.checks.end(),
                   [&](const CheckRecord& x, const CheckRecord& y) { return registry_index(x) < registry_index(y); });
  return rep;
}

}  // namespace framekit
