#include "opcert/cstar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "opcert/errors.hpp"
#include "opcert/hermit.hpp"
#include "opcert/sysdetect.hpp"

namespace opcert {

namespace {

constexpr double kFixedNormSlack = 1e-6;
constexpr double kReconstructionTol = 1e-3;

CVec normalized(const ConcreteOpSpace& space, CVec x, double* norm_out = nullptr) {
  const double n = space.norm(x);
  if (norm_out != nullptr) *norm_out = n;
  if (n == 0.0) return x;
  for (auto& z : x) z /= n;
  return x;
}

CVec axpy(const CVec& a, cplx s, const CVec& b) {
  CVec out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += s * b[k];
  return out;
}

// Square root of e - a^2 for commuting hermitian e, a (e = u*u acts as the identity on a).
CMat unitalized_sqrt(const Ambient& amb, const CMat& e, const CMat& a) {
  const CMat gap = e - amb.multiply(a, a);
  if (!amb.diagonal()) return psd_sqrt(gap);
  CMat out(gap.rows(), 1);
  for (std::size_t i = 0; i < gap.rows(); ++i) {
    const double g = gap(i, 0).real();
    if (g < -kEigenClamp) throw PreconditionError("hermitian_to_unitaries: x is not a contraction");
    out(i, 0) = std::sqrt(std::max(0.0, g));
  }
  return out;
}

CertificateReport step_report(std::string check, Verdict v, double margin, Bound bound, Scope scope) {
  CertificateReport r;
  r.check = std::move(check);
  r.verdict = v;
  r.margin = margin;
  r.bound = bound;
  r.scope = scope;
  return r;
}

}  // namespace

CVec solve_in_span(const ConcreteOpSpace& space, const std::vector<CVec>& family, const CVec& target) {
  (void)space;
  const std::size_t n = family.size();
  CMat gram(n, n);
  CVec rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t k = 0; k < target.size(); ++k) s += std::conj(family[i][k]) * family[j][k];
      gram(i, j) = s;
    }
    for (std::size_t k = 0; k < target.size(); ++k) rhs[i] += std::conj(family[i][k]) * target[k];
  }
  const HermEigen eig = herm_eigen_decompose(gram);
  const double top = std::max(eig.values.back(), 0.0);
  CVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] <= 1e-12 * top) continue;
    cplx proj{};
    for (std::size_t i = 0; i < n; ++i) proj += std::conj(eig.vectors(i, k)) * rhs[i];
    for (std::size_t i = 0; i < n; ++i) out[i] += eig.vectors(i, k) * proj / eig.values[k];
  }
  return out;
}

ProductRecovery recover_product(const ConcreteOpSpace& space, const CVec& u, const CVec& v, const CVec& fixed,
                                double t, const SolverConfig& config, ProductSide side) {
  if (!(t > 0)) throw InvalidInput("recover_product: t must be positive");
  for (const CVec* c : {&u, &v, &fixed})
    if (c->size() != space.dim()) throw InvalidInput("recover_product: coefficient count differs from dimension");
  const double fn = space.norm(fixed);
  if (fn > 1.0 + kFixedNormSlack) throw PreconditionError("recover_product: fixed element lies outside Ball(X)");

  const bool left = side == ProductSide::Left;
  const CMat tu = space.embed(u) * cplx(t);
  const CMat tv = space.embed(v) * cplx(t);
  const CMat fm = space.embed(fixed);
  BlockAffineMap map(space, 2, 2, 1);
  map.set_constant(0, 0, tu);
  map.set_constant(1, 1, tv);
  if (left) {
    map.set_constant(0, 1, fm);
    map.set_variable(1, 0, 0);
  } else {
    map.set_constant(1, 0, fm);
    map.set_variable(0, 1, 0);
  }
  // The fixed row (or column) bounds the block norm from below.
  BlockAffineMap edge(space, left ? 1 : 2, left ? 2 : 1, 0);
  edge.set_constant(0, 0, tu);
  if (left) {
    edge.set_constant(0, 1, fm);
  } else {
    edge.set_constant(1, 0, fm);
  }
  const double floor_norm = edge.norm({});

  Objective obj;
  obj.dim = 2 * space.dim();
  obj.value = [&](std::span<const double> p) { return map.norm(p) - floor_norm; };
  obj.subgradient = [&](std::span<const double> p, std::span<double> g, bool& fd) {
    return map.subgradient(p, g, fd) - floor_norm;
  };
  MinimizeOptions opts;
  opts.stop_below = 1e-2 * config.cert_tol;
  const SolverResult res = minimize_over_ball(
      obj, [&](std::span<const double> p) { return space.norm(ConcreteOpSpace::coeffs_from_real(p)); }, config, opts);

  ProductRecovery out;
  out.coeffs = ConcreteOpSpace::coeffs_from_real(res.argbest);
  for (auto& z : out.coeffs) z = -z;
  out.excess = std::max(0.0, res.value);
  out.t = t;
  out.bound = recovery_bound(t) + config.cert_tol;
  out.diagnostics = res.diagnostics;
  out.verdict = classify_infimum(out.excess, config.cert_tol, config.fail_threshold(), res.diagnostics.converged);
  return out;
}

UnitaryPair hermitian_to_unitaries(const TroClosure& closure, const CVec& u, const CVec& x) {
  const ConcreteOpSpace& space = closure.space;
  const Ambient& amb = space.ambient();
  if (!ambient_unitary_check(closure, u).passed()) {
    throw PreconditionError("hermitian_to_unitaries: u is not unitary in the generated TRO");
  }
  const CMat um = space.embed(u);
  const CMat xm = space.embed(x);
  if (amb.norm(xm) > 1.0 + 1e-9) throw PreconditionError("hermitian_to_unitaries: ||x|| exceeds 1");
  const CMat a = amb.multiply(amb.adjoint(um), xm);
  const double asym = amb.norm(a - amb.adjoint(a));
  if (asym > kAmbientTol * std::max(1.0, amb.norm(a))) {
    throw PreconditionError("hermitian_to_unitaries: x is not u-hermitian (defect " + std::to_string(asym) + ")");
  }
  const CMat herm = (a + amb.adjoint(a)) * cplx(0.5);
  const CMat e = amb.multiply(amb.adjoint(um), um);
  const CMat w = herm + unitalized_sqrt(amb, e, herm) * cplx(0.0, 1.0);
  const CMat v1 = amb.multiply(um, w);
  const CMat v2 = xm * cplx(2.0) - v1;

  UnitaryPair out;
  const Membership m1 = space.membership(v1);
  const Membership m2 = space.membership(v2);
  out.v1 = m1.coeffs;
  out.v2 = m2.coeffs;
  out.residual1 = m1.residual;
  out.residual2 = m2.residual;
  out.members = m1.member && m2.member;
  out.unitary = out.members && ambient_unitary_check(closure, out.v1).passed() &&
                ambient_unitary_check(closure, out.v2).passed();
  return out;
}

UnitarySpan collect_unitaries(const TroClosure& closure, const CVec& u) {
  const ConcreteOpSpace& space = closure.space;
  UnitarySpan out;
  out.unitaries.push_back(u);
  const DeltaSpan delta = delta_span(space, u, &closure, SolverConfig{}.t_grid);
  for (const auto& h : delta.hermitian_basis) {
    const UnitaryPair pair = hermitian_to_unitaries(closure, u, normalized(space, h));
    if (!pair.unitary) continue;
    out.unitaries.push_back(pair.v1);
    out.unitaries.push_back(pair.v2);
  }
  std::vector<CMat> basis;
  for (const auto& v : out.unitaries) {
    if (extend_orthonormal(basis, CMat(v.size(), 1, v), 1e-8)) out.independent.push_back(v);
  }
  return out;
}

CertificateReport unitary_span_check(const TroClosure& closure, const CVec& u) {
  const UnitarySpan span = collect_unitaries(closure, u);
  const std::size_t d = closure.space.dim();
  CertificateReport r = step_report("unitary-span", span.independent.size() == d ? Verdict::Pass : Verdict::Fail,
                                    static_cast<double>(d - span.independent.size()), Bound::Exact, closure.scope());
  r.metrics.emplace_back("unitaries_found", static_cast<double>(span.unitaries.size()));
  r.metrics.emplace_back("span_dim", static_cast<double>(span.independent.size()));
  r.metrics.emplace_back("space_dim", static_cast<double>(d));
  return r;
}

CVec ProductTable::multiply(const CVec& a, const CVec& b) const {
  CVec out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (a[i] == cplx{}) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      const cplx s = a[i] * b[j];
      if (s == cplx{}) continue;
      const CVec& e = entries[i * dim + j];
      for (std::size_t k = 0; k < dim; ++k) out[k] += s * e[k];
    }
  }
  return out;
}

CVec ProductTable::adjoint(const CVec& a) const {
  CVec out(dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = 0; k < dim; ++k) out[k] += std::conj(a[j]) * involution[j][k];
  return out;
}

CStarResult detect_cstar(const ConcreteOpSpace& space, const CVec& u, const SolverConfig& config,
                         const CStarOptions& options) {
  CStarResult result;
  CertificateReport& report = result.report;
  report.check = "cstar";
  report.bound = Bound::UpperBound;
  report.scope = Scope::Intrinsic;
  const std::size_t d = space.dim();

  // (a) operator system, the v = u case.
  CertificateReport system = detect_operator_system(space, u, config);
  system.check = "cstar-system";
  report.verdict = system.verdict;
  report.diagnostics.absorb(system.diagnostics);
  report.parts.push_back(system);
  if (system.verdict != Verdict::Pass) {
    report.margin = system.margin;
    report.witness = system.witness;
    report.notes.emplace_back("not an operator system; later steps skipped");
    return result;
  }

  // (b) spanned by unitaries.
  std::optional<TroClosure> owned;
  const TroClosure* closure = options.closure;
  if (closure == nullptr) {
    owned = generate_tro(space);
    closure = &*owned;
  }
  report.scope = closure->scope();
  const UnitarySpan unitaries = collect_unitaries(*closure, u);
  CertificateReport span = unitary_span_check(*closure, u);
  report.verdict = combine(report.verdict, span.verdict);
  report.parts.push_back(span);
  if (span.verdict != Verdict::Pass) {
    report.margin = span.margin;
    report.notes.emplace_back("unitaries do not span X; products not attempted");
    return result;
  }

  // (c) v y* lands in X for every spanning unitary v and basis element y.
  std::vector<CVec> basis_hat(d);
  RVec basis_norm(d);
  for (std::size_t j = 0; j < d; ++j) {
    CVec e(d);
    e[j] = 1.0;
    basis_hat[j] = normalized(space, e, &basis_norm[j]);
  }
  CertificateReport products = step_report("products-in-X", Verdict::Pass, 0.0, Bound::UpperBound, Scope::Intrinsic);
  for (std::size_t k = 0; k < unitaries.independent.size(); ++k)
    for (std::size_t j = 0; j < d; ++j) {
      const ProductRecovery pr = recover_product(space, u, unitaries.independent[k], basis_hat[j], config.t_large, config);
      products.verdict = combine(products.verdict, pr.verdict);
      products.diagnostics.absorb(pr.diagnostics);
      if (pr.excess > products.margin) {
        products.margin = pr.excess;
        products.witness = basis_hat[j];
        products.metrics.emplace_back("worst_unitary_index", static_cast<double>(k));
      }
    }
  report.verdict = combine(report.verdict, products.verdict);
  report.diagnostics.absorb(products.diagnostics);
  report.margin = products.margin;
  report.witness = products.witness;
  report.parts.push_back(products);
  if (products.verdict != Verdict::Pass) {
    report.notes.emplace_back("a recovered product escapes X");
    return result;
  }

  // Product table by linearity: b_i = sum_k c_ik v_k and v_k o b_j = v_k o iota(iota(b_j)).
  ProductTable table;
  table.dim = d;
  std::vector<CVec> y_hat(d);
  RVec y_scale(d);
  for (std::size_t j = 0; j < d; ++j) {
    const InvolutionRecovery inv = recover_involution(space, u, basis_hat[j], options.table_t, config);
    CVec inv_full = inv.coeffs;
    for (auto& z : inv_full) z *= basis_norm[j];
    table.involution.push_back(std::move(inv_full));
    y_hat[j] = normalized(space, inv.coeffs, &y_scale[j]);
  }
  const std::size_t nu = unitaries.independent.size();
  std::vector<CVec> vk_bj(nu * d);
  for (std::size_t k = 0; k < nu; ++k)
    for (std::size_t j = 0; j < d; ++j) {
      const ProductRecovery pr = recover_product(space, u, unitaries.independent[k], y_hat[j], options.table_t, config);
      table.recovery_excess.push_back(pr.excess);
      CVec c = pr.coeffs;
      for (auto& z : c) z *= basis_norm[j] * y_scale[j];
      vk_bj[k * d + j] = std::move(c);
    }
  table.entries.assign(d * d, CVec(d));
  for (std::size_t i = 0; i < d; ++i) {
    CVec e(d);
    e[i] = 1.0;
    const CVec c = solve_in_span(space, unitaries.independent, e);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < nu; ++k) table.entries[i * d + j] = axpy(table.entries[i * d + j], c[k], vk_bj[k * d + j]);
  }

  // Validation: associativity and the C*-identity on seeded random elements.
  std::mt19937_64 rng(start_seed(config.seed, 0xC57A5ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto sample = [&] {
    CVec c(d);
    for (auto& z : c) z = cplx(normal(rng), normal(rng));
    return normalized(space, c);
  };
  double assoc = 0.0;
  double cstar_identity = 0.0;
  for (int s = 0; s < options.validation_samples; ++s) {
    const CVec a = sample();
    const CVec b = sample();
    const CVec c = sample();
    const CVec lhs = table.multiply(table.multiply(a, b), c);
    const CVec rhs = table.multiply(a, table.multiply(b, c));
    assoc = std::max(assoc, space.norm(axpy(lhs, -1.0, rhs)));
    const double an = space.norm(a);
    cstar_identity = std::max(cstar_identity, std::abs(space.norm(table.multiply(table.adjoint(a), a)) - an * an));
  }
  const bool valid = assoc <= kReconstructionTol && cstar_identity <= kReconstructionTol;
  CertificateReport validation = step_report("product-table", valid ? Verdict::Pass : Verdict::Inconclusive,
                                             std::max(assoc, cstar_identity), Bound::Exact, Scope::Intrinsic);
  validation.metrics.emplace_back("associativity_defect", assoc);
  validation.metrics.emplace_back("cstar_identity_defect", cstar_identity);
  validation.metrics.emplace_back("table_t", options.table_t);
  validation.metrics.emplace_back("max_recovery_excess",
                                  *std::max_element(table.recovery_excess.begin(), table.recovery_excess.end()));
  report.verdict = combine(report.verdict, validation.verdict);
  report.parts.push_back(std::move(validation));
  result.table = std::move(table);
  return result;
}

}  // namespace opcert
