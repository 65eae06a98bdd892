#include "opcert/tro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opcert/errors.hpp"

namespace opcert {

namespace {

// Removes the components of m along an orthonormal family (two passes for stability).
CMat project_out(const std::vector<CMat>& family, CMat m) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : family) {
      const cplx c = frobenius_inner(q, m);
      if (c == cplx{}) continue;
      auto dst = m.entries();
      auto src = q.entries();
      for (std::size_t e = 0; e < dst.size(); ++e) dst[e] -= c * src[e];
    }
  }
  return m;
}

std::vector<CMat> products_span(const std::vector<CMat>& z, bool left_star) {
  std::vector<CMat> out;
  for (const auto& a : z)
    for (const auto& b : z) extend_orthonormal(out, left_star ? a.adjoint() * b : a * b.adjoint());
  return out;
}

CertificateReport exact_report(std::string check, const TroClosure& closure, double margin, bool pass) {
  CertificateReport r;
  r.check = std::move(check);
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  r.margin = margin;
  r.bound = Bound::Exact;
  r.scope = closure.scope();
  return r;
}

void require_unitary(const TroClosure& closure, const CVec& u, const char* what) {
  const CertificateReport r = ambient_unitary_check(closure, u);
  if (!r.passed()) {
    throw PreconditionError(std::string(what) + " is not unitary in the generated TRO (defect " +
                            std::to_string(r.margin) + ")");
  }
}

}  // namespace

bool extend_orthonormal(std::vector<CMat>& family, const CMat& m, double rel_tol) {
  const double scale = frobenius_norm(m);
  if (scale == 0.0) return false;
  CMat r = project_out(family, m);
  const double n = frobenius_norm(r);
  if (n <= rel_tol * scale) return false;
  r *= cplx(1.0 / n);
  family.push_back(std::move(r));
  return true;
}

double TroClosure::z_residual(const CMat& compact) const { return frobenius_norm(project_out(z_basis, compact)); }

TroClosure generate_tro_generic(const ConcreteOpSpace& space, bool envelope_exact) {
  const Ambient& amb = space.ambient();
  std::vector<CMat> z;
  for (const auto& b : space.basis()) extend_orthonormal(z, b);
  const std::size_t cap = amb.diagonal() ? amb.rows : amb.rows * amb.cols;
  bool stable = false;
  for (std::size_t round = 0; round <= cap && !stable; ++round) {
    const std::size_t before = z.size();
    const std::vector<CMat> current = z;
    for (const auto& a : current)
      for (const auto& b : current)
        for (const auto& c : current) extend_orthonormal(z, amb.triple(a, b, c));
    stable = z.size() == before;
  }
  if (!stable) throw SolverError("generate_tro: span failed to stabilize within the ambient dimension");

  TroClosure out{space, std::move(z), {}, {}, envelope_exact};
  if (amb.diagonal()) {
    std::vector<CMat> algebra;
    for (const auto& a : out.z_basis)
      for (const auto& b : out.z_basis) extend_orthonormal(algebra, amb.multiply(a, amb.adjoint(b)));
    out.zz_star_basis = algebra;
    out.z_star_z_basis = std::move(algebra);
  } else {
    out.zz_star_basis = products_span(out.z_basis, false);
    out.z_star_z_basis = products_span(out.z_basis, true);
  }
  return out;
}

TroClosure generate_tro(const ConcreteOpSpace& space, bool envelope_exact) {
  if (!space.diagonal()) return generate_tro_generic(space, envelope_exact);

  // In C(K) the TRO generated by f_1..f_d is span{1_B f_j}, where B runs over the classes of
  // points on which every product f_i conj(f_j) is constant, excluding common zeros.
  const std::size_t m = space.rows();
  const std::size_t d = space.dim();
  const auto& basis = space.basis();
  std::vector<CVec> signature(m);
  double scale = 0.0;
  for (std::size_t w = 0; w < m; ++w) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) signature[w].push_back(basis[i](w, 0) * std::conj(basis[j](w, 0)));
    for (const auto& s : signature[w]) scale = std::max(scale, std::abs(s));
  }
  const double tol = 1e-9 * std::max(1.0, scale);
  auto same = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < signature[a].size(); ++k)
      if (std::abs(signature[a][k] - signature[b][k]) > tol) return false;
    return true;
  };

  std::vector<std::size_t> representative;
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t w = 0; w < m; ++w) {
    bool zero = true;
    for (std::size_t j = 0; j < d && zero; ++j) zero = std::abs(basis[j](w, 0)) <= tol;
    if (zero) continue;
    std::size_t k = 0;
    while (k < representative.size() && !same(representative[k], w)) ++k;
    if (k == representative.size()) {
      representative.push_back(w);
      classes.emplace_back();
    }
    classes[k].push_back(w);
  }

  TroClosure out{space, {}, {}, {}, envelope_exact};
  for (const auto& cls : classes) {
    std::vector<CMat> local;
    for (std::size_t j = 0; j < d; ++j) {
      CMat piece(m, 1);
      for (std::size_t w : cls) piece(w, 0) = basis[j](w, 0);
      extend_orthonormal(local, piece);
    }
    for (auto& q : local) out.z_basis.push_back(std::move(q));
    CMat indicator(m, 1);
    const double h = 1.0 / std::sqrt(static_cast<double>(cls.size()));
    for (std::size_t w : cls) indicator(w, 0) = h;
    out.zz_star_basis.push_back(indicator);
  }
  out.z_star_z_basis = out.zz_star_basis;
  return out;
}

CertificateReport ambient_unitary_check(const TroClosure& closure, const CVec& v) {
  const Ambient& amb = closure.ambient();
  const CMat vm = closure.space.embed(v);
  double co = 0.0;
  double iso = 0.0;
  int co_at = -1;
  int iso_at = -1;
  for (std::size_t k = 0; k < closure.z_basis.size(); ++k) {
    const CMat& z = closure.z_basis[k];
    const double zn = amb.norm(z);
    const double left = amb.norm(amb.triple(vm, vm, z) - z) / zn;
    const double right = amb.norm(amb.triple(z, vm, vm) - z) / zn;
    if (left > co) {
      co = left;
      co_at = static_cast<int>(k);
    }
    if (right > iso) {
      iso = right;
      iso_at = static_cast<int>(k);
    }
  }
  CertificateReport coiso = exact_report("ambient-coisometry", closure, co, co <= kAmbientTol);
  coiso.metrics.emplace_back("worst_z_index", co_at);
  CertificateReport isom = exact_report("ambient-isometry", closure, iso, iso <= kAmbientTol);
  isom.metrics.emplace_back("worst_z_index", iso_at);

  const double margin = std::max(co, iso);
  CertificateReport r = exact_report("ambient-unitary", closure, margin, margin <= kAmbientTol);
  r.witness = v;
  r.metrics.emplace_back("coisometry_defect", co);
  r.metrics.emplace_back("isometry_defect", iso);
  r.metrics.emplace_back("tro_dim", static_cast<double>(closure.z_basis.size()));
  r.parts.push_back(std::move(coiso));
  r.parts.push_back(std::move(isom));
  return r;
}

CMat involution(const TroClosure& closure, const CVec& u, const CVec& x) {
  require_unitary(closure, u, "u");
  const CMat um = closure.space.embed(u);
  return closure.ambient().triple(um, closure.space.embed(x), um);
}

CertificateReport ambient_system_check(const TroClosure& closure, const CVec& u) {
  require_unitary(closure, u, "u");
  const ConcreteOpSpace& x = closure.space;
  double worst = 0.0;
  int worst_at = -1;
  bool all = true;
  for (std::size_t j = 0; j < x.dim(); ++j) {
    CVec e(x.dim());
    e[j] = 1.0;
    const CMat image = involution(closure, u, e);
    const Membership mem = x.membership(image);
    const double rel = mem.residual / std::max(1.0, frobenius_norm(image));
    all = all && mem.member;
    if (rel > worst) {
      worst = rel;
      worst_at = static_cast<int>(j);
    }
  }
  CertificateReport r = exact_report("ambient-system", closure, worst, all);
  if (worst_at >= 0 && !all) {
    r.witness.assign(x.dim(), cplx{});
    r.witness[worst_at] = 1.0;
  }
  return r;
}

CertificateReport same_involution_check(const TroClosure& closure, const CVec& u, const CVec& v) {
  require_unitary(closure, u, "u");
  require_unitary(closure, v, "v");
  const Ambient& amb = closure.ambient();
  const CMat um = closure.space.embed(u);
  const CMat vm = closure.space.embed(v);
  const CMat uv = amb.multiply(amb.adjoint(um), vm);
  const CMat vu = amb.multiply(amb.adjoint(vm), um);
  const double asym = amb.norm(uv - vu);
  double comm = 0.0;
  for (const auto& c : closure.z_star_z_basis) {
    const double cn = amb.norm(c);
    comm = std::max(comm, amb.norm(amb.multiply(uv, c) - amb.multiply(c, uv)) / cn);
  }
  const double margin = std::max(asym, comm);
  CertificateReport r = exact_report("same-involution", closure, margin, margin <= kAmbientTol);
  r.metrics.emplace_back("selfadjoint_defect", asym);
  r.metrics.emplace_back("commutator_defect", comm);
  return r;
}

CertificateReport transfer_check(const TroClosure& closure, const CVec& u, const CVec& v) {
  require_unitary(closure, u, "u");
  require_unitary(closure, v, "v");
  const ConcreteOpSpace& x = closure.space;
  const Ambient& amb = closure.ambient();
  const CMat um = closure.space.embed(u);
  const CMat vm = closure.space.embed(v);
  const std::size_t d = x.dim();
  CMat image_coeffs(d, d);
  double worst = 0.0;
  int worst_at = -1;
  bool all = true;
  for (std::size_t j = 0; j < d; ++j) {
    const CMat image = amb.triple(vm, um, x.basis()[j]);
    const Membership mem = x.membership(image);
    all = all && mem.member;
    const double rel = mem.residual / std::max(1.0, frobenius_norm(image));
    if (rel > worst) {
      worst = rel;
      worst_at = static_cast<int>(j);
    }
    for (std::size_t i = 0; i < d; ++i) image_coeffs(i, j) = mem.coeffs[i];
  }
  // Surjectivity of the induced linear map on coefficients.
  const RVec gram = herm_eigen(image_coeffs.adjoint() * image_coeffs);
  const double smallest = std::sqrt(std::max(0.0, gram.front()));
  const double largest = std::sqrt(std::max(0.0, gram.back()));
  const bool full_rank = smallest > 1e-8 * std::max(1.0, largest);
  CertificateReport r = exact_report("transfer", closure, worst, all && full_rank);
  r.metrics.emplace_back("membership_residual", worst);
  r.metrics.emplace_back("smallest_singular_value", smallest);
  if (!all) {
    r.witness.assign(d, cplx{});
    r.witness[worst_at] = 1.0;
  }
  return r;
}

}  // namespace opcert
