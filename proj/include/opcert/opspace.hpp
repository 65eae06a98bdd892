#pragma once
//
// Concrete operator spaces: a linear span of p x q complex matrices with an
// optional designated element u, its matrix levels M_n(X), and membership.
//
// Spaces whose basis is diagonal (function spaces embedded as Min(X)) are
// stored compactly: every ambient matrix is kept as its diagonal, an m x 1
// column. All ambient arithmetic goes through Ambient so callers never need
// to know which layout is in use.
//

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "opcert/matcore.hpp"

namespace opcert {

enum class Layout { Dense, Diagonal };

/// Ambient matrix arithmetic on compactly stored matrices.
struct Ambient {
  Layout layout = Layout::Dense;
  std::size_t rows = 0;  ///< logical ambient shape
  std::size_t cols = 0;

  bool diagonal() const { return layout == Layout::Diagonal; }
  CMat zero() const;
  CMat multiply(const CMat& a, const CMat& b) const;
  CMat adjoint(const CMat& a) const;
  /// a b* c, the ternary product.
  CMat triple(const CMat& a, const CMat& b, const CMat& c) const;
  double norm(const CMat& a) const;
  /// Full matrix for a compact one.
  CMat dense(const CMat& a) const;
  /// Identity of the left (p x p) or right (q x q) corner, compact.
  CMat identity(std::size_t n) const;
};

/// x in M_n(X): an n x n grid of coefficient vectors, row-major.
struct AmplifiedElement {
  std::size_t level = 1;
  std::vector<CVec> grid;

  const CVec& at(std::size_t i, std::size_t j) const { return grid[i * level + j]; }
  CVec& at(std::size_t i, std::size_t j) { return grid[i * level + j]; }
  /// Flattened coefficients, cell-major.
  CVec flatten() const;
};

struct Membership {
  CVec coeffs;
  double residual = 0.0;  ///< Frobenius distance to the span
  bool member = false;
};

inline constexpr double kDefaultMembershipTol = 1e-6;

class ConcreteOpSpace {
 public:
  /// Dense constructor. A square basis that is entirely diagonal switches to the compact layout.
  static ConcreteOpSpace make(std::vector<CMat> basis, std::optional<CVec> unit = std::nullopt);
  /// Diagonal constructor; each basis entry is the diagonal of an m x m matrix.
  static ConcreteOpSpace make_diagonal(std::size_t points, std::vector<CVec> diagonals,
                                       std::optional<CVec> unit = std::nullopt);

  std::size_t dim() const { return basis_.size(); }
  std::size_t rows() const { return ambient_.rows; }
  std::size_t cols() const { return ambient_.cols; }
  const Ambient& ambient() const { return ambient_; }
  bool diagonal() const { return ambient_.diagonal(); }

  /// Basis in compact storage.
  const std::vector<CMat>& basis() const { return basis_; }
  const std::optional<CVec>& unit() const { return unit_; }
  /// Unit coefficients; throws PreconditionError when none is designated.
  const CVec& require_unit() const;
  ConcreteOpSpace with_unit(std::optional<CVec> unit) const;

  double membership_tol() const { return membership_tol_; }
  void set_membership_tol(double tol) { membership_tol_ = tol; }

  /// sum_i coeffs_i basis_i, compact.
  CMat embed(std::span<const cplx> coeffs) const;
  CMat embed_dense(std::span<const cplx> coeffs) const;
  double norm(std::span<const cplx> coeffs) const;

  /// n p x n q block matrix of an amplified element (dense).
  CMat embed(const AmplifiedElement& x) const;
  double norm(const AmplifiedElement& x) const;
  AmplifiedElement amplify_unit(std::size_t n) const;
  AmplifiedElement zero_amplified(std::size_t n) const;

  /// Least-squares projection of a compact ambient matrix onto the span.
  Membership membership(const CMat& compact) const;
  /// Same for a full p x q matrix (off-diagonal mass counts toward the residual in the diagonal layout).
  Membership membership_dense(const CMat& full) const;

  /// Conversion between complex coefficients and the interleaved real vector [re0, im0, re1, ...].
  static CVec coeffs_from_real(std::span<const double> params);
  static RVec real_from_coeffs(std::span<const cplx> coeffs);

 private:
  ConcreteOpSpace() = default;
  void validate_and_prepare();

  Ambient ambient_;
  std::vector<CMat> basis_;
  std::optional<CVec> unit_;
  CMat gram_inverse_;
  double membership_tol_ = kDefaultMembershipTol;
};

}  // namespace opcert
