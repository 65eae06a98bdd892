#pragma once
//
// Dense complex matrices and the spectral routines every norm evaluation
// in the toolkit goes through.
//

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace opcert {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Relative hermiticity tolerance accepted by herm_eigen and psd_sqrt.
inline constexpr double kHermitianTol = 1e-9;
/// Eigenvalues of a psd input may dip this far below zero before psd_sqrt rejects it.
inline constexpr double kEigenClamp = 1e-9;

/// Row-major dense complex matrix.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols);
  CMat(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static CMat identity(std::size_t n);
  static CMat diagonal(std::span<const cplx> diag);
  /// Matrix unit E_ij of the given shape.
  static CMat unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> entries() { return data_; }
  std::span<const cplx> entries() const { return data_; }

  CMat adjoint() const;
  bool is_diagonal(double tol = 0.0) const;

  CMat& operator+=(const CMat& other);
  CMat& operator-=(const CMat& other);
  CMat& operator*=(cplx s);

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(CMat a, cplx s) { return a *= s; }
  friend CMat operator*(cplx s, CMat a) { return a *= s; }
  friend CMat operator*(const CMat& a, const CMat& b);
  friend bool operator==(const CMat& a, const CMat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

double frobenius_norm(const CMat& m);
/// Frobenius inner product sum conj(a_ij) b_ij.
cplx frobenius_inner(const CMat& a, const CMat& b);

/// Largest singular value, from the extreme eigenvalue of the smaller Gram matrix.
double spectral_norm(const CMat& m);

/// Top singular value with its singular vectors and the gap to the next one.
struct SingularTriple {
  double sigma = 0.0;
  double gap = 0.0;   ///< sigma_1 - sigma_2 (sigma_1 when rank one)
  CVec left;          ///< unit u with m v = sigma u
  CVec right;         ///< unit v
};
SingularTriple top_singular_triple(const CMat& m);

struct HermEigen {
  RVec values;   ///< ascending
  CMat vectors;  ///< columns are the matching orthonormal eigenvectors
};
/// Cyclic complex Jacobi. Throws InvalidInput when m is not hermitian within tolerance.
HermEigen herm_eigen_decompose(const CMat& m);
RVec herm_eigen(const CMat& m);

/// Hermitian square root of a psd matrix; eigenvalues in [-kEigenClamp, 0) are clamped.
CMat psd_sqrt(const CMat& m);

/// [[a, b], [c, d]] as one matrix.
CMat block2x2(const CMat& a, const CMat& b, const CMat& c, const CMat& d);
CMat hstack(const CMat& a, const CMat& b);
CMat vstack(const CMat& a, const CMat& b);

/// Orthonormal basis of the null space of the real matrix whose columns are given.
/// Eigenvalues of the normal matrix at or below rel_tol * max(1, largest) count as zero.
std::vector<RVec> real_null_space(const std::vector<RVec>& columns, double rel_tol = 1e-10);

}  // namespace opcert
