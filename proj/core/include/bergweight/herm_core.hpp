#pragma once

// Finite-dimensional geometry of Hermitian norms.
//
// Conventions used throughout the library:
//   * <u, v>_H = v^* G u for a Gram matrix G (linear in the first slot).
//   * G = L L^* is the Cholesky factorisation; the columns of L^{-*} form the
//     canonical H-orthonormal frame, and a vector v has orthonormal
//     coordinates L^* v.
//   * Operators (OperatorOnSections) always store their matrix in the
//     canonical orthonormal frame of their reference norm.

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bergweight/error.hpp"

namespace bergweight {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kLoewnerTol = 1e-9;
inline constexpr double kOperatorNorm = std::numeric_limits<double>::infinity();

/// Positive-definite inner product on C^dim, tagged with the basis its Gram
/// matrix is written in. Immutable and cheap to copy.
class HermitianNorm {
 public:
  /// Validates and symmetrises `gram`. Throws NotHermitian when the
  /// relative asymmetry exceeds kHermitianTol and NotPositiveDefinite when
  /// some eigenvalue is <= 0.
  static HermitianNorm make(const CMatrix& gram, std::string basis_label = "standard");
  static HermitianNorm identity(Index dim, std::string basis_label = "standard");
  static HermitianNorm diagonal(const RVector& entries, std::string basis_label = "standard");

  Index dim() const;
  const CMatrix& gram() const;
  const std::string& basis_label() const;
  bool is_diagonal() const;

  /// Lower Cholesky factor L with G = L L^*.
  const CMatrix& cholesky() const;
  /// Columns are the canonical H-orthonormal basis, i.e. L^{-*}.
  CMatrix orthonormal_frame() const;
  /// L^* v.
  CVector to_orthonormal(const CVector& v) const;
  /// L^* M, column-wise.
  CMatrix to_orthonormal(const CMatrix& m) const;
  /// L^{-*} c.
  CMatrix from_orthonormal(const CMatrix& c) const;
  /// L^{-1} b.
  CMatrix solve_lower(const CMatrix& b) const;

  cplx inner(const CVector& u, const CVector& v) const;
  double norm_squared(const CVector& v) const;

  /// True when both norms are the same object or have identical label and Gram.
  bool same_as(const HermitianNorm& other) const;
  HermitianNorm scaled(double factor) const;

 private:
  struct Impl;
  explicit HermitianNorm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// A linear operator on a section space, written in the canonical
/// orthonormal frame of `reference`.
class OperatorOnSections {
 public:
  OperatorOnSections(CMatrix matrix, HermitianNorm reference);

  static OperatorOnSections identity(const HermitianNorm& reference);
  static OperatorOnSections scalar(const HermitianNorm& reference, double value);
  /// `a` acts on coordinates in the norm's underlying basis.
  static OperatorOnSections from_basis_coordinates(const CMatrix& a, const HermitianNorm& reference);

  const CMatrix& matrix() const { return matrix_; }
  const HermitianNorm& reference() const { return reference_; }
  bool is_hermitian() const { return hermitian_; }
  Index dim() const { return matrix_.rows(); }

  /// Matrix acting on coordinates in the underlying basis: L^{-*} M L^*.
  CMatrix in_basis_coordinates() const;
  /// Eigenvalues in ascending order; requires a Hermitian operator.
  RVector eigenvalues() const;

  OperatorOnSections operator+(const OperatorOnSections& other) const;
  OperatorOnSections operator-(const OperatorOnSections& other) const;
  OperatorOnSections operator*(const OperatorOnSections& other) const;
  OperatorOnSections operator*(double factor) const;

 private:
  void require_same_reference(const OperatorOnSections& other) const;

  CMatrix matrix_;
  HermitianNorm reference_;
  bool hermitian_;
};

struct TransferMap {
  /// T in the H0-orthonormal frame; Hermitian.
  OperatorOnSections generator;
  HermitianNorm source;
  HermitianNorm target;
};

/// Decreasing filtration on C^dim, stored as a basis compatible with the flag
/// together with one weight per basis vector: F^lambda = span{b_i : w_i >= lambda}.
class Filtration {
 public:
  /// Basis columns may come in any order; they are sorted by decreasing
  /// weight with ties keeping input order.
  static Filtration from_weighted_basis(const CMatrix& basis, std::vector<double> weights);
  /// `weights` strictly decreasing, flag[j] a basis of F^{weights[j]}, the last
  /// subspace being the whole space. Throws DegenerateFlag when dims fail to
  /// increase strictly or the subspaces are not nested.
  static Filtration from_flag(std::vector<double> weights, const std::vector<CMatrix>& flag);
  /// Coordinate vector e_i carries weight coordinate_weights[i].
  static Filtration diagonal(std::vector<double> coordinate_weights);
  static Filtration trivial(Index dim, double weight = 0.0);

  Index dim() const { return basis_.rows(); }
  /// Distinct weights, strictly decreasing.
  const std::vector<double>& jumps() const { return jumps_; }
  /// dim F^{jumps()[j]}.
  const std::vector<Index>& flag_dims() const { return flag_dims_; }
  CMatrix flag_basis(std::size_t j) const;

  const CMatrix& ordered_basis() const { return basis_; }
  /// Weights of ordered_basis() columns; this is the list of jumping numbers.
  const std::vector<double>& ordered_weights() const { return weights_; }
  /// Per-coordinate weights when the flag is spanned by coordinate vectors.
  const std::optional<std::vector<double>>& diagonal_weights() const { return diagonal_weights_; }

  /// sup{lambda : v in F^lambda}; +infinity for v = 0.
  double weight_of(const CVector& v) const;
  /// max |lambda|.
  double norm() const;

 private:
  Filtration() = default;
  void finalize();

  CMatrix basis_;
  std::vector<double> weights_;
  std::vector<double> jumps_;
  std::vector<Index> flag_dims_;
  std::optional<std::vector<double>> diagonal_weights_;
};

struct AdaptedBasis {
  /// Columns, in underlying coordinates, orthonormal for the norm.
  CMatrix vectors;
  /// The same vectors in the norm's orthonormal frame (a unitary matrix).
  CMatrix orthonormal_coordinates;
  std::vector<double> weights;
};

HermitianNorm make_norm(const CMatrix& gram, std::string basis_label = "standard");

TransferMap transfer_map(const HermitianNorm& h0, const HermitianNorm& h1);
HermitianNorm geodesic(const HermitianNorm& h0, const HermitianNorm& h1, double t);
HermitianNorm geodesic_ray_filtration(const HermitianNorm& h0, const Filtration& f, double t);

AdaptedBasis adapted_basis(const Filtration& f, const HermitianNorm& h);
OperatorOnSections weight_operator(const Filtration& f, const HermitianNorm& h);

/// ((1/dim) Tr |A|^p)^{1/p} for finite p >= 1; the operator norm for p = infinity.
double schatten_norm(const OperatorOnSections& a, double p);
double schatten_norm(const CMatrix& a, double p, bool hermitian);

OperatorOnSections functional_calculus(const OperatorOnSections& a,
                                       const std::function<double(double)>& g);

/// Smallest eigenvalue of A - B; A >= B in Loewner order when this is >= -kLoewnerTol.
double loewner_gap(const OperatorOnSections& a, const OperatorOnSections& b);
bool loewner_geq(const OperatorOnSections& a, const OperatorOnSections& b, double tol = kLoewnerTol);
/// Gram-level order: G_a - G_b positive semidefinite up to tol (relative to max |G|).
bool loewner_geq(const HermitianNorm& a, const HermitianNorm& b, double tol = kLoewnerTol);

/// Minimal-preimage norm on the image of the surjection `p` (rows = downstream).
HermitianNorm quotient_norm(const HermitianNorm& h, const CMatrix& p,
                            std::string basis_label = "quotient");
/// Same, for an upstream norm that is diagonal with the given entries; avoids
/// materialising large tensor-product Gram matrices.
HermitianNorm quotient_norm(const RVector& diagonal_gram, const CMatrix& p,
                            std::string basis_label = "quotient");
Filtration quotient_filtration(const Filtration& f, const CMatrix& p);
OperatorOnSections restrict_to_quotient(const OperatorOnSections& a, const CMatrix& p,
                                        const HermitianNorm& h);

HermitianNorm tensor_norm(const HermitianNorm& a, const HermitianNorm& b);
Filtration tensor_filtration(const Filtration& a, const Filtration& b);

struct CholeskyStability {
  double deviation;   ///< ||A(F,H0) - A(F,H1)|| in the H0 operator norm
  double bound;       ///< 16 C (1 + 2 ceil(log2 dim)) ||F||
  double c;           ///< ||H1/H0 - 1|| measured in H0-orthonormal coordinates
  bool applicable;    ///< (1 + 2 ceil(log2 dim))^2 C < 1
};

CholeskyStability cholesky_stability_bound(const Filtration& f, const HermitianNorm& h0,
                                           const HermitianNorm& h1);

int ceil_log2(Index n);

namespace detail {
bool is_diagonal(const CMatrix& m);
double hermitian_defect(const CMatrix& m);
/// Eigen-decomposition based g(M) for a Hermitian matrix.
CMatrix hermitian_function(const CMatrix& m, const std::function<double(double)>& g);
}  // namespace detail

}  // namespace bergweight
