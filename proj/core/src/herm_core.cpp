#include "bergweight/herm_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bergweight {

namespace {

constexpr double kRankTol = 1e-10;

std::string dims_message(Index a, Index b) {
  std::ostringstream os;
  os << a << " vs " << b;
  return os.str();
}

Eigen::SelfAdjointEigenSolver<CMatrix> eig_hermitian(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) fail(ErrorCode::Numerical, "Hermitian eigensolver did not converge");
  return es;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Orthonormal basis (Euclidean) of the column span, used by the rank tests.
CMatrix column_span(const CMatrix& m) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  qr.setThreshold(kRankTol);
  const Index r = qr.rank();
  return qr.householderQ() * CMatrix::Identity(m.rows(), r);
}

double residual_ratio(const CMatrix& span, const CVector& v) {
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  if (span.cols() == 0) return 1.0;
  CVector r = v - span * (span.adjoint() * v);
  return r.norm() / nv;
}

}  // namespace

// ---------------------------------------------------------------- HermitianNorm

struct HermitianNorm::Impl {
  CMatrix gram;
  CMatrix chol;
  std::string label;
  bool diagonal = false;
};

HermitianNorm HermitianNorm::make(const CMatrix& gram, std::string basis_label) {
  if (gram.rows() != gram.cols() || gram.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "Gram matrix must be square and nonempty");
  const double scale = gram.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale))
    fail(ErrorCode::NotPositiveDefinite, "Gram matrix vanishes or is not finite");
  if (detail::hermitian_defect(gram) > kHermitianTol)
    fail(ErrorCode::NotHermitian, "Gram asymmetry above tolerance");

  auto impl = std::make_shared<Impl>();
  impl->gram = hermitian_part(gram);
  impl->label = std::move(basis_label);
  impl->diagonal = detail::is_diagonal(impl->gram);
  const Index n = gram.rows();

  if (impl->diagonal) {
    impl->chol = CMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      const double g = impl->gram(i, i).real();
      if (!(g > 0.0)) fail(ErrorCode::NotPositiveDefinite, "nonpositive diagonal Gram entry");
      impl->gram(i, i) = g;
      impl->chol(i, i) = std::sqrt(g);
    }
  } else {
    const RVector ev = eig_hermitian(impl->gram).eigenvalues();
    if (!(ev.minCoeff() > 0.0)) {
      std::ostringstream os;
      os << "smallest eigenvalue " << ev.minCoeff();
      fail(ErrorCode::NotPositiveDefinite, os.str());
    }
    Eigen::LLT<CMatrix> llt(impl->gram);
    if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "Cholesky factorisation failed");
    impl->chol = llt.matrixL();
  }
  return HermitianNorm(std::move(impl));
}

HermitianNorm HermitianNorm::identity(Index dim, std::string basis_label) {
  return make(CMatrix::Identity(dim, dim), std::move(basis_label));
}

HermitianNorm HermitianNorm::diagonal(const RVector& entries, std::string basis_label) {
  CMatrix g = CMatrix::Zero(entries.size(), entries.size());
  for (Index i = 0; i < entries.size(); ++i) g(i, i) = entries(i);
  return make(g, std::move(basis_label));
}

Index HermitianNorm::dim() const { return impl_->gram.rows(); }
const CMatrix& HermitianNorm::gram() const { return impl_->gram; }
const std::string& HermitianNorm::basis_label() const { return impl_->label; }
bool HermitianNorm::is_diagonal() const { return impl_->diagonal; }
const CMatrix& HermitianNorm::cholesky() const { return impl_->chol; }

CMatrix HermitianNorm::orthonormal_frame() const {
  return from_orthonormal(CMatrix::Identity(dim(), dim()));
}

CVector HermitianNorm::to_orthonormal(const CVector& v) const {
  if (v.size() != dim()) fail(ErrorCode::DimensionMismatch, dims_message(v.size(), dim()));
  if (impl_->diagonal) return impl_->chol.diagonal().cwiseProduct(v);
  return impl_->chol.adjoint() * v;
}

CMatrix HermitianNorm::to_orthonormal(const CMatrix& m) const {
  if (m.rows() != dim()) fail(ErrorCode::DimensionMismatch, dims_message(m.rows(), dim()));
  if (impl_->diagonal) return impl_->chol.diagonal().asDiagonal() * m;
  return impl_->chol.adjoint() * m;
}

CMatrix HermitianNorm::from_orthonormal(const CMatrix& c) const {
  if (c.rows() != dim()) fail(ErrorCode::DimensionMismatch, dims_message(c.rows(), dim()));
  if (impl_->diagonal) return impl_->chol.diagonal().cwiseInverse().asDiagonal() * c;
  return impl_->chol.adjoint().triangularView<Eigen::Upper>().solve(c);
}

CMatrix HermitianNorm::solve_lower(const CMatrix& b) const {
  if (b.rows() != dim()) fail(ErrorCode::DimensionMismatch, dims_message(b.rows(), dim()));
  if (impl_->diagonal) return impl_->chol.diagonal().cwiseInverse().asDiagonal() * b;
  return impl_->chol.triangularView<Eigen::Lower>().solve(b);
}

cplx HermitianNorm::inner(const CVector& u, const CVector& v) const {
  return to_orthonormal(v).dot(to_orthonormal(u));
}

double HermitianNorm::norm_squared(const CVector& v) const { return to_orthonormal(v).squaredNorm(); }

bool HermitianNorm::same_as(const HermitianNorm& other) const {
  if (impl_ == other.impl_) return true;
  return impl_->label == other.impl_->label && dim() == other.dim() && impl_->gram == other.impl_->gram;
}

HermitianNorm HermitianNorm::scaled(double factor) const {
  if (!(factor > 0.0)) fail(ErrorCode::NotPositiveDefinite, "scale factor must be positive");
  return make(impl_->gram * factor, impl_->label);
}

HermitianNorm make_norm(const CMatrix& gram, std::string basis_label) {
  return HermitianNorm::make(gram, std::move(basis_label));
}

// ----------------------------------------------------------- OperatorOnSections

OperatorOnSections::OperatorOnSections(CMatrix matrix, HermitianNorm reference)
    : matrix_(std::move(matrix)), reference_(std::move(reference)), hermitian_(false) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != reference_.dim())
    fail(ErrorCode::DimensionMismatch, dims_message(matrix_.rows(), reference_.dim()));
  hermitian_ = detail::hermitian_defect(matrix_) <= kHermitianTol;
  if (hermitian_) matrix_ = hermitian_part(matrix_);
}

OperatorOnSections OperatorOnSections::identity(const HermitianNorm& reference) {
  return scalar(reference, 1.0);
}

OperatorOnSections OperatorOnSections::scalar(const HermitianNorm& reference, double value) {
  return OperatorOnSections(CMatrix::Identity(reference.dim(), reference.dim()) * value, reference);
}

OperatorOnSections OperatorOnSections::from_basis_coordinates(const CMatrix& a,
                                                              const HermitianNorm& reference) {
  // M = L^* A L^{-*}
  const CMatrix frame = reference.orthonormal_frame();
  return OperatorOnSections(reference.to_orthonormal(CMatrix(a * frame)), reference);
}

CMatrix OperatorOnSections::in_basis_coordinates() const {
  // A = L^{-*} M L^*
  const CMatrix lh = reference_.cholesky().adjoint();
  return reference_.from_orthonormal(matrix_ * lh);
}

RVector OperatorOnSections::eigenvalues() const {
  if (!hermitian_) fail(ErrorCode::NotHermitian, "eigenvalues requested for a non-Hermitian operator");
  if (detail::is_diagonal(matrix_)) {
    RVector d = matrix_.diagonal().real();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  return eig_hermitian(matrix_).eigenvalues();
}

void OperatorOnSections::require_same_reference(const OperatorOnSections& other) const {
  if (!reference_.same_as(other.reference_))
    fail(ErrorCode::BasisMismatch, "operators refer to different norms");
}

OperatorOnSections OperatorOnSections::operator+(const OperatorOnSections& other) const {
  require_same_reference(other);
  return OperatorOnSections(matrix_ + other.matrix_, reference_);
}

OperatorOnSections OperatorOnSections::operator-(const OperatorOnSections& other) const {
  require_same_reference(other);
  return OperatorOnSections(matrix_ - other.matrix_, reference_);
}

OperatorOnSections OperatorOnSections::operator*(const OperatorOnSections& other) const {
  require_same_reference(other);
  return OperatorOnSections(matrix_ * other.matrix_, reference_);
}

OperatorOnSections OperatorOnSections::operator*(double factor) const {
  return OperatorOnSections(matrix_ * factor, reference_);
}

// ------------------------------------------------------------------- Filtration

namespace {

std::vector<std::size_t> stable_decreasing_order(const std::vector<double>& w) {
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  return idx;
}

}  // namespace

void Filtration::finalize() {
  jumps_.clear();
  flag_dims_.clear();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i])) fail(ErrorCode::InvalidParams, "filtration weights must be finite");
    if (jumps_.empty() || weights_[i] != jumps_.back()) {
      if (!jumps_.empty()) flag_dims_.push_back(static_cast<Index>(i));
      jumps_.push_back(weights_[i]);
    }
  }
  flag_dims_.push_back(static_cast<Index>(weights_.size()));
}

Filtration Filtration::from_weighted_basis(const CMatrix& basis, std::vector<double> weights) {
  if (basis.rows() != basis.cols() || static_cast<std::size_t>(basis.cols()) != weights.size() || weights.empty())
    fail(ErrorCode::DimensionMismatch, "weighted basis must be square with one weight per column");
  const bool diag = detail::is_diagonal(basis);
  if (diag) {
    for (Index i = 0; i < basis.cols(); ++i)
      if (basis(i, i) == cplx(0.0, 0.0)) fail(ErrorCode::DegenerateFlag, "weighted basis has a zero column");
  } else if (column_span(basis).cols() != basis.cols()) {
    fail(ErrorCode::DegenerateFlag, "weighted basis columns are linearly dependent");
  }
  const auto order = stable_decreasing_order(weights);
  Filtration f;
  f.basis_.resize(basis.rows(), basis.cols());
  f.weights_.resize(weights.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    f.basis_.col(static_cast<Index>(j)) = basis.col(static_cast<Index>(order[j]));
    f.weights_[j] = weights[order[j]];
  }
  f.finalize();
  if (diag) f.diagonal_weights_ = std::move(weights);
  return f;
}

Filtration Filtration::from_flag(std::vector<double> weights, const std::vector<CMatrix>& flag) {
  if (weights.empty() || weights.size() != flag.size())
    fail(ErrorCode::DimensionMismatch, "one flag subspace per weight required");
  for (std::size_t j = 1; j < weights.size(); ++j)
    if (!(weights[j] < weights[j - 1])) fail(ErrorCode::InvalidParams, "flag weights must strictly decrease");
  const Index n = flag.front().rows();
  CMatrix basis(n, 0);
  std::vector<double> w;
  Index prev = 0;
  for (std::size_t j = 0; j < flag.size(); ++j) {
    if (flag[j].rows() != n) fail(ErrorCode::DimensionMismatch, "flag subspaces live in different spaces");
    const CMatrix span_j = column_span(flag[j]);
    const Index dj = span_j.cols();
    if (dj <= prev) fail(ErrorCode::DegenerateFlag, "flag dimensions must increase strictly");
    for (Index c = 0; c < basis.cols(); ++c)
      if (residual_ratio(span_j, basis.col(c)) > kRankTol)
        fail(ErrorCode::DegenerateFlag, "flag subspaces are not nested");
    // Extend the current basis greedily by columns of span_j.
    for (Index c = 0; c < span_j.cols() && basis.cols() < dj; ++c) {
      const CMatrix cur = column_span(basis);
      if (residual_ratio(cur, span_j.col(c)) > kRankTol) {
        basis.conservativeResize(n, basis.cols() + 1);
        basis.col(basis.cols() - 1) = span_j.col(c);
        w.push_back(weights[j]);
      }
    }
    if (basis.cols() != dj) fail(ErrorCode::Numerical, "could not extend flag basis");
    prev = dj;
  }
  if (prev != n) fail(ErrorCode::DegenerateFlag, "last flag subspace must be the whole space");
  Filtration f;
  f.basis_ = std::move(basis);
  f.weights_ = std::move(w);
  f.finalize();
  return f;
}

Filtration Filtration::diagonal(std::vector<double> coordinate_weights) {
  const Index n = static_cast<Index>(coordinate_weights.size());
  if (n == 0) fail(ErrorCode::DimensionMismatch, "empty filtration");
  return from_weighted_basis(CMatrix::Identity(n, n), std::move(coordinate_weights));
}

Filtration Filtration::trivial(Index dim, double weight) {
  return diagonal(std::vector<double>(static_cast<std::size_t>(dim), weight));
}

CMatrix Filtration::flag_basis(std::size_t j) const {
  if (j >= flag_dims_.size()) fail(ErrorCode::InvalidParams, "flag index out of range");
  return basis_.leftCols(flag_dims_[j]);
}

double Filtration::weight_of(const CVector& v) const {
  if (v.size() != dim()) fail(ErrorCode::DimensionMismatch, dims_message(v.size(), dim()));
  if (v.norm() == 0.0) return std::numeric_limits<double>::infinity();
  if (diagonal_weights_) {
    double w = std::numeric_limits<double>::infinity();
    const double scale = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i)
      if (std::abs(v(i)) > kRankTol * scale) w = std::min(w, (*diagonal_weights_)[static_cast<std::size_t>(i)]);
    return w;
  }
  for (std::size_t j = 0; j < jumps_.size(); ++j)
    if (residual_ratio(column_span(flag_basis(j)), v) <= kRankTol) return jumps_[j];
  return jumps_.back();
}

double Filtration::norm() const {
  double m = 0.0;
  for (double w : weights_) m = std::max(m, std::abs(w));
  return m;
}

// --------------------------------------------------------- geodesics, transfers

namespace {

void require_compatible(const HermitianNorm& a, const HermitianNorm& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, dims_message(a.dim(), b.dim()));
  if (a.basis_label() != b.basis_label())
    fail(ErrorCode::BasisMismatch, a.basis_label() + " vs " + b.basis_label());
}

// H1 Gram in H0-orthonormal coordinates: L0^{-1} G1 L0^{-*}.
CMatrix relative_gram(const HermitianNorm& h0, const HermitianNorm& h1) {
  const CMatrix y = h0.solve_lower(h1.gram());
  return hermitian_part(h0.solve_lower(y.adjoint()));
}

}  // namespace

TransferMap transfer_map(const HermitianNorm& h0, const HermitianNorm& h1) {
  require_compatible(h0, h1);
  const CMatrix m = relative_gram(h0, h1);
  const CMatrix t = detail::hermitian_function(m, [](double x) { return -std::log(x); });
  return TransferMap{OperatorOnSections(t, h0), h0, h1};
}

HermitianNorm geodesic(const HermitianNorm& h0, const HermitianNorm& h1, double t) {
  require_compatible(h0, h1);
  if (t == 0.0) return h0;
  if (t == 1.0) return h1;
  const CMatrix m = relative_gram(h0, h1);
  const CMatrix mt = detail::hermitian_function(m, [t](double x) { return std::pow(x, t); });
  const CMatrix& l = h0.cholesky();
  return make_norm(hermitian_part(l * mt * l.adjoint()), h0.basis_label());
}

HermitianNorm geodesic_ray_filtration(const HermitianNorm& h0, const Filtration& f, double t) {
  if (t == 0.0) return h0;
  const CMatrix a = weight_operator(f, h0).matrix();
  const CMatrix e = detail::hermitian_function(a, [t](double x) { return std::exp(-t * x); });
  const CMatrix& l = h0.cholesky();
  return make_norm(hermitian_part(l * e * l.adjoint()), h0.basis_label());
}

// --------------------------------------------------- adapted bases and weights

AdaptedBasis adapted_basis(const Filtration& f, const HermitianNorm& h) {
  if (f.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, dims_message(f.dim(), h.dim()));
  const Index n = f.dim();
  const CMatrix c = h.to_orthonormal(f.ordered_basis());
  CMatrix q(n, n);
  for (Index i = 0; i < n; ++i) {
    CVector v = c.col(i);
    const double v0 = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < i; ++j) v -= q.col(j).dot(v) * q.col(j);
    const double nv = v.norm();
    if (!(nv > kRankTol * v0)) fail(ErrorCode::DegenerateFlag, "flag basis is degenerate in the given norm");
    q.col(i) = v / nv;
  }
  return AdaptedBasis{h.from_orthonormal(q), q, f.ordered_weights()};
}

OperatorOnSections weight_operator(const Filtration& f, const HermitianNorm& h) {
  if (f.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, dims_message(f.dim(), h.dim()));
  if (f.jumps().size() == 1) return OperatorOnSections::scalar(h, f.jumps().front());
  if (f.diagonal_weights() && h.is_diagonal()) {
    CMatrix a = CMatrix::Zero(f.dim(), f.dim());
    for (Index i = 0; i < f.dim(); ++i) a(i, i) = (*f.diagonal_weights())[static_cast<std::size_t>(i)];
    return OperatorOnSections(std::move(a), h);
  }
  const AdaptedBasis ab = adapted_basis(f, h);
  RVector w(f.dim());
  for (Index i = 0; i < f.dim(); ++i) w(i) = ab.weights[static_cast<std::size_t>(i)];
  const CMatrix& q = ab.orthonormal_coordinates;
  return OperatorOnSections(hermitian_part(q * w.asDiagonal() * q.adjoint()), h);
}

// ------------------------------------------------------------- spectral tools

double schatten_norm(const CMatrix& a, double p, bool hermitian) {
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::InvalidP, "Schatten exponent must be >= 1");
  RVector s;
  if (detail::is_diagonal(a)) {
    s = a.diagonal().cwiseAbs();
  } else if (hermitian) {
    s = eig_hermitian(a).eigenvalues().cwiseAbs();
  } else {
    Eigen::BDCSVD<CMatrix> svd(a);
    s = svd.singularValues();
  }
  if (s.size() == 0) return 0.0;
  if (std::isinf(p)) return s.maxCoeff();
  const double smax = s.maxCoeff();
  if (smax == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
  return smax * std::pow(acc / static_cast<double>(s.size()), 1.0 / p);
}

double schatten_norm(const OperatorOnSections& a, double p) {
  return schatten_norm(a.matrix(), p, a.is_hermitian());
}

OperatorOnSections functional_calculus(const OperatorOnSections& a, const std::function<double(double)>& g) {
  if (!a.is_hermitian()) fail(ErrorCode::NotHermitian, "functional calculus needs a Hermitian operator");
  return OperatorOnSections(detail::hermitian_function(a.matrix(), g), a.reference());
}

double loewner_gap(const OperatorOnSections& a, const OperatorOnSections& b) {
  return (a - b).eigenvalues().minCoeff();
}

bool loewner_geq(const OperatorOnSections& a, const OperatorOnSections& b, double tol) {
  return loewner_gap(a, b) >= -tol;
}

bool loewner_geq(const HermitianNorm& a, const HermitianNorm& b, double tol) {
  require_compatible(a, b);
  const double scale = std::max(a.gram().cwiseAbs().maxCoeff(), b.gram().cwiseAbs().maxCoeff());
  const CMatrix d = hermitian_part(a.gram() - b.gram());
  return eig_hermitian(d).eigenvalues().minCoeff() >= -tol * scale;
}

// ------------------------------------------------------------------- quotients

namespace {

HermitianNorm quotient_from_w(const CMatrix& w, std::string label) {
  // w = P L^{-*}; quotient Gram is (w w^*)^{-1}.
  const CMatrix qinv = hermitian_part(w * w.adjoint());
  const Index m = qinv.rows();
  if (detail::is_diagonal(qinv)) {
    RVector d(m);
    for (Index i = 0; i < m; ++i) {
      const double x = qinv(i, i).real();
      if (!(x > 0.0)) fail(ErrorCode::RankDeficient, "surjection has a zero row");
      d(i) = 1.0 / x;
    }
    return HermitianNorm::diagonal(d, std::move(label));
  }
  const RVector sv = Eigen::BDCSVD<CMatrix>(w).singularValues();
  if (sv.size() < m || !(sv(m - 1) > 1e-13 * sv(0))) fail(ErrorCode::RankDeficient, "surjection is not of full row rank");
  Eigen::LLT<CMatrix> llt(qinv);
  if (llt.info() != Eigen::Success) fail(ErrorCode::RankDeficient, "quotient Gram is singular");
  const CMatrix g = llt.solve(CMatrix::Identity(m, m));
  return make_norm(hermitian_part(g), std::move(label));
}

}  // namespace

HermitianNorm quotient_norm(const HermitianNorm& h, const CMatrix& p, std::string basis_label) {
  if (p.cols() != h.dim()) fail(ErrorCode::DimensionMismatch, dims_message(p.cols(), h.dim()));
  if (p.rows() > p.cols()) fail(ErrorCode::RankDeficient, "more rows than columns");
  const CMatrix w = h.solve_lower(p.adjoint()).adjoint();
  return quotient_from_w(w, std::move(basis_label));
}

HermitianNorm quotient_norm(const RVector& diagonal_gram, const CMatrix& p, std::string basis_label) {
  if (p.cols() != diagonal_gram.size()) fail(ErrorCode::DimensionMismatch, dims_message(p.cols(), diagonal_gram.size()));
  if (!(diagonal_gram.minCoeff() > 0.0)) fail(ErrorCode::NotPositiveDefinite, "nonpositive diagonal Gram entry");
  const CMatrix w = p * diagonal_gram.cwiseSqrt().cwiseInverse().asDiagonal();
  return quotient_from_w(w, std::move(basis_label));
}

Filtration quotient_filtration(const Filtration& f, const CMatrix& p) {
  if (p.cols() != f.dim()) fail(ErrorCode::DimensionMismatch, dims_message(p.cols(), f.dim()));
  const Index m = p.rows();
  const CMatrix images = p * f.ordered_basis();
  CMatrix basis(m, 0);
  CMatrix span(m, 0);
  std::vector<double> w;
  const double scale = std::max(1.0, images.cwiseAbs().maxCoeff());
  for (Index i = 0; i < images.cols() && basis.cols() < m; ++i) {
    const CVector v = images.col(i);
    if (v.norm() <= kRankTol * scale) continue;
    CVector r = v - span * (span.adjoint() * v);
    r -= span * (span.adjoint() * r);
    if (r.norm() > kRankTol * v.norm()) {
      basis.conservativeResize(m, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v;
      span.conservativeResize(m, span.cols() + 1);
      span.col(span.cols() - 1) = r / r.norm();
      w.push_back(f.ordered_weights()[static_cast<std::size_t>(i)]);
    }
  }
  if (basis.cols() != m) fail(ErrorCode::RankDeficient, "surjection is not of full row rank");
  return Filtration::from_weighted_basis(basis, std::move(w));
}

OperatorOnSections restrict_to_quotient(const OperatorOnSections& a, const CMatrix& p, const HermitianNorm& h) {
  if (!a.reference().same_as(h)) fail(ErrorCode::BasisMismatch, "operator is not written in the given norm");
  if (!a.is_hermitian()) fail(ErrorCode::NotHermitian, "restriction needs a Hermitian operator");
  const HermitianNorm q = quotient_norm(h, p, "quotient");
  // V = L_Q^* P L^{-*}, a co-isometry from the upstream to the downstream frame.
  const CMatrix w = h.solve_lower(p.adjoint()).adjoint();
  const CMatrix v = q.to_orthonormal(w);
  return OperatorOnSections(hermitian_part(v * a.matrix() * v.adjoint()), q);
}

HermitianNorm tensor_norm(const HermitianNorm& a, const HermitianNorm& b) {
  const Index na = a.dim(), nb = b.dim();
  CMatrix g(na * nb, na * nb);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < na; ++j) g.block(i * nb, j * nb, nb, nb) = a.gram()(i, j) * b.gram();
  return make_norm(g, a.basis_label() + "(x)" + b.basis_label());
}

Filtration tensor_filtration(const Filtration& a, const Filtration& b) {
  const Index na = a.dim(), nb = b.dim();
  if (a.diagonal_weights() && b.diagonal_weights()) {
    std::vector<double> w(static_cast<std::size_t>(na * nb));
    for (Index i = 0; i < na; ++i)
      for (Index j = 0; j < nb; ++j)
        w[static_cast<std::size_t>(i * nb + j)] =
            (*a.diagonal_weights())[static_cast<std::size_t>(i)] + (*b.diagonal_weights())[static_cast<std::size_t>(j)];
    return Filtration::diagonal(std::move(w));
  }
  CMatrix basis(na * nb, na * nb);
  std::vector<double> w(static_cast<std::size_t>(na * nb));
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < nb; ++j) {
      const Index c = i * nb + j;
      for (Index r = 0; r < na; ++r) basis.col(c).segment(r * nb, nb) = a.ordered_basis()(r, i) * b.ordered_basis().col(j);
      w[static_cast<std::size_t>(c)] =
          a.ordered_weights()[static_cast<std::size_t>(i)] + b.ordered_weights()[static_cast<std::size_t>(j)];
    }
  return Filtration::from_weighted_basis(basis, std::move(w));
}

// ------------------------------------------------------------ Cholesky bound

int ceil_log2(Index n) {
  int r = 0;
  Index v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

CholeskyStability cholesky_stability_bound(const Filtration& f, const HermitianNorm& h0, const HermitianNorm& h1) {
  require_compatible(h0, h1);
  if (f.dim() != h0.dim()) fail(ErrorCode::DimensionMismatch, dims_message(f.dim(), h0.dim()));
  const Index n = h0.dim();
  const CMatrix m = relative_gram(h0, h1);
  const double c = schatten_norm(CMatrix(m - CMatrix::Identity(n, n)), kOperatorNorm, true);

  const CMatrix a0 = weight_operator(f, h0).matrix();
  // A(F,H1) moved to the H0 frame: the change of frame is S = L0^* L1^{-*}.
  const CMatrix a1 = weight_operator(f, h1).matrix();
  const CMatrix s = h0.to_orthonormal(h1.orthonormal_frame());
  const CMatrix s_inv = h1.to_orthonormal(h0.orthonormal_frame());
  const CMatrix a1_in_h0 = s * a1 * s_inv;
  const double deviation = schatten_norm(CMatrix(a0 - a1_in_h0), kOperatorNorm, false);

  const double factor = 1.0 + 2.0 * ceil_log2(n);
  return CholeskyStability{deviation, 16.0 * c * factor * f.norm(), c, factor * factor * c < 1.0};
}

// ------------------------------------------------------------------ helpers

namespace detail {

bool is_diagonal(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

double hermitian_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

CMatrix hermitian_function(const CMatrix& m, const std::function<double(double)>& g) {
  const Index n = m.rows();
  if (is_diagonal(m)) {
    CMatrix r = CMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) r(i, i) = g(m(i, i).real());
    return r;
  }
  const auto es = eig_hermitian(hermitian_part(m));
  RVector d(n);
  for (Index i = 0; i < n; ++i) d(i) = g(es.eigenvalues()(i));
  const CMatrix& v = es.eigenvectors();
  return hermitian_part(v * d.asDiagonal() * v.adjoint());
}

}  // namespace detail

}  // namespace bergweight
