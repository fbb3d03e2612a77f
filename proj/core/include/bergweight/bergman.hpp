#pragma once

// Bergman kernels, Toeplitz operators and diagonal kernels on sections of O(N)
// over P^1. All kernels are assembled from the frame-invariant vector
// w(x) = L^{-1} conj(E(x)), where G = L L^* is the Gram of the reference norm
// and E the evaluation vector; an orthonormal section s_i satisfies
// s_i(x) = conj(w_i(x)) in the h_FS-unit frame.

#include <functional>

#include "bergweight/filtrations.hpp"
#include "bergweight/measures.hpp"
#include "bergweight/section_ring.hpp"

namespace bergweight {

inline constexpr double kToeplitzSelfTestTol = 1e-9;

CVector kernel_vector(const HermitianNorm& norm, const PointP1& x);

double bergman_diag(const L2Model& model, const HermitianNorm& norm, const PointP1& x);
/// |B_k(x, y)|^2 measured with h^N at both points.
double bergman_offdiag_sq(const L2Model& model, const HermitianNorm& norm, const PointP1& x, const PointP1& y);

/// Unit-norm section representing evaluation at x, with s_x(x) > 0.
CVector peak_section(const L2Model& model, const HermitianNorm& norm, const PointP1& x);
double section_norm(const HermitianNorm& norm, const CVector& coefficients);

/// T(x) = sum_i <T s_i(x), s_i(x)> for T written in its reference norm.
double diagonal_kernel(const OperatorOnSections& t, const L2Model& model, const PointP1& x);

/// g(A(F_k, norm)/k).
OperatorOnSections weighted_operator(const RingFiltration& f, const std::function<double(double)>& g,
                                     const SectionSpace& space, const HermitianNorm& norm);
double weighted_bergman(const RingFiltration& f, const std::function<double(double)>& g, const L2Model& model,
                        const HermitianNorm& norm, const PointP1& x);

struct ToeplitzOptions {
  /// Rule used for the integral; defaults to the model's resolution with the
  /// symbol's breakpoints added.
  std::optional<QuadratureRule> rule;
  bool self_test = true;
  double tolerance = kToeplitzSelfTestTol;
};

/// Moment matrix M_ij = int f conj(E_i) E_j e^{-N u} dvol (diagonal for radial data).
CMatrix moment_matrix(const Symbol& f, const L2Model& model, const QuadratureRule& rule);
OperatorOnSections toeplitz_matrix(const Symbol& f, const L2Model& model, const HermitianNorm& norm,
                                   const ToeplitzOptions& options = {});

double symbol_distance(const OperatorOnSections& t, const Symbol& f, const L2Model& model, double p,
                       const ToeplitzOptions& options = {});

Measure spectral_measure(const OperatorOnSections& t);

inline constexpr int kPushforwardResolution = 4096;
/// f_*(nu) for the normalised volume of the model; flat pieces of f become atoms.
Measure pushforward_measure(const Symbol& f, const L2Model& model, int resolution = kPushforwardResolution);

}  // namespace bergweight
