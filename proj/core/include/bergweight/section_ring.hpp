#pragma once

// Sections of O(N) on P^1, written in the monomial basis
//   index r = 0..N  <->  x^{N-r} y^r   (decreasing power of x).
// A point [a : b] is normalised to |a|^2 + |b|^2 = 1 with the first nonzero
// coordinate real and positive; its moment coordinate is s = |a|^2.
// Evaluation against the unit frame of h_FS^N gives E_r = a^{N-r} b^r.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bergweight/herm_core.hpp"

namespace bergweight {

/// Degree-k piece of the section ring of (P^1, O(d)): sections of O(k d).
class SectionSpace {
 public:
  explicit SectionSpace(int k, int d = 1);

  int k() const { return k_; }
  int d() const { return d_; }
  /// Total degree on P^1.
  int degree() const { return k_ * d_; }
  Index dim() const { return static_cast<Index>(k_) * d_ + 1; }
  /// Basis label shared by every norm on this space.
  std::string basis_label() const;

 private:
  int k_;
  int d_;
};

class PointP1 {
 public:
  PointP1(cplx a, cplx b);
  /// a = sqrt(s), b = sqrt(1 - s) e^{i theta}.
  static PointP1 from_moment(double s, double theta = 0.0);

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  double s() const { return std::norm(a_); }
  double theta() const;

 private:
  cplx a_;
  cplx b_;
};

enum class VolumeMode { Curvature, FixedBackground };
std::string_view to_string(VolumeMode mode) noexcept;

/// u in h = e^{-u} h_FS; sections of O(N) carry the weight e^{-N u}.
class MetricPotential {
 public:
  using Profile = std::function<double(double)>;
  using General = std::function<double(const PointP1&)>;

  static MetricPotential constant(double c);
  /// u = c0 + c1 s.
  static MetricPotential moment_linear(double c0, double c1);
  /// u = sum_j c_j s^j.
  static MetricPotential moment_polynomial(std::vector<double> coefficients);
  /// Samples u(s_j). Linear interpolation is treated as non-smooth; cubic
  /// interpolation needs a uniform grid.
  static MetricPotential radial_samples(std::vector<double> s, std::vector<double> values, bool cubic);
  /// Radial profile with optional first and second derivatives; without both
  /// derivatives the metric is treated as non-smooth.
  static MetricPotential radial(Profile u, Profile du = nullptr, Profile d2u = nullptr,
                                std::vector<double> breakpoints = {}, std::string description = "radial");
  static MetricPotential general(General u, std::string description = "general");

  bool rotation_invariant() const { return static_cast<bool>(profile_); }
  bool smooth() const { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }
  double operator()(const PointP1& x) const;
  double profile(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  /// Interior points of [0,1] where the profile may fail to be smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double inf() const { return inf_; }
  double sup() const { return sup_; }
  const std::string& description() const { return description_; }
  /// Exact constant value when the metric is a constant rescaling of h_FS.
  std::optional<double> constant_value() const { return constant_; }

  /// Curvature density against ds dtheta/2pi, normalised to total mass 1 for
  /// u = 0: 1 + (1-2s)u' + s(1-s)u''.
  double curvature_density(double s) const;
  VolumeMode default_volume() const { return smooth() ? VolumeMode::Curvature : VolumeMode::FixedBackground; }

 private:
  MetricPotential() = default;
  void compute_bounds();

  Profile profile_;
  Profile d1_;
  Profile d2_;
  General general_;
  std::vector<double> breakpoints_;
  std::optional<double> constant_;
  std::string description_;
  double inf_ = 0.0;
  double sup_ = 0.0;
};

/// Bounded function on P^1 used as a Toeplitz symbol or as g in pushforwards.
class Symbol {
 public:
  static Symbol radial(std::function<double(double)> f, std::vector<double> breakpoints = {},
                       std::string description = "radial");
  static Symbol general(std::function<double(const PointP1&)> f, std::string description = "general");
  static Symbol constant(double c);
  static Symbol from_potential(const MetricPotential& u);

  bool rotation_invariant() const { return static_cast<bool>(profile_); }
  double operator()(const PointP1& x) const;
  double profile(double s) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& description() const { return description_; }

 private:
  Symbol() = default;
  std::function<double(double)> profile_;
  std::function<double(const PointP1&)> general_;
  std::vector<double> breakpoints_;
  std::string description_;
};

/// Gauss-Legendre nodes on [0,1] (split at breakpoints), weights summing to 1,
/// plus the angular node count used for non-invariant integrands.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int nodes_per_piece = 0;
  std::vector<double> breakpoints;
  int angular_nodes = 0;  ///< 0 selects 4(N+1)

  static QuadratureRule gauss_legendre(int nodes_per_piece, std::vector<double> breakpoints = {},
                                       int angular_nodes = 0);
  /// Resolution that integrates degree-N monomial densities comfortably.
  static QuadratureRule for_degree(int degree, std::vector<double> breakpoints = {});
  QuadratureRule doubled() const;
  int angular_for(int degree) const { return angular_nodes > 0 ? angular_nodes : 4 * (degree + 1); }
};

/// Integration model behind Hilb_k: section space, metric, volume form and
/// quadrature. Immutable once constructed.
class L2Model {
 public:
  L2Model(SectionSpace space, MetricPotential u, std::optional<VolumeMode> volume = std::nullopt,
          std::optional<QuadratureRule> rule = std::nullopt);

  const SectionSpace& space() const { return space_; }
  const MetricPotential& metric() const { return u_; }
  VolumeMode volume() const { return volume_; }
  const QuadratureRule& rule() const { return rule_; }

  /// e^{-N u(x)}: squared length of the h_FS-unit frame of O(N) measured in h^N.
  double frame_weight(const PointP1& x) const;
  /// Total mass of the volume form (d for the curvature of O(d)).
  double total_volume() const;
  /// Volume density against ds dtheta/2pi; throws NonPositiveVolume if <= 0.
  double volume_density(double s) const;

  struct Node {
    PointP1 x;
    double weight;  ///< volume weight including the radial/angle rule
  };
  /// Product quadrature for non-invariant integrands (angular nodes 4(N+1) by default).
  std::vector<Node> product_nodes(const QuadratureRule& rule) const;

 private:
  SectionSpace space_;
  MetricPotential u_;
  VolumeMode volume_;
  QuadratureRule rule_;
};

/// Gram matrix of Hilb_k for the model, exactly diagonal for radial metrics.
HermitianNorm hilb_quadrature(const L2Model& model);
HermitianNorm hilb_quadrature(const L2Model& model, const QuadratureRule& rule);
/// Fubini-Study Gram on O(N) with total volume `volume`: volume * r!(N-r)!/(N+1)!.
HermitianNorm hilb_fs_closed_form(int degree, double volume = 1.0, const std::string& label = "");
RVector fs_gram_diagonal(int degree, double volume = 1.0);

CVector evaluate_sections(const SectionSpace& space, const PointP1& x);
CVector evaluate_sections(int degree, const PointP1& x);

/// Mult_{k,l}: tensor index r (l+1) + q maps to r + q (degrees on P^1).
CMatrix multiplication_matrix(int k, int l);
/// Coefficients of the product of two sections.
CVector multiply_sections(const CVector& f, const CVector& g);

/// Log-domain radial integral int_0^1 s^{N-r}(1-s)^r e^{-N u} rho(s) F(s) ds for
/// every r, evaluated on `rule` and returned as logs (F must be positive) or
/// as linear values relative to the same integral with F = 1.
struct RadialMoments {
  RVector log_mass;   ///< log int s^{N-r}(1-s)^r e^{-N u} rho ds
  RVector weighted;   ///< int F ... / int ...  (F = 1 when not requested)
};
RadialMoments radial_moments(const L2Model& model, const QuadratureRule& rule,
                             const std::function<double(double)>& f = nullptr);

}  // namespace bergweight
