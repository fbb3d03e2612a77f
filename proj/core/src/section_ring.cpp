#include "bergweight/section_ring.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace bergweight {

// ------------------------------------------------------------------ basics

SectionSpace::SectionSpace(int k, int d) : k_(k), d_(d) {
  if (k < 0 || d < 1) fail(ErrorCode::InvalidParams, "section space needs k >= 0 and d >= 1");
}

std::string SectionSpace::basis_label() const { return "O(" + std::to_string(degree()) + ")"; }

PointP1::PointP1(cplx a, cplx b) {
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorCode::InvalidParams, "point needs a nonzero coordinate");
  a /= n;
  b /= n;
  if (a != cplx(0.0, 0.0)) {
    const cplx phase = std::conj(a) / std::abs(a);
    a = std::abs(a);
    b *= phase;
  } else {
    b = std::abs(b);
  }
  a_ = a;
  b_ = b;
}

PointP1 PointP1::from_moment(double s, double theta) {
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::InvalidParams, "moment coordinate outside [0,1]");
  return PointP1(cplx(std::sqrt(s), 0.0), std::polar(std::sqrt(1.0 - s), theta));
}

double PointP1::theta() const { return std::arg(b_); }

std::string_view to_string(VolumeMode mode) noexcept {
  return mode == VolumeMode::Curvature ? "curvature" : "fixed-background";
}

// ----------------------------------------------------------- MetricPotential

void MetricPotential::compute_bounds() {
  inf_ = std::numeric_limits<double>::infinity();
  sup_ = -inf_;
  if (profile_) {
    constexpr int n = 4096;
    auto take = [&](double s) {
      const double v = profile_(s);
      if (!std::isfinite(v)) fail(ErrorCode::InvalidParams, "potential is not finite on [0,1]");
      inf_ = std::min(inf_, v);
      sup_ = std::max(sup_, v);
    };
    for (int i = 0; i <= n; ++i) take(static_cast<double>(i) / n);
    for (double b : breakpoints_) take(b);
  } else {
    for (int i = 0; i <= 64; ++i)
      for (int j = 0; j < 64; ++j) {
        const double v = general_(PointP1::from_moment(i / 64.0, 2.0 * std::numbers::pi * j / 64.0));
        if (!std::isfinite(v)) fail(ErrorCode::InvalidParams, "potential is not finite");
        inf_ = std::min(inf_, v);
        sup_ = std::max(sup_, v);
      }
  }
}

MetricPotential MetricPotential::constant(double c) {
  MetricPotential u;
  u.profile_ = [c](double) { return c; };
  u.d1_ = [](double) { return 0.0; };
  u.d2_ = [](double) { return 0.0; };
  u.constant_ = c;
  u.description_ = "constant";
  u.compute_bounds();
  return u;
}

MetricPotential MetricPotential::moment_linear(double c0, double c1) {
  return moment_polynomial({c0, c1});
}

MetricPotential MetricPotential::moment_polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  auto c = std::make_shared<const std::vector<double>>(std::move(coefficients));
  MetricPotential u;
  u.profile_ = [c](double s) {
    double v = 0.0;
    for (auto it = c->rbegin(); it != c->rend(); ++it) v = v * s + *it;
    return v;
  };
  u.d1_ = [c](double s) {
    double v = 0.0;
    for (std::size_t j = c->size(); j-- > 1;) v = v * s + static_cast<double>(j) * (*c)[j];
    return v;
  };
  u.d2_ = [c](double s) {
    double v = 0.0;
    for (std::size_t j = c->size(); j-- > 2;) v = v * s + static_cast<double>(j * (j - 1)) * (*c)[j];
    return v;
  };
  bool all_zero_beyond_constant = true;
  for (std::size_t j = 1; j < c->size(); ++j) all_zero_beyond_constant &= (*c)[j] == 0.0;
  if (all_zero_beyond_constant) u.constant_ = (*c)[0];
  u.description_ = "moment-polynomial";
  u.compute_bounds();
  return u;
}

MetricPotential MetricPotential::radial_samples(std::vector<double> s, std::vector<double> values, bool cubic) {
  if (s.size() != values.size() || s.size() < 2)
    fail(ErrorCode::InvalidParams, "radial samples need matching s and value lists of length >= 2");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) fail(ErrorCode::InvalidParams, "sample nodes must increase strictly");
  if (std::abs(s.front()) > 1e-12 || std::abs(s.back() - 1.0) > 1e-12)
    fail(ErrorCode::InvalidParams, "sample nodes must span [0,1]");
  MetricPotential u;
  if (cubic) {
    const double h = 1.0 / static_cast<double>(s.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (std::abs(s[i] - h * static_cast<double>(i)) > 1e-9)
        fail(ErrorCode::InvalidParams, "cubic interpolation needs a uniform grid");
    if (s.size() < 4) fail(ErrorCode::InvalidParams, "cubic interpolation needs at least 4 samples");
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    auto sp = std::make_shared<const Spline>(values.begin(), values.end(), 0.0, h);
    u.profile_ = [sp](double x) { return (*sp)(x); };
    u.d1_ = [sp](double x) { return sp->prime(x); };
    u.d2_ = [sp](double x) { return sp->double_prime(x); };
    u.description_ = "radial-samples(cubic)";
  } else {
    auto xs = std::make_shared<const std::vector<double>>(std::move(s));
    auto ys = std::make_shared<const std::vector<double>>(std::move(values));
    u.profile_ = [xs, ys](double x) {
      x = std::clamp(x, 0.0, 1.0);
      auto it = std::upper_bound(xs->begin(), xs->end(), x);
      std::size_t j = static_cast<std::size_t>(std::distance(xs->begin(), it));
      j = std::clamp<std::size_t>(j, 1, xs->size() - 1);
      const double t = (x - (*xs)[j - 1]) / ((*xs)[j] - (*xs)[j - 1]);
      return (1.0 - t) * (*ys)[j - 1] + t * (*ys)[j];
    };
    u.breakpoints_.assign(xs->begin() + 1, xs->end() - 1);
    u.description_ = "radial-samples(linear)";
  }
  u.compute_bounds();
  return u;
}

MetricPotential MetricPotential::radial(Profile f, Profile du, Profile d2u, std::vector<double> breakpoints,
                                        std::string description) {
  if (!f) fail(ErrorCode::InvalidParams, "radial potential needs a profile");
  MetricPotential u;
  u.profile_ = std::move(f);
  if (du && d2u) {
    u.d1_ = std::move(du);
    u.d2_ = std::move(d2u);
  }
  u.breakpoints_ = std::move(breakpoints);
  u.description_ = std::move(description);
  u.compute_bounds();
  return u;
}

MetricPotential MetricPotential::general(General f, std::string description) {
  if (!f) fail(ErrorCode::InvalidParams, "general potential needs a function");
  MetricPotential u;
  u.general_ = std::move(f);
  u.description_ = std::move(description);
  u.compute_bounds();
  return u;
}

double MetricPotential::operator()(const PointP1& x) const { return profile_ ? profile_(x.s()) : general_(x); }

double MetricPotential::profile(double s) const {
  if (!profile_) fail(ErrorCode::NotRotationInvariant, "potential has no radial profile");
  return profile_(s);
}

double MetricPotential::d1(double s) const {
  if (!d1_) fail(ErrorCode::InvalidParams, "potential derivative not available");
  return d1_(s);
}

double MetricPotential::d2(double s) const {
  if (!d2_) fail(ErrorCode::InvalidParams, "potential second derivative not available");
  return d2_(s);
}

double MetricPotential::curvature_density(double s) const {
  if (!smooth()) return 1.0;
  return 1.0 + (1.0 - 2.0 * s) * d1_(s) + s * (1.0 - s) * d2_(s);
}

// --------------------------------------------------------------------- Symbol

Symbol Symbol::radial(std::function<double(double)> f, std::vector<double> breakpoints, std::string description) {
  Symbol s;
  s.profile_ = std::move(f);
  s.breakpoints_ = std::move(breakpoints);
  s.description_ = std::move(description);
  return s;
}

Symbol Symbol::general(std::function<double(const PointP1&)> f, std::string description) {
  Symbol s;
  s.general_ = std::move(f);
  s.description_ = std::move(description);
  return s;
}

Symbol Symbol::constant(double c) {
  return radial([c](double) { return c; }, {}, "constant");
}

Symbol Symbol::from_potential(const MetricPotential& u) {
  if (u.rotation_invariant())
    return radial([u](double s) { return u.profile(s); }, u.breakpoints(), u.description());
  return general([u](const PointP1& x) { return u(x); }, u.description());
}

double Symbol::operator()(const PointP1& x) const { return profile_ ? profile_(x.s()) : general_(x); }

double Symbol::profile(double s) const {
  if (!profile_) fail(ErrorCode::NotRotationInvariant, "symbol has no radial profile");
  return profile_(s);
}

// ---------------------------------------------------------------- quadrature

namespace {

void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  // Nodes and weights on [-1,1].
  const std::vector<double> z = boost::math::legendre_p_zeros<double>(n);
  x.clear();
  w.clear();
  for (auto it = z.rbegin(); it != z.rend(); ++it) {
    if (*it == 0.0) continue;
    x.push_back(-*it);
  }
  if (n % 2 == 1) x.push_back(0.0);
  for (double zi : z) {
    if (zi == 0.0) continue;
    x.push_back(zi);
  }
  w.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dp = boost::math::legendre_p_prime(n, x[i]);
    w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
  }
}

}  // namespace

QuadratureRule QuadratureRule::gauss_legendre(int nodes_per_piece, std::vector<double> breakpoints, int angular_nodes) {
  if (nodes_per_piece < 1) fail(ErrorCode::InvalidParams, "quadrature needs at least one node");
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> cuts{0.0};
  for (double b : breakpoints)
    if (b > cuts.back() + 1e-12 && b < 1.0 - 1e-12) cuts.push_back(b);
  cuts.push_back(1.0);

  std::vector<double> x, w;
  gauss_legendre_unit(nodes_per_piece, x, w);
  QuadratureRule rule;
  rule.nodes_per_piece = nodes_per_piece;
  rule.breakpoints.assign(cuts.begin() + 1, cuts.end() - 1);
  rule.angular_nodes = angular_nodes;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p], hi = cuts[p + 1];
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.nodes.push_back(lo + half * (x[i] + 1.0));
      rule.weights.push_back(half * w[i]);
    }
  }
  return rule;
}

QuadratureRule QuadratureRule::for_degree(int degree, std::vector<double> breakpoints) {
  return gauss_legendre(std::max(256, degree + 128), std::move(breakpoints));
}

QuadratureRule QuadratureRule::doubled() const {
  return gauss_legendre(2 * nodes_per_piece, breakpoints, angular_nodes > 0 ? 2 * angular_nodes : 0);
}

// ------------------------------------------------------------------ L2Model

L2Model::L2Model(SectionSpace space, MetricPotential u, std::optional<VolumeMode> volume,
                 std::optional<QuadratureRule> rule)
    : space_(space), u_(std::move(u)), volume_(volume.value_or(u_.default_volume())),
      rule_(rule ? std::move(*rule) : QuadratureRule::for_degree(space.degree(), u_.breakpoints())) {
  if (volume_ == VolumeMode::Curvature && !u_.smooth())
    fail(ErrorCode::InvalidParams, "curvature volume needs a smooth potential");
}

double L2Model::frame_weight(const PointP1& x) const {
  return std::exp(-static_cast<double>(space_.degree()) * u_(x));
}

double L2Model::total_volume() const { return static_cast<double>(space_.d()); }

double L2Model::volume_density(double s) const {
  const double rho = volume_ == VolumeMode::Curvature ? u_.curvature_density(s) : 1.0;
  if (!(rho > 0.0)) fail(ErrorCode::NonPositiveVolume, "curvature weight is not positive at s = " + std::to_string(s));
  return static_cast<double>(space_.d()) * rho;
}

std::vector<L2Model::Node> L2Model::product_nodes(const QuadratureRule& rule) const {
  const int m = rule.angular_for(space_.degree());
  std::vector<Node> out;
  out.reserve(rule.nodes.size() * static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    const double vol = volume_density(s);
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / m;
      out.push_back(Node{PointP1::from_moment(s, theta), rule.weights[i] * vol / m});
    }
  }
  return out;
}

RadialMoments radial_moments(const L2Model& model, const QuadratureRule& rule,
                             const std::function<double(double)>& f) {
  const MetricPotential& u = model.metric();
  if (!u.rotation_invariant()) fail(ErrorCode::NotRotationInvariant, "radial moments need a radial metric");
  const int n = model.space().degree();
  const std::size_t q = rule.nodes.size();
  std::vector<double> base(q), ls(q), l1s(q), fv(q, 1.0);
  for (std::size_t i = 0; i < q; ++i) {
    const double s = rule.nodes[i];
    base[i] = std::log(rule.weights[i]) + std::log(model.volume_density(s)) - n * u.profile(s);
    ls[i] = std::log(s);
    l1s[i] = std::log1p(-s);
    if (f) fv[i] = f(s);
  }
  RadialMoments out{RVector(n + 1), RVector(n + 1)};
  std::vector<double> ell(q);
  for (int r = 0; r <= n; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q; ++i) {
      ell[i] = (n - r) * ls[i] + r * l1s[i] + base[i];
      mx = std::max(mx, ell[i]);
    }
    double acc = 0.0, accf = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      const double e = std::exp(ell[i] - mx);
      acc += e;
      accf += e * fv[i];
    }
    out.log_mass(r) = mx + std::log(acc);
    out.weighted(r) = accf / acc;
  }
  return out;
}

HermitianNorm hilb_quadrature(const L2Model& model) { return hilb_quadrature(model, model.rule()); }

HermitianNorm hilb_quadrature(const L2Model& model, const QuadratureRule& rule) {
  const SectionSpace& sp = model.space();
  if (model.metric().rotation_invariant()) {
    const RadialMoments m = radial_moments(model, rule);
    RVector g = m.log_mass.array().exp();
    if (!(g.minCoeff() > 0.0) || !g.allFinite()) fail(ErrorCode::Numerical, "Gram entries under- or overflow");
    return HermitianNorm::diagonal(g, sp.basis_label());
  }
  const Index dim = sp.dim();
  CMatrix g = CMatrix::Zero(dim, dim);
  for (const auto& node : model.product_nodes(rule)) {
    const CVector e = evaluate_sections(sp, node.x);
    g.noalias() += (node.weight * model.frame_weight(node.x)) * (e.conjugate() * e.transpose());
  }
  return make_norm(0.5 * (g + g.adjoint()), sp.basis_label());
}

RVector fs_gram_diagonal(int degree, double volume) {
  RVector g(degree + 1);
  const double l = std::lgamma(degree + 2.0);
  for (int r = 0; r <= degree; ++r) g(r) = volume * std::exp(std::lgamma(r + 1.0) + std::lgamma(degree - r + 1.0) - l);
  return g;
}

HermitianNorm hilb_fs_closed_form(int degree, double volume, const std::string& label) {
  if (degree < 0) fail(ErrorCode::InvalidParams, "degree must be nonnegative");
  return HermitianNorm::diagonal(fs_gram_diagonal(degree, volume),
                                 label.empty() ? "O(" + std::to_string(degree) + ")" : label);
}

// ------------------------------------------------------ evaluation, products

CVector evaluate_sections(int degree, const PointP1& x) {
  std::vector<cplx> pa(static_cast<std::size_t>(degree) + 1), pb(static_cast<std::size_t>(degree) + 1);
  pa[0] = pb[0] = 1.0;
  for (int i = 1; i <= degree; ++i) {
    pa[static_cast<std::size_t>(i)] = pa[static_cast<std::size_t>(i - 1)] * x.a();
    pb[static_cast<std::size_t>(i)] = pb[static_cast<std::size_t>(i - 1)] * x.b();
  }
  CVector e(degree + 1);
  for (int r = 0; r <= degree; ++r) e(r) = pa[static_cast<std::size_t>(degree - r)] * pb[static_cast<std::size_t>(r)];
  return e;
}

CVector evaluate_sections(const SectionSpace& space, const PointP1& x) {
  return evaluate_sections(space.degree(), x);
}

CMatrix multiplication_matrix(int k, int l) {
  if (k < 0 || l < 0) fail(ErrorCode::InvalidParams, "degrees must be nonnegative");
  CMatrix m = CMatrix::Zero(k + l + 1, (k + 1) * (l + 1));
  for (int r = 0; r <= k; ++r)
    for (int q = 0; q <= l; ++q) m(r + q, r * (l + 1) + q) = 1.0;
  return m;
}

CVector multiply_sections(const CVector& f, const CVector& g) {
  CVector out = CVector::Zero(f.size() + g.size() - 1);
  for (Index r = 0; r < f.size(); ++r)
    for (Index q = 0; q < g.size(); ++q) out(r + q) += f(r) * g(q);
  return out;
}

}  // namespace bergweight
