#include "bergweight/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace bergweight {

namespace {

void require_space(const L2Model& model, const HermitianNorm& norm) {
  if (norm.dim() != model.space().dim())
    fail(ErrorCode::DimensionMismatch, "norm and section space have different dimensions");
}

QuadratureRule rule_for(const Symbol& f, const L2Model& model, const ToeplitzOptions& options) {
  if (options.rule) return *options.rule;
  std::vector<double> bps = model.rule().breakpoints;
  bps.insert(bps.end(), f.breakpoints().begin(), f.breakpoints().end());
  return QuadratureRule::gauss_legendre(model.rule().nodes_per_piece, std::move(bps), model.rule().angular_nodes);
}

CMatrix congruence_inverse(const HermitianNorm& norm, const CMatrix& m) {
  // L^{-1} M L^{-*}
  const CMatrix y = norm.solve_lower(m);
  return norm.solve_lower(y.adjoint()).adjoint();
}

}  // namespace

CVector kernel_vector(const HermitianNorm& norm, const PointP1& x) {
  const int degree = static_cast<int>(norm.dim()) - 1;
  return norm.solve_lower(evaluate_sections(degree, x).conjugate());
}

double bergman_diag(const L2Model& model, const HermitianNorm& norm, const PointP1& x) {
  require_space(model, norm);
  return kernel_vector(norm, x).squaredNorm() * model.frame_weight(x);
}

double bergman_offdiag_sq(const L2Model& model, const HermitianNorm& norm, const PointP1& x, const PointP1& y) {
  require_space(model, norm);
  const cplx c = kernel_vector(norm, x).dot(kernel_vector(norm, y));
  return std::norm(c) * model.frame_weight(x) * model.frame_weight(y);
}

CVector peak_section(const L2Model& model, const HermitianNorm& norm, const PointP1& x) {
  require_space(model, norm);
  const CVector w = kernel_vector(norm, x);
  const double b = w.squaredNorm();
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorCode::ZeroKernel, "Bergman kernel vanishes at the point");
  // G^{-1} conj(E) = L^{-*} w.
  return norm.from_orthonormal(w) / std::sqrt(b);
}

double section_norm(const HermitianNorm& norm, const CVector& c) { return std::sqrt(norm.norm_squared(c)); }

double diagonal_kernel(const OperatorOnSections& t, const L2Model& model, const PointP1& x) {
  require_space(model, t.reference());
  const CVector w = kernel_vector(t.reference(), x);
  return (w.adjoint() * t.matrix() * w)(0, 0).real() * model.frame_weight(x);
}

OperatorOnSections weighted_operator(const RingFiltration& f, const std::function<double(double)>& g,
                                     const SectionSpace& space, const HermitianNorm& norm) {
  if (space.k() < 1) fail(ErrorCode::InvalidParams, "weighted operators need k >= 1");
  if (f.d() != space.d()) fail(ErrorCode::DimensionMismatch, "filtration and section space use different O(d)");
  const OperatorOnSections a = weight_operator(f.at_degree(space.k()), norm) * (1.0 / space.k());
  return functional_calculus(a, g);
}

double weighted_bergman(const RingFiltration& f, const std::function<double(double)>& g, const L2Model& model,
                        const HermitianNorm& norm, const PointP1& x) {
  return diagonal_kernel(weighted_operator(f, g, model.space(), norm), model, x);
}

CMatrix moment_matrix(const Symbol& f, const L2Model& model, const QuadratureRule& rule) {
  const SectionSpace& sp = model.space();
  const Index dim = sp.dim();
  if (model.metric().rotation_invariant() && f.rotation_invariant()) {
    const RadialMoments m = radial_moments(model, rule, [&f](double s) { return f.profile(s); });
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Index r = 0; r < dim; ++r) out(r, r) = std::exp(m.log_mass(r)) * m.weighted(r);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& node : model.product_nodes(rule)) {
    const CVector e = evaluate_sections(sp, node.x);
    out.noalias() += (node.weight * model.frame_weight(node.x) * f(node.x)) * (e.conjugate() * e.transpose());
  }
  return 0.5 * (out + out.adjoint());
}

OperatorOnSections toeplitz_matrix(const Symbol& f, const L2Model& model, const HermitianNorm& norm,
                                   const ToeplitzOptions& options) {
  require_space(model, norm);
  const QuadratureRule rule = rule_for(f, model, options);
  const CMatrix t = congruence_inverse(norm, moment_matrix(f, model, rule));
  if (options.self_test) {
    const CMatrix t2 = congruence_inverse(norm, moment_matrix(f, model, rule.doubled()));
    const double scale = std::max(1.0, t2.cwiseAbs().maxCoeff());
    const double diff = (t - t2).cwiseAbs().maxCoeff();
    if (diff > options.tolerance * scale)
      fail(ErrorCode::QuadratureUnderResolved,
           "Toeplitz matrix changes by " + std::to_string(diff) + " under a doubled rule");
  }
  return OperatorOnSections(t, norm);
}

double symbol_distance(const OperatorOnSections& t, const Symbol& f, const L2Model& model, double p,
                       const ToeplitzOptions& options) {
  const OperatorOnSections tf = toeplitz_matrix(f, model, t.reference(), options);
  return schatten_norm(t - tf, p);
}

Measure spectral_measure(const OperatorOnSections& t) {
  const RVector ev = t.eigenvalues();
  std::vector<Measure::Atom> atoms;
  const double mass = 1.0 / static_cast<double>(ev.size());
  for (Index i = 0; i < ev.size(); ++i) atoms.push_back({ev(i), mass});
  return Measure::from_atoms(std::move(atoms));
}

Measure pushforward_measure(const Symbol& f, const L2Model& model, int resolution) {
  if (resolution < 8) fail(ErrorCode::InvalidParams, "pushforward resolution too small");
  struct Sample {
    double value;
    double mass;
  };
  std::vector<Sample> samples;
  const bool radial = f.rotation_invariant();
  const int cells = radial ? 16 * resolution : resolution;
  const int angles = radial ? 1 : 64;
  double total = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double s = (i + 0.5) / cells;
    const double dens = model.volume_density(s) / cells / angles;
    for (int j = 0; j < angles; ++j) {
      const double v = radial ? f.profile(s) : f(PointP1::from_moment(s, 2.0 * std::numbers::pi * j / angles));
      if (!std::isfinite(v)) fail(ErrorCode::Numerical, "symbol is not finite");
      samples.push_back({v, dens});
      total += dens;
    }
  }
  double lo = samples.front().value, hi = lo;
  for (const Sample& s : samples) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  if (hi - lo <= 1e-14 * std::max(1.0, std::abs(lo))) return Measure::dirac(0.5 * (lo + hi));

  const int bins = resolution;
  const double width = (hi - lo) / bins;
  std::vector<double> bin_mass(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::map<double, double>> flat(static_cast<std::size_t>(bins));
  for (const Sample& s : samples) {
    int b = static_cast<int>(std::floor((s.value - lo) / width));
    b = std::clamp(b, 0, bins - 1);
    bin_mass[static_cast<std::size_t>(b)] += s.mass / total;
    flat[static_cast<std::size_t>(b)][s.value] += s.mass / total;
  }
  Measure m;
  for (int b = 0; b < bins; ++b) {
    const std::size_t bb = static_cast<std::size_t>(b);
    if (bin_mass[bb] == 0.0) continue;
    double neighbours = 0.0;
    int count = 0;
    if (b > 0) {
      neighbours += bin_mass[bb - 1];
      ++count;
    }
    if (b + 1 < bins) {
      neighbours += bin_mass[bb + 1];
      ++count;
    }
    neighbours /= std::max(count, 1);
    auto dominant = std::max_element(flat[bb].begin(), flat[bb].end(),
                                     [](const auto& x, const auto& y) { return x.second < y.second; });
    const double blo = lo + b * width, bhi = (b + 1 == bins) ? hi : lo + (b + 1) * width;
    if (dominant->second > 10.0 * neighbours) {
      m.add_atom(dominant->first, dominant->second);
      const double rest = bin_mass[bb] - dominant->second;
      if (rest > 0.0) m.add_uniform(blo, bhi, rest);
    } else {
      m.add_uniform(blo, bhi, bin_mass[bb]);
    }
  }
  return m;
}

}  // namespace bergweight
