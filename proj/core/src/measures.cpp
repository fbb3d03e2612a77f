#include "bergweight/measures.hpp"

#include <algorithm>
#include <cmath>

#include "bergweight/error.hpp"

namespace bergweight {

void Measure::normalise_atoms() {
  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location > b.location; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms_) {
    if (!merged.empty() && merged.back().location - a.location <= 1e-12 * std::max(1.0, std::abs(a.location)))
      merged.back().mass += a.mass;
    else merged.push_back(a);
  }
  atoms_ = std::move(merged);
}

Measure Measure::from_atoms(std::vector<Atom> atoms) {
  Measure m;
  m.atoms_ = std::move(atoms);
  for (const Atom& a : m.atoms_)
    if (!std::isfinite(a.location) || !(a.mass >= 0.0)) fail(ErrorCode::InvalidParams, "invalid atom");
  m.normalise_atoms();
  return m;
}

Measure Measure::from_samples(const std::vector<double>& values) {
  if (values.empty()) fail(ErrorCode::InvalidParams, "empty sample");
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  const double w = 1.0 / static_cast<double>(values.size());
  for (double v : values) atoms.push_back({v, w});
  return from_atoms(std::move(atoms));
}

Measure& Measure::add_atom(double location, double mass) {
  if (!std::isfinite(location) || !(mass >= 0.0)) fail(ErrorCode::InvalidParams, "invalid atom");
  atoms_.push_back({location, mass});
  normalise_atoms();
  return *this;
}

Measure& Measure::add_uniform(double lo, double hi, double mass) {
  if (!(hi > lo) || !(mass >= 0.0)) fail(ErrorCode::InvalidParams, "invalid uniform piece");
  uniforms_.push_back({lo, hi, mass});
  return *this;
}

double Measure::total_mass() const {
  double t = 0.0;
  for (const Atom& a : atoms_) t += a.mass;
  for (const Uniform& u : uniforms_) t += u.mass;
  return t;
}

double Measure::cdf(double x) const {
  double t = 0.0;
  for (const Atom& a : atoms_)
    if (a.location <= x) t += a.mass;
  for (const Uniform& u : uniforms_) t += u.mass * std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
  return t;
}

double Measure::cdf_left(double x) const {
  double t = 0.0;
  for (const Atom& a : atoms_)
    if (a.location < x) t += a.mass;
  for (const Uniform& u : uniforms_) t += u.mass * std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
  return t;
}

std::vector<double> Measure::breakpoints() const {
  std::vector<double> p;
  for (const Atom& a : atoms_) p.push_back(a.location);
  for (const Uniform& u : uniforms_) {
    p.push_back(u.lo);
    p.push_back(u.hi);
  }
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

double kolmogorov_distance(const Measure& a, const Measure& b) {
  // Between consecutive breakpoints both distribution functions are affine,
  // so the supremum is attained at a breakpoint or its left limit.
  std::vector<double> pts = a.breakpoints();
  const std::vector<double> pb = b.breakpoints();
  pts.insert(pts.end(), pb.begin(), pb.end());
  double d = 0.0;
  for (double x : pts) {
    d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
    d = std::max(d, std::abs(a.cdf_left(x) - b.cdf_left(x)));
  }
  return d;
}

bool atomic_measures_equal(const Measure& a, const Measure& b, double tol) {
  if (!a.uniforms().empty() || !b.uniforms().empty()) return false;
  const auto& x = a.atoms();
  const auto& y = b.atoms();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i].location - y[i].location) > tol || std::abs(x[i].mass - y[i].mass) > tol) return false;
  return true;
}

}  // namespace bergweight
