#pragma once

#include <string>
#include <vector>

namespace bergweight {

/// Finite combination of point masses and uniform pieces on the real line.
class Measure {
 public:
  struct Atom {
    double location;
    double mass;
  };
  struct Uniform {
    double lo;
    double hi;
    double mass;
  };

  Measure() = default;
  /// Atoms are sorted by decreasing location; equal locations are merged.
  static Measure from_atoms(std::vector<Atom> atoms);
  static Measure from_samples(const std::vector<double>& values);
  static Measure dirac(double location) { return from_atoms({{location, 1.0}}); }

  Measure& add_atom(double location, double mass);
  Measure& add_uniform(double lo, double hi, double mass);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Uniform>& uniforms() const { return uniforms_; }
  double total_mass() const;

  /// mu((-inf, x]).
  double cdf(double x) const;
  /// mu((-inf, x)).
  double cdf_left(double x) const;
  /// Points where the distribution function may change slope or jump.
  std::vector<double> breakpoints() const;

 private:
  void normalise_atoms();

  std::vector<Atom> atoms_;
  std::vector<Uniform> uniforms_;
};

double kolmogorov_distance(const Measure& a, const Measure& b);

/// Atom-by-atom comparison of two purely atomic measures.
bool atomic_measures_equal(const Measure& a, const Measure& b, double tol);

}  // namespace bergweight
