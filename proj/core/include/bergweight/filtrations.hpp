#pragma once

// Monomial-diagonal filtrations on the section ring of (P^1, O(d)).
// Weights are indexed by the power i of x in x^i y^{kd-i}; ord_0 of that
// monomial is i.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bergweight/herm_core.hpp"
#include "bergweight/measures.hpp"

namespace bergweight {

enum class CapMode { None, ScaledCap, HardCap };

class RingFiltration {
 public:
  using WeightFn = std::function<double(int k, int i)>;

  /// `bound` is a constant C with w_k <= C k; `max_degree` (if set) is the
  /// largest k the weight function is defined for.
  RingFiltration(int d, WeightFn w, std::string description, double bound, bool integral,
                 bool finitely_generated, std::optional<int> max_degree = std::nullopt);

  int d() const { return d_; }
  double weight(int k, int i) const;
  /// Weights of the degree-k basis in section-space order (x-power kd, kd-1, ..., 0).
  std::vector<double> weights(int k) const;
  Filtration at_degree(int k) const;

  const std::string& description() const { return description_; }
  double bound() const { return bound_; }
  bool integral() const { return integral_; }
  bool finitely_generated() const { return finitely_generated_; }
  std::optional<int> max_degree() const { return max_degree_; }

 private:
  int d_;
  WeightFn w_;
  std::string description_;
  double bound_;
  bool integral_;
  bool finitely_generated_;
  std::optional<int> max_degree_;
};

struct VanishingParams {
  /// ScaledCap: w = k min(i / scale, 1).
  double scale = 1.0;
  /// HardCap: w = min(i, cap k).
  double cap = 1.0;
};

RingFiltration vanishing_order_filtration(int d, CapMode mode, VanishingParams params = {});
RingFiltration zero_filtration(int d);
/// Explicit weights per degree, in section-space order.
RingFiltration table_filtration(int d, std::map<int, std::vector<double>> weights);
/// Multiplies every weight by `factor`.
RingFiltration scaled_filtration(const RingFiltration& f, double factor);
RingFiltration floor_filtration(const RingFiltration& f);
RingFiltration cap_filtration(const RingFiltration& f, double c);
/// Filtration generated by the degrees 1..k0 of f, tabulated up to max_degree.
RingFiltration generated_filtration(const RingFiltration& f, int k0, int max_degree = 64);

struct SubmultiplicativityAudit {
  bool ok = true;
  int pairs_checked = 0;
  double worst_defect = 0.0;  ///< max of w_k(m1) + w_l(m2) - w_{k+l}(m1 m2)
  std::string first_violation;
};

SubmultiplicativityAudit audit_submultiplicativity(const RingFiltration& f, int max_degree = 8);

/// Weights with multiplicity, decreasing.
std::vector<double> jumping_numbers(const RingFiltration& f, int k);
Measure jumping_measure(const RingFiltration& f, int k);

struct VolumeEstimate {
  int k_half;
  double estimate_half;
  int k_max;
  double estimate;
};

VolumeEstimate vol(const RingFiltration& f, int k_max);

}  // namespace bergweight
