#include "bergweight/filtrations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace bergweight {

RingFiltration::RingFiltration(int d, WeightFn w, std::string description, double bound, bool integral,
                               bool finitely_generated, std::optional<int> max_degree)
    : d_(d), w_(std::move(w)), description_(std::move(description)), bound_(bound), integral_(integral),
      finitely_generated_(finitely_generated), max_degree_(max_degree) {
  if (d < 1) fail(ErrorCode::InvalidParams, "line bundle degree must be >= 1");
  if (!w_) fail(ErrorCode::InvalidParams, "filtration needs a weight function");
}

double RingFiltration::weight(int k, int i) const {
  if (k < 0 || i < 0 || i > k * d_) fail(ErrorCode::InvalidParams, "monomial outside the section space");
  if (max_degree_ && k > *max_degree_)
    fail(ErrorCode::InvalidParams, "filtration is tabulated only up to degree " + std::to_string(*max_degree_));
  return w_(k, i);
}

std::vector<double> RingFiltration::weights(int k) const {
  const int n = k * d_;
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r <= n; ++r) w[static_cast<std::size_t>(r)] = weight(k, n - r);
  return w;
}

Filtration RingFiltration::at_degree(int k) const { return Filtration::diagonal(weights(k)); }

RingFiltration vanishing_order_filtration(int d, CapMode mode, VanishingParams params) {
  if (d < 1) fail(ErrorCode::InvalidParams, "line bundle degree must be >= 1");
  switch (mode) {
    case CapMode::None:
      return RingFiltration(d, [](int, int i) { return static_cast<double>(i); }, "vanishing-order", d, true, true);
    case CapMode::ScaledCap: {
      const double scale = params.scale;
      if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidParams, "scale must be positive");
      return RingFiltration(
          d, [scale](int k, int i) { return k * std::min(i / scale, 1.0); }, "vanishing-order(scaled-cap)", 1.0,
          scale == 1.0, false);
    }
    case CapMode::HardCap: {
      const double cap = params.cap;
      if (!(cap >= 0.0) || !std::isfinite(cap)) fail(ErrorCode::InvalidParams, "cap must be nonnegative");
      return RingFiltration(
          d, [cap](int k, int i) { return std::min(static_cast<double>(i), cap * k); }, "vanishing-order(hard-cap)",
          std::min<double>(cap, d), cap == std::floor(cap), true);
    }
  }
  fail(ErrorCode::InvalidParams, "unknown cap mode");
}

RingFiltration zero_filtration(int d) {
  return RingFiltration(d, [](int, int) { return 0.0; }, "zero", 0.0, true, true);
}

RingFiltration table_filtration(int d, std::map<int, std::vector<double>> weights) {
  if (weights.empty()) fail(ErrorCode::InvalidParams, "table filtration needs at least one degree");
  double bound = 0.0;
  bool integral = true;
  for (const auto& [k, w] : weights) {
    if (k < 0 || static_cast<int>(w.size()) != k * d + 1)
      fail(ErrorCode::InvalidParams, "table degree " + std::to_string(k) + " needs kd+1 weights");
    for (double v : w) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidParams, "table weights must be finite");
      if (k > 0) bound = std::max(bound, v / k);
      integral &= v == std::floor(v);
    }
  }
  const int kmax = weights.rbegin()->first;
  for (int k = 1; k <= kmax; ++k)
    if (!weights.count(k)) fail(ErrorCode::InvalidParams, "table filtration is missing degree " + std::to_string(k));
  auto tab = std::make_shared<const std::map<int, std::vector<double>>>(std::move(weights));
  auto fn = [tab, d](int k, int i) {
    auto it = tab->find(k);
    if (it == tab->end() && k == 0) return 0.0;
    if (it == tab->end()) fail(ErrorCode::InvalidParams, "table has no degree " + std::to_string(k));
    return it->second[static_cast<std::size_t>(k * d - i)];
  };
  return RingFiltration(d, fn, "table", bound, integral, false, kmax);
}

RingFiltration scaled_filtration(const RingFiltration& f, double factor) {
  auto fn = [f, factor](int k, int i) { return factor * f.weight(k, i); };
  return RingFiltration(f.d(), fn, f.description() + "*scaled", std::abs(factor) * f.bound(), false,
                        f.finitely_generated(), f.max_degree());
}

RingFiltration floor_filtration(const RingFiltration& f) {
  auto fn = [f](int k, int i) {
    const double w = f.weight(k, i);
    return std::floor(w + 1e-12 * std::max(1.0, std::abs(w)));
  };
  return RingFiltration(f.d(), fn, "floor(" + f.description() + ")", f.bound(), true, f.finitely_generated(),
                        f.max_degree());
}

RingFiltration cap_filtration(const RingFiltration& f, double c) {
  auto fn = [f, c](int k, int i) { return std::min(f.weight(k, i), c * k); };
  return RingFiltration(f.d(), fn, "cap(" + f.description() + ")", std::min(f.bound(), std::max(c, 0.0)),
                        f.integral() && c == std::floor(c), f.finitely_generated(), f.max_degree());
}

RingFiltration generated_filtration(const RingFiltration& f, int k0, int max_degree) {
  if (k0 < 1 || max_degree < 1) fail(ErrorCode::InvalidParams, "generated filtration needs k0 >= 1");
  if (f.max_degree() && *f.max_degree() < k0) fail(ErrorCode::InvalidParams, "generating degrees exceed the table");
  const int d = f.d();
  const double ninf = -std::numeric_limits<double>::infinity();
  // best[l][i]: largest weight sum over factorisations of x^i y^{ld-i} into generators.
  auto best = std::make_shared<std::vector<std::vector<double>>>(static_cast<std::size_t>(max_degree) + 1);
  auto& b = *best;
  b[0] = {0.0};
  for (int l = 1; l <= max_degree; ++l) {
    b[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(l * d) + 1, ninf);
    for (int j = 1; j <= std::min(k0, l); ++j) {
      const auto& prev = b[static_cast<std::size_t>(l - j)];
      for (int p = 0; p <= j * d; ++p) {
        const double wj = f.weight(j, p);
        for (std::size_t q = 0; q < prev.size(); ++q) {
          if (prev[q] == ninf) continue;
          double& dst = b[static_cast<std::size_t>(l)][q + static_cast<std::size_t>(p)];
          dst = std::max(dst, prev[q] + wj);
        }
      }
    }
  }
  std::shared_ptr<const std::vector<std::vector<double>>> table = best;
  auto fn = [table](int k, int i) {
    if (k == 0) return 0.0;
    return (*table)[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  };
  return RingFiltration(d, fn, "generated(" + f.description() + ", k0=" + std::to_string(k0) + ")", f.bound(),
                        f.integral(), true, max_degree);
}

SubmultiplicativityAudit audit_submultiplicativity(const RingFiltration& f, int max_degree) {
  SubmultiplicativityAudit a;
  const int d = f.d();
  const int limit = f.max_degree() ? *f.max_degree() : std::numeric_limits<int>::max();
  for (int k = 0; k <= max_degree; ++k)
    for (int l = 0; l <= max_degree; ++l) {
      if (k + l > limit) continue;
      for (int i = 0; i <= k * d; ++i)
        for (int p = 0; p <= l * d; ++p) {
          ++a.pairs_checked;
          const double defect = f.weight(k, i) + f.weight(l, p) - f.weight(k + l, i + p);
          const double tol = 1e-12 * std::max(1.0, std::abs(f.weight(k + l, i + p)));
          if (defect > a.worst_defect) a.worst_defect = defect;
          if (defect > tol && a.ok) {
            a.ok = false;
            std::ostringstream os;
            os << "w_" << k + l << "(x^" << i + p << ") < w_" << k << "(x^" << i << ") + w_" << l << "(x^" << p
               << ") by " << defect;
            a.first_violation = os.str();
          }
        }
    }
  return a;
}

std::vector<double> jumping_numbers(const RingFiltration& f, int k) {
  std::vector<double> w = f.weights(k);
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

Measure jumping_measure(const RingFiltration& f, int k) {
  if (k < 1) fail(ErrorCode::InvalidParams, "jumping measure needs k >= 1");
  const std::vector<double> e = jumping_numbers(f, k);
  std::vector<Measure::Atom> atoms;
  const double mass = 1.0 / static_cast<double>(e.size());
  for (double v : e) atoms.push_back({v / k, mass});
  return Measure::from_atoms(std::move(atoms));
}

VolumeEstimate vol(const RingFiltration& f, int k_max) {
  if (k_max < 2) fail(ErrorCode::InvalidParams, "vol needs k_max >= 2");
  auto est = [&](int k) {
    double s = 0.0;
    for (double e : jumping_numbers(f, k)) s += e;
    return s / (static_cast<double>(k) * k);
  };
  const int kh = k_max / 2;
  return VolumeEstimate{kh, est(kh), k_max, est(k_max)};
}

}  // namespace bergweight
