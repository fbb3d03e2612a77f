#include "bergweight/toric.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/minima.hpp>

namespace bergweight {

namespace {

constexpr double kRhoMax = 40.0;
constexpr int kScan = 801;

double softplus(double r) { return r > 0 ? r + std::log1p(std::exp(-r)) : std::log1p(std::exp(r)); }
double logistic(double r) { return r >= 0 ? 1.0 / (1.0 + std::exp(-r)) : std::exp(r) / (1.0 + std::exp(r)); }

double full_potential(const MetricPotential& u, double rho) { return softplus(rho) + u.profile(logistic(rho)); }

double dual_at(const MetricPotential& u, double sigma, const std::vector<double>& scan_rho,
               const std::vector<double>& scan_v) {
  if (sigma <= 0.0) return -u.profile(0.0);
  if (sigma >= 1.0) return -u.profile(1.0);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scan_rho.size(); ++i) {
    const double g = sigma * scan_rho[i] - scan_v[i];
    if (g > best_val) {
      best_val = g;
      best = i;
    }
  }
  const double lo = scan_rho[best == 0 ? 0 : best - 1];
  const double hi = scan_rho[std::min(best + 1, scan_rho.size() - 1)];
  auto neg = [&](double r) { return -(sigma * r - full_potential(u, r)); };
  const auto res = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2 + 4);
  return std::max(best_val, -res.second);
}

void lower_hull(std::vector<double>& x, std::vector<double>& y) {
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (h.size() >= 2) {
      const std::size_t a = h[h.size() - 2], b = h.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross <= 0.0) h.pop_back();
      else break;
    }
    h.push_back(i);
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j + 1 < h.size(); ++j) {
    const std::size_t a = h[j], b = h[j + 1];
    for (std::size_t i = a; i <= b; ++i) {
      const double t = (x[i] - x[a]) / (x[b] - x[a]);
      out[i] = (1.0 - t) * y[a] + t * y[b];
    }
  }
  if (h.size() == 1) out[h[0]] = y[h[0]];
  y = std::move(out);
}

double interpolate_uniform(const std::vector<double>& v, double t) {
  const double n = static_cast<double>(v.size() - 1);
  t = std::clamp(t, 0.0, 1.0) * n;
  std::size_t j = static_cast<std::size_t>(std::floor(t));
  if (j >= v.size() - 1) j = v.size() - 2;
  const double f = t - static_cast<double>(j);
  return (1.0 - f) * v[j] + f * v[j + 1];
}

}  // namespace

double LegendreDual::operator()(double s) const { return interpolate_uniform(value, s); }

LegendreDual legendre_dual(const MetricPotential& u, int grid) {
  if (!u.rotation_invariant()) fail(ErrorCode::NotRotationInvariant, "Legendre dual needs a radial potential");
  if (grid < 3) fail(ErrorCode::InvalidParams, "Legendre grid too small");
  std::vector<double> scan_rho(kScan), scan_v(kScan);
  for (int i = 0; i < kScan; ++i) {
    scan_rho[static_cast<std::size_t>(i)] = -kRhoMax + 2.0 * kRhoMax * i / (kScan - 1);
    scan_v[static_cast<std::size_t>(i)] = full_potential(u, scan_rho[static_cast<std::size_t>(i)]);
  }
  LegendreDual d;
  d.sigma.resize(static_cast<std::size_t>(grid));
  d.value.resize(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) {
    const double sigma = static_cast<double>(j) / (grid - 1);
    d.sigma[static_cast<std::size_t>(j)] = sigma;
    d.value[static_cast<std::size_t>(j)] = dual_at(u, sigma, scan_rho, scan_v);
  }
  lower_hull(d.sigma, d.value);
  return d;
}

void require_convex_potential(const MetricPotential& u) {
  if (!u.rotation_invariant()) fail(ErrorCode::NotRotationInvariant, "toric symbol needs radial potentials");
  constexpr int n = 6001;
  constexpr double h = 2.0 * 30.0 / (n - 1);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = full_potential(u, -30.0 + h * i);
  for (int i = 1; i + 1 < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    const double dd = v[j + 1] - 2.0 * v[j] + v[j - 1];
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(v[j]) + 1.0);
    if (dd < -tol) fail(ErrorCode::NotConvex, "full potential fails convexity near rho = " + std::to_string(-30.0 + h * i));
  }
}

double moment_map(const MetricPotential& u, double s) {
  if (u.smooth()) return s + s * (1.0 - s) * u.d1(s);
  constexpr double h = 1e-6;
  const double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
  const double du = (u.profile(hi) - u.profile(lo)) / (hi - lo);
  return s + s * (1.0 - s) * du;
}

MetricPotential toric_geodesic_phi(const MetricPotential& u0, const MetricPotential& u1) {
  require_convex_potential(u0);
  require_convex_potential(u1);
  if (u0.constant_value() && u1.constant_value()) {
    const double c = *u1.constant_value() - *u0.constant_value();
    return MetricPotential::radial([c](double) { return c; }, nullptr, nullptr, {}, "toric-phi");
  }
  const LegendreDual d0 = legendre_dual(u0), d1 = legendre_dual(u1);
  std::vector<double> diff(d0.value.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = d0.value[j] - d1.value[j];
  const double step = 1.0 / static_cast<double>(diff.size() - 1);
  auto spline = std::make_shared<const boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      diff.begin(), diff.end(), 0.0, step);
  return MetricPotential::radial(
      [spline, u0](double s) { return (*spline)(std::clamp(moment_map(u0, s), 0.0, 1.0)); }, nullptr, nullptr,
      u0.breakpoints(), "toric-phi");
}

double FiltrationSymbol::envelope(double sigma) const {
  sigma = std::clamp(sigma, 0.0, 1.0);
  auto it = std::upper_bound(hull_sigma.begin(), hull_sigma.end(), sigma);
  if (it == hull_sigma.end()) return hull_value.back();
  if (it == hull_sigma.begin()) return hull_value.front();
  const std::size_t j = static_cast<std::size_t>(std::distance(hull_sigma.begin(), it));
  const double t = (sigma - hull_sigma[j - 1]) / (hull_sigma[j] - hull_sigma[j - 1]);
  return (1.0 - t) * hull_value[j - 1] + t * hull_value[j];
}

namespace {

double invert_moment_map(const MetricPotential& u, double sigma) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (moment_map(u, mid) < sigma) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FiltrationSymbol filtration_symbol(const RingFiltration& f, const MetricPotential& u0, int degree) {
  if (!u0.rotation_invariant()) fail(ErrorCode::NotRotationInvariant, "filtration symbol needs a radial metric");
  if (degree < 1) fail(ErrorCode::InvalidParams, "symbol degree must be positive");
  if (f.max_degree()) degree = std::min(degree, *f.max_degree());
  const int d = f.d();
  const long n = static_cast<long>(degree) * d;

  // Upper hull, scanning x-power i = 0..Kd.
  std::vector<double> hx, hy;
  for (long i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    const double y = f.weight(degree, static_cast<int>(i)) / degree;
    while (hx.size() >= 2) {
      const std::size_t a = hx.size() - 2, b = hx.size() - 1;
      const double cross = (hx[b] - hx[a]) * (y - hy[a]) - (hy[b] - hy[a]) * (x - hx[a]);
      if (cross >= 0.0) {
        hx.pop_back();
        hy.pop_back();
      } else {
        break;
      }
    }
    hx.push_back(x);
    hy.push_back(y);
  }

  FiltrationSymbol out;
  out.hull_sigma = hx;
  out.hull_value = hy;
  out.degree = degree;
  double area = 0.0;
  for (std::size_t j = 1; j < hx.size(); ++j) area += 0.5 * (hy[j] + hy[j - 1]) * (hx[j] - hx[j - 1]);
  out.volume = d * area;

  std::vector<double> bps;
  for (std::size_t j = 1; j + 1 < hx.size(); ++j) bps.push_back(invert_moment_map(u0, hx[j]));
  auto hull = std::make_shared<const FiltrationSymbol>(out);
  out.symbol = Symbol::radial(
      [hull, u0](double s) { return hull->envelope(std::clamp(moment_map(u0, s), 0.0, 1.0)); }, std::move(bps),
      "filtration-symbol(" + f.description() + ")");
  return out;
}

}  // namespace bergweight
