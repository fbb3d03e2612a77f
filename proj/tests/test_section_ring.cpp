#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "bergweight/section_ring.hpp"

using namespace bergweight;

namespace {

// r!(N-r)!/(N+1)! = 1 / ((N+1) C(N, r)), binomial built in long double.
double fs_entry(int n, int r) {
  long double c = 1.0L;
  for (int j = 1; j <= r; ++j) c = c * (n - r + j) / j;
  return static_cast<double>(1.0L / ((n + 1) * c));
}

// Composite Simpson on [0,1].
double simpson(const std::function<double(double)>& f, int cells) {
  const double h = 1.0 / cells;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < cells; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(PointTest, Normalisation) {
  const PointP1 x(cplx(0.0, 2.0), cplx(1.0, 1.0));
  EXPECT_NEAR(std::norm(x.a()) + std::norm(x.b()), 1.0, 1e-15);
  EXPECT_NEAR(x.a().imag(), 0.0, 1e-15);
  EXPECT_GT(x.a().real(), 0.0);
  const PointP1 y = PointP1::from_moment(0.3, 1.2);
  EXPECT_NEAR(y.s(), 0.3, 1e-15);
  EXPECT_NEAR(y.theta(), 1.2, 1e-14);
  EXPECT_THROW(PointP1(0.0, 0.0), Error);
}

TEST(SectionSpaceTest, Dimensions) {
  const SectionSpace sp(5, 2);
  EXPECT_EQ(sp.degree(), 10);
  EXPECT_EQ(sp.dim(), 11);
}

TEST(EvaluateTest, Monomials) {
  const PointP1 x(cplx(0.6, 0.0), cplx(0.0, 0.8));
  const CVector e = evaluate_sections(3, x);
  for (int r = 0; r <= 3; ++r)
    EXPECT_LT(std::abs(e(r) - std::pow(x.a(), 3 - r) * std::pow(x.b(), r)), 1e-15);
}

TEST(MultiplicationTest, ProductOfSectionsEvaluates) {
  CVector f(3), g(4);
  f << 1.0, cplx(0.0, 2.0), -1.0;
  g << 0.5, 1.0, cplx(1.0, -1.0), 3.0;
  const CVector fg = multiply_sections(f, g);
  ASSERT_EQ(fg.size(), 6);
  const PointP1 x = PointP1::from_moment(0.37, 0.9);
  const cplx lhs = evaluate_sections(2, x).transpose() * f;
  const cplx rhs = evaluate_sections(3, x).transpose() * g;
  const cplx prod = evaluate_sections(5, x).transpose() * fg;
  EXPECT_LT(std::abs(lhs * rhs - prod), 1e-13);
  const CMatrix m = multiplication_matrix(2, 3);
  EXPECT_EQ(m.rows(), 6);
  EXPECT_EQ(m.cols(), 12);
}

TEST(HilbTest, FubiniStudyClosedForm) {
  for (int n : {0, 1, 5, 17, 64}) {
    const L2Model model(SectionSpace(n, 1), MetricPotential::constant(0.0));
    const HermitianNorm h = hilb_quadrature(model);
    ASSERT_TRUE(h.is_diagonal());
    for (int r = 0; r <= n; ++r) EXPECT_NEAR(h.gram()(r, r).real() / fs_entry(n, r), 1.0, 1e-12) << n << " " << r;
  }
}

TEST(HilbTest, ConstantShiftScales) {
  const int n = 9;
  const L2Model m0(SectionSpace(n), MetricPotential::constant(0.0));
  const L2Model m1(SectionSpace(n), MetricPotential::constant(0.25));
  const HermitianNorm h0 = hilb_quadrature(m0), h1 = hilb_quadrature(m1);
  for (int r = 0; r <= n; ++r)
    EXPECT_NEAR(h1.gram()(r, r).real(), std::exp(-0.25 * n) * h0.gram()(r, r).real(), 1e-15);
}

TEST(HilbTest, MomentLinearAgainstSimpson) {
  const double c1 = 0.4;
  const int n = 12;
  const MetricPotential u = MetricPotential::moment_linear(0.1, c1);
  const L2Model model(SectionSpace(n), u);
  EXPECT_EQ(model.volume(), VolumeMode::Curvature);
  const HermitianNorm h = hilb_quadrature(model);
  for (int r = 0; r <= n; r += 3) {
    const double oracle = simpson(
        [&](double s) {
          return std::pow(s, n - r) * std::pow(1.0 - s, r) * std::exp(-n * (0.1 + c1 * s)) * (1.0 + (1.0 - 2.0 * s) * c1);
        },
        20000);
    EXPECT_NEAR(h.gram()(r, r).real() / oracle, 1.0, 1e-10);
  }
}

TEST(HilbTest, GeneralMetricAgreesWithRadialPath) {
  const int n = 6;
  const MetricPotential radial = MetricPotential::moment_linear(0.0, 0.3);
  const MetricPotential general = MetricPotential::general([](const PointP1& x) { return 0.3 * x.s(); });
  const L2Model a(SectionSpace(n), radial, VolumeMode::FixedBackground);
  const L2Model b(SectionSpace(n), general, VolumeMode::FixedBackground);
  const HermitianNorm ha = hilb_quadrature(a), hb = hilb_quadrature(b);
  EXPECT_LT((ha.gram() - hb.gram()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(HilbTest, NonRadialMetricIsHermitian) {
  const MetricPotential u = MetricPotential::general(
      [](const PointP1& x) { return 0.2 * std::real(x.a() * std::conj(x.b())); });
  const L2Model m(SectionSpace(4), u, VolumeMode::FixedBackground);
  const HermitianNorm h = hilb_quadrature(m);
  EXPECT_LT((h.gram() - h.gram().adjoint()).norm(), 1e-14);
  EXPECT_GT(std::abs(h.gram()(0, 1)), 1e-4);
}

TEST(L2ModelTest, VolumeErrors) {
  const MetricPotential rough = MetricPotential::radial_samples({0.0, 0.5, 1.0}, {0.0, 0.1, 0.0}, false);
  EXPECT_FALSE(rough.smooth());
  try {
    L2Model(SectionSpace(3), rough, VolumeMode::Curvature);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
  }
  const L2Model bad(SectionSpace(3), MetricPotential::moment_linear(0.0, 3.0));
  try {
    bad.volume_density(1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveVolume);
  }
}

TEST(MetricTest, PolynomialDerivatives) {
  const MetricPotential u = MetricPotential::moment_polynomial({1.0, -2.0, 3.0});
  EXPECT_NEAR(u.profile(0.5), 1.0 - 1.0 + 0.75, 1e-15);
  EXPECT_NEAR(u.d1(0.5), -2.0 + 3.0, 1e-15);
  EXPECT_NEAR(u.d2(0.5), 6.0, 1e-15);
  EXPECT_NEAR(u.curvature_density(0.25), 1.0 + 0.5 * (-2.0 + 1.5) + 0.1875 * 6.0, 1e-14);
}

TEST(MetricTest, CubicSamplesAreSmooth) {
  std::vector<double> s, v;
  for (int i = 0; i <= 20; ++i) {
    s.push_back(i / 20.0);
    v.push_back(0.3 * s.back() * s.back());
  }
  const MetricPotential u = MetricPotential::radial_samples(s, v, true);
  EXPECT_TRUE(u.smooth());
  EXPECT_NEAR(u.profile(0.33), 0.3 * 0.33 * 0.33, 1e-5);
  EXPECT_NEAR(u.d1(0.4), 0.6 * 0.4, 1e-3);
}

TEST(QuadratureTest, WeightsSumToOneAndSplit) {
  const QuadratureRule r = QuadratureRule::gauss_legendre(8, {0.3});
  double sum = 0.0;
  for (double w : r.weights) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(r.nodes.size(), 16u);
  // Exact on |s - 0.3| with the split.
  double abs_int = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) abs_int += r.weights[i] * std::abs(r.nodes[i] - 0.3);
  EXPECT_NEAR(abs_int, 0.5 * (0.09 + 0.49), 1e-15);
}
