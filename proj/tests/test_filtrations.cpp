#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "bergweight/filtrations.hpp"

using namespace bergweight;

TEST(VanishingOrderTest, Weights) {
  const RingFiltration hard = vanishing_order_filtration(2, CapMode::HardCap);
  EXPECT_DOUBLE_EQ(hard.weight(3, 2), 2.0);
  EXPECT_DOUBLE_EQ(hard.weight(3, 5), 3.0);
  EXPECT_TRUE(hard.integral());
  const std::vector<double> w = hard.weights(1);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_DOUBLE_EQ(w[0], 1.0);  // x^2
  EXPECT_DOUBLE_EQ(w[2], 0.0);  // y^2

  const RingFiltration scaled = vanishing_order_filtration(1, CapMode::ScaledCap, {.scale = 4.0});
  EXPECT_DOUBLE_EQ(scaled.weight(8, 2), 4.0);
  EXPECT_DOUBLE_EQ(scaled.weight(8, 6), 8.0);
  EXPECT_FALSE(vanishing_order_filtration(1, CapMode::ScaledCap).finitely_generated());
  EXPECT_THROW(hard.weight(1, 3), Error);
}

TEST(AuditTest, GoodFiltrationsPass) {
  for (const RingFiltration& f : {vanishing_order_filtration(1, CapMode::ScaledCap),
                                  vanishing_order_filtration(2, CapMode::HardCap),
                                  vanishing_order_filtration(1, CapMode::None), zero_filtration(3)}) {
    const SubmultiplicativityAudit a = audit_submultiplicativity(f, 6);
    EXPECT_TRUE(a.ok) << f.description() << ": " << a.first_violation;
    EXPECT_GT(a.pairs_checked, 0);
  }
}

TEST(AuditTest, CatchesBadTable) {
  // w_1 = (1, 0) on x, y but w_2(x^2) = 0.
  const RingFiltration bad = table_filtration(1, {{1, {1.0, 0.0}}, {2, {0.0, 0.0, 0.0}}});
  const SubmultiplicativityAudit a = audit_submultiplicativity(bad, 2);
  EXPECT_FALSE(a.ok);
  EXPECT_NEAR(a.worst_defect, 2.0, 1e-15);
  EXPECT_NE(a.first_violation.find("w_2"), std::string::npos);
}

TEST(TableTest, Validation) {
  EXPECT_THROW(table_filtration(1, {}), Error);
  EXPECT_THROW(table_filtration(1, {{1, {0.0}}}), Error);
  try {
    table_filtration(1, {{1, {0.0, 0.0}}, {3, {0.0, 0.0, 0.0, 0.0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    EXPECT_NE(std::string(e.what()).find("missing degree 2"), std::string::npos);
  }
  const RingFiltration t = table_filtration(1, {{1, {1.0, 0.5}}});
  EXPECT_DOUBLE_EQ(t.weight(1, 1), 1.0);  // first entry is the highest x-power
  EXPECT_DOUBLE_EQ(t.weight(1, 0), 0.5);
  EXPECT_FALSE(t.integral());
  EXPECT_THROW(t.weight(2, 0), Error);
}

// Enumerate every ordered factorisation into degrees <= k0 directly.
namespace {
double brute_generated(const RingFiltration& f, int k0, int l, int i) {
  if (l == 0) return i == 0 ? 0.0 : -INFINITY;
  double best = -INFINITY;
  for (int j = 1; j <= std::min(k0, l); ++j)
    for (int p = 0; p <= std::min(i, j * f.d()); ++p) {
      if (i - p > (l - j) * f.d()) continue;
      best = std::max(best, f.weight(j, p) + brute_generated(f, k0, l - j, i - p));
    }
  return best;
}
}  // namespace

TEST(GeneratedTest, MatchesFactorisationEnumeration) {
  const RingFiltration base = vanishing_order_filtration(1, CapMode::ScaledCap, {.scale = 3.0});
  const RingFiltration g = generated_filtration(base, 2, 7);
  EXPECT_EQ(g.max_degree(), std::optional<int>(7));
  EXPECT_TRUE(g.finitely_generated());
  for (int l = 1; l <= 7; ++l)
    for (int i = 0; i <= l; ++i) EXPECT_NEAR(g.weight(l, i), brute_generated(base, 2, l, i), 1e-13) << l << " " << i;
  EXPECT_TRUE(audit_submultiplicativity(g, 3).ok);
  // Generated weights never exceed the source.
  for (int i = 0; i <= 7; ++i) EXPECT_LE(g.weight(7, i), base.weight(7, i) + 1e-13);
}

TEST(TransformTest, FloorCapScale) {
  const RingFiltration base = vanishing_order_filtration(1, CapMode::ScaledCap, {.scale = 3.0});
  const RingFiltration fl = floor_filtration(base);
  EXPECT_DOUBLE_EQ(fl.weight(2, 1), 0.0);  // 2/3
  EXPECT_DOUBLE_EQ(fl.weight(3, 2), 2.0);
  EXPECT_TRUE(fl.integral());
  const RingFiltration cap = cap_filtration(vanishing_order_filtration(1, CapMode::None), 0.5);
  EXPECT_DOUBLE_EQ(cap.weight(4, 3), 2.0);
  EXPECT_DOUBLE_EQ(cap.weight(4, 1), 1.0);
  const RingFiltration sc = scaled_filtration(vanishing_order_filtration(2, CapMode::HardCap), 2.5);
  EXPECT_DOUBLE_EQ(sc.weight(2, 3), 5.0);
  EXPECT_DOUBLE_EQ(sc.bound(), 2.5);
}

TEST(JumpingTest, NumbersAndMeasure) {
  const RingFiltration f = vanishing_order_filtration(2, CapMode::HardCap);
  const std::vector<double> e = jumping_numbers(f, 2);
  EXPECT_EQ(e, (std::vector<double>{2, 2, 2, 1, 0}));
  const Measure m = jumping_measure(f, 2);
  EXPECT_NEAR(m.total_mass(), 1.0, 1e-15);
  EXPECT_NEAR(m.cdf(0.5), 0.4, 1e-15);
  EXPECT_NEAR(m.cdf_left(1.0), 0.4, 1e-15);
  EXPECT_NEAR(m.cdf(1.0), 1.0, 1e-15);
}

TEST(VolTest, HardCapClosedForm) {
  const RingFiltration f = vanishing_order_filtration(2, CapMode::HardCap);
  for (int k : {4, 16, 64}) {
    const VolumeEstimate v = vol(f, k);
    EXPECT_EQ(v.k_max, k);
    EXPECT_EQ(v.k_half, k / 2);
    EXPECT_NEAR(v.estimate, 1.5 + 0.5 / k, 1e-13);
    EXPECT_NEAR(v.estimate_half, 1.5 + 1.0 / k, 1e-13);
  }
  EXPECT_THROW(vol(f, 1), Error);
}
