#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "pottslab/errors.hpp"
#include "pottslab/model.hpp"

using namespace pottslab;

TEST(ModelParams, DerivedConstants) {
  const auto a = new_params(3, 3, 0.25);
  EXPECT_DOUBLE_EQ(a.A(), 2.25);
  EXPECT_DOUBLE_EQ(a.B(), 2.25);

  const auto b = new_params(1, 2, 0.5);
  EXPECT_DOUBLE_EQ(b.A(), 0.5);
  EXPECT_DOUBLE_EQ(b.B(), 1.5);
}

TEST(ModelParams, RejectsOutOfRangeFields) {
  const auto field_of = [](int d, int q, double p) -> std::string {
    try {
      new_params(d, q, p);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return "";
  };
  EXPECT_EQ(field_of(3, 3, 1.0), "p");
  EXPECT_EQ(field_of(3, 3, 0.0), "p");
  EXPECT_EQ(field_of(3, 3, -0.1), "p");
  EXPECT_EQ(field_of(3, 3, std::nan("")), "p");
  EXPECT_EQ(field_of(3, 1, 0.5), "q");
  EXPECT_EQ(field_of(0, 3, 0.5), "d");
}

TEST(CriticalP, Values) {
  EXPECT_DOUBLE_EQ(critical_p(3, 3), 0.25);
  EXPECT_DOUBLE_EQ(critical_p(2, 3), 0.0);
  EXPECT_NEAR(critical_p(5, 4), 1.0 / 3.0, 1e-16);
  EXPECT_LT(critical_p(1, 3), 0.0);
}

TEST(Regime, Classification) {
  EXPECT_EQ(regime(new_params(3, 3, 0.25)), Regime::Critical);
  EXPECT_EQ(regime(new_params(3, 3, 0.5)), Regime::Subcritical);
  EXPECT_EQ(regime(new_params(3, 3, 0.1)), Regime::Supercritical);
  EXPECT_EQ(regime(new_params(3, 3, 0.25 + 5e-13)), Regime::Critical);
  EXPECT_EQ(regime(new_params(3, 3, 0.25 + 5e-12)), Regime::Subcritical);
  EXPECT_EQ(to_string(Regime::Critical), "critical");
}

TEST(Regime, CriticalParamsRefusesNonPositiveThreshold) {
  try {
    critical_params(2, 3);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("zero-temperature"), std::string::npos) << e.what();
  }
  EXPECT_THROW(critical_params(1, 4), ValidationError);
}

// A = B at p_c, and A <= B exactly on the high-temperature side.
TEST(ModelProperties, CriticalIdentityAndOrdering) {
  for (int d = 1; d <= 12; ++d) {
    for (int q = 2; q <= 12; ++q) {
      const double pc = critical_p(d, q);
      if (pc > 0.0) {
        const auto crit = critical_params(d, q);
        EXPECT_NEAR(crit.A(), crit.B(), 4e-15 * crit.B()) << d << "," << q;
        EXPECT_EQ(regime(crit), Regime::Critical);
      }
      for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        if (std::abs(p - pc) < 1e-9) continue;
        const auto params = new_params(d, q, p);
        EXPECT_GT(params.A(), 0.0);
        EXPECT_GT(params.B(), 1.0);
        EXPECT_EQ(params.A() <= params.B(), p >= pc) << d << "," << q << "," << p;
      }
    }
  }
}

TEST(ModelProperties, RegimeMonotoneInP) {
  for (int d = 1; d <= 8; ++d) {
    for (int q = 2; q <= 8; ++q) {
      int last = -1;
      for (int i = 1; i < 1000; ++i) {
        const auto tag = regime(new_params(d, q, i / 1000.0));
        const int rank = tag == Regime::Supercritical ? 0 : tag == Regime::Critical ? 1 : 2;
        EXPECT_GE(rank, last);
        last = rank;
      }
    }
  }
}
