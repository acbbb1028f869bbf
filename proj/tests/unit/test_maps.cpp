#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pottslab/errors.hpp"
#include "pottslab/maps.hpp"

using namespace pottslab;

namespace {

MapParams mp_of(int d, int q, double p, int m) { return MapParams(new_params(d, q, p), m); }

void expect_rel(double got, double want, double rel, const char* what) {
  EXPECT_NEAR(got, want, rel * std::max(std::abs(want), 1e-300)) << what;
}

// Reference values at selected points, 40-digit numerical differentiation
// of the defining formulas.
struct Reference {
  int d, q;
  double p;
  int m;
  double x;
  double f, f1, f2, f3, H, K, H1, K1, H2, K2, ff, ff1;
};

const std::vector<Reference> kReference{
    {3, 3, 0.25, 1, 2.0, 0.4551661356395084206, -0.2836035152830783236, 0.2923297772917884259, -0.4030526171638446850,
     0.4792899408284023669, 0.2573111060537096040, 0.7834547109695038689, 0.4322590245439585449,
     0.3828647456321557368, 0.2356090742351727611, 1.904962212760605748, 0.7588119436436416675},
    {3, 3, 0.25, 2, 2.0, 0.5585182169753714635, -0.1900839309874163384, 0.2220308101449653028, -0.3792349594111983688,
     0.7474048442906574394, -0.1336123549765927132, 1.118359454508446977, -0.1727080614456244537,
     0.3665904383328743669, -0.01078207171567277550, 1.916841352795644087, 0.7945862437509620702},
    {3, 3, 0.5, 1, 2.0, 0.6297376093294460641, -0.2249062890462307372, 0.1820669958945677396, -0.2083315625292182679,
     1.204081632653061224, 0.5094752186588921283, 1.342565597667638484, 0.5224906289046230737, 0.1874219075385256143,
     0.02677455821978937348, 1.284105914981499130, 0.2196753016101928929},
    {5, 4, 1.0 / 3.0, 3, 3.0, 0.4626643660379603622, -0.06884886399374410366, 0.05245627732856693646,
     -0.05921821932795251847, 4.954602249062890060, -0.5706881392012588624, 3.236211102516808306,
     -0.3308938735844192476, 0.2294962133124803522, 0.0, 2.573539523669119057, 0.5499870557382197806},
    {4, 3, 0.5, 2, 1.5, 0.7434662640566430654, -0.3267983578270958529, 0.4812195598772620252, -1.033315807432034514,
     0.7042638483965014577, 0.07986581112036651395, 1.686276551436901291, 0.1066194517165466770,
     0.7541500565240673529, -0.1212026876556536817, 1.284318612839597063, 0.4993306363521354292},
};

}  // namespace

TEST(Maps, MultiplicityRange) {
  const auto params = new_params(3, 3, 0.25);
  EXPECT_THROW(MapParams(params, 0), ValidationError);
  EXPECT_THROW(MapParams(params, 3), ValidationError);
  for (int q = 2; q <= 6; ++q) {
    for (int m = 1; m < q; ++m) {
      const MapParams mp(new_params(3, q, 0.4), m);
      EXPECT_DOUBLE_EQ(mp.C(), 2 * m - 1 + 0.4);
      EXPECT_GT(mp.C() - m, 0.0);
      EXPECT_LT(mp.C() - m, m);
    }
  }
}

TEST(Maps, ExampleValues) {
  EXPECT_NEAR(f_m_eval(mp_of(3, 3, 0.25, 1), 2.0), std::pow(2.5 / 3.25, 3), 1e-15);
  EXPECT_NEAR(f_m_eval(mp_of(3, 3, 0.25, 1), 2.0), 0.4551661, 1e-7);
  EXPECT_NEAR(f_m_eval(mp_of(3, 3, 0.25, 2), 2.0), std::pow(3.5 / 4.25, 3), 1e-15);
  EXPECT_NEAR(f_m_eval(mp_of(3, 3, 0.25, 2), 2.0), 0.5585182, 1e-7);
  EXPECT_NEAR(f_m_deviation(mp_of(3, 3, 0.25, 1), 1.0), 0.4551661356395084206 - 1.0, 1e-15);
}

TEST(Maps, AgreesWithReferenceValues) {
  for (const auto& r : kReference) {
    const auto mp = mp_of(r.d, r.q, r.p, r.m);
    expect_rel(f_m_eval(mp, r.x), r.f, 1e-14, "f");
    expect_rel(f_m_prime(mp, r.x), r.f1, 1e-13, "f'");
    expect_rel(f_m_second(mp, r.x), r.f2, 1e-13, "f''");
    expect_rel(f_m_third(mp, r.x), r.f3, 1e-13, "f'''");
    expect_rel(H_m_eval(mp, r.x), r.H, 1e-13, "H");
    expect_rel(K_m_eval(mp, r.x), r.K, 1e-13, "K");
    expect_rel(H_m_prime(mp, r.x), r.H1, 1e-13, "H'");
    expect_rel(K_m_prime(mp, r.x), r.K1, 1e-13, "K'");
    expect_rel(H_m_second(mp, r.x), r.H2, 1e-13, "H''");
    EXPECT_NEAR(K_m_second(mp, r.x), r.K2, 1e-13 * std::abs(r.K2) + 1e-15) << "K''";
    expect_rel(two_step_eval(mp, r.x), r.ff, 1e-14, "f o f");
    expect_rel(two_step_prime(mp, r.x), r.ff1, 1e-13, "(f o f)'");
  }
}

TEST(Maps, DomainError) {
  const auto mp = mp_of(3, 3, 0.25, 2);  // B = 2.25, denominator vanishes at x = 1 - B/m
  EXPECT_THROW(f_m_eval(mp, 1.0 - 2.25 / 2 - 0.01), DomainError);
  EXPECT_NO_THROW(f_m_eval(mp, 0.0));
}

TEST(Maps, FixedPointAndSlopeAtOne) {
  for (int d = 1; d <= 6; ++d) {
    for (int q = 2; q <= 5; ++q) {
      for (double p : {0.1, 0.25, 0.5, 0.9}) {
        for (int m = 1; m < q; ++m) {
          const auto mp = mp_of(d, q, p, m);
          EXPECT_EQ(f_m_eval(mp, 1.0), 1.0);
          EXPECT_EQ(f_m_deviation(mp, 0.0), 0.0);
          const double ab = mp.base().A() / mp.base().B();
          EXPECT_NEAR(f_m_prime(mp, 1.0), -ab, 1e-15);
          EXPECT_NEAR(f_m_slope(mp, 0.0), -ab, 1e-15);
          EXPECT_NEAR(two_step_prime(mp, 1.0), ab * ab, 2e-15 * ab * ab);
          EXPECT_EQ(H_m_eval(mp, 1.0), 0.0);
          EXPECT_EQ(K_m_eval(mp, 1.0), 0.0);
          EXPECT_EQ(G_m_eval(mp, 1.0), 1.0);
          EXPECT_NEAR(H_m_prime(mp, 1.0), m * mp.base().B() * (1 - ab), 1e-13);
        }
      }
    }
  }
  EXPECT_DOUBLE_EQ(f_m_prime(mp_of(3, 3, 0.25, 1), 1.0), -1.0);
  EXPECT_NEAR(f_m_prime(mp_of(3, 3, 0.5, 1), 1.0), -0.6, 1e-15);
  EXPECT_NEAR(two_step_prime(mp_of(3, 3, 0.5, 1), 1.0), 0.36, 1e-15);
  const double at5 = two_step_prime(mp_of(3, 3, 0.25, 1), 5.0);
  EXPECT_GT(at5, 0.0);
  EXPECT_LE(at5, 1.0);
}

TEST(Maps, TinyDeviationFollowsLinearSlope) {
  const auto mp = mp_of(3, 3, 0.25, 1);
  EXPECT_NEAR(f_m_deviation(mp, 1e-12), -1e-12, 1e-3 * 1e-12);
  const auto sub = mp_of(3, 3, 0.5, 1);
  EXPECT_NEAR(f_m_deviation(sub, 1e-12), -0.6e-12, 1e-3 * 0.6e-12);
}

TEST(Maps, SecondDerivativeCoefficients) {
  const auto k = second_derivative_coeffs(mp_of(3, 3, 0.25, 1));
  EXPECT_NEAR(k.beta_H, 2.0 / 3.0 * std::pow(2.25, 4), 1e-12);
  EXPECT_NEAR(k.beta_H, 17.0859375, 1e-12);
  EXPECT_NEAR(k.gamma_H, 38.443359375, 1e-12);
  EXPECT_NEAR(k.gamma_K, 2.25 * std::pow(2.25, 3) * (2.25 - 1.25), 1e-12);
  for (int m : {1, 2}) {
    const auto mp = mp_of(3, 3, 0.25, m);
    const auto c = second_derivative_coeffs(mp);
    EXPECT_EQ(c.gamma_K > 0, mp.base().A() - mp.C() > 0);
  }
}

// H_1(2) from its definition against H(1) + H'(1) + integral of (2-s) H''(s).
TEST(Maps, HIntegratesFromSecondDerivative) {
  const auto mp = mp_of(3, 3, 0.5, 1);
  const int n = 2000;
  const double h = 1.0 / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = 1.0 + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += w * (2.0 - s) * H_m_second(mp, s);
  }
  integral *= h / 3.0;
  EXPECT_NEAR(H_m_eval(mp, 2.0), H_m_prime(mp, 1.0) + integral, 1e-8);
}

TEST(Maps, GIdentity) {
  for (const auto& r : kReference) {
    const auto mp = mp_of(r.d, r.q, r.p, r.m);
    for (double x : {1.0, 1.0 + 1e-6, 1.01, 1.5, 3.0, 40.0, 1e3}) {
      expect_rel(two_step_prime_product(mp, x), two_step_prime(mp, x), 1e-10, "G identity");
    }
  }
}

TEST(Maps, TaylorCoefficients) {
  for (auto [d, q] : std::vector<std::pair<int, int>>{{3, 3}, {4, 3}, {5, 4}, {6, 4}}) {
    const auto params = critical_params(d, q);
    const auto c = taylor_c123(params);
    const double target = -(d * d - 1.0) / (d * d);
    EXPECT_NEAR(c.c1, 1.0, 1e-9);
    EXPECT_NEAR(c.c2, 0.0, 1e-9);
    EXPECT_NEAR(c.c3, target, 1e-9);
    const MapParams mp(params, 1);
    const double fd_c1 = fd::first([&](double x) { return two_step_eval(mp, x); }, 1.0, 1e-6);
    EXPECT_NEAR(fd_c1, c.c1, 1e-6);
  }
  EXPECT_NEAR(taylor_c123(critical_params(3, 3)).c3, -8.0 / 9.0, 1e-12);
  EXPECT_NEAR(taylor_c123(critical_params(5, 4)).c3, -24.0 / 25.0, 1e-12);
  EXPECT_THROW(taylor_c123(new_params(3, 3, 0.5)), ValidationError);
  EXPECT_THROW(taylor_c123(new_params(1, 2, 0.3)), ValidationError);
}

TEST(Maps, TelescopingIncrement) {
  const auto crit33 = critical_params(3, 3);
  EXPECT_NEAR(telescoping_increment(crit33, 1 + 1e-3), 8.0 / 27.0, 1e-2);
  // 40-digit references at x = 1 + 1e-5 with exact p_c.
  struct Row {
    int d, q;
    double exact;
  };
  for (const auto& r : {Row{3, 3, 0.2962951440385916566}, Row{4, 3, 0.3124987630268988492},
                        Row{5, 4, 0.3199988800054719809}, Row{6, 4, 0.3240729263173152777}}) {
    const auto params = critical_params(r.d, r.q);
    const double got = telescoping_increment(params, 1 + 1e-5);
    EXPECT_NEAR(got, (r.d * r.d - 1.0) / (3.0 * r.d * r.d), 1e-4);
    EXPECT_NEAR(got, r.exact, 1e-7);
  }
  EXPECT_THROW(telescoping_increment(new_params(3, 3, 0.5), 1.1), ValidationError);
}

// Direct and deviation forms agree across the dispatch band.
TEST(MapsProperties, OverlapBandAgreement) {
  for (const auto& r : kReference) {
    const auto mp = mp_of(r.d, r.q, r.p, r.m);
    const double B = mp.base().B();
    for (double t = 1e-4; t <= 5e-2; t *= 1.25) {
      for (double eps : {t, -t}) {
        const double direct = std::pow((B + mp.numerator_slope() * eps) / (B + mp.m() * eps), mp.base().d());
        EXPECT_NEAR(direct, 1.0 + f_m_deviation(mp, eps), 1e-10);
      }
    }
    const double below = f_m_eval(mp, 1.0 + kDeviationBand * (1 - 1e-12));
    const double above = f_m_eval(mp, 1.0 + kDeviationBand * (1 + 1e-12));
    EXPECT_NEAR(below, above, 1e-10);
  }
}

// Range, monotonicity and one-sided contraction of f on grids.
TEST(MapsProperties, RangeMonotonicityContraction) {
  for (int d = 1; d <= 6; ++d) {
    for (int q = 2; q <= 5; ++q) {
      const double pc = critical_p(d, q);
      for (double p : {0.05, 0.2, 0.35, 0.5, 0.75, 0.95}) {
        const auto mp = mp_of(d, q, p, 1);
        double last = f_m_eval(mp, 0.0);
        for (int i = 1; i <= 400; ++i) {
          const double x = i / 400.0;
          const double fx = f_m_eval(mp, x);
          EXPECT_GE(fx, 1.0 - 1e-15);
          EXPECT_LT(fx, last + 1e-15);
          EXPECT_LT(f_m_prime(mp, x), 0.0);
          last = fx;
        }
        for (int i = 0; i <= 400; ++i) {
          const double x = std::pow(10.0, 4.0 * i / 400.0);
          const double fx = f_m_eval(mp, x);
          EXPECT_GT(fx, 0.0);
          EXPECT_LE(fx, 1.0);
          EXPECT_LT(f_m_prime(mp, x), 0.0);
          if (p >= pc) EXPECT_LE(1.0 - fx, x - 1.0 + 1e-15) << d << q << p << x;
        }
      }
    }
  }
}

TEST(MapsProperties, DerivativesMatchFiniteDifferences) {
  for (const auto& r : kReference) {
    for (int m = 1; m < r.q; ++m) {
      const auto mp = mp_of(r.d, r.q, r.p, m);
      for (double x : {1.05, 1.3, 2.0, 3.7, 12.0, 150.0}) {
        const double h1 = 1e-6 * std::max(1.0, std::abs(x));
        const double h2 = 1e-4 * std::max(1.0, std::abs(x));
        const double fd1 = fd::first([&](double y) { return f_m_eval(mp, y); }, x, h1);
        expect_rel(f_m_prime(mp, x), fd1, 1e-6, "f'");
        const double fdff = fd::first([&](double y) { return two_step_eval(mp, y); }, x, h1);
        expect_rel(two_step_prime(mp, x), fdff, 1e-6, "(f o f)'");
        const double fdH = fd::second([&](double y) { return H_m_eval(mp, y); }, x, h2);
        const double fdK = fd::second([&](double y) { return K_m_eval(mp, y); }, x, h2);
        const double floor = 1e-7 * (1.0 + std::abs(H_m_eval(mp, x)) + std::abs(K_m_eval(mp, x)));
        EXPECT_NEAR(H_m_second(mp, x), fdH, 1e-5 * std::abs(fdH) + floor) << "H'' x=" << x;
        EXPECT_NEAR(K_m_second(mp, x), fdK, 1e-5 * std::abs(fdK) + floor) << "K'' x=" << x;
      }
      // Near the fixed point, against the looser bound.
      for (double x : {1.0 + 1e-7, 1.0 + 5e-7}) {
        const double fd1 = fd::first([&](double y) { return f_m_eval(mp, y); }, x, 1e-6);
        expect_rel(f_m_prime(mp, x), fd1, 1e-4, "f' near 1");
      }
    }
  }
}

TEST(MapsProperties, GStrictlyBelowOneAwayFromFixedPoint) {
  for (const auto& r : kReference) {
    if (r.p < critical_p(r.d, r.q) - 1e-15) continue;
    const auto mp = mp_of(r.d, r.q, r.p, r.m);
    for (const double x : log_grid({1.0, 1e3, 2000})) {
      const double g = G_m_eval(mp, x);
      EXPECT_LE(g, 1.0 + 1e-12);
      if (x >= 1.001) EXPECT_LT(g, 1.0) << x;
    }
  }
}

TEST(MapsProperties, HKCombinationPositive) {
  for (const auto& r : kReference) {
    for (int m = 1; m < r.q; ++m) {
      const auto mp = mp_of(r.d, r.q, r.p, m);
      for (const double x : log_grid({1.0 + 1e-6, 1e4, 3000})) {
        EXPECT_GT((r.d - 1) * K_m_prime(mp, x) + 2 * H_m_prime(mp, x), 0.0) << x;
      }
    }
  }
}

TEST(Audit, CleanOnSpecifiedInstances) {
  struct Inst {
    int d, q;
    double p;
  };
  for (const auto& in : {Inst{3, 3, 0.25}, Inst{3, 3, 0.5}, Inst{5, 4, 1.0 / 3.0}, Inst{5, 4, 0.6}}) {
    const auto report = audit_two_step(new_params(in.d, in.q, in.p), GridSpec{});
    EXPECT_TRUE(report.ok()) << in.d << in.q << in.p;
    EXPECT_EQ(report.per_m.size(), static_cast<std::size_t>(in.q - 1));
    for (const auto& a : report.per_m) EXPECT_EQ(a.points, 10'000u);
  }
}

TEST(Audit, SubcriticalSupremumAtFixedPoint) {
  const auto report = audit_two_step(new_params(3, 3, 0.5), GridSpec{});
  for (const auto& a : report.per_m) {
    EXPECT_NEAR(a.sup_derivative, 0.36, 1e-15);
    EXPECT_EQ(a.argsup, 1.0);
  }
}

TEST(Audit, DeterministicAcrossWorkers) {
  const auto params = new_params(5, 4, 0.6);
  const auto a = audit_two_step(params, GridSpec{1.0, 1e4, 5000}, 1);
  const auto b = audit_two_step(params, GridSpec{1.0, 1e4, 5000}, 5);
  ASSERT_EQ(a.per_m.size(), b.per_m.size());
  for (std::size_t i = 0; i < a.per_m.size(); ++i) {
    EXPECT_EQ(a.per_m[i].sup_derivative, b.per_m[i].sup_derivative);
    EXPECT_EQ(a.per_m[i].argsup, b.per_m[i].argsup);
    EXPECT_EQ(a.per_m[i].sup_G, b.per_m[i].sup_G);
    EXPECT_EQ(a.per_m[i].min_HK_combination, b.per_m[i].min_HK_combination);
  }
}

TEST(Audit, DegenerateTreeRecorded) {
  const auto report = audit_two_step(new_params(1, 2, 0.5), GridSpec{1.0, 100.0, 50});
  EXPECT_EQ(report.per_m.size(), 1u);
}

TEST(Grid, LogSpacing) {
  const auto xs = log_grid({1.0, 1e4, 5});
  ASSERT_EQ(xs.size(), 5u);
  EXPECT_EQ(xs.front(), 1.0);
  EXPECT_EQ(xs.back(), 1e4);
  EXPECT_NEAR(xs[2], 100.0, 1e-12);
  EXPECT_THROW(log_grid({1.0, 1.0, 5}), ValidationError);
}
