#include <gtest/gtest.h>

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nvie/greens.hpp"

using namespace nvie;

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

// (exp(-ikR) - 1) / (4 pi R) in 50 digits.
Complex smooth_green_mp(double R, double k) {
  const mp r(R), kr = mp(k) * r;
  const mp four_pi_r = 4 * boost::math::constants::pi<mp>() * r;
  return {static_cast<double>((cos(kr) - 1) / four_pi_r), static_cast<double>(-sin(kr) / four_pi_r)};
}

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

template <typename F>
Dyadic fd_hessian(F f, const Vec3& r, double h) {
  Dyadic H;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Vec3 ea = h * Vec3::Unit(a), eb = h * Vec3::Unit(b);
      H(a, b) = (f(r + ea + eb) - f(r + ea - eb) - f(r - ea + eb) + f(r - ea - eb)) / (4 * h * h);
    }
  return H;
}

}  // namespace

TEST(StaticGreen, ClosedValues) {
  const Vec3 o = Vec3(0, 0, 0);
  EXPECT_NEAR(static_green_g0(o, Vec3(1, 0, 0)), 0.0795774715, 1e-10);
  EXPECT_NEAR(static_green_g0(o, Vec3(0, 2, 0)), 0.0397887358, 1e-10);
  const Vec3 r(0.3, -0.2, 0.5);
  EXPECT_NEAR(static_green_g0(o, Vec3(3.0 * r)), static_green_g0(o, r) / 3.0, 1e-15);
  EXPECT_THROW(static_green_g0(r, r), DomainError);
}

TEST(SmoothGreen, LimitAndZeroWavenumber) {
  const Complex lim = smooth_green(0.0, 1.0);
  EXPECT_NEAR(lim.real(), 0.0, 1e-16);
  EXPECT_NEAR(lim.imag(), -1.0 / (4 * kPi), 1e-16);
  EXPECT_EQ(smooth_green(0.7, 0.0), Complex(0.0));
}

TEST(SmoothGreen, RecomposesScalarGreen) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> R(1e-4, 5.0);
  for (double k : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 50; ++t) {
      const Vec3 r = Vec3::Random();
      const Vec3 rp = r + R(rng) * random_unit(rng);
      const Complex g = scalar_green(r, rp, k);
      const Complex sum = static_green_g0(r, rp) + smooth_green(r, rp, k);
      EXPECT_LE(std::abs(g - sum), 1e-13 * std::abs(g));
    }
  }
}

TEST(SmoothGreen, BranchesAgreeWithHighPrecision) {
  for (double k : {0.5, 1.0, 2.0}) {
    for (double kr = 0.5 * kSmoothSeriesSwitch; kr <= 2.0 * kSmoothSeriesSwitch; kr *= 1.1) {
      const double R = kr / k;
      const Complex ref = smooth_green_mp(R, k);
      EXPECT_LE(std::abs(smooth_green(R, k) - ref), 1e-11 * std::abs(ref)) << "kR " << kr;
    }
  }
}

TEST(SmoothGreen, HessianMatchesFiniteDifferences) {
  const Vec3 rp = Vec3(0, 0, 0);
  const Vec3 r(0.4, 0, 0);
  const auto f = [&](const Vec3& x) { return smooth_green(x, rp, 1.0); };
  const Dyadic fd = fd_hessian(f, r, 1e-5);
  const Dyadic H = hessian_smooth_green(r, rp, 1.0);
  EXPECT_LT((H - fd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SmoothGreen, HessianBranchesAgree) {
  std::mt19937 rng(5);
  for (double k : {0.5, 1.0, 2.0}) {
    for (double kr : {0.5e-2, 0.8e-2, 0.99e-2, 1.01e-2, 1.5e-2, 2e-2}) {
      const Vec3 u = random_unit(rng);
      const Vec3 r = Vec3(0.1, 0.2, 0.3);
      const Dyadic H = hessian_smooth_green<double>(r, r + (kr / k) * u, k);
      // analytic radial derivatives of (e^{-ikR}-1)/(4 pi R), taken in 50 digits
      const mp R = mp(kr) / k, K = k, kR = K * R;
      const mp pi4 = 4 * boost::math::constants::pi<mp>();
      const mp c = cos(kR), s = sin(kR);
      // E = c - i s
      const mp d1r_re = (-K * s * R - (c - 1)) / (R * R * R) / pi4;
      const mp d1r_im = (-K * c * R + s) / (R * R * R) / pi4;
      const mp d2_re = (-K * K * c * R * R + 2 * K * s * R + 2 * (c - 1)) / (R * R * R) / pi4;
      const mp d2_im = (K * K * s * R * R + 2 * K * c * R - 2 * s) / (R * R * R) / pi4;
      const Complex d1r(static_cast<double>(d1r_re), static_cast<double>(d1r_im));
      const Complex d2(static_cast<double>(d2_re), static_cast<double>(d2_im));
      const Eigen::Matrix3d uu = u * u.transpose();
      const Dyadic ref = uu.cast<Complex>() * d2 + (Eigen::Matrix3d::Identity() - uu).cast<Complex>() * d1r;
      EXPECT_LT((H - ref).cwiseAbs().maxCoeff(), 1e-11 * ref.cwiseAbs().maxCoeff()) << "kR " << kr;
    }
  }
}

TEST(SmoothGreen, HessianVanishesForZeroWavenumber) {
  const Dyadic H = hessian_smooth_green<double>(Vec3(0, 0, 0), Vec3(0.2, 0.1, 0), 0.0);
  EXPECT_EQ(H.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hessians, Symmetric) {
  for (int t = 0; t < 20; ++t) {
    const Vec3 r = Vec3::Random(), rp = Vec3::Random();
    const Dyadic Hs = hessian_smooth_green(r, rp, 1.0);
    const Eigen::Matrix3d H0 = hessian_g0(r, rp);
    EXPECT_LT((Hs - Hs.transpose()).cwiseAbs().maxCoeff(), 1e-15 * Hs.cwiseAbs().maxCoeff());
    EXPECT_LT((H0 - H0.transpose()).cwiseAbs().maxCoeff(), 1e-15 * H0.cwiseAbs().maxCoeff());
  }
}

TEST(StaticHessian, ClosedFormAndTrace) {
  const Eigen::Matrix3d H = hessian_g0(Vec3(0, 0, 0), Vec3(1, 0, 0));
  const Eigen::Matrix3d ref = Eigen::Vector3d(2, -1, -1).asDiagonal();
  EXPECT_LT((H - ref / (4 * kPi)).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::Matrix3d H2 = hessian_g0(Vec3(0.1, 0.2, 0.3), Vec3(-0.4, 0.5, 0.1));
  EXPECT_NEAR(H2.trace(), 0.0, 1e-14 * H2.norm());
}

TEST(StaticHessian, MatchesFiniteDifferences) {
  const Vec3 rp(0.1, -0.2, 0.3);
  const Vec3 r = rp + 0.7 * Vec3(1, 2, -2).normalized();
  const auto f = [&](const Vec3& x) { return Complex(static_green_g0(x, rp)); };
  const Dyadic fd = fd_hessian(f, r, 1e-4);
  EXPECT_LT((hessian_g0(r, rp).cast<Complex>() - fd).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(DyadicGreen, SwapSymmetric) {
  for (int t = 0; t < 10; ++t) {
    const Vec3 r = Vec3::Random(), rp = Vec3::Random();
    EXPECT_LT((dyadic_green(r, rp, 1.3) - dyadic_green(rp, r, 1.3)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(DyadicGreen, NearFieldLimit) {
  const Vec3 u = Vec3(1, -1, 2).normalized();
  const double R = 1e-3;
  const Dyadic G = dyadic_green(Vec3(0, 0, 0), Vec3(R * u), 1.0);
  const Eigen::Matrix3d lead = -(Eigen::Matrix3d::Identity() - 3 * u * u.transpose());
  const Dyadic scaled = 4 * kPi * R * R * R * G;
  EXPECT_LT((scaled - lead.cast<Complex>()).cwiseAbs().maxCoeff(), 1e-2 * lead.cwiseAbs().maxCoeff());
}

TEST(DyadicGreen, EqualsOperatorOnScalarGreen) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> Rd(0.1, 2.0);
  int checked = 0;
  for (double k : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 7; ++t) {
      const Vec3 rp = Vec3::Random();
      const double R = Rd(rng);
      const Vec3 r = rp + R * random_unit(rng);
      const auto g = [&](const Vec3& x) { return scalar_green(x, rp, k); };
      const Dyadic ref = Dyadic::Identity() * g(r) + fd_hessian(g, r, 1e-3 * R) / (k * k);
      const Dyadic G = dyadic_green(r, rp, k);
      EXPECT_LT((G - ref).cwiseAbs().maxCoeff(), 1e-5 * G.cwiseAbs().maxCoeff());
      ++checked;
    }
  }
  EXPECT_GE(checked, 20);
  const Vec3 r0(0.6, 0, 0);
  const auto g = [&](const Vec3& x) { return scalar_green(x, r0, 1.0); };
  const Dyadic ref = Dyadic::Identity() * g(Vec3(0, 0, 0)) + fd_hessian(g, Vec3(0, 0, 0), 1e-4);
  EXPECT_LT((dyadic_green(Vec3(0, 0, 0), r0, 1.0) - ref).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(DyadicGreen, Errors) {
  EXPECT_THROW(dyadic_green(Vec3(1, 0, 0), Vec3(1, 0, 0), 1.0), DomainError);
  EXPECT_THROW(dyadic_green(Vec3(1, 0, 0), Vec3(0, 0, 0), 0.0), DomainError);
}

TEST(LDyadic, Ball) {
  const auto L = l_dyadic(ExclusionShape::ball);
  EXPECT_LT((L - Dyadic::Identity() / 3.0).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_NEAR(L.trace().real(), 1.0, 1e-15);
  EXPECT_THROW(l_dyadic(ExclusionShape::cube), UnsupportedShapeError);
}

TEST(WaveParams, Validation) {
  const auto w = WaveParams<double>::make(2.0, 1.0, 4.0);
  EXPECT_DOUBLE_EQ(w.k, 4.0);
  EXPECT_THROW(WaveParams<double>::make(0.0, 1.0, 1.0), DomainError);
}

TEST(RegularGreen, MatchesDirectSubtraction) {
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  std::mt19937 rng(31);
  for (double k : {0.5, 1.0, 2.0}) {
    for (double kr : {0.05, 0.2, 0.45, 0.55, 1.0, 3.0}) {
      const Vec3 u = random_unit(rng);
      const double R = kr / k;
      const Vec3 r = R * u;
      const Eigen::Matrix3d uu = u * u.transpose();
      const Dyadic direct = dyadic_green<double>(Vec3(0, 0, 0), r, k) +
                            ((id - 3 * uu) / (4 * kPi * k * k * R * R * R) - (id + uu) / (8 * kPi * R))
                                .cast<Complex>();
      const Dyadic reg = dyadic_green_regular<double>(Vec3(0, 0, 0), r, k);
      EXPECT_LT((reg - direct).cwiseAbs().maxCoeff(), 1e-12 / (kr * kr * kr)) << "k " << k << " kR " << kr;
    }
  }
}

TEST(RegularGreen, SmallSeparationExpansion) {
  const double k = 1.3;
  const Dyadic at0 = dyadic_green_regular<double>(Vec3(0, 0, 0), Vec3(0, 0, 0), k);
  EXPECT_LT((at0 - Dyadic::Identity() * Complex(0, -k / (6 * kPi))).cwiseAbs().maxCoeff(), 1e-16);
  const Vec3 u = Vec3(2, -1, 2).normalized();
  for (double R : {1e-3, 1e-2}) {
    const Dyadic g = dyadic_green_regular<double>(Vec3(0, 0, 0), Vec3(R * u), k);
    const Eigen::Matrix3d slope = (3 * Eigen::Matrix3d::Identity() - u * u.transpose()) * (k * k / (32 * kPi));
    const Dyadic lin = at0 - (R * slope).cast<Complex>();
    EXPECT_LT((g - lin).cwiseAbs().maxCoeff(), 0.02 * k * k * k * R * R);
  }
}

TEST(RegularGreen, MatchesHighPrecisionAtSmallSeparation) {
  // closed form of the regular part in 50 digits
  const Vec3 u = Vec3(1, 2, -2).normalized();
  const Eigen::Matrix3d uu = u * u.transpose();
  for (double k : {0.5, 2.0}) {
    for (double kr : {1e-4, 1e-2, 0.3}) {
      const mp K = k, R = mp(kr) / k, kR = K * R, pi4 = 4 * boost::math::constants::pi<mp>();
      const mp c = cos(kR), s = sin(kR);
      // exp(-ikR) = c - i s; envelope coefficients of I and uu
      const mp a_re = (K * K * R * R - 1) / (pi4 * K * K * R * R * R), a_im = -K * R / (pi4 * K * K * R * R * R);
      const mp b_re = (3 - K * K * R * R) / (pi4 * K * K * R * R * R), b_im = 3 * K * R / (pi4 * K * K * R * R * R);
      // times exp(-ikR), minus the subtracted parts
      const mp i_re = a_re * c + a_im * s + 1 / (pi4 * K * K * R * R * R) - 1 / (2 * pi4 * R);
      const mp i_im = a_im * c - a_re * s;
      const mp u_re = b_re * c + b_im * s - 3 / (pi4 * K * K * R * R * R) - 1 / (2 * pi4 * R);
      const mp u_im = b_im * c - b_re * s;
      const Dyadic ref = Eigen::Matrix3d::Identity().cast<Complex>() *
                             Complex(static_cast<double>(i_re), static_cast<double>(i_im)) +
                         uu.cast<Complex>() * Complex(static_cast<double>(u_re), static_cast<double>(u_im));
      const Dyadic g = dyadic_green_regular<double>(Vec3(0, 0, 0), Vec3((kr / k) * u), k);
      EXPECT_LT((g - ref).cwiseAbs().maxCoeff(), 1e-13) << "k " << k << " kR " << kr;
    }
  }
}
