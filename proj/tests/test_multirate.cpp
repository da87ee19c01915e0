#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mrock/multirate.hpp"

using namespace mrock;
using doctest::Approx;

namespace {

// Every integer degree with the nominal ROCK2 length 0.81 s^2.
MacroLadder nominal_ladder() {
  MacroLadder l;
  for (int s = 1; s <= 200; ++s) l.degrees.push_back(s);
  l.length = [](int s) { return 0.81 * s * s; };
  return l;
}

constexpr double kBeta = 2.0 - 4.0 * 0.05 / 3.0;

}  // namespace

TEST_CASE("stage selection examples") {
  const auto a = get_stages(StageVariant::Mrock2, 1.0, 100.0, 1e4, 0.05, nominal_ladder());
  CHECK(a.s == 13);
  CHECK(a.m == 16);
  CHECK(a.eta == Approx(0.04400).epsilon(1e-4));

  const auto b = get_stages(StageVariant::Mrkc, 1.0, 100.0, 1e4, 0.05);
  CHECK(b.s == 8);
  CHECK(b.m == 16);
  CHECK(b.eta == Approx(0.04868146).epsilon(1e-6));
}

TEST_CASE("stage selection satisfies the constraints minimally") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  const auto ladder = rock2_macro_ladder();
  for (int trial = 0; trial < 300; ++trial) {
    const double tau = std::pow(10.0, lg(gen) / 2);
    const double rs = std::pow(10.0, lg(gen));
    const double rf = rs * std::pow(10.0, 1.5 + lg(gen) / 2);
    for (auto v : {StageVariant::Mrkc, StageVariant::Mrock2, StageVariant::Mrock2ScaleSep}) {
      if (v != StageVariant::Mrkc && kMrock2MacroFactor * tau * rs > rock2_tableau(200).ell) {
        CHECK_THROWS_AS(get_stages(v, tau, rs, rf, 0.05), StageLimitError);
        continue;
      }
      const auto sel = get_stages(v, tau, rs, rf, 0.05);
      const double mm = double(sel.m) * sel.m;
      CHECK(sel.m >= 2);
      CHECK(sel.eta * rf <= kBeta * mm * (1 + 1e-14));
      if (v == StageVariant::Mrkc) {
        CHECK(tau * rs <= kBeta * sel.s * sel.s);
        if (sel.s > 1) CHECK(tau * rs > kBeta * (sel.s - 1) * (sel.s - 1));
        CHECK(sel.eta == Approx(6 * tau / (kBeta * sel.s * sel.s) * mm / (mm - 1)));
      } else {
        CHECK(kMrock2MacroFactor * tau * rs <= sel.ell_s);
        CHECK(sel.ell_s == rock2_tableau(sel.s).ell);
        const auto it = std::find(ladder.degrees.begin(), ladder.degrees.end(), sel.s);
        REQUIRE(it != ladder.degrees.end());
        if (it != ladder.degrees.begin()) CHECK(kMrock2MacroFactor * tau * rs > ladder.length(*(it - 1)));
        const double eta = v == StageVariant::Mrock2 ? 6 * tau / sel.ell_s * mm / (mm - 1)
                                                     : kScaleSepMicroFactor * tau / sel.ell_s;
        CHECK(sel.eta == Approx(eta));
      }
      if (sel.m > 2) {
        // m - 1 would violate the micro constraint
        const double m1 = sel.m - 1.0;
        const double eta1 = v == StageVariant::Mrock2ScaleSep ? sel.eta
                            : v == StageVariant::Mrkc ? 6 * tau / (kBeta * sel.s * sel.s) * m1 * m1 / (m1 * m1 - 1)
                                                      : 6 * tau / sel.ell_s * m1 * m1 / (m1 * m1 - 1);
        CHECK(eta1 * rf > kBeta * m1 * m1);
      }
      if (sel.s >= 4) CHECK(sel.eta <= tau);
    }
  }
}

TEST_CASE("stage selection errors") {
  CHECK_THROWS_AS(get_stages(StageVariant::Mrkc, 0.0, 1.0, 1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(get_stages(StageVariant::Mrkc, 1.0, -1.0, 1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(get_stages(StageVariant::Mrock2, 1.0, 1e7, 1e8, 0.05), StageLimitError);
  CHECK_THROWS_AS(get_stages(StageVariant::Mrkc, 1.0, 1e6, 1e8, 0.05, 50), StageLimitError);
  CHECK_THROWS_AS(get_stages(StageVariant::Mrock2, 1.0, 1.0, 1e10, 0.05, 100), StageLimitError);
}

TEST_CASE("averaged forces on the scalar test equation") {
  const double lambda = -300.0, zeta = -2.0, eta = 0.05, y = 1.7;
  auto ff = [&](double, const Vector& u, Vector& out) { out = lambda * u; };
  auto fs = [&](double, const Vector& u, Vector& out) { out = zeta * u; };
  for (int m : {2, 5, 9}) {
    const auto micro = rkc_tableau(m, 0.05);
    const double z = eta * lambda;
    if (-z > micro.ell) continue;
    const double phi = rkc_phi(micro, z);
    const Vector f1 = averaged_force_1(ff, fs, 0.0, Vector::Constant(1, y), eta, micro);
    CHECK(f1[0] == Approx(phi * (lambda + zeta) * y).epsilon(1e-12));
    const Vector f2 = averaged_force_2(ff, fs, 0.0, Vector::Constant(1, y), eta, micro);
    CHECK(f2[0] == Approx(phi * (lambda + zeta) * (1 - 0.5 * z * micro.alpha_m * phi) * y).epsilon(1e-12));
  }
}

TEST_CASE("averaged force tends to f as eta -> 0") {
  auto ff = [](double, const Vector& u, Vector& out) { out = -u.array().cube(); };
  auto fs = [](double t, const Vector& u, Vector& out) { out = Vector::Constant(u.size(), std::sin(t)) - u; };
  const Vector y = Vector::LinSpaced(3, 0.2, 1.0);
  Vector f(3), g(3);
  ff(0.4, y, f);
  fs(0.4, y, g);
  f += g;
  double prev1 = 0, prev2 = 0;
  for (double eta : {1e-2, 5e-3}) {
    const double e1 = (averaged_force_1(ff, fs, 0.4, y, eta, 3, 0.05) - f).norm();
    const double e2 = (averaged_force_2(ff, fs, 0.4, y, eta, 3, 0.05) - f).norm();
    if (prev1 > 0) {
      CHECK(std::log2(prev1 / e1) == Approx(1.0).epsilon(0.05));
      CHECK(std::log2(prev2 / e2) == Approx(2.0).epsilon(0.05));
    }
    CHECK(e1 < 0.05);
    prev1 = e1;
    prev2 = e2;
  }
}

TEST_CASE("evaluation counts per step") {
  const auto sys = multirate_test(-2000.0, -5.0);
  const Vector y = sys.y0;
  SUBCASE("mrkc") {
    EvalCounter c;
    const auto r = mrkc_step(sys, 0.0, y, 0.5, c);
    CHECK(c.slow == std::uint64_t(r.stages.s));
    CHECK(c.fast == std::uint64_t(r.stages.m) * r.stages.s);
    CHECK(c.full == 0);
  }
  SUBCASE("mrock2") {
    EvalCounter c;
    const auto r = mrock2_step(sys, 0.0, y, 0.5, c);
    CHECK(c.slow == std::uint64_t(r.stages.s));
    CHECK(c.fast == 2 * std::uint64_t(r.stages.m) * r.stages.s);
  }
}

TEST_CASE("one step reproduces the composed stability function") {
  const double lambda = -5000.0, zeta = -20.0, tau = 0.3;
  const auto sys = multirate_test(lambda, zeta);
  EvalCounter c;
  const auto a = mrkc_step(sys, 0.0, sys.y0, tau, c);
  const auto micro_a = rkc_tableau(a.stages.m, 0.05);
  const double w_a = tau * rkc_phi(micro_a, a.stages.eta * lambda) * (lambda + zeta);
  CHECK(a.y[0] == Approx(rkc_stability(rkc_tableau(a.stages.s, 0.05), w_a)).epsilon(1e-10));
  CHECK(std::abs(a.y[0]) <= 1.0);

  const auto b = mrock2_step(sys, 0.0, sys.y0, tau, c);
  const auto micro_b = rkc_tableau(b.stages.m, 0.05);
  const double z = b.stages.eta * lambda;
  const double p = rkc_phi(micro_b, z);
  const double w_b = tau * p * (lambda + zeta) * (1 - 0.5 * z * micro_b.alpha_m * p);
  CHECK(b.y[0] == Approx(rock2_stability(rock2_tableau(b.stages.s), w_b)).epsilon(1e-10));
  CHECK(std::abs(b.y[0]) <= 1.0);
}

TEST_CASE("orders on a nonstiff split problem") {
  // y1' = -y2 (slow), y2' = y1 (fast): exact rotation.
  SplitSystem sys;
  sys.fast = [](double, const Vector& y, Vector& out) { out = Vector::Zero(2); out[1] = y[0]; };
  sys.slow = [](double, const Vector& y, Vector& out) { out = Vector::Zero(2); out[0] = -y[1]; };
  sys.rho_fast = [](double, const Vector&) { return 1.0; };
  sys.rho_slow = [](double, const Vector&) { return 1.0; };
  sys.rho_full = [](double, const Vector&) { return 1.0; };
  sys.y0 = Vector::Unit(2, 0);
  auto error = [&](bool second, int n) {
    const double tau = 1.0 / n;
    Vector y = sys.y0;
    EvalCounter c;
    for (int k = 0; k < n; ++k) y = (second ? mrock2_step(sys, k * tau, y, tau, c) : mrkc_step(sys, k * tau, y, tau, c)).y;
    return std::hypot(y[0] - std::cos(1.0), y[1] - std::sin(1.0));
  };
  CHECK(std::log2(error(false, 40) / error(false, 80)) == Approx(1.0).epsilon(0.1));
  CHECK(std::log2(error(true, 40) / error(true, 80)) == Approx(2.0).epsilon(0.1));
}

TEST_CASE("missing fast part is treated as zero") {
  SplitSystem sys = multirate_test(0.0, -3.0);
  sys.fast = nullptr;
  EvalCounter c;
  const auto r = mrock2_step(sys, 0.0, sys.y0, 0.1, c);
  CHECK(r.y[0] == Approx(rock2_stability(rock2_tableau(r.stages.s), -0.3)).epsilon(1e-14));
}

TEST_CASE("variant names") {
  CHECK(to_string(StageVariant::Mrkc) == "mrkc");
  CHECK(to_string(StageVariant::Mrock2) == "mrock2");
}
