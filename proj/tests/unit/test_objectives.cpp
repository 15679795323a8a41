#include <consortium/equilibria.hpp>
#include <consortium/objectives.hpp>
#include <consortium/optimizer.hpp>

#include "../reference_values.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace consortium;

namespace {

const Model model;

// Uniform sample of U(s_in) by rejection over the bounding box.
Control sample_admissible(std::mt19937_64& rng, double s_in) {
  const double d_max = max_admissible_dilution(model, s_in);
  std::uniform_real_distribution<double> a(0.0, 1.0), d(0.0, d_max);
  for (;;) {
    const Control u{a(rng), d(rng), s_in};
    if (u.alpha > 0.0 && u.d > 0.0 && in_admissible(model, u)) return u;
  }
}

} // namespace

TEST_CASE("criteria at (0.5, 0.5, 1)") {
  const Control u{0.5, 0.5, 1.0};
  CHECK(p_out(model, u) == doctest::Approx(ref::p_out_ref).epsilon(1e-12));
  CHECK(p_out(model, u) == doctest::Approx(u.d * equilibrium_x11(model, u).c).epsilon(1e-12));
  CHECK(p_in(u) == 0.5);
  CHECK(p_in(Control{0.3, 0.5, 2.0}) == 1.0);
  CHECK(p_yield(model, u) == doctest::Approx(ref::p_yield_ref).epsilon(1e-12));
  CHECK(p_theta(model, u, 0.5) == doctest::Approx(ref::p_theta_half).epsilon(1e-11));
  CHECK(p_theta(model, u, 1.0) == p_out(model, u));
  CHECK(p_theta(model, u, 0.0) == -p_in(u));
  CHECK_THROWS_AS(p_theta(model, u, 1.5), DomainError);
  const ObjectiveValues v = evaluate(model, u);
  CHECK(v.p_theta(0.5) == doctest::Approx(ref::p_theta_half).epsilon(1e-11));
}

TEST_CASE("P_out vanishes at the edges of U") {
  CHECK(p_out(model, Control{0.5, 1e-9, 1.0}) < 1e-8);
  const double d1 = psi_alpha(model, 0.5, 1.0);
  CHECK(p_out(model, Control{0.5, d1 * (1 - 1e-9), 1.0}) < 1e-6);
  CHECK_THROWS_AS(p_out(model, Control{0.5, 0.95, 1.0}), NotAdmissibleError);
  CHECK_THROWS_AS(p_yield(model, Control{0.5, 0.95, 1.0}), NotAdmissibleError);
}

TEST_CASE("admissible set membership") {
  CHECK(in_admissible(model, Control{0.5, 0.5, 1.0}));
  CHECK_FALSE(in_admissible(model, Control{0.5, 0.9247, 1.0}));
  CHECK_FALSE(in_admissible(model, Control{0.0, 0.5, 1.0}));
  CHECK_FALSE(in_admissible(model, Control{1.0, 0.5, 1.0}));
  CHECK(in_admissible(model, Control{0.5, 0.5, 123.0}, AdmissibleSet::fixed_feed(1.0)));
  CHECK_FALSE(in_admissible(model, Control{0.5, 0.5, 1.0}, AdmissibleSet::fixed_feed(0.02)));
  CHECK(in_admissible(model, Control{0.5, 0.5, 0.5}, AdmissibleSet::box(1.0)));
  CHECK_FALSE(in_admissible(model, Control{0.5, 0.5, 1.5}, AdmissibleSet::box(1.0)));
}

TEST_CASE("yield identity") {
  std::mt19937_64 rng(29);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Control u = sample_admissible(rng, 0.5 + 2.5 * (i % 7) / 6.0);
    const double lhs = p_yield(model, u) * p_in(u);
    worst = std::max(worst, std::abs(lhs - p_out(model, u)) / p_out(model, u));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("log-concavity of P_out") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Control a = sample_admissible(rng, 1.0), b = sample_admissible(rng, 1.0);
    const double l = lam(rng);
    const Control m{l * a.alpha + (1 - l) * b.alpha, l * a.d + (1 - l) * b.d, 1.0};
    REQUIRE(in_admissible(model, m));
    const double lhs = std::log(p_out(model, m));
    const double rhs = l * std::log(p_out(model, a)) + (1 - l) * std::log(p_out(model, b));
    violations += lhs < rhs - 1e-9;
  }
  CHECK(violations == 0);
}

TEST_CASE("U is convex") {
  std::mt19937_64 rng(37);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Control a = sample_admissible(rng, 1.0), b = sample_admissible(rng, 1.0);
    violations += !in_admissible(model, Control{(a.alpha + b.alpha) / 2, (a.d + b.d) / 2, 1.0});
  }
  CHECK(violations == 0);
}

TEST_CASE("yield strictly concave in alpha") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dd(0.01, 0.8);
  int checked = 0, violations = 0;
  for (int i = 0; i < 300; ++i) {
    const double d = dd(rng);
    const auto lo_hi = [&] {
      double lo = 1.0, hi = 0.0;
      for (int k = 1; k < 1000; ++k) {
        const double a = k / 1000.0;
        if (in_admissible(model, Control{a, d, 1.0})) lo = std::min(lo, a), hi = std::max(hi, a);
      }
      return std::pair{lo, hi};
    }();
    if (lo_hi.first >= lo_hi.second) continue;
    std::uniform_real_distribution<double> aa(lo_hi.first, lo_hi.second);
    const double a1 = aa(rng), a2 = aa(rng);
    if (std::abs(a1 - a2) < 1e-3) continue;
    ++checked;
    const double mid = p_yield(model, Control{(a1 + a2) / 2, d, 1.0});
    const double chord = (p_yield(model, Control{a1, d, 1.0}) + p_yield(model, Control{a2, d, 1.0})) / 2;
    violations += !(mid > chord);
  }
  CHECK(checked > 200);
  CHECK(violations == 0);
}

TEST_CASE("yield decreasing in d") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> aa(0.02, 0.98);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = aa(rng);
    const double d_hi = psi_alpha(model, alpha, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 50; ++k) {
      const double y = p_yield(model, Control{alpha, d_hi * k / 51.0, 1.0});
      violations += !(y < previous);
      previous = y;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("batch limit yield") {
  CHECK(batch_limit_yield(model, 1.0) == doctest::Approx(ref::batch_yield).epsilon(1e-14));
  CHECK(batch_limit_yield(model, 0.0) == 0.0);
  CHECK(batch_limit_yield(model, 0.5) == doctest::Approx(ref::batch_yield / 2).epsilon(1e-14));
  CHECK(p_yield(model, Control{0.5, 1e-8, 1.0}) == doctest::Approx(batch_limit_yield(model, 0.5)).epsilon(1e-6));
  CHECK_THROWS_AS(batch_limit_yield(model, 1.5), DomainError);
}

TEST_CASE("criteria affine in s_in") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> aa(0.05, 0.95), dd(0.01, 0.8);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double alpha = aa(rng), d = dd(rng);
    const auto base = try_psi_alpha_inv(model, alpha, d);
    if (!base) continue;
    const double s0 = *base + 0.25, h = 0.5;
    const auto out = [&](double s) { return p_out(model, Control{alpha, d, s}); };
    const auto in = [&](double s) { return p_in(Control{alpha, d, s}); };
    const auto th = [&](double s) { return p_theta(model, Control{alpha, d, s}, 0.4); };
    for (const auto& f : {std::function<double(double)>(out), std::function<double(double)>(in),
                          std::function<double(double)>(th)}) {
      const double second = f(s0 + 2 * h) - 2 * f(s0 + h) + f(s0);
      worst = std::max(worst, std::abs(second) / std::max(1.0, std::abs(f(s0 + h))));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("theta from prices") {
  CHECK(theta_from_prices(2.0, 2.0) == 0.5);
  CHECK(theta_from_prices(1.0, 3.0) == 0.75);
  CHECK_THROWS_AS(theta_from_prices(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(theta_from_prices(1.0, -1.0), DomainError);
}

TEST_CASE("weighted argmax matches the price-weighted argmax") {
  const double w_in = 1.3, w_out = 2.9;
  const double theta = theta_from_prices(w_in, w_out);
  const ControlGrid grid = make_control_grid(model, 1.0, 50);
  Control best_theta{}, best_price{};
  double v_theta = -1e300, v_price = -1e300;
  for (double d : grid.ds)
    for (double a : grid.alphas) {
      const Control u{a, d, 1.0};
      if (!in_admissible(model, u)) continue;
      const ObjectiveValues v = evaluate(model, u);
      if (v.p_theta(theta) > v_theta) v_theta = v.p_theta(theta), best_theta = u;
      const double price = w_out * v.p_out - w_in * v.p_in;
      if (price > v_price) v_price = price, best_price = u;
    }
  CHECK(best_theta == best_price);
}

TEST_CASE("theta0") {
  CHECK(theta0(model, 0.5, 0.5) == doctest::Approx(ref::theta0_half_half).epsilon(1e-13));
  CHECK(theta0(model, 1e-9, 0.5) > 1.0 - 1e-8);
  CHECK_THROWS_AS(theta0(model, 0.5, 1.02), DomainError);
  CHECK_THROWS_AS(theta0(model, 0.5, 2.0), DomainError);

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> aa(1e-3, 1.0 - 1e-3), dd(1e-4, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = theta0(model, aa(rng), dd(rng));
    CHECK(t > 0.0);
    CHECK(t < 1.0);
  }
}

TEST_CASE("sign of dP_theta/ds_in follows theta0") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> aa(0.05, 0.95), dd(0.01, 0.8);
  int checked = 0, violations = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = aa(rng), d = dd(rng);
    const auto base = try_psi_alpha_inv(model, alpha, d);
    if (!base) continue;
    ++checked;
    const double t0 = theta0(model, alpha, d);
    const double s = *base + 0.5, h = 1e-3;
    for (double theta : {t0 - 1e-6, t0 + 1e-6}) {
      const double fd = (p_theta(model, Control{alpha, d, s + h}, theta) - p_theta(model, Control{alpha, d, s - h}, theta)) /
                        (2 * h);
      violations += (fd > 0) != (theta > t0);
      CHECK(p_theta_sin_slope(model, alpha, d, theta) == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
    }
  }
  CHECK(checked > 50);
  CHECK(violations == 0);
}

TEST_CASE("extended P_out is affine through the threshold") {
  const Control below{0.5, 0.5, 0.01};
  const auto v = p_out_extended(model, below);
  REQUIRE(v.has_value());
  CHECK(*v < 0.0);
  CHECK_FALSE(p_out_extended(model, Control{0.5, 0.95, 1.0}).has_value());
  CHECK(*p_out_extended(model, Control{0.5, 0.5, 1.0}) == doctest::Approx(ref::p_out_ref).epsilon(1e-12));
}
