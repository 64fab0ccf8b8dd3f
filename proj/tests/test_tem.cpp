#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tada/errors.hpp"
#include "tada/rng.hpp"
#include "tada/tem.hpp"

using namespace tada;

namespace {

TemWeights random_weights(std::size_t m, const TemperConfig& cfg, Rng& rng, bool allow_zero) {
  std::vector<double> q(m);
  double s = 0.0;
  for (auto& v : q) {
    v = allow_zero && rng.bernoulli(0.2) ? 0.0 : 0.05 + rng.uniform();
    s += std::pow(v, 2.0 - cfg.t());
  }
  if (s == 0.0) {
    q[0] = 1.0;
    s = 1.0;
  }
  for (auto& v : q) v /= std::pow(s, 1.0 / (2.0 - cfg.t()));
  return TemWeights(q, cfg);
}

std::vector<double> mixed_margins(std::size_t m, Rng& rng) {
  std::vector<double> u(m);
  for (auto& v : u) v = -1.0 + 2.0 * rng.uniform();
  u[0] = std::abs(u[0]) + 0.1;
  u[1] = -std::abs(u[1]) - 0.1;
  return u;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("uniform initialization") {
  const auto q1 = uniform_init(4, TemperConfig(1.0));
  for (double v : q1.values()) CHECK(v == 0.25);
  const auto q0 = uniform_init(4, TemperConfig(0.0));
  double sq = 0.0;
  for (double v : q0.values()) {
    CHECK(v == doctest::Approx(0.5));
    sq += v * v;
  }
  CHECK(sq == doctest::Approx(1.0));
  for (double t : {0.0, 0.7, 1.3}) {
    const auto q = uniform_init(1, TemperConfig(t));
    CHECK(q.size() == 1);
    CHECK(q[0] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(uniform_init(0, TemperConfig(0.5)), Error);
}

TEST_CASE("TemWeights validation") {
  const TemperConfig cfg(0.0);
  CHECK_THROWS_AS(TemWeights({0.5, 0.5}, cfg), Error);
  CHECK_THROWS_AS(TemWeights({-0.1, 1.0}, cfg), Error);
  CHECK_THROWS_AS(TemWeights({}, cfg), Error);
  const TemWeights q({0.6, 0.0, 0.8}, cfg);
  CHECK(q.dagger_set() == std::vector<std::size_t>{1});
  CHECK(q.co_simplex_residual() <= 1e-12);
}

TEST_CASE("co-density") {
  const TemWeights q1({0.2, 0.3, 0.5}, TemperConfig(1.0));
  const CoDensity p1 = co_density(q1);
  CHECK(p1.p == std::vector<double>{0.2, 0.3, 0.5});
  const double h = 1.0 / std::sqrt(2.0);
  const CoDensity p0 = co_density(TemWeights({h, h}, TemperConfig(0.0)));
  CHECK(p0.p[0] == doctest::Approx(0.5));
  CHECK(p0.p[1] == doctest::Approx(0.5));
  for (double t : {0.0, 0.5, 1.5}) {
    const CoDensity p = co_density(uniform_init(7, TemperConfig(t)));
    for (double v : p.p) CHECK(v == doctest::Approx(1.0 / 7.0));
  }
}

TEST_CASE("tempered relative entropy") {
  Rng rng(21);
  for (double t : {0.0, 0.4, 1.0, 1.5}) {
    const TemperConfig cfg(t);
    for (int k = 0; k < 200; ++k) {
      const auto a = random_weights(5, cfg, rng, false);
      const auto b = random_weights(5, cfg, rng, false);
      CHECK(tempered_relative_entropy(a, a) == doctest::Approx(0.0));
      CHECK(tempered_relative_entropy(a, b) >= -1e-14);
    }
  }
  const TemWeights q_new({1.0, 0.0}, TemperConfig(1.0));
  const TemWeights q_old({0.5, 0.5}, TemperConfig(1.0));
  CHECK(tempered_relative_entropy(q_new, q_old) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(tempered_relative_entropy(q_old, q_new), Error);
}

TEST_CASE("tempered update examples") {
  Rng rng(22);
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    const auto q = random_weights(6, TemperConfig(t), rng, false);
    const auto u = mixed_margins(6, rng);
    const auto up = tempered_update(q, u, 0.0);
    CHECK(up.z == doctest::Approx(1.0));
    for (std::size_t i = 0; i < 6; ++i) CHECK(up.q[i] == doctest::Approx(q[i]));
  }
  {
    // AdaBoost's multiplicative update.
    const auto q = random_weights(6, TemperConfig(1.0), rng, false);
    const auto u = mixed_margins(6, rng);
    const double mu = 0.37;
    const auto up = tempered_update(q, u, mu);
    double z = 0.0;
    for (std::size_t i = 0; i < 6; ++i) z += q[i] * std::exp(-mu * u[i]);
    CHECK(up.z == doctest::Approx(z));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(up.q[i] == doctest::Approx(q[i] * std::exp(-mu * u[i]) / z));
    }
  }
  {
    const double a = 0.8;
    const double b = 0.6;
    const TemWeights q({a, b}, TemperConfig(0.0));
    const std::vector<double> u{1.0, -1.0};
    const auto up = tempered_update(q, u, (a - b) / 2.0);
    CHECK(up.q[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(up.q[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("tempered update errors") {
  const TemWeights q0({0.6, 0.8}, TemperConfig(0.0));
  const std::vector<double> pos{1.0, 1.0};
  CHECK_THROWS_AS(tempered_update(q0, pos, 1.0), Error);
  try {
    tempered_update(q0, pos, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::all_zero);
  }
  const auto q15 = uniform_init(2, TemperConfig(1.5));
  const std::vector<double> u{1.0, -1.0};
  try {
    tempered_update(q15, u, 100.0);
    FAIL("expected an overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::overflow);
  }
  const TemWeights q1({1.0, 0.0}, TemperConfig(1.0));
  CHECK_THROWS_AS(tempered_update(q1, u, 0.5), Error);
}

TEST_CASE("co-simplex conservation and switch-off") {
  Rng rng(23);
  for (double t : {0.0, 0.3, 0.6, 0.9, 1.0, 1.1}) {
    const TemperConfig cfg(t);
    for (int k = 0; k < 300; ++k) {
      const std::size_t m = 2 + rng.below(40);
      const auto q = random_weights(m, cfg, rng, t < 1.0);
      const auto u = mixed_margins(m, rng);
      const double mu = -0.5 + rng.uniform();
      try {
        const auto up = tempered_update(q, u, mu);
        CHECK(up.q.co_simplex_residual() <= 1e-9);
        for (double v : up.q.values()) CHECK(v >= 0.0);
        // Zeros are exactly the components whose bracket is nonpositive.
        if (t < 1.0) {
          const double k1 = 1.0 - t;
          for (std::size_t i = 0; i < m; ++i) {
            const double lq = q[i] > 0.0 ? (std::pow(q[i], k1) - 1.0) / k1 : -1.0 / k1;
            const double bracket = 1.0 + k1 * (lq - mu * u[i]);
            if (bracket <= -1e-12) CHECK(up.q[i] == 0.0);
            if (bracket >= 1e-12) CHECK(up.q[i] > 0.0);
          }
        }
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::all_zero);
      }
    }
  }
}

TEST_CASE("normalizer is convex in mu") {
  Rng rng(24);
  for (double t : {0.2, 0.6, 1.0, 1.4}) {
    const TemperConfig cfg(t);
    for (int k = 0; k < 100; ++k) {
      const auto q = random_weights(8, cfg, rng, false);
      const auto u = mixed_margins(8, rng);
      const double a = -1.0 + 0.5 * rng.uniform();
      const double c = 0.5 + 0.5 * rng.uniform();
      const double lam = rng.uniform();
      const double b = lam * a + (1.0 - lam) * c;
      const double za = normalizer(q, u, a);
      const double zb = normalizer(q, u, b);
      const double zc = normalizer(q, u, c);
      if (std::isfinite(za) && std::isfinite(zc)) {
        CHECK(zb <= lam * za + (1.0 - lam) * zc + 1e-12);
      }
    }
  }
}

TEST_CASE("projection examples") {
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    const auto q = uniform_init(4, TemperConfig(t));
    const std::vector<double> u{0.7, -0.7, 0.7, -0.7};
    const auto pr = solve_projection(q, u);
    CHECK(std::abs(pr.mu) <= 1e-12);
  }
  const double a = 0.8;
  const double b = 0.6;
  const auto pr = solve_projection(TemWeights({a, b}, TemperConfig(0.0)),
                                   std::vector<double>{1.0, -1.0});
  CHECK(pr.mu == doctest::Approx((a - b) / 2.0).epsilon(1e-10));
}

TEST_CASE("projection errors") {
  const double h = 1.0 / std::sqrt(2.0);
  const TemWeights q0({h, h}, TemperConfig(0.0));
  try {
    solve_projection(q0, std::vector<double>{2.0, 2.0});
    FAIL("expected collinear");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::collinear);
  }
  const auto q = uniform_init(3, TemperConfig(0.5));
  try {
    solve_projection(q, std::vector<double>{1.0, 0.5, 0.0});
    FAIL("expected no mixed signs");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_mixed_signs);
  }
}

TEST_CASE("projection minimizes the normalizer and zeroes the edge") {
  Rng rng(25);
  for (double t : {0.0, 0.3, 0.7, 1.0, 1.2, 1.6}) {
    const TemperConfig cfg(t);
    for (int k = 0; k < 30; ++k) {
      const std::size_t m = 2 + rng.below(10);
      const auto q = random_weights(m, cfg, rng, false);
      const auto u = mixed_margins(m, rng);
      Projection pr = [&] {
        try {
          return solve_projection(q, u);
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::collinear);
          throw;
        }
      }();
      double u_inf = 0.0;
      for (double v : u) u_inf = std::max(u_inf, std::abs(v));
      CHECK(std::abs(dot(pr.q.values(), u)) <= 1e-10 * u_inf);
      // Dense scan of Z_t around the optimum.
      const double z_star = normalizer(q, u, pr.mu);
      const double width = 4.0 * (std::abs(pr.mu) + 1.0);
      for (int g = 0; g <= 20000; ++g) {
        const double mu = pr.mu - width + 2.0 * width * g / 20000.0;
        const double z = normalizer(q, u, mu);
        CHECK(z >= z_star * (1.0 - 1e-12));
      }
    }
  }
}
