#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cauchy_forensics/arctan_estimator.hpp"
#include "cauchy_forensics/random.hpp"

using Catch::Approx;
using namespace cauchy_forensics;

namespace {

// Exact Cauchy quantiles at i/(n+1).
std::vector<double> exact_grid(std::size_t n, const CauchyParams& p) {
  std::vector<double> xs;
  for (std::size_t i = 1; i <= n; ++i) {
    xs.push_back(quantile(static_cast<double>(i) / static_cast<double>(n + 1), p));
  }
  return xs;
}

std::vector<double> sorted_cauchy_sample(Rng& rng, std::size_t n, const CauchyParams& p) {
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = p.location() + p.scale() * rng.normal_ratio();
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

CauchyParams fit(const std::vector<double>& sorted, std::size_t reject) {
  return fit_arctan_regression(reject_extremes(sorted, reject));
}

} // namespace

TEST_CASE("plotting positions", "[estimator]") {
  CHECK(plotting_positions(1) == std::vector<double>{0.5});
  CHECK(plotting_positions(3) == std::vector<double>{0.25, 0.5, 0.75});
  const auto four = plotting_positions(4);
  REQUIRE(four.size() == 4);
  CHECK(four[0] == Approx(0.2));
  CHECK(four[1] == Approx(0.4));
  CHECK(four[2] == Approx(0.6));
  CHECK(four[3] == Approx(0.8));
  CHECK_THROWS_AS(plotting_positions(0), DomainError);
}

TEST_CASE("tangent transform", "[estimator]") {
  CHECK(tangent_transform(std::vector{0.5})[0] == 0.0);
  const auto t = tangent_transform(std::vector{0.25, 0.75});
  CHECK(t[0] == Approx(-1.0).margin(1e-15));
  CHECK(t[1] == Approx(1.0).margin(1e-15));
  // tan(0.4 pi), evaluated with mpmath at 30 digits: 3.07768353717525
  CHECK(tangent_transform(std::vector{0.9})[0] == Approx(3.07768353717525).margin(1e-12));
  CHECK_THROWS_AS(tangent_transform(std::vector{0.0}), DomainError);
  CHECK_THROWS_AS(tangent_transform(std::vector{0.3, 1.0}), DomainError);
}

TEST_CASE("reject_extremes split rule", "[estimator]") {
  const std::vector<double> six{1, 2, 3, 4, 5, 6};
  const auto a = reject_extremes(six, 2);
  CHECK(a.values == std::vector<double>{2, 3, 4, 5});
  CHECK(a.rejected_low == 1);
  CHECK(a.rejected_high == 1);

  const std::vector<double> seven{1, 2, 3, 4, 5, 6, 7};
  const auto b = reject_extremes(seven, 1);
  CHECK(b.values == std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(b.rejected_low == 0);
  CHECK(b.rejected_high == 1);

  std::vector<double> thirty_five(35);
  for (std::size_t i = 0; i < 35; ++i) thirty_five[i] = static_cast<double>(i);
  const auto c = reject_extremes(thirty_five, 3);
  CHECK(c.n() == 32);
  CHECK(c.rejected_high == 2);
  CHECK(c.rejected_low == 1);
  CHECK(c.original_size() == 35);

  CHECK_THROWS_AS(reject_extremes(six, 3), DomainError);
  CHECK_THROWS_AS(reject_extremes(six, 6), DomainError);
  CHECK_THROWS_AS(reject_extremes(std::vector<double>{3, 2, 1, 0, -1}, 0), DomainError);
}

TEST_CASE("arctan regression recovers exact quantile samples", "[estimator]") {
  for (const CauchyParams p : {CauchyParams{0.0, 1.0}, CauchyParams{-1.0, 1.2}}) {
    const auto xs = exact_grid(100, p);
    const auto est = fit(xs, 0);
    CHECK(est.location() == Approx(p.location()).margin(1e-9));
    CHECK(est.scale() == Approx(p.scale()).margin(1e-9));
    CHECK(arctan_residual_ss(reject_extremes(xs, 0), est) < 1e-18);
  }
}

TEST_CASE("arctan regression errors", "[estimator]") {
  RatioSample s;
  s.values = {1, 2, 3};
  CHECK_THROWS_AS(fit_arctan_regression(s), DomainError);

  // Constant values give a zero slope, which is not a valid scale.
  s.values = {1, 1, 1, 1, 1};
  CHECK_THROWS_AS(fit_arctan_regression(s), EstimationError);
}

TEST_CASE("rejection sweep", "[estimator]") {
  const CauchyParams p(2.5, 0.7);
  const auto xs = exact_grid(50, p);
  const std::vector<std::size_t> levels{0, 2, 4};
  const auto rows = rejection_sweep(xs, levels);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].rejected_total == levels[i]);
    CHECK(rows[i].location_hat == Approx(2.5).margin(1e-9));
    CHECK(rows[i].scale_hat == Approx(0.7).margin(1e-9));
  }

  const std::vector<std::size_t> bad{1, 47};
  try {
    rejection_sweep(xs, bad);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("rejection level 47") != std::string::npos);
  }
}

TEST_CASE("rejection sweep on seeded Cauchy samples is stable in scale", "[estimator][montecarlo]") {
  // The spread of gamma-hat over trims {10, 50, 100} at n = 1000 is itself
  // heavy-tailed: below 0.15 for a typical sample, well above for some.
  Rng rng(20241015);
  const std::vector<std::size_t> levels{10, 50, 100};
  std::vector<double> spreads;
  for (int trial = 0; trial < 200; ++trial) {
    const auto xs = sorted_cauchy_sample(rng, 1000, CauchyParams::standard());
    const auto rows = rejection_sweep(xs, levels);
    const auto [lo, hi] = std::minmax_element(
        rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.scale_hat < b.scale_hat; });
    spreads.push_back(hi->scale_hat - lo->scale_hat);
  }
  std::sort(spreads.begin(), spreads.end());
  CHECK(spreads[spreads.size() / 2] < 0.15);
}

TEST_CASE("quantile oracle", "[estimator][oracle]") {
  const auto a = quantile_oracle(exact_grid(99, CauchyParams::standard()));
  CHECK(a.location() == Approx(0.0).margin(1e-9));
  CHECK(a.scale() == Approx(1.0).margin(1e-9));

  const auto b = quantile_oracle(exact_grid(99, {5.0, 2.0}));
  CHECK(b.location() == Approx(5.0).margin(1e-9));
  CHECK(b.scale() == Approx(2.0).margin(1e-9));

  Rng rng(10000);
  const auto xs = sorted_cauchy_sample(rng, 10000, CauchyParams::standard());
  const auto c = quantile_oracle(xs);
  CHECK(std::abs(c.location()) <= 0.05);
  CHECK(std::abs(c.scale() - 1.0) <= 0.05);

  CHECK_THROWS_AS(quantile_oracle(std::vector<double>{1, 2, 3}), DomainError);
}

TEST_CASE("estimator equivariance and determinism", "[estimator][property]") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xs = sorted_cauchy_sample(rng, 200, {rng.uniform(-2, 2), rng.uniform(0.5, 3)});
    const double shift = rng.uniform(-10, 10);
    const double factor = rng.uniform(0.1, 10);
    const auto base = fit(xs, 8);

    std::vector<double> shifted(xs);
    std::vector<double> scaled(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      shifted[i] += shift;
      scaled[i] *= factor;
    }
    const auto s = fit(shifted, 8);
    const auto m = fit(scaled, 8);
    REQUIRE(std::abs(s.location() - (base.location() + shift)) < 1e-12);
    REQUIRE(std::abs(s.scale() - base.scale()) < 1e-12);
    REQUIRE(std::abs(m.location() - factor * base.location()) < 1e-12);
    REQUIRE(std::abs(m.scale() - factor * base.scale()) < 1e-12);

    const auto again = fit(xs, 8);
    REQUIRE(again.location() == base.location());
    REQUIRE(again.scale() == base.scale());
  }
}

TEST_CASE("arctan regression agrees with the quantile oracle", "[estimator][oracle][montecarlo]") {
  // n = 1000 with 20% total trim; lighter trims leave the tail leverage too
  // large for 0.1 * gamma agreement.
  Rng rng(424242);
  int agree = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const CauchyParams truth(rng.uniform(-2, 2), rng.uniform(0.5, 3));
    const auto xs = sorted_cauchy_sample(rng, 1000, truth);
    const auto a = fit(xs, 200);
    const auto o = quantile_oracle(xs);
    const double tol = 0.1 * truth.scale();
    agree += (std::abs(a.location() - o.location()) <= tol && std::abs(a.scale() - o.scale()) <= tol) ? 1 : 0;
  }
  CHECK(agree >= 190);
}
