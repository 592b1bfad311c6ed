#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "qtm/symbol.hpp"

using qtm::LaurentSymbol;

namespace {

double max_coeff_diff(const LaurentSymbol& a, const LaurentSymbol& b) {
  const long long lo = std::min(a.is_zero() ? 0 : a.lowest_index,
                                b.is_zero() ? 0 : b.lowest_index);
  const long long hi = std::max(a.is_zero() ? 0 : a.highest_index(),
                                b.is_zero() ? 0 : b.highest_index());
  double m = 0.0;
  for (long long k = lo; k <= hi; ++k)
    m = std::max(m, std::abs(a.at(k) - b.at(k)));
  return m;
}

}  // namespace

TEST_CASE("wiener norm sums coefficient moduli") {
  LaurentSymbol a(-1, {-1.0, 2.0, 1.0, 1.0});  // -z^-1 + 2 + z + z^2
  CHECK(qtm::wiener_norm(a) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(qtm::wiener_norm(LaurentSymbol::zero()) == 0.0);
}

TEST_CASE("canonical form trims exact zeros only") {
  LaurentSymbol a(-2, {0.0, 1.0, 0.0, 1e-300, 0.0});
  CHECK(a.lowest_index == -1);
  CHECK(a.highest_index() == 1);
  CHECK(a.support() == 3);

  LaurentSymbol z(5, {0.0, 0.0});
  CHECK(z.is_zero());
  CHECK(z.lowest_index == 0);
}

TEST_CASE("add aligns supports and cancels exactly") {
  LaurentSymbol a(0, {1.0, 1.0});   // 1 + z
  LaurentSymbol b(1, {-1.0});       // -z
  LaurentSymbol c = qtm::add(a, b);
  CHECK(c.lowest_index == 0);
  CHECK(c.support() == 1);
  CHECK(c.at(0) == 1.0);
}

TEST_CASE("multiply matches naive convolution on frozen examples") {
  LaurentSymbol a(0, {1.0, 1.0});
  LaurentSymbol b(0, {1.0, -1.0});
  LaurentSymbol c = qtm::multiply(a, b);  // 1 - z^2
  CHECK(c.at(0) == 1.0);
  CHECK(c.at(1) == 0.0);
  CHECK(c.at(2) == -1.0);

  LaurentSymbol d(-1, {1.0, 1.0});        // z^-1 + 1
  LaurentSymbol e = qtm::multiply(d, d);  // z^-2 + 2 z^-1 + 1
  CHECK(e.lowest_index == -2);
  CHECK(e.at(-2) == 1.0);
  CHECK(e.at(-1) == 2.0);
  CHECK(e.at(0) == 1.0);
}

TEST_CASE("multiply agrees with naive convolution on random symbols") {
  std::mt19937_64 rng(71);
  // Small supports take the direct path, large ones the transform path.
  const long long spans[] = {5, 40, 300};
  for (long long span : spans) {
    for (int rep = 0; rep < 10; ++rep) {
      auto a = oracle::random_symbol(rng, -span, span / 2);
      auto b = oracle::random_symbol(rng, -span / 3, span);
      auto got = qtm::multiply(a, b);
      auto want = oracle::conv_naive(a, b);
      const double scale = qtm::wiener_norm(a) * qtm::wiener_norm(b) + 1.0;
      CHECK(max_coeff_diff(got, want) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("reverse substitutes z with its inverse") {
  LaurentSymbol a(-1, {3.0, 2.0, 1.0});  // 3 z^-1 + 2 + z
  LaurentSymbol r = qtm::reverse(a);
  CHECK(r.at(1) == 3.0);
  CHECK(r.at(0) == 2.0);
  CHECK(r.at(-1) == 1.0);
  CHECK(max_coeff_diff(qtm::reverse(r), a) == 0.0);
}

TEST_CASE("split separates tails and reassembles exactly") {
  LaurentSymbol a(-1, {-1.0, 2.0, 1.0, 1.0});  // -z^-1 + 2 + z + z^2
  auto s = qtm::split(a);
  CHECK(s.center == 2.0);
  CHECK(s.minus.at(1) == -1.0);      // coefficient of z^-1 lands at power 1
  CHECK(s.minus.highest_index() == 1);
  CHECK(s.plus.at(1) == 1.0);
  CHECK(s.plus.at(2) == 1.0);
  CHECK(s.plus.lowest_index >= 1);

  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    auto x = oracle::random_symbol(rng, -7, 11);
    auto sp = qtm::split(x);
    auto back = qtm::add(qtm::reverse(sp.minus),
                         qtm::add(LaurentSymbol(0, {sp.center}), sp.plus));
    CHECK(max_coeff_diff(back, x) == 0.0);
  }
}

TEST_CASE("split of a pure monomial") {
  auto s = qtm::split(LaurentSymbol::monomial(-3));
  CHECK(s.center == 0.0);
  CHECK(s.plus.is_zero());
  CHECK(s.minus.at(3) == 1.0);
  CHECK(s.minus.support() == 1);
}

TEST_CASE("truncate_symbol removes at most eps of coefficient mass") {
  SUBCASE("zero budget is the identity") {
    LaurentSymbol a(0, {1.0, 1.0});
    auto t = qtm::truncate_symbol(a, 0.0);
    CHECK(max_coeff_diff(t, a) == 0.0);
  }

  SUBCASE("two-sided exponential tail") {
    // Coefficients e^{-|j|} on [-40, 40]; with eps = 1e-8 the greedy scan
    // consumes tail mass strictly below the budget.
    LaurentSymbol a;
    a.lowest_index = -40;
    for (long long j = -40; j <= 40; ++j)
      a.coefficients.push_back(std::exp(-static_cast<double>(std::llabs(j))));
    auto t = qtm::truncate_symbol(a, 1e-8);
    CHECK(qtm::wiener_norm(qtm::sub(a, t)) <= 1e-8);
    CHECK(t.lowest_index >= -19);
    CHECK(t.highest_index() <= 19);
  }

  SUBCASE("property: removed mass bounded by eps") {
    std::mt19937_64 rng(1234);
    for (int rep = 0; rep < 50; ++rep) {
      auto a = oracle::random_symbol(rng, -20, 20, 0.7);
      const double eps = 1e-6 * (1.0 + qtm::wiener_norm(a));
      auto t = qtm::truncate_symbol(a, eps);
      CHECK(qtm::wiener_norm(qtm::sub(a, t)) <= eps);
      // Remaining extremes do not fit in what is left of the budget.
      if (!t.is_zero() && t.support() < a.support()) {
        const double removed = qtm::wiener_norm(qtm::sub(a, t));
        const double smallest_kept =
            std::min(std::abs(t.coefficients.front()), std::abs(t.coefficients.back()));
        CHECK(removed + smallest_kept >= eps);
      }
    }
  }
}

TEST_CASE("power series inversion on a geometric series") {
  LaurentSymbol u(0, {1.0, -0.5});  // 1 - z/2, inverse sum 2^-k z^k
  auto v = qtm::invert_power_series(u, 1e-14);
  for (long long k = 0; k <= 40; ++k)
    CHECK(std::abs(v.at(k) - std::pow(0.5, static_cast<double>(k))) <= 1e-14);
  auto r = qtm::sub(qtm::multiply(u, v), LaurentSymbol::one());
  CHECK(qtm::wiener_norm(r) <= 1e-14 * qtm::wiener_norm(u));
}

TEST_CASE("power series inversion residual contract on random series") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 20; ++rep) {
    auto tail = oracle::random_symbol(rng, 1, 12, 0.5);
    auto u = qtm::add(LaurentSymbol(0, {2.0 + qtm::wiener_norm(tail)}), tail);
    const double eps = 1e-13;
    auto v = qtm::invert_power_series(u, eps);
    auto r = qtm::sub(qtm::multiply(u, v), LaurentSymbol::one());
    CHECK(qtm::wiener_norm(r) <= eps * qtm::wiener_norm(u));
    CHECK(v.lowest_index == 0);
  }
}

TEST_CASE("power series inversion residual decays quadratically") {
  // u = 1 - 0.99 z keeps the residual chain large for many doublings, so the
  // squaring law r <- r^2 is observable over ~10 steps. The additive floor
  // accounts for convolution rounding (measured near 2e-13 at this scale).
  LaurentSymbol u(0, {1.0, -0.99});
  std::vector<double> trace;
  auto v = qtm::detail::invert_series_impl<double>(
      u, [](double rn) { return rn <= 1e-12; }, &trace);
  REQUIRE(trace.size() >= 5);
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    CHECK(trace[i + 1] <= trace[i] * trace[i] * (1.0 + 1e-10) + 1e-11);
  auto r = qtm::sub(qtm::multiply(u, v), LaurentSymbol::one());
  CHECK(qtm::wiener_norm(r) <= 1e-12);

  // A target below the rounding floor is detected as a stall, not looped on.
  CHECK_THROWS_AS(qtm::detail::invert_series_impl<double>(
                      LaurentSymbol(0, {1.0, -0.998}),
                      [](double rn) { return rn <= 1e-13; }),
                  qtm::NoConvergence);
}

TEST_CASE("power series inversion rejects bad inputs") {
  CHECK_THROWS_AS(qtm::invert_power_series(LaurentSymbol::zero(), 1e-10),
                  qtm::NonInvertibleSeries);
  CHECK_THROWS_AS(qtm::invert_power_series(LaurentSymbol::monomial(1), 1e-10),
                  qtm::NonInvertibleSeries);
  CHECK_THROWS_AS(qtm::invert_power_series(LaurentSymbol(-1, {1.0, 1.0}), 1e-10),
                  qtm::DimensionMismatch);
  // Zero of u inside the unit disk: Newton cannot converge in the Wiener norm.
  CHECK_THROWS_AS(qtm::invert_power_series(LaurentSymbol(0, {1.0, -2.0}), 1e-10),
                  qtm::NoConvergence);
}

TEST_CASE("winding number of basic symbols") {
  CHECK(qtm::winding_number(LaurentSymbol::monomial(1)) == 1);
  CHECK(qtm::winding_number(LaurentSymbol::monomial(-2)) == -2);
  CHECK(qtm::winding_number(LaurentSymbol(0, {1.0, 0.5})) == 0);
  CHECK(qtm::winding_number(LaurentSymbol(0, {1.0, -2.0})) == 1);   // zero at 1/2
  CHECK(qtm::winding_number(LaurentSymbol(-1, {-2.0, 1.0})) == -1); // z^-1 (z - 2)
}

TEST_CASE("winding number is additive under multiplication") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = qtm::shift(oracle::random_dominant_symbol(rng, -4, 6),
                        static_cast<long long>(rng() % 5) - 2);
    auto b = qtm::shift(oracle::random_dominant_symbol(rng, -3, 3),
                        static_cast<long long>(rng() % 3) - 1);
    CHECK(qtm::winding_number(qtm::multiply(a, b)) ==
          qtm::winding_number(a) + qtm::winding_number(b));
  }
}

TEST_CASE("winding number rejects symbols vanishing on the circle") {
  CHECK_THROWS_AS(qtm::winding_number(LaurentSymbol::zero()),
                  qtm::SymbolVanishesOnCircle);
  // 1 - z vanishes at z = 1, which is always a grid point.
  CHECK_THROWS_AS(qtm::winding_number(LaurentSymbol(0, {1.0, -1.0})),
                  qtm::SymbolVanishesOnCircle);
}

TEST_CASE("complex symbols reuse the same arithmetic") {
  using C = std::complex<double>;
  qtm::ComplexLaurentSymbol a(-1, {C(0.0, 1.0), C(2.0, 0.0)});
  CHECK(qtm::wiener_norm(a) == doctest::Approx(3.0));
  auto p = qtm::multiply(a, a);
  CHECK(p.at(-2) == C(-1.0, 0.0));
  CHECK(p.at(-1) == C(0.0, 4.0));
  CHECK(p.at(0) == C(4.0, 0.0));
  CHECK(qtm::winding_number(qtm::ComplexLaurentSymbol(
            0, {C(1.0, 0.0), C(0.25, 0.25)})) == 0);
}
