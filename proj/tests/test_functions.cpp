#include <doctest.h>

#include <cmath>

#include "pwlmilp/functions.hpp"

using namespace pwlmilp;

TEST_CASE("builtin registry") {
  for (const auto& name : fitfn::builtin_names()) {
    auto f = fitfn::builtin(name);
    CHECK(f.lipschitz > 0.0);
    CHECK(std::isfinite(f.eval(0.3, 0.7)));
  }
  CHECK_THROWS_AS(fitfn::builtin("nope"), Error);
  // f4 and its ripple alias agree.
  auto f4 = fitfn::builtin("f4");
  auto ripple = fitfn::builtin("ripple");
  CHECK(f4.eval(0.2, 0.8) == ripple.eval(0.2, 0.8));
}

TEST_CASE("registry Lipschitz constants dominate sampled gradients") {
  // Coarse re-check of the frozen constants (the fine-grid maxima were
  // computed offline; this guards against regressions in the formulas).
  for (const auto& name : {"f1", "f2", "f3", "f4", "f5"}) {
    auto f = fitfn::builtin(name);
    double est = fitfn::estimate_lipschitz(f.eval, f.lo, f.hi, 160) / 1.5;
    CHECK(est <= f.lipschitz);
  }
}

TEST_CASE("expression compiler") {
  auto f = fitfn::compile_expression("x + 2*y");
  CHECK(f(1.0, 2.0) == doctest::Approx(5.0));
  auto g = fitfn::compile_expression("sin(pi*x)*cos(pi*y) + 0.5");
  CHECK(g(0.5, 0.0) == doctest::Approx(1.5));
  auto h = fitfn::compile_expression("exp(-(x^2 + y^2))");
  CHECK(h(0.0, 0.0) == doctest::Approx(1.0));
  auto k = fitfn::compile_expression("atan2(y - 0.5, x - 0.5)");
  CHECK(k(1.0, 0.5) == doctest::Approx(0.0));
  auto neg = fitfn::compile_expression("-x + sqrt(abs(y))");
  CHECK(neg(2.0, 4.0) == doctest::Approx(0.0));
  CHECK(fitfn::compile_expression("2^3^1")(0, 0) == doctest::Approx(8.0));
}

TEST_CASE("expression parse errors") {
  CHECK_THROWS_AS(fitfn::compile_expression("x +"), Error);
  CHECK_THROWS_AS(fitfn::compile_expression("foo(x)"), Error);
  CHECK_THROWS_AS(fitfn::compile_expression("sin x"), Error);
  CHECK_THROWS_AS(fitfn::compile_expression("(x"), Error);
  CHECK_THROWS_AS(fitfn::compile_expression("x ) y"), Error);
}

TEST_CASE("from_expression estimates a Lipschitz constant when absent") {
  auto t = fitfn::from_expression("x + y", {0, 0}, {1, 1});
  CHECK_FALSE(t.lipschitz_verified);
  CHECK(t.lipschitz >= std::sqrt(2.0));          // true value ~1.414
  CHECK(t.lipschitz <= 1.6 * std::sqrt(2.0));    // 1.5x safety margin
  auto u = fitfn::from_expression("x + y", {0, 0}, {1, 1}, 2.0);
  CHECK(u.lipschitz == 2.0);
  CHECK(u.lipschitz_verified);
}
