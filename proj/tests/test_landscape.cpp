#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rbo/errors.hpp"
#include "rbo/landscape.hpp"

using namespace rbo;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector random_theta(std::mt19937_64& rng, Index d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("landscape") {
  TEST_CASE("quadratic values, gradients and hessian") {
    const auto f1 = quadratic(Matrix::Constant(1, 1, 1.0), vec({0.0}));
    CHECK(f1->value(vec({2.0})) == Approx(2.0));

    const auto f4 = quadratic(Matrix::Constant(1, 1, 4.0), vec({0.0}));
    REQUIRE(f4->hessian(vec({0.0})));
    CHECK((*f4->hessian(vec({0.0})))(0, 0) == Approx(4.0));

    const auto f28 = quadratic(mat2(2, 0, 0, 8), vec({0.0, 0.0}));
    const Vector g = f28->gradient(vec({1.0, 1.0}));
    CHECK(g[0] == Approx(2.0));
    CHECK(g[1] == Approx(8.0));
  }

  TEST_CASE("quadratic rejects bad matrices") {
    CHECK_THROWS_AS(quadratic(mat2(1, 2, 0, 1), vec({0.0, 0.0})), InvalidArgument);
    CHECK_THROWS_AS(quadratic(mat2(1, 0, 0, -1), vec({0.0, 0.0})), InvalidArgument);
    CHECK_THROWS_AS(quadratic(Matrix::Identity(2, 2), vec({0.0})), InvalidArgument);
  }

  TEST_CASE("quadratic is non-negative and vanishes only at the center for PD A") {
    const auto f = quadratic(mat2(3, 1, 1, 2), vec({0.5, -1.0}));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
      const Vector t = random_theta(rng, 2, -10, 10);
      CHECK(f->value(t) > 0.0);
    }
    CHECK(f->value(vec({0.5, -1.0})) == 0.0);
  }

  TEST_CASE("riemann partial sums") {
    CHECK(riemann(100)->value(vec({0.0})) == 0.0);
    CHECK(riemann(1)->value(vec({std::numbers::pi / 2})) == Approx(1.0).epsilon(1e-15));

    double odd = 0.0;
    for (int n = 1; n <= 99; n += 2) odd += 1.0 / (n * n);
    const double at = riemann(100)->value(vec({std::numbers::pi / 2}));
    CHECK(at == Approx(odd).epsilon(1e-12));
    CHECK(at == Approx(1.2287).epsilon(1e-4));

    std::mt19937_64 rng(11);
    const auto f = riemann(100);
    for (double t : oracle::uniform(rng, 50, -10, 10)) {
      CHECK(f->value1d(t) == Approx(oracle::riemann_sum(100, t)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(riemann(0), InvalidArgument);
  }

  TEST_CASE("riemann is odd") {
    const auto f = riemann(100);
    std::mt19937_64 rng(3);
    for (double t : oracle::uniform(rng, 100, -10, 10)) CHECK(f->value1d(-t) == -f->value1d(t));
  }

  TEST_CASE("sinusoid and constant") {
    const auto s = sinusoid();
    CHECK(s->value(vec({0.0})) == 0.0);
    CHECK(s->gradient(vec({0.0}))[0] == 1.0);
    REQUIRE(s->bounds());
    CHECK(s->bounds()->upper == 1.0);

    const auto c = constant(3, 5.0);
    CHECK(c->value(vec({1.0, 2.0, 3.0})) == 5.0);
    CHECK(c->gradient(vec({1.0, 2.0, 3.0})).norm() == 0.0);
  }

  TEST_CASE("affine plus bump") {
    const auto flat = affine_plus_bump(vec({1.0}), 0.0, sin_profile(), 0.0);
    CHECK(flat->value(vec({3.0})) == 3.0);

    const auto bumped = affine_plus_bump(vec({1.0}), 0.0, sin_profile(), 0.1);
    CHECK(bumped->value(vec({std::numbers::pi / 2})) == Approx(std::numbers::pi / 2 + 0.1));
    CHECK(bumped->affine_part()->value(vec({std::numbers::pi / 2})) == Approx(std::numbers::pi / 2));

    const auto level = affine_plus_bump(vec({0.0}), 0.0, sin_profile(), 1.0);
    REQUIRE(level->bounds());
    CHECK(level->bounds()->upper == 1.0);
    CHECK_FALSE(bumped->bounds());
  }

  TEST_CASE("catalogue by id") {
    CHECK(make_landscape("riemann", {{"N", 5}})->value1d(1.0) == Approx(oracle::riemann_sum(5, 1.0)));
    CHECK(make_landscape("quadratic", {{"A", {{2.0}}}})->value(vec({3.0})) == Approx(9.0));
    CHECK(make_landscape("sin", nlohmann::json::object())->value1d(0.5) == Approx(std::sin(0.5)));
    CHECK_THROWS_WITH_AS(make_landscape("nope", nlohmann::json::object()), doctest::Contains("nope"),
                         InvalidArgument);
  }

  TEST_CASE("finite-difference examples") {
    const auto q = quadratic(Matrix::Constant(1, 1, 1.0), vec({0.0}));
    CHECK(finite_difference_grad(*q, vec({1.0}), 1e-5)[0] == Approx(1.0).epsilon(1e-8));
    CHECK(finite_difference_grad(*riemann(1), vec({0.0}), 1e-5)[0] == Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(finite_difference_grad(*q, vec({1.0}), 0.0), InvalidArgument);
  }

  TEST_CASE("gradients agree with finite differences") {
    struct Case {
      LandscapePtr f;
      double lo, hi;
    };
    const std::vector<Case> cases{
        {quadratic(mat2(3, 1, 1, 2), vec({0.5, -1.0})), -10, 10},
        {riemann(1), -10, 10},
        {riemann(10), -10, 10},
        {sinusoid(), -10, 10},
        {constant(2, 1.5), -10, 10},
        {affine_plus_bump(vec({1.0, -2.0}), 0.5, sin_profile(), 0.7), -10, 10},
        {affine_plus_bump(vec({0.3, 0.1}), 0.0, gaussian_profile(), 1.0, BumpPattern::radial), -3, 3},
    };
    std::mt19937_64 rng(2024);
    for (const auto& c : cases) {
      CAPTURE(c.f->id());
      for (int i = 0; i < 100; ++i) {
        const Vector t = random_theta(rng, c.f->dim(), c.lo, c.hi);
        const Vector g = c.f->gradient(t);
        const Vector fd = finite_difference_grad_relative(*c.f, t, 1e-5);
        CHECK((g - fd).norm() <= 1e-4 * (1.0 + g.norm()));
      }
    }
  }

  TEST_CASE("riemann(100) gradient with a step below its top frequency") {
    // Top frequency is 100^2, so the relative 1e-5 step is too coarse here.
    const auto f = riemann(100);
    std::mt19937_64 rng(99);
    for (double t : oracle::uniform(rng, 100, -10, 10)) {
      const Vector th = vec({t});
      const double g = f->gradient(th)[0];
      const double fd = finite_difference_grad(*f, th, 1e-7)[0];
      CHECK(std::abs(g - fd) <= 1e-4 * (1.0 + std::abs(g)));
    }
  }

  TEST_CASE("value_and_gradient matches separate calls") {
    const auto f = affine_plus_bump(vec({1.0, -2.0}), 0.5, sin_profile(), 0.7);
    const Vector t = vec({0.3, 1.7});
    Vector g;
    const double v = f->value_and_gradient(t, g);
    CHECK(v == f->value(t));
    CHECK(g == f->gradient(t));
  }

  TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(riemann(3)->value(vec({1.0, 2.0})), InvalidArgument);
  }
}
