#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rbo/errors.hpp"
#include "rbo/geometry.hpp"
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

LandscapePtr parabola(double sigma) { return quadratic(Matrix::Constant(1, 1, sigma), vec({0.0})); }

// Forwards value and gradient but withholds the Hessian.
class NoHessian final : public Landscape {
 public:
  explicit NoHessian(LandscapePtr inner) : inner_(std::move(inner)) {}
  Index dim() const override { return inner_->dim(); }
  double value(const Vector& t) const override { return inner_->value(t); }
  Vector gradient(const Vector& t) const override { return inner_->gradient(t); }
  std::string id() const override { return "no_hessian"; }

 private:
  LandscapePtr inner_;
};

oracle::Fn fn(const LandscapePtr& f) {
  return [f](double t) { return f->value1d(t); };
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("normal and tangent examples") {
    const auto f = parabola(2.0);  // theta^2
    const Vector n0 = normal(*f, vec({0.0}));
    CHECK(n0[0] == 0.0);
    CHECK(n0[1] == 1.0);
    const Vector n1 = normal(*f, vec({1.0}));
    CHECK(n1[0] == Approx(-2.0 / std::sqrt(5.0)));
    CHECK(n1[1] == Approx(1.0 / std::sqrt(5.0)));

    const Vector t0 = tangent(*f, vec({0.0}));
    CHECK(t0.norm() == 0.0);
    const Vector t1 = tangent(*f, vec({1.0}));
    CHECK(t1[0] == Approx(2.0));
    CHECK(t1[1] == Approx(4.0));
  }

  TEST_CASE("normal is unit, upward and orthogonal to the tangent") {
    const std::vector<LandscapePtr> fs{riemann(100), parabola(3.0), sinusoid(),
                                       quadratic(Matrix::Identity(3, 3) * 2.0, Vector::Zero(3))};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5, 5);
    for (const auto& f : fs) {
      for (int i = 0; i < 200; ++i) {
        Vector t(f->dim());
        for (Index k = 0; k < t.size(); ++k) t[k] = u(rng);
        const Vector n = normal(*f, t);
        const Vector tau = tangent(*f, t);
        CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
        CHECK(n[n.size() - 1] > 0.0);
        CHECK(std::abs(n.dot(tau)) <= 1e-12 * (1.0 + tau.norm()));
      }
    }
  }

  TEST_CASE("distance to graph") {
    const auto flat = constant(1, 0.0);
    CHECK(distance_to_graph(*flat, {vec({0.0}), 1.0}, {{{-3, 3, 1e-3}}}) == Approx(1.0));

    const auto f = parabola(2.0);
    const double d = distance_to_graph(*f, {vec({0.0}), 2.0}, {{{-3, 3, 1e-4}}});
    CHECK(d == Approx(std::sqrt(1.75)).epsilon(1e-6));
    CHECK(d == Approx(oracle::grid_distance(fn(f), 0.0, 2.0, -3, 3, 1e-4)).epsilon(1e-9));

    CHECK(distance_to_graph(*f, {vec({0.5}), 0.25}, {{{-3, 3, 1e-4}}}) <= 1e-4 * 3);

    const auto bowl = quadratic(Matrix::Identity(2, 2) * 2.0, Vector::Zero(2));
    const double d2 = distance_to_graph(*bowl, {vec({0.0, 0.0}), 2.0}, {{{-2, 2, 2e-3}, {-2, 2, 2e-3}}});
    CHECK(d2 == Approx(std::sqrt(1.75)).epsilon(1e-4));
  }

  TEST_CASE("offset value examples") {
    const auto c = constant(1, 5.0);
    for (double rho : {0.1, 1.0, 7.0}) CHECK(offset_value(*c, rho, 0.3, rho / 100) == Approx(5.0 + rho));

    const double v = offset_value(*sinusoid(), 100.0, 0.0, 1.0) - 100.0;
    CHECK(v >= 1.0 - 2.0 * std::pow(std::numbers::pi / 2, 2) / 100.0);
    CHECK(v <= 1.0);

    const auto line = make_landscape("affine_plus_bump", {{"a", {1.0}}, {"b", 0.0}, {"amplitude", 0.0}});
    CHECK(offset_value(*line, 2.0, 0.0, 0.02) == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK_THROWS_AS(offset_value(*c, 0.0, 0.0, 0.1), InvalidArgument);
  }

  TEST_CASE("offset value matches a dense brute-force sup") {
    std::mt19937_64 rng(17);
    const auto f = riemann(20);
    for (double rho : {0.05, 0.5, 3.0}) {
      for (double t : oracle::uniform(rng, 10, -3, 3)) {
        const double ref = oracle::offset(fn(f), rho, t, rho * 1e-5);
        const double got = offset_value(*f, rho, t, rho / 100);
        CHECK(got >= ref - 1e-9);
        CHECK(got - ref <= 1e-6);
      }
    }
  }

  TEST_CASE("offset value lies between f + rho and local sup + rho") {
    const auto f = riemann(100);
    std::mt19937_64 rng(23);
    for (double rho : {0.01, 0.3, 2.0}) {
      for (double t : oracle::uniform(rng, 20, 0, 6)) {
        const double v = offset_value(*f, rho, t, rho / 100);
        double local_sup = -1e300;
        for (int k = -20000; k <= 20000; ++k) local_sup = std::max(local_sup, f->value1d(t + rho * k / 20000.0));
        CHECK(v >= f->value1d(t) + rho - 1e-12);
        CHECK(v <= local_sup + rho + 1e-9);
      }
    }
  }

  TEST_CASE("offset samples agree with the pointwise reference") {
    const auto f = riemann(100);
    for (double rho : {0.01, 0.1, 1.0}) {
      const double h = rho / 100;
      const auto fast = offset_samples(*f, rho, 0.0, 1.0, h);
      const auto ref = offset_samples_reference(*f, rho, 0.0, 1.0, h);
      REQUIRE(fast.size() == ref.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].theta == ref[i].theta);
        CHECK(fast[i].phi_rho == ref[i].phi_rho);
        CHECK(fast[i].phi_rho >= f->value1d(fast[i].theta) + rho - 1e-12);
      }
    }
  }

  TEST_CASE("circle samples lie on the circle") {
    const SphereGrid g = make_circle({vec({0.3}), -1.2}, 0.7, 1e-3, vec({0.0, 1.0}));
    CHECK(g.samples.size() > 6000);
    for (const auto& s : g.samples) {
      const double r = std::hypot(s.theta[0] - 0.3, s.y + 1.2);
      CHECK(std::abs(r - 0.7) <= 1e-12 * 0.7);
    }
  }

  TEST_CASE("unreachability examples") {
    const auto f = parabola(4.0);  // 2 theta^2
    CHECK(is_unreachable(*f, 0.0, 0.3, 1e-3, 1e-4));
    const auto r = unreachability(*f, 0.0, 0.2, 1e-3, 1e-4);
    CHECK(r.state == Reachability::reachable);
    CHECK_FALSE(is_unreachable(*f, 0.0, 0.2, 1e-3, 1e-4));

    const auto line = make_landscape("affine_plus_bump", {{"a", {0.7}}, {"b", 1.0}, {"amplitude", 0.0}});
    for (double rho : {0.1, 1.0, 5.0}) CHECK_FALSE(is_unreachable(*line, 0.4, rho, 1e-3, 1e-4));
    CHECK_THROWS_AS(is_unreachable(*f, 0.0, 0.0, 1e-3, 1e-4), InvalidArgument);
  }

  TEST_CASE("unreachability agrees with a brute-force circle oracle") {
    struct Case {
      double sigma, theta0, rho;
    };
    for (const Case c : {Case{4, 0, 0.3}, Case{4, 0, 0.2}, Case{1, 0, 1.5}, Case{2, 0, 0.4}, Case{4, 0.5, 0.3}}) {
      CAPTURE(c.sigma);
      CAPTURE(c.rho);
      const auto f = parabola(c.sigma);
      const auto r = unreachability(*f, c.theta0, c.rho, 1e-3, 1e-4);
      const double ref = oracle::circle_clearance(fn(f), c.theta0, c.rho, 4000, 1e-5);
      CHECK(std::abs(r.clearance - ref) <= 5e-4);
      if (ref > 1e-3) CHECK(r.state == Reachability::unreachable);
      if (ref < 1e-6) CHECK(r.state != Reachability::unreachable);
    }
  }

  TEST_CASE("sharpness") {
    CHECK(sharpness(*parabola(4.0), vec({0.0})) == Approx(4.0));
    Matrix A = Matrix::Zero(2, 2);
    A.diagonal() << 2.0, 8.0;
    CHECK(sharpness(*quadratic(A, Vector::Zero(2)), Vector::Zero(2)) == Approx(8.0));
    CHECK(sharpness(*riemann(1), vec({3 * std::numbers::pi / 2})) == Approx(1.0).epsilon(1e-5));

    Matrix B(3, 3);
    B << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const double expected = Eigen::SelfAdjointEigenSolver<Matrix>(B).eigenvalues().cwiseAbs().maxCoeff();
    const Vector t = vec({0.3, -1.2, 0.1});
    CHECK(sharpness(*quadratic(B, Vector::Zero(3)), t) == Approx(expected));
    CHECK(sharpness(NoHessian(quadratic(B, Vector::Zero(3))), t) == Approx(expected).epsilon(1e-5));

    // Separable sin bump: Hessian diag(-sin theta_i), spectral norm max |sin|.
    const auto bump = affine_plus_bump(Vector::Zero(3), 0.0, sin_profile(), 1.0);
    CHECK(sharpness(NoHessian(bump), t) == Approx(std::abs(std::sin(-1.2))).epsilon(1e-5));
    CHECK(sharpness(NoHessian(parabola(4.0)), vec({0.0})) == Approx(4.0).epsilon(1e-6));
  }

  TEST_CASE("hausdorff distance") {
    const std::vector<double> a{0.0};
    const std::vector<double> b{3.0};
    CHECK(hausdorff_distance(a, b) == 3.0);

    std::vector<double> g1, g2;
    for (int i = 0; i <= 1000; ++i) g1.push_back(i * 1e-3);
    for (int i = 0; i <= 2000; ++i) g2.push_back(i * 1e-3);
    CHECK(hausdorff_distance(g1, g2) == Approx(1.0).epsilon(1e-3));
    CHECK(hausdorff_distance(g2, g2) == 0.0);
    CHECK_THROWS_AS(hausdorff_distance(std::vector<double>{}, g1), InvalidArgument);

    std::mt19937_64 rng(31);
    const auto xa = oracle::uniform(rng, 300, -1, 1);
    const auto ya = oracle::uniform(rng, 300, -1, 1);
    const auto xb = oracle::uniform(rng, 200, -1, 2);
    const auto yb = oracle::uniform(rng, 200, 0, 1);
    auto directed = [](const auto& px, const auto& py, const auto& qx, const auto& qy) {
      double worst = 0.0;
      for (std::size_t i = 0; i < px.size(); ++i) {
        double best = 1e300;
        for (std::size_t j = 0; j < qx.size(); ++j) best = std::min(best, std::hypot(px[i] - qx[j], py[i] - qy[j]));
        worst = std::max(worst, best);
      }
      return worst;
    };
    const double ref = std::max(directed(xa, ya, xb, yb), directed(xb, yb, xa, ya));
    CHECK(hausdorff_distance(curve_points(xa, ya), curve_points(xb, yb)) == Approx(ref).epsilon(1e-14));
  }

  TEST_CASE("count local minima") {
    std::vector<double> s;
    for (int i = 0; i < 10000; ++i) s.push_back(std::sin(4 * std::numbers::pi * i / 10000.0));
    CHECK(count_local_minima(s) == 2);
    CHECK(count_local_minima(std::vector<double>(50, 1.0)) == 0);
    CHECK(count_local_minima(std::vector<double>{3, 1, 1, 1, 2, 0, 0, 5}) == 2);
    CHECK(count_local_minima(std::vector<double>{3, 1, 1}) == 0);
    CHECK_THROWS_AS(count_local_minima(std::vector<double>{1, 2}), InvalidArgument);

    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> u(0, 4);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> v(200);
      for (auto& x : v) x = u(rng);
      CHECK(count_local_minima(v) == oracle::count_strict_minima(v));
    }
  }

  TEST_CASE("large offset radius smooths the riemann landscape") {
    const auto f = riemann(100);
    std::vector<double> raw;
    const double h = 1e-3;
    for (double t = 0; t <= 2 * std::numbers::pi; t += h) raw.push_back(f->value1d(t));
    std::vector<double> smooth;
    for (const auto& s : offset_samples(*f, 10.0, 0.0, 2 * std::numbers::pi, h)) smooth.push_back(s.phi_rho);
    CHECK(count_local_minima(smooth) <= count_local_minima(raw));
  }
}
