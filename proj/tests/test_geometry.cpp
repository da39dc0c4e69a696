#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/errors.hpp"
#include "finsler/expression.hpp"
#include "finsler/geometry.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

const char* kRegularFamilies[] = {
    "2+s",
    "sqrt(1+s^2)",
    "sqrt(1+r^2)+s",
    "1+0.3*s^2+0.2*r*s+exp(s/10)",
    "sqrt((1+r^2)*(1+s^2))/(1+r^2)",
    "2+sin(s)/3+r^2/5",
};

MetricPack pack_at(const std::string& phi, const EvalPoint& p) {
  return metric_pack(eval_jet(parse(phi), p.r, p.s), p);
}

std::vector<EvalPoint> positive_grid(int n) {
  std::vector<EvalPoint> out;
  for (double r : {0.5, 1.0, 1.5, 2.0})
    for (double f : {0.1, 0.4, 0.7}) out.push_back(canonical_point(n, r, f * r, 1.0));
  return out;
}

}  // namespace

TEST_CASE("canonical_point") {
  const EvalPoint a = canonical_point(2, 1.0, 0.0, 1.0);
  CHECK(a.x == Eigen::Vector2d(1.0, 0.0));
  CHECK(a.y.isApprox(Eigen::Vector2d(0.0, 1.0)));

  const EvalPoint b = canonical_point(2, 1.0, 0.5, 2.0);
  CHECK(b.y(0) == doctest::Approx(1.0));
  CHECK(b.y(1) == doctest::Approx(std::sqrt(3.0)));
  CHECK(b.y.norm() == doctest::Approx(2.0));
  CHECK(b.x.dot(b.y) == doctest::Approx(b.s * b.u));

  const EvalPoint c = canonical_point(4, 2.0, -1.2, 0.7);
  CHECK(c.x.norm() == doctest::Approx(2.0));
  CHECK(c.y.norm() == doctest::Approx(0.7));
  CHECK(c.x.dot(c.y) / c.u == doctest::Approx(-1.2));

  CHECK_THROWS_AS(canonical_point(3, 1.0, 1.0, 1.0), GeometryError);
  CHECK_THROWS_AS(canonical_point(3, 1.0, 0.9999999, 1.0), GeometryError);
  CHECK_THROWS_AS(canonical_point(1, 1.0, 0.0, 1.0), GeometryError);
  CHECK_THROWS_AS(canonical_point(2, 0.0, 0.0, 1.0), GeometryError);
  CHECK_THROWS_AS(canonical_point(2, 1.0, 0.0, 0.0), GeometryError);
  CHECK_NOTHROW(canonical_point(3, 1.0, 0.9999, 1.0));
}

TEST_CASE("random rotations are deterministic and orthogonal") {
  for (int n : {2, 3, 5}) {
    const Eigen::MatrixXd q = random_rotation(n, 42);
    CHECK(oracle::max_abs(q.transpose() * q - Eigen::MatrixXd::Identity(n, n)) < 1e-14);
    CHECK(q.determinant() == doctest::Approx(1.0));
    CHECK(q == random_rotation(n, 42));
    CHECK(q != random_rotation(n, 43));
  }
}

TEST_CASE("Euclidean metric") {
  for (int n : {2, 3}) {
    const MetricPack m = pack_at("1", canonical_point(n, 1.3, 0.4, 1.7));
    CHECK(m.sigma0 == 1.0);
    CHECK(m.sigma1 == 0.0);
    CHECK(m.sigma2 == 0.0);
    CHECK(m.sigma3 == 0.0);
    CHECK(oracle::max_abs(m.g - Eigen::MatrixXd::Identity(n, n)) == 0.0);
    CHECK(m.det_formula == 1.0);
    CHECK(m.det_direct == doctest::Approx(1.0));
  }
}

TEST_CASE("inverse coefficients of phi = 1 + s") {
  const double r = 1.0, s = 0.3;
  const MetricPack m = pack_at("1+s", canonical_point(2, r, s, 1.0));
  CHECK(m.rho0 == doctest::Approx(1.0 / (1.0 + s)).epsilon(1e-12));
  CHECK(m.rho1 == doctest::Approx((r * r + s) / std::pow(1.0 + s, 3)).epsilon(1e-12));
  CHECK(m.rho2 == doctest::Approx(-1.0 / std::pow(1.0 + s, 2)).epsilon(1e-12));
  CHECK(std::abs(m.rho3) < 1e-15);
}

TEST_CASE("phi = s has vanishing determinant") {
  for (int n : {2, 3}) {
    const MetricPack m = pack_at("s", canonical_point(n, 1.0, 0.4, 1.0));
    CHECK(m.det_formula == 0.0);
    CHECK(std::abs(m.det_direct) < 1e-12);
    CHECK_FALSE(m.regular[1]);
  }
}

TEST_CASE("metric_pack rejects non-positive phi") {
  CHECK_THROWS_AS(pack_at("s-1", canonical_point(2, 1.0, 0.5, 1.0)), GeometryError);
}

TEST_CASE("metric tensor matches the finite-difference Hessian of F^2/2") {
  std::mt19937_64 rng(7);
  for (const char* phi : kRegularFamilies)
    for (int n : {2, 3, 4})
      for (int trial = 0; trial < 4; ++trial) {
        const EvalPoint p = oracle::random_point(n, rng);
        const MetricPack m = pack_at(phi, p);
        const Eigen::MatrixXd g_fd = oracle::metric(parse(phi), p.x, p.y);
        CHECK_MESSAGE(oracle::max_abs(m.g - g_fd) < 1e-7 * std::max(1.0, oracle::max_abs(g_fd)), phi, " n=", n);
        CHECK(oracle::max_abs(m.g * m.ginv - Eigen::MatrixXd::Identity(n, n)) < 1e-10);
        CHECK(m.det_direct == doctest::Approx(m.det_formula).epsilon(1e-10));
        CHECK(m.F == doctest::Approx(oracle::F(parse(phi), p.x, p.y)).epsilon(1e-14));
      }
}

TEST_CASE("metric is covariant under rotations") {
  std::mt19937_64 rng(8);
  for (const char* phi : kRegularFamilies) {
    const EvalPoint p = canonical_point(3, 1.2, 0.5, 0.9);
    const Eigen::MatrixXd q = random_rotation(3, rng());
    const EvalPoint pr = rotated(p, q);
    const MetricPack a = pack_at(phi, p), b = pack_at(phi, pr);
    CHECK(oracle::max_abs(b.g - q * a.g * q.transpose()) < 1e-12 * std::max(1.0, oracle::max_abs(a.g)));
    CHECK(b.det_direct == doctest::Approx(a.det_direct).epsilon(1e-12));
  }
}

TEST_CASE("Cartan scalars and contraction") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_real_distribution<double> rr(0.5, 1.2), ff(-0.8, 0.8);
    const double r = rr(rng);
    const EvalPoint p = canonical_point(2, r, ff(rng) * r, 1.0);
    const CartanPack lin = cartan_pack(eval_jet(parse("1+s"), p.r, p.s), p);
    CHECK(lin.mu == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lin.nu == 0.0);
    const CartanPack riem = cartan_pack(eval_jet(parse("sqrt(1+s^2)"), p.r, p.s), p);
    CHECK(std::abs(riem.mu) < 1e-14);
  }
  for (const char* phi : kRegularFamilies)
    for (int n : {2, 3}) {
      const EvalPoint p = oracle::random_point(n, rng);
      const CartanPack c = cartan_pack(eval_jet(parse(phi), p.r, p.s), p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double sum = 0.0;
          for (int k = 0; k < n; ++k) sum += c.C(i, j, k) * p.y(k);
          CHECK(std::abs(sum) < 1e-9);
        }
    }
}

TEST_CASE("Cartan tensor matches finite differences of the metric") {
  std::mt19937_64 rng(10);
  for (const char* phi : kRegularFamilies)
    for (int n : {2, 3}) {
      const EvalPoint p = oracle::random_point(n, rng);
      const CartanPack c = cartan_pack(eval_jet(parse(phi), p.r, p.s), p);
      double worst = 0.0, size = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double fd = oracle::cartan(parse(phi), p.x, p.y, i, j, k);
            worst = std::max(worst, std::abs(c.C(i, j, k) - fd));
            size = std::max(size, std::abs(fd));
          }
      CHECK_MESSAGE(worst < 1e-8 * size, phi, " n=", n);
    }
}

TEST_CASE("first derivatives of F") {
  std::mt19937_64 rng(12);
  for (const char* phi : kRegularFamilies) {
    const EvalPoint p = oracle::random_point(3, rng);
    const Jet4 jet = eval_jet(parse(phi), p.r, p.s);
    const Eigen::VectorXd fy = dF_dy(jet, p), fx = dF_dx(jet, p);
    for (int k = 0; k < 3; ++k) {
      const auto e = oracle::unit(3, k);
      const double dy = oracle::directional([&](const Eigen::VectorXd& w) { return oracle::F(parse(phi), p.x, w); }, p.y, e, 1e-3);
      const double dx = oracle::directional([&](const Eigen::VectorXd& w) { return oracle::F(parse(phi), w, p.y); }, p.x, e, 1e-3);
      CHECK(fy(k) == doctest::Approx(dy).epsilon(1e-9));
      CHECK(fx(k) == doctest::Approx(dx).epsilon(1e-9));
    }
    CHECK(fy.dot(p.y) == doctest::Approx(p.u * jet.value()).epsilon(1e-13));
  }
}

TEST_CASE("degeneracy classification") {
  const Tolerances tol;
  CHECK(degeneracy_classify(parse("3*s"), positive_grid(2), tol).verdict == Degeneracy::type_a);
  CHECK(degeneracy_classify(parse("r^2*s"), positive_grid(3), tol).verdict == Degeneracy::type_a);
  CHECK(degeneracy_classify(parse("2*s + 0.5*sqrt(r^2-s^2)"), positive_grid(2), tol).verdict == Degeneracy::type_b);
  CHECK(degeneracy_classify(parse("(1+r)*s + exp(r)*sqrt(r^2-s^2)"), positive_grid(3), tol).verdict ==
        Degeneracy::type_b);
  const DegeneracyReport ok = degeneracy_classify(parse("1+s"), positive_grid(2), tol);
  CHECK(ok.verdict == Degeneracy::nondegenerate);
  CHECK(ok.max_first_factor > 0.5);
  CHECK(ok.det_consistent);
  CHECK(to_string(Degeneracy::type_a) == "DEGENERATE_TYPE_A");
  CHECK(to_string(Degeneracy::type_b) == "DEGENERATE_TYPE_B");
  CHECK(to_string(Degeneracy::nondegenerate) == "NONDEGENERATE");
  CHECK_THROWS_AS(degeneracy_classify(parse("1+s"), {canonical_point(2, 1, 0, 1)}, tol), GeometryError);
}

TEST_CASE("Euler homogeneity, LU inverse and rho contractions") {
  std::mt19937_64 rng(13);
  for (const char* phi : kRegularFamilies)
    for (int n : {2, 3, 4}) {
      const EvalPoint p = oracle::random_point(n, rng);
      const Jet4 jet = eval_jet(parse(phi), p.r, p.s);
      const MetricPack m = metric_pack(jet, p);
      const PhiValues f = PhiValues::from(jet);
      const double t = p.tangential();
      CHECK(p.y.dot(m.g * p.y) == doctest::Approx(m.F * m.F).epsilon(1e-9));
      const Eigen::VectorXd gy = m.g * p.y, fdy = m.F * dF_dy(jet, p);
      for (int i = 0; i < n; ++i) CHECK(gy(i) == doctest::Approx(fdy(i)).epsilon(1e-9).scale(m.F));
      const Eigen::MatrixXd lu = m.g.fullPivLu().inverse();
      CHECK(oracle::max_abs(m.ginv - lu) < 1e-8 * std::max(1.0, oracle::max_abs(lu)));
      CHECK(std::abs(f.phi_s * m.rho0 + f.phi * m.rho2 + (p.s * f.phi + t * f.phi_s) * m.rho3) < 1e-10);
      CHECK(std::abs(m.rho0 + t * m.rho3 - 1.0 / (f.phi * m.second_factor)) < 1e-10);
    }
}
