#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/errors.hpp"
#include "finsler/surface.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

const char* kFamilies[] = {
    "2+s",
    "sqrt(1+s^2)",
    "sqrt(1+r^2)+s",
    "1+0.3*s^2+0.2*r*s+exp(s/10)",
    "sqrt((1+r^2)*(1+s^2))/(1+r^2)",
    "1/r^5*sqrt(r^2-s^2)*exp(2*s/sqrt(r^2-s^2))",
};

std::vector<EvalPoint> grid() {
  std::vector<EvalPoint> out;
  for (double r : {0.5, 0.8, 1.1})
    for (double f : {-0.6, 0.0, 0.6}) out.push_back(canonical_point(2, r, f * r, 1.0));
  return out;
}

}  // namespace

TEST_CASE("Berwald frame is orthonormal and spans the metric") {
  std::mt19937_64 rng(41);
  for (const char* phi : kFamilies)
    for (int trial = 0; trial < 5; ++trial) {
      const EvalPoint p = oracle::random_point(2, rng);
      const Jet4 jet = eval_jet(parse(phi), p.r, p.s);
      const MetricPack m = metric_pack(jet, p);
      const BerwaldFrame b = berwald_frame(jet, p);
      const double scale = std::max(1.0, oracle::max_abs(m.g));
      CHECK(b.ell_hi.dot(m.g * b.ell_hi) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.m_hi.dot(m.g * b.m_hi) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(b.ell_hi.dot(m.g * b.m_hi)) < 1e-12 * scale);
      CHECK((m.g * b.ell_hi - b.ell_lo).cwiseAbs().maxCoeff() < 1e-12 * scale);
      CHECK((m.g * b.m_hi - b.m_lo).cwiseAbs().maxCoeff() < 1e-12 * scale);
      const Eigen::Matrix2d g_frame = b.ell_lo * b.ell_lo.transpose() + b.m_lo * b.m_lo.transpose();
      CHECK_MESSAGE(oracle::max_abs(m.g - g_frame) < 1e-9 * scale, phi);
      CHECK(std::abs(b.n_lo.dot(p.y)) < 1e-12 * p.u * p.r);
      CHECK(b.n_lo.dot(p.x) == doctest::Approx(p.tangential()).epsilon(1e-12));
    }
}

TEST_CASE("main scalar agrees with the contracted Cartan tensor") {
  std::mt19937_64 rng(42);
  for (const char* phi : kFamilies)
    for (int trial = 0; trial < 5; ++trial) {
      const EvalPoint p = oracle::random_point(2, rng);
      const Jet4 jet = eval_jet(parse(phi), p.r, p.s);
      const MainScalarPack ms = main_scalar(jet, p);
      CHECK_MESSAGE(std::abs(ms.I - ms.I_direct) < 1e-8 * std::max(1.0, std::abs(ms.I)), phi);

      const BerwaldFrame b = berwald_frame(jet, p);
      double fd = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            fd += oracle::cartan(parse(phi), p.x, p.y, i, j, k) * b.m_hi(i) * b.m_hi(j) * b.m_hi(k);
      fd *= p.u * jet.value();
      CHECK_MESSAGE(ms.I == doctest::Approx(fd).epsilon(1e-7).scale(1.0), phi);

      CHECK(b.a * b.a * p.tangential() * (ms.A - p.s * ms.B) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("main scalar of phi = 1 + s") {
  const EvalPoint p = canonical_point(2, 1.0, 0.0, 1.0);
  const MainScalarPack ms = main_scalar(eval_jet(parse("1+s"), p.r, p.s), p);
  CHECK(ms.I == doctest::Approx(1.5).epsilon(1e-12));
  // Everywhere else it equals 3/2 sqrt((r^2 - s^2) / (1 + s)).
  for (double r : {0.5, 0.9})
    for (double f : {-0.5, 0.3}) {
      const double s = f * r;
      const EvalPoint q = canonical_point(2, r, s, 1.0);
      const MainScalarPack m = main_scalar(eval_jet(parse("1+s"), q.r, q.s), q);
      CHECK(m.I == doctest::Approx(1.5 * std::sqrt((r * r - s * s) / (1.0 + s))).epsilon(1e-12));
    }
}

TEST_CASE("Riemannian surfaces have zero main scalar") {
  for (const EvalPoint& p : grid()) {
    const MainScalarPack ms = main_scalar(eval_jet(parse("sqrt(1+s^2)"), p.r, p.s), p);
    CHECK(std::abs(ms.I) < 1e-12);
  }
}

TEST_CASE("Riemannian test") {
  CHECK(riemannian_test(parse("sqrt(1+s^2)"), grid()).riemannian);
  CHECK(riemannian_test(parse("sqrt(0.5*s^2 + r^2)"), grid()).riemannian);
  CHECK(riemannian_test(parse("sqrt(exp(r)*s^2 + 1 + r^2)"), grid()).riemannian);
  const RiemannianReport lin = riemannian_test(parse("1+s"), grid());
  CHECK_FALSE(lin.riemannian);
  CHECK(lin.max_mu > 0.1);
  CHECK(lin.nu_consistent);

  std::vector<EvalPoint> few = grid();
  few.resize(3);
  CHECK_THROWS_AS(riemannian_test(parse("1"), few), GeometryError);
  std::vector<EvalPoint> three;
  for (int i = 0; i < 8; ++i) three.push_back(canonical_point(3, 1.0 + i, 0.0, 1.0));
  CHECK_THROWS_AS(riemannian_test(parse("1"), three), GeometryError);
}

TEST_CASE("frame needs a surface") {
  const EvalPoint p = canonical_point(3, 1.0, 0.2, 1.0);
  CHECK_THROWS_AS(berwald_frame(eval_jet(parse("1"), p.r, p.s), p), GeometryError);
}

TEST_CASE("n-vector identities") {
  std::mt19937_64 rng(43);
  for (const char* phi : kFamilies)
    for (int trial = 0; trial < 4; ++trial) {
      const EvalPoint p = oracle::random_point(2, rng);
      const Jet4 jet = eval_jet(parse(phi), p.r, p.s);
      const MetricPack m = metric_pack(jet, p);
      const BerwaldFrame b = berwald_frame(jet, p);
      const double t = p.tangential();
      CHECK(std::abs(p.y.dot(b.n_lo)) < 1e-12 * p.u * p.r);
      CHECK(p.x.dot(b.n_lo) == doctest::Approx(t).epsilon(1e-12));
      CHECK(b.n_hi.dot(b.n_lo) == doctest::Approx(t / (jet.value() * m.second_factor)).epsilon(1e-10));
      for (int k = 0; k < 2; ++k) {
        const double ds = oracle::directional(
            [&](const Eigen::VectorXd& w) { return p.x.dot(w) / w.norm(); }, p.y, oracle::unit(2, k), 1e-3 * p.u);
        CHECK(ds == doctest::Approx(b.n_lo(k) / p.u).epsilon(1e-9).scale(1.0));
      }
    }
}

TEST_CASE("main scalar vanishes exactly for Riemannian surfaces") {
  const char* metrics[] = {"sqrt(1+s^2)", "sqrt(0.5*s^2 + r^2)", "sqrt(exp(r)*s^2 + 1 + r^2)",
                           "1+s", "sqrt(1+r^2)+s", "1+0.3*s^2+0.2*r*s+exp(s/10)"};
  for (const char* phi : metrics) {
    const RiemannianReport rep = riemannian_test(parse(phi), grid());
    double max_I = 0.0;
    for (const EvalPoint& p : grid()) max_I = std::max(max_I, std::abs(main_scalar(eval_jet(parse(phi), p.r, p.s), p).I));
    CHECK_MESSAGE((max_I < 1e-10) == rep.riemannian, phi, " max |I| = ", max_I);
  }
}
