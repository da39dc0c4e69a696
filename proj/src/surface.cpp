#include "finsler/surface.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

BerwaldFrame berwald_frame(const Jet4& jet, const EvalPoint& p) {
  if (p.n != 2) throw GeometryError("the Berwald frame is defined for surfaces (n = 2) only");
  const MetricPack m = metric_pack(jet, p);
  const PhiValues f = PhiValues::from(jet);
  const double t = p.tangential();
  const double radicand = f.phi * m.second_factor / t;
  if (!(radicand > 0.0))
    throw GeometryError("frame scale radicand phi (phi - s phi_s + (r^2 - s^2) phi_ss) / (r^2 - s^2) is not positive");

  const Eigen::Vector2d x = p.x;
  const Eigen::Vector2d y = p.y;
  BerwaldFrame b;
  b.n_lo = x - (p.s / p.u) * y;
  b.n_hi = m.rho0 * b.n_lo + (t / p.u) * (m.rho2 * y + p.u * m.rho3 * x);
  b.ell_lo = (f.phi / p.u) * y + f.phi_s * b.n_lo;
  b.ell_hi = y / m.F;
  b.a = std::sqrt(radicand);
  b.m_lo = b.a * b.n_lo;
  b.m_hi = b.a * b.n_hi;
  return b;
}

MainScalarPack main_scalar(const Jet4& jet, const EvalPoint& p) {
  const BerwaldFrame b = berwald_frame(jet, p);
  const MetricPack m = metric_pack(jet, p);
  const CartanPack c = cartan_pack(jet, p);
  const double s = p.s, r = p.r, t = p.tangential();
  const double phi = jet.value();

  MainScalarPack out;
  out.A = m.rho0 + s * m.rho2 + r * r * m.rho3;
  out.B = m.rho2 + s * m.rho3;
  const double a = b.a;
  const double m_sq = b.m_hi.squaredNorm();  // (m^1)^2 + (m^2)^2
  out.I = 0.5 * phi * (3.0 * c.mu / a * m_sq - 3.0 * a * c.mu * t * t * out.B * out.B + c.nu / (a * a * a));

  double contraction = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) contraction += c.C(i, j, k) * b.m_hi(i) * b.m_hi(j) * b.m_hi(k);
  out.I_direct = m.F * contraction;
  return out;
}

RiemannianReport riemannian_test(const Expression& phi, const std::vector<EvalPoint>& grid,
                                 const Tolerances& tol) {
  if (grid.size() < kMinGridSize)
    throw GeometryError("Riemannian test needs at least " + std::to_string(kMinGridSize) + " grid points");
  RiemannianReport rep;
  for (const EvalPoint& p : grid) {
    if (p.n != 2) throw GeometryError("Riemannian test applies to surfaces (n = 2)");
    const PhiValues f = PhiValues::from(eval_jet(phi, p.r, p.s));
    const double scale = std::max(1.0, f.phi * f.phi);
    const double mu = f.phi * f.phi_s - p.s * f.phi_s * f.phi_s - p.s * f.phi * f.phi_ss;
    const double nu = 3.0 * f.phi_s * f.phi_ss + f.phi * f.phi_sss;
    rep.max_mu = std::max(rep.max_mu, std::abs(mu) / scale);
    rep.max_nu = std::max(rep.max_nu, std::abs(nu) / scale);
  }
  rep.riemannian = rep.max_mu < tol.degeneracy;
  rep.nu_consistent = !rep.riemannian || rep.max_nu < tol.degeneracy;
  return rep;
}

}  // namespace finsler
