#include "finsler/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

CurvaturePack riemann_pack(const SprayPack& sp, const Jet4& phi, const EvalPoint& p) {
  const double r = p.r, s = p.s, u = p.u;
  const double t = p.tangential();
  const double P = sp.P, P_r = sp.P_r, P_s = sp.P_s, P_ss = sp.P_ss, P_rs = sp.P_rs;
  const double Q = sp.Q, Q_r = sp.Q_r, Q_s = sp.Q_s, Q_ss = sp.Q_ss, Q_rs = sp.Q_rs;

  CurvaturePack c;
  c.R1 = 2 * Q - (s / r) * P_r - P_s + 2 * t * P_s * Q + P * P + 2 * s * P * Q;
  c.R2 = P_s - (s / r) * P_r + (s * s / r) * P_rs + s * P_ss - 2 * Q + s * Q_s - 2 * s * P * P_s -
         4 * s * P * Q + 4 * s * s * P_s * Q - P * P - 2 * s * t * P_ss * Q + 3 * s * P * P_s +
         s * s * P * Q_s + t * s * P_s * Q_s - 2 * r * r * P_s * Q;
  c.R3 = (2 / r) * Q_r - Q_ss - (s / r) * Q_rs + 2 * t * Q * Q_ss + 4 * Q * Q - t * Q_s * Q_s -
         2 * s * Q * Q_s;
  c.R4 = -(2 * s / r) * Q_r + (s * s / r) * Q_rs + s * Q_ss - 2 * t * s * Q * Q_ss + t * s * Q_s * Q_s -
         4 * s * Q * Q + 2 * s * s * Q * Q_s;
  c.R5 = (2 / r) * P_r - (s / r) * P_rs - P_ss - Q_s + 2 * P * Q - 2 * s * P_s * Q + 2 * t * P_ss * Q -
         P * P_s - s * P * Q_s - t * P_s * Q_s;

  c.R2_identity = -c.R1 - s * c.R5;
  c.R4_identity = -s * c.R3;
  c.id_R2 = c.R1 + c.R2 + s * c.R5;
  c.id_R4 = c.R4 + s * c.R3;
  c.scale = std::max({1.0, std::abs(c.R1), std::abs(c.R2), std::abs(c.R3), std::abs(c.R4), std::abs(c.R5)});
  c.closed_form_mismatch =
      std::max(std::abs(c.id_R2), std::abs(c.id_R4)) > kClosedFormFlag * c.scale;

  const Eigen::VectorXd& x = p.x;
  const Eigen::VectorXd& y = p.y;
  c.Rmat = u * u * c.R1 * Eigen::MatrixXd::Identity(p.n, p.n);
  c.Rmat += c.R2_identity * y * y.transpose();
  c.Rmat += u * u * c.R3 * x * x.transpose();
  c.Rmat += u * c.R4_identity * x * y.transpose();
  c.Rmat += u * c.R5 * y * x.transpose();

  const PhiValues f = PhiValues::from(phi);
  c.C3 = f.phi_s * c.R1 + (s * f.phi + t * f.phi_s) * c.R3 + f.phi * c.R5;
  return c;
}

double flag_curvature(const CurvaturePack& cp, const Jet4& phi, const EvalPoint& p) {
  const double v = phi.value();
  return (cp.R1 + p.tangential() * cp.R3) / (v * v);
}

Eigen::MatrixXd scalar_curvature_tensor(double K, const Jet4& phi, const EvalPoint& p) {
  const double F = p.u * phi.value();
  const Eigen::VectorXd ell = p.y / F;
  return K * F * F * (Eigen::MatrixXd::Identity(p.n, p.n) - ell * dF_dy(phi, p).transpose());
}

ScalarCurvatureReport scalar_classify(const Expression& phi, const std::vector<EvalPoint>& grid,
                                      const Tolerances& tol) {
  if (grid.size() < kMinGridSize)
    throw GeometryError("scalar curvature classification needs at least " + std::to_string(kMinGridSize) +
                        " grid points");
  ScalarCurvatureReport rep;
  rep.n = grid.front().n;
  for (const EvalPoint& p : grid)
    if (p.n != rep.n) throw GeometryError("grid mixes dimensions");

  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const EvalPoint& p = grid[idx];
    const Jet4 jet = eval_jet(phi, p.r, p.s);
    const SprayPack sp = pq_from_phi(jet, p);
    const CurvaturePack cp = riemann_pack(sp, jet, p);
    const double K = flag_curvature(cp, jet, p);
    rep.K_samples.push_back({p, K});

    const double r3 = std::abs(cp.R3) / cp.scale;
    rep.max_R3_residual = std::max(rep.max_R3_residual, r3);
    const double recon = (cp.Rmat - scalar_curvature_tensor(K, jet, p)).cwiseAbs().maxCoeff() /
                         (p.u * p.u * cp.scale);
    rep.max_reconstruction_error = std::max(rep.max_reconstruction_error, recon);

    const bool point_ok = (rep.n == 2 || r3 < tol.curvature) && recon < tol.curvature;
    if (!point_ok && !rep.failing_point) rep.failing_point = idx;
  }
  rep.is_scalar = rep.n == 2 || !rep.failing_point;
  return rep;
}

}  // namespace finsler
