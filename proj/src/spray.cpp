#include "finsler/spray.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

SprayJets spray_jets(const Jet4& phi_jet) {
  using J = TaylorJet<2>;
  const double r0 = phi_jet.r0(), s0 = phi_jet.s0();
  const auto phi_s3 = phi_jet.d_s();  // degree 3

  const J phi = phi_jet.truncate<2>();
  const J phi_r = phi_jet.d_r().truncate<2>();
  const J phi_s = phi_s3.truncate<2>();
  const J phi_ss = phi_s3.d_s();
  const J phi_rs = phi_s3.d_r();
  const J r = J::variable_r(r0, s0);
  const J s = J::variable_s(r0, s0);
  const J t = r * r - s * s;

  const J denom = phi - s * phi_s + t * phi_ss;
  if (std::abs(denom.value()) <= 1e-14 * std::max(1.0, phi.value() * phi.value()))
    throw GeometryError("phi - s phi_s + (r^2 - s^2) phi_ss vanishes (suspected TYPE_B degeneracy)");
  if (!(phi.value() > 0.0)) throw GeometryError("phi must be positive at the point");

  const J inv_r = 1.0 / r;
  const J Q = 0.5 * inv_r * (-phi_r + s * phi_rs + r * phi_ss) / denom;
  const J inv_phi = 1.0 / phi;
  const J P = -(Q * inv_phi) * (s * phi + t * phi_s) + 0.5 * inv_r * inv_phi * (s * phi_r + r * phi_s);
  return {P, Q};
}

SprayPack assemble_spray(const TaylorJet<2>& P, const TaylorJet<2>& Q, const EvalPoint& p) {
  SprayPack sp;
  sp.P = P.value();
  sp.P_r = P.partial(1, 0);
  sp.P_s = P.partial(0, 1);
  sp.P_ss = P.partial(0, 2);
  sp.P_rs = P.partial(1, 1);
  sp.Q = Q.value();
  sp.Q_r = Q.partial(1, 0);
  sp.Q_s = Q.partial(0, 1);
  sp.Q_ss = Q.partial(0, 2);
  sp.Q_rs = Q.partial(1, 1);

  const Eigen::VectorXd& x = p.x;
  const Eigen::VectorXd& y = p.y;
  const double u = p.u, s = p.s;
  sp.G = u * sp.P * y + u * u * sp.Q * x;

  // G^i_j = u P delta + P_s y^i x_j + (P - s P_s)/u y^i y_j + u Q_s x^i x_j + (2Q - s Q_s) x^i y_j
  sp.N = u * sp.P * Eigen::MatrixXd::Identity(p.n, p.n);
  sp.N += sp.P_s * y * x.transpose();
  sp.N += ((sp.P - s * sp.P_s) / u) * y * y.transpose();
  sp.N += u * sp.Q_s * x * x.transpose();
  sp.N += (2.0 * sp.Q - s * sp.Q_s) * x * y.transpose();
  return sp;
}

SprayPack pq_from_phi(const Jet4& phi, const EvalPoint& p) {
  const SprayJets j = spray_jets(phi);
  return assemble_spray(j.P, j.Q, p);
}

SprayPack spray_from_expressions(const Expression& P, const Expression& Q, const EvalPoint& p) {
  return assemble_spray(eval_jet(P, p.r, p.s).truncate<2>(), eval_jet(Q, p.r, p.s).truncate<2>(), p);
}

Eigen::VectorXd horizontal_residual(const Jet4& phi, const SprayPack& sp, const EvalPoint& p) {
  return dF_dx(phi, p) - sp.N.transpose() * dF_dy(phi, p);
}

MetrizabilityResiduals metrizability_residuals(const Jet4& phi, const SprayPack& sp, double r, double s) {
  const PhiValues f = PhiValues::from(phi);
  const double t = r * r - s * s;
  const double w = 2.0 * sp.Q - s * sp.Q_s;
  MetrizabilityResiduals out;
  out.C1 = (1.0 + s * sp.P - t * w) * f.phi_s + (s * sp.P_s - 2.0 * sp.P - s * w) * f.phi;
  out.C2 = f.phi_r / r - (sp.P + sp.Q_s * t) * f.phi_s - (sp.P_s + s * sp.Q_s) * f.phi;
  return out;
}

MetrizabilityResiduals metrizability_residuals(const Jet4& phi, const Expression& P, const Expression& Q,
                                               const EvalPoint& p) {
  return metrizability_residuals(phi, spray_from_expressions(P, Q, p), p.r, p.s);
}

}  // namespace finsler
