#pragma once

#include <Eigen/Dense>

#include "finsler/expression.hpp"
#include "finsler/geometry.hpp"
#include "finsler/jet.hpp"

namespace finsler {

// Geodesic spray G^h = u P y^h + u^2 Q x^h and its nonlinear connection.
struct SprayPack {
  double P = 0, P_r = 0, P_s = 0, P_ss = 0, P_rs = 0;
  double Q = 0, Q_r = 0, Q_s = 0, Q_ss = 0, Q_rs = 0;
  Eigen::VectorXd G;  // spray coefficients G^h
  Eigen::MatrixXd N;  // N(i, j) = G^i_j = dG^i / dy^j
};

// Degree-2 jets of P and Q in (r, s).
struct SprayJets {
  TaylorJet<2> P;
  TaylorJet<2> Q;
};

// P and Q of the geodesic spray of F = u phi as jets; their partials are exact
// derivatives of the closed forms (fourth-order phi partials feed Q_ss, Q_rs).
// Throws GeometryError when phi - s phi_s + (r^2 - s^2) phi_ss vanishes.
SprayJets spray_jets(const Jet4& phi);

// Fills a SprayPack (including G and N at p) from P, Q jets.
SprayPack assemble_spray(const TaylorJet<2>& P, const TaylorJet<2>& Q, const EvalPoint& p);

SprayPack pq_from_phi(const Jet4& phi, const EvalPoint& p);

// Spray given by user-supplied P(r, s), Q(r, s) expressions.
SprayPack spray_from_expressions(const Expression& P, const Expression& Q, const EvalPoint& p);

// dF/dx^j - G^i_j dF/dy^i for each j; vanishes iff d_h F = 0 at p.
Eigen::VectorXd horizontal_residual(const Jet4& phi, const SprayPack& sp, const EvalPoint& p);

struct MetrizabilityResiduals {
  double C1 = 0;
  double C2 = 0;
};

// The two metrizability PDEs relating phi to a spray (P, Q), evaluated at p.
MetrizabilityResiduals metrizability_residuals(const Jet4& phi, const Expression& P, const Expression& Q,
                                               const EvalPoint& p);

// Same residuals for P, Q values already at hand (only P, P_s, Q, Q_s are used).
MetrizabilityResiduals metrizability_residuals(const Jet4& phi, const SprayPack& sp, double r, double s);

}  // namespace finsler
