#pragma once

#include <Eigen/Dense>
#include <vector>

#include "finsler/expression.hpp"
#include "finsler/geometry.hpp"

namespace finsler {

// Orthonormal Berwald frame (l, m) of a spherically symmetric surface.
// _lo are covariant components, _hi contravariant.
struct BerwaldFrame {
  Eigen::Vector2d ell_lo;  // dF/dy^i
  Eigen::Vector2d ell_hi;  // y^i / F
  Eigen::Vector2d n_lo;    // x_i - (s / u) y_i
  Eigen::Vector2d n_hi;    // g^ij n_j
  double a = 0;            // sqrt(phi (phi - s phi_s + (r^2 - s^2) phi_ss) / (r^2 - s^2))
  Eigen::Vector2d m_lo;    // a n_i
  Eigen::Vector2d m_hi;    // a n^i
};

// Requires n = 2 and a positive radicand for a (positive-definite branch).
BerwaldFrame berwald_frame(const Jet4& jet, const EvalPoint& p);

struct MainScalarPack {
  double A = 0;         // rho0 + s rho2 + r^2 rho3
  double B = 0;         // rho2 + s rho3
  double I = 0;         // closed form in mu, nu, a, B and |m|^2
  double I_direct = 0;  // F C_ijk m^i m^j m^k
};

MainScalarPack main_scalar(const Jet4& jet, const EvalPoint& p);

struct RiemannianReport {
  bool riemannian = false;
  double max_mu = 0;  // max |mu| / max(1, phi^2)
  double max_nu = 0;  // max |nu| / max(1, phi^2)
  // mu = 0 forces nu = 0 since d(mu)/ds = -s nu; false flags a violation.
  bool nu_consistent = true;
};

// Decides whether F = u phi is Riemannian on the grid (mu vanishes everywhere).
RiemannianReport riemannian_test(const Expression& phi, const std::vector<EvalPoint>& grid,
                                 const Tolerances& tol = {});

}  // namespace finsler
