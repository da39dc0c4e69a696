#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "finsler/expression.hpp"
#include "finsler/geometry.hpp"
#include "finsler/spray.hpp"

namespace finsler {

// Riemann curvature R^i_j = u^2 R1 delta + R2 y^i y_j + u^2 R3 x^i x_j
//                         + u R4 x^i y_j + u R5 y^i x_j.
struct CurvaturePack {
  double R1 = 0, R2 = 0, R3 = 0, R4 = 0, R5 = 0;  // R2, R4 from the long closed forms
  double R2_identity = 0;                         // -R1 - s R5
  double R4_identity = 0;                         // -s R3
  Eigen::MatrixXd Rmat;                           // assembled with the identity values
  double C3 = 0;     // phi_s R1 + (s phi + (r^2 - s^2) phi_s) R3 + phi R5
  double id_R4 = 0;  // R4 + s R3
  double id_R2 = 0;  // R1 + R2 + s R5
  double scale = 1;  // max(1, |R1|, ..., |R5|)
  bool closed_form_mismatch = false;  // |id_R2| or |id_R4| above 1e-6 * scale
};

inline constexpr double kClosedFormFlag = 1e-6;

CurvaturePack riemann_pack(const SprayPack& sp, const Jet4& phi, const EvalPoint& p);

// Flag curvature candidate K = (R1 + (r^2 - s^2) R3) / phi^2. Equals R1 / phi^2
// whenever R3 = 0, and is the flag curvature of every surface.
double flag_curvature(const CurvaturePack& cp, const Jet4& phi, const EvalPoint& p);

// K F^2 (delta^i_j - (y^i / F) dF/dy^j).
Eigen::MatrixXd scalar_curvature_tensor(double K, const Jet4& phi, const EvalPoint& p);

struct KSample {
  EvalPoint point;
  double K = 0;
};

struct ScalarCurvatureReport {
  bool is_scalar = false;
  int n = 0;
  std::vector<KSample> K_samples;
  double max_R3_residual = 0;           // max |R3| / scale
  double max_reconstruction_error = 0;  // max |R - K F^2 (...)| / (u^2 scale), entrywise
  std::optional<std::size_t> failing_point;
};

// Scalar flag curvature test over a grid. Dimension two is always scalar;
// otherwise every point needs |R3| / scale below tol.curvature and the
// reconstructed tensor must match R^i_j.
ScalarCurvatureReport scalar_classify(const Expression& phi, const std::vector<EvalPoint>& grid,
                                      const Tolerances& tol = {});

}  // namespace finsler
