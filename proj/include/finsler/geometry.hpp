#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "finsler/expression.hpp"
#include "finsler/jet.hpp"

namespace finsler {

struct Tolerances {
  double abs = 1e-9;
  double rel = 1e-7;
  double degeneracy = 1e-8;  // scaled by max(1, phi^2)
  double curvature = 1e-8;   // scaled by max(1, |R1|, ..., |R5|)
};

// Points with r - |s| below this fraction of r are rejected.
inline constexpr double kBoundaryMargin = 1e-6;

// A point of the slit tangent bundle together with its invariants
// r = |x|, u = |y|, s = <x, y> / |y|.
struct EvalPoint {
  int n = 2;
  double r = 0.0;
  double s = 0.0;
  double u = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  double tangential() const { return r * r - s * s; }  // r^2 - s^2
};

// x = (r, 0, ...), y = (s u / r, (u / r) sqrt(r^2 - s^2), 0, ...).
EvalPoint canonical_point(int n, double r, double s, double u);

// Point with invariants computed from arbitrary x, y (same admissibility rules).
EvalPoint point_from_vectors(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Haar-distributed orthogonal matrix.
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed);

// Applies rotation to x and y; invariants are unchanged.
EvalPoint rotated(const EvalPoint& p, const Eigen::MatrixXd& rotation);

// phi and the s/r partials that appear in closed-form tensor expressions.
struct PhiValues {
  double phi, phi_r, phi_s, phi_ss, phi_rs, phi_sss;

  static PhiValues from(const Jet4& jet);
};

struct MetricPack {
  double sigma0 = 0, sigma1 = 0, sigma2 = 0, sigma3 = 0;
  double rho0 = 0, rho1 = 0, rho2 = 0, rho3 = 0;
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  double det_direct = 0;
  double det_formula = 0;
  double F = 0;
  // phi - s phi_s > 0, phi - s phi_s + (r^2 - s^2) phi_ss > 0
  std::array<bool, 2> regular{false, false};
  double first_factor = 0;   // phi - s phi_s
  double second_factor = 0;  // phi - s phi_s + (r^2 - s^2) phi_ss
};

// Fundamental tensor, its inverse, both determinants and the regularity pair.
// Throws GeometryError when phi <= 0 at the point.
MetricPack metric_pack(const Jet4& jet, const EvalPoint& p);

// The closed-form g_jk alone, without the phi > 0 precondition. Used for
// degenerate families where phi may change sign.
Eigen::MatrixXd metric_tensor(const Jet4& jet, const EvalPoint& p);

// Fully symmetric rank-3 array stored as n*n*n, index (i*n + j)*n + k.
class SymmetricTensor3 {
 public:
  explicit SymmetricTensor3(int n = 0) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  int n_;
  std::vector<double> data_;
};

struct CartanPack {
  double mu = 0;  // phi phi_s - s phi_s^2 - s phi phi_ss
  double nu = 0;  // 3 phi_s phi_ss + phi phi_sss
  SymmetricTensor3 C;
};

CartanPack cartan_pack(const Jet4& jet, const EvalPoint& p);

// dF/dy^i = (phi / u) y_i + phi_s n_i with n_i = x_i - (s / u) y_i.
Eigen::VectorXd dF_dy(const Jet4& jet, const EvalPoint& p);
// dF/dx^j = u (phi_r x_j / r + phi_s y_j / u).
Eigen::VectorXd dF_dx(const Jet4& jet, const EvalPoint& p);

enum class Degeneracy { nondegenerate, type_a, type_b };
std::string to_string(Degeneracy d);

struct DegeneracyReport {
  Degeneracy verdict = Degeneracy::nondegenerate;
  double max_first_factor = 0;   // max |phi - s phi_s| / scale
  double max_second_factor = 0;  // max |phi - s phi_s + (r^2 - s^2) phi_ss| / scale
  // For degenerate verdicts: det_formula vanishes relative to scale^n on the grid.
  bool det_consistent = true;
};

inline constexpr std::size_t kMinGridSize = 8;

// Degenerate-family test over a grid: TYPE_A when phi - s phi_s
// vanishes everywhere, else TYPE_B when phi - s phi_s + (r^2 - s^2) phi_ss does.
DegeneracyReport degeneracy_classify(const Expression& phi, const std::vector<EvalPoint>& grid,
                                     const Tolerances& tol = {});

}  // namespace finsler
