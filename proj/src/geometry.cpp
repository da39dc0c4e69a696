#include "finsler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

void check_invariants(int n, double r, double s, double u) {
  if (n < 2) throw GeometryError("dimension must be at least 2");
  if (!(r > 0.0)) throw GeometryError("r must be positive");
  if (!(u > 0.0)) throw GeometryError("u must be positive");
  if (!(std::abs(s) < r)) throw GeometryError("|s| must be strictly below r");
  if (r - std::abs(s) < kBoundaryMargin * r) throw GeometryError("point too close to the boundary |s| = r");
}

}  // namespace

EvalPoint canonical_point(int n, double r, double s, double u) {
  check_invariants(n, r, s, u);
  EvalPoint p;
  p.n = n;
  p.r = r;
  p.s = s;
  p.u = u;
  p.x = Eigen::VectorXd::Zero(n);
  p.y = Eigen::VectorXd::Zero(n);
  p.x(0) = r;
  p.y(0) = s * u / r;
  p.y(1) = (u / r) * std::sqrt(r * r - s * s);
  return p;
}

EvalPoint point_from_vectors(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw GeometryError("x and y must have the same dimension");
  EvalPoint p;
  p.n = static_cast<int>(x.size());
  p.x = x;
  p.y = y;
  p.r = x.norm();
  p.u = y.norm();
  p.s = p.u > 0.0 ? x.dot(y) / p.u : 0.0;
  check_invariants(p.n, p.r, p.s, p.u);
  return p;
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

EvalPoint rotated(const EvalPoint& p, const Eigen::MatrixXd& rotation) {
  EvalPoint out = p;
  out.x = rotation * p.x;
  out.y = rotation * p.y;
  return out;
}

PhiValues PhiValues::from(const Jet4& jet) {
  return {jet.partial(0, 0), jet.partial(1, 0), jet.partial(0, 1),
          jet.partial(0, 2), jet.partial(1, 1), jet.partial(0, 3)};
}

std::string to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::nondegenerate: return "NONDEGENERATE";
    case Degeneracy::type_a: return "DEGENERATE_TYPE_A";
    case Degeneracy::type_b: return "DEGENERATE_TYPE_B";
  }
  return "?";
}

namespace {

struct Sigmas {
  double s0, s1, s2, s3;
};

Sigmas sigmas(const PhiValues& f, double s) {
  const double first = f.phi - s * f.phi_s;
  return {f.phi * first, f.phi_s * f.phi_s + f.phi * f.phi_ss, first * f.phi_s - s * f.phi * f.phi_ss,
          s * s * f.phi * f.phi_ss - s * first * f.phi_s};
}

Eigen::MatrixXd assemble_metric(const Sigmas& sg, const EvalPoint& p) {
  const Eigen::VectorXd& x = p.x;
  const Eigen::VectorXd& y = p.y;
  const double u = p.u;
  Eigen::MatrixXd g = sg.s0 * Eigen::MatrixXd::Identity(p.n, p.n);
  g += sg.s1 * x * x.transpose();
  g += (sg.s2 / u) * (x * y.transpose() + y * x.transpose());
  g += (sg.s3 / (u * u)) * y * y.transpose();
  return g;
}

}  // namespace

Eigen::MatrixXd metric_tensor(const Jet4& jet, const EvalPoint& p) {
  return assemble_metric(sigmas(PhiValues::from(jet), p.s), p);
}

MetricPack metric_pack(const Jet4& jet, const EvalPoint& p) {
  const PhiValues f = PhiValues::from(jet);
  if (!(f.phi > 0.0)) throw GeometryError("phi must be positive at the point");
  const double s = p.s;
  const double t = p.tangential();

  MetricPack m;
  const Sigmas sg = sigmas(f, s);
  m.sigma0 = sg.s0;
  m.sigma1 = sg.s1;
  m.sigma2 = sg.s2;
  m.sigma3 = sg.s3;

  m.first_factor = f.phi - s * f.phi_s;
  m.second_factor = m.first_factor + t * f.phi_ss;
  const double mu = f.phi * f.phi_s - s * f.phi_s * f.phi_s - s * f.phi * f.phi_ss;
  const double denom = f.phi * m.first_factor * m.second_factor;
  m.rho0 = 1.0 / (f.phi * m.first_factor);
  m.rho1 = (s * f.phi + t * f.phi_s) * mu / (f.phi * f.phi * denom);
  m.rho2 = -mu / (f.phi * denom);
  m.rho3 = -f.phi_ss / denom;

  m.g = assemble_metric(sg, p);

  const Eigen::VectorXd& x = p.x;
  const Eigen::VectorXd& y = p.y;
  const double u = p.u;
  m.ginv = m.rho0 * Eigen::MatrixXd::Identity(p.n, p.n);
  m.ginv += (m.rho1 / (u * u)) * y * y.transpose();
  m.ginv += (m.rho2 / u) * (x * y.transpose() + y * x.transpose());
  m.ginv += m.rho3 * x * x.transpose();

  m.det_direct = Eigen::FullPivLU<Eigen::MatrixXd>(m.g).determinant();
  m.det_formula = std::pow(f.phi, p.n + 1) * std::pow(m.first_factor, p.n - 2) * m.second_factor;
  m.F = u * f.phi;
  m.regular = {m.first_factor > 0.0, m.second_factor > 0.0};
  return m;
}

CartanPack cartan_pack(const Jet4& jet, const EvalPoint& p) {
  const PhiValues f = PhiValues::from(jet);
  if (!(f.phi > 0.0)) throw GeometryError("phi must be positive at the point");
  const double s = p.s;
  const double u = p.u;
  const int n = p.n;

  CartanPack c;
  c.mu = f.phi * f.phi_s - s * f.phi_s * f.phi_s - s * f.phi * f.phi_ss;
  c.nu = 3.0 * f.phi_s * f.phi_ss + f.phi * f.phi_sss;
  c.C = SymmetricTensor3(n);

  const double mu = c.mu, nu = c.nu;
  const double k_xd = mu / (2 * u);
  const double k_xxx = nu / (2 * u);
  const double k_yd = -s * mu / (2 * u * u);
  const double k_yyy = (3 * s * mu - s * s * s * nu) / (2 * std::pow(u, 4));
  const double k_yyx = (s * s * nu - mu) / (2 * std::pow(u, 3));
  const double k_xxy = -s * nu / (2 * u * u);

  const Eigen::VectorXd& x = p.x;
  const Eigen::VectorXd& y = p.y;
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = k_xd * (x(i) * delta(j, k) + x(j) * delta(i, k) + x(k) * delta(i, j));
        v += k_xxx * x(i) * x(j) * x(k);
        v += k_yd * (y(i) * delta(j, k) + y(j) * delta(i, k) + y(k) * delta(i, j));
        v += k_yyy * y(i) * y(j) * y(k);
        v += k_yyx * (y(i) * y(j) * x(k) + y(j) * y(k) * x(i) + y(i) * y(k) * x(j));
        v += k_xxy * (x(i) * x(j) * y(k) + x(i) * x(k) * y(j) + x(k) * x(j) * y(i));
        c.C(i, j, k) = v;
      }
  return c;
}

Eigen::VectorXd dF_dy(const Jet4& jet, const EvalPoint& p) {
  const PhiValues f = PhiValues::from(jet);
  const Eigen::VectorXd n_lo = p.x - (p.s / p.u) * p.y;
  return (f.phi / p.u) * p.y + f.phi_s * n_lo;
}

Eigen::VectorXd dF_dx(const Jet4& jet, const EvalPoint& p) {
  const PhiValues f = PhiValues::from(jet);
  return p.u * ((f.phi_r / p.r) * p.x + (f.phi_s / p.u) * p.y);
}

DegeneracyReport degeneracy_classify(const Expression& phi, const std::vector<EvalPoint>& grid,
                                     const Tolerances& tol) {
  if (grid.size() < kMinGridSize)
    throw GeometryError("degeneracy classification needs at least " + std::to_string(kMinGridSize) +
                        " grid points");
  DegeneracyReport rep;
  struct Sample {
    double first, second, det, scale;
    int n;
  };
  std::vector<Sample> samples;
  samples.reserve(grid.size());
  for (const EvalPoint& p : grid) {
    const PhiValues f = PhiValues::from(eval_jet(phi, p.r, p.s));
    const double scale = std::max(1.0, f.phi * f.phi);
    const double first = f.phi - p.s * f.phi_s;
    const double second = first + p.tangential() * f.phi_ss;
    const double det = std::pow(f.phi, p.n + 1) * std::pow(first, p.n - 2) * second;
    samples.push_back({first, second, det, scale, p.n});
    rep.max_first_factor = std::max(rep.max_first_factor, std::abs(first) / scale);
    rep.max_second_factor = std::max(rep.max_second_factor, std::abs(second) / scale);
  }
  if (rep.max_first_factor < tol.degeneracy)
    rep.verdict = Degeneracy::type_a;
  else if (rep.max_second_factor < tol.degeneracy)
    rep.verdict = Degeneracy::type_b;

  if (rep.verdict != Degeneracy::nondegenerate) {
    // det ~ phi^(2n); compare against the same power of the per-point scale.
    for (const Sample& smp : samples)
      if (std::abs(smp.det) >= tol.degeneracy * std::pow(smp.scale, smp.n)) rep.det_consistent = false;
  }
  return rep;
}

}  // namespace finsler
