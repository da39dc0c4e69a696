#include "finsler/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "finsler/curvature.hpp"
#include "finsler/expression.hpp"
#include "finsler/geometry.hpp"
#include "finsler/spray.hpp"
#include "finsler/surface.hpp"

namespace finsler {

using nlohmann::json;

std::string_view to_string(Subcommand c) {
  switch (c) {
    case Subcommand::report: return "report";
    case Subcommand::check: return "check";
    case Subcommand::classify: return "classify";
    case Subcommand::metrize: return "metrize";
  }
  return "?";
}

Subcommand subcommand_from_string(std::string_view name) {
  for (Subcommand c : {Subcommand::report, Subcommand::check, Subcommand::classify, Subcommand::metrize})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw ConfigError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

}  // namespace

Range Range::parse(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos)
    throw ConfigError("range must look like start:stop:count, got '" + std::string(text) + "'");
  Range out;
  out.start = parse_double(text.substr(0, first), "range start");
  out.stop = parse_double(text.substr(first + 1, second - first - 1), "range stop");
  const std::string_view count = text.substr(second + 1);
  const auto res = std::from_chars(count.data(), count.data() + count.size(), out.count);
  if (res.ec != std::errc() || res.ptr != count.data() + count.size() || count.empty())
    throw ConfigError("malformed range count '" + std::string(count) + "'");
  if (out.count < 1) throw ConfigError("range count must be at least 1");
  return out;
}

std::vector<double> Range::values() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  return out;
}

void validate(const RunConfig& c) {
  if (c.phi.empty()) throw ConfigError("--phi is required");
  if (c.dim < 2) throw ConfigError("--dim must be at least 2");
  for (const Range* rg : {&c.r, &c.s_fraction, &c.u})
    if (rg->count < 1) throw ConfigError("grids must be non-empty");
  for (double f : c.s_fraction.values())
    if (!(f > -1.0 && f < 1.0)) throw ConfigError("s fractions must lie in (-1, 1)");
  if (c.subcommand == Subcommand::metrize && (!c.p_expr || !c.q_expr))
    throw ConfigError("metrize needs both --p and --q");
  if (!(c.tol_abs >= 0.0) || !(c.tol_rel >= 0.0)) throw ConfigError("tolerances must be non-negative");
}

// ---------------------------------------------------------------------------
// Per-point evaluation

namespace {

struct Residual {
  std::string name;
  double value = 0;      // absolute residual
  double magnitude = 0;  // natural size of the compared quantities
};

struct GridCell {
  std::size_t index;
  double r, s_fraction, u;
};

struct PointOutcome {
  json record;
  bool admissible = false;  // point materialized and phi jet evaluated
  bool ok = false;          // every computation for the subcommand succeeded
  EvalPoint point;
  std::vector<Residual> residuals;
};

struct Expressions {
  Expression phi;
  std::optional<Expression> P;
  std::optional<Expression> Q;
};

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void add_metric_residuals(std::vector<Residual>& out, const Jet4& jet, const EvalPoint& p, const MetricPack& m) {
  const PhiValues f = PhiValues::from(jet);
  const double t = p.tangential();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p.n, p.n);
  const Eigen::VectorXd dfdy = dF_dy(jet, p);

  out.push_back({"metric_symmetry", max_abs(m.g - m.g.transpose()), max_abs(m.g)});
  out.push_back({"metric_inverse", max_abs(m.g * m.ginv - id), 1.0});
  out.push_back({"metric_inverse_lu", max_abs(m.ginv - m.g.inverse()), max_abs(m.ginv)});
  out.push_back({"metric_yy_equals_F2", std::abs(p.y.dot(m.g * p.y) - m.F * m.F), m.F * m.F});
  out.push_back({"metric_euler", (m.g * p.y - m.F * dfdy).cwiseAbs().maxCoeff(), m.F * dfdy.cwiseAbs().maxCoeff()});
  out.push_back({"determinant_formula", std::abs(m.det_direct - m.det_formula), std::abs(m.det_formula)});

  const double c1_terms[] = {f.phi_s * m.rho0, f.phi * m.rho2, (p.s * f.phi + t * f.phi_s) * m.rho3};
  out.push_back({"rho_contraction_1", std::abs(c1_terms[0] + c1_terms[1] + c1_terms[2]),
                 std::abs(c1_terms[0]) + std::abs(c1_terms[1]) + std::abs(c1_terms[2])});
  const double closed = 1.0 / (f.phi * m.second_factor);
  out.push_back({"rho_contraction_2", std::abs(m.rho0 + t * m.rho3 - closed), std::abs(closed)});

  const bool regular = p.n == 2 ? m.regular[1] : (m.regular[0] && m.regular[1]);
  out.push_back({"regularity", regular ? 0.0 : 1.0, 0.0});
}

void add_cartan_residuals(std::vector<Residual>& out, const EvalPoint& p, const CartanPack& c) {
  double worst = 0.0, size = 0.0;
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) {
      double contraction = 0.0;
      for (int k = 0; k < p.n; ++k) {
        contraction += c.C(i, j, k) * p.y(k);
        size = std::max(size, std::abs(c.C(i, j, k)));
        worst = std::max({worst, std::abs(c.C(i, j, k) - c.C(j, i, k)), std::abs(c.C(i, j, k) - c.C(i, k, j))});
      }
      worst = std::max(worst, std::abs(contraction) / p.u);
    }
  out.push_back({"cartan_symmetric_and_y_null", worst, size});
}

void add_spray_residuals(std::vector<Residual>& out, const Jet4& jet, const EvalPoint& p, const SprayPack& sp,
                         const MetrizabilityResiduals& mr) {
  const double phi_scale = std::max(1.0, std::abs(jet.value()));
  out.push_back({"metrizability_C1", std::abs(mr.C1), phi_scale});
  out.push_back({"metrizability_C2", std::abs(mr.C2), phi_scale});
  out.push_back({"horizontal_dhF", horizontal_residual(jet, sp, p).cwiseAbs().maxCoeff(), p.u * phi_scale});
  out.push_back({"connection_homogeneity", (sp.N * p.y - 2.0 * sp.G).cwiseAbs().maxCoeff(),
                 std::max(1.0, sp.G.cwiseAbs().maxCoeff())});
}

void add_curvature_residuals(std::vector<Residual>& out, const EvalPoint& p, const CurvaturePack& cp) {
  const double u2 = p.u * p.u;
  out.push_back({"identity_R2", std::abs(cp.id_R2), cp.scale});
  out.push_back({"identity_R4", std::abs(cp.id_R4), cp.scale});
  out.push_back({"curvature_compatibility_C3", std::abs(cp.C3), cp.scale});
  out.push_back({"jacobi_y_null", (cp.Rmat * p.y).cwiseAbs().maxCoeff(), u2 * p.u * cp.scale});
  const double trace = u2 * ((p.n - 1) * cp.R1 + p.tangential() * cp.R3);
  out.push_back({"jacobi_trace", std::abs(cp.Rmat.trace() - trace), u2 * cp.scale});
}

void add_surface_residuals(std::vector<Residual>& out, const Jet4& jet, const EvalPoint& p, const MetricPack& m,
                           const BerwaldFrame& b, const MainScalarPack& ms) {
  const PhiValues f = PhiValues::from(jet);
  const double t = p.tangential();
  const Eigen::Vector2d y = p.y;
  const Eigen::Vector2d x = p.x;
  const double ortho = std::max({std::abs(b.ell_hi.dot(b.ell_lo) - 1.0), std::abs(b.ell_hi.dot(b.m_lo)),
                                 std::abs(b.m_hi.dot(b.m_lo) - 1.0)});
  out.push_back({"frame_orthonormal", ortho, 1.0});
  const Eigen::Matrix2d g_frame = b.ell_lo * b.ell_lo.transpose() + b.m_lo * b.m_lo.transpose();
  out.push_back({"frame_metric", max_abs(m.g - g_frame), max_abs(m.g)});
  const Eigen::Matrix2d ginv_frame = b.ell_hi * b.ell_hi.transpose() + b.m_hi * b.m_hi.transpose();
  out.push_back({"frame_inverse_metric", max_abs(m.ginv - ginv_frame), max_abs(m.ginv)});
  const double nn_closed = t / (f.phi * m.second_factor);
  const double nvec = std::max({std::abs(y.dot(b.n_lo)) / p.u, std::abs(x.dot(b.n_lo) - t) / std::max(1.0, t),
                                std::abs(b.n_hi.dot(b.n_lo) - nn_closed) / std::max(1.0, nn_closed)});
  out.push_back({"n_vector", nvec, 1.0});
  out.push_back({"frame_scale_identity", std::abs(b.a * b.a * t * (ms.A - p.s * ms.B) - 1.0), 1.0});
  out.push_back({"main_scalar", std::abs(ms.I - ms.I_direct), std::max(1.0, std::abs(ms.I))});
}

std::string skip_reason(const std::exception& e, std::string_view stage) {
  if (dynamic_cast<const DomainError*>(&e)) return "domain_violation";
  if (stage == "point") return "inadmissible_point";
  const std::string msg = e.what();
  if (msg.find("phi must be positive") != std::string::npos) return "non_positive_phi";
  if (msg.find("vanishes") != std::string::npos) return "degenerate";
  if (msg.find("radicand") != std::string::npos) return "not_positive_definite";
  return "numerical_failure";
}

PointOutcome evaluate_point(const GridCell& cell, const RunConfig& cfg, const Expressions& ex) {
  PointOutcome out;
  json& rec = out.record;
  rec["index"] = cell.index;
  rec["r"] = cell.r;
  rec["s_fraction"] = cell.s_fraction;
  rec["s"] = cell.s_fraction * cell.r;
  rec["u"] = cell.u;
  rec["skipped"] = false;

  const char* stage = "point";
  try {
    EvalPoint p = canonical_point(cfg.dim, cell.r, cell.s_fraction * cell.r, cell.u);
    if (cfg.seed) p = rotated(p, random_rotation(cfg.dim, *cfg.seed + cell.index));
    out.point = p;
    stage = "phi";
    const Jet4 jet = eval_jet(ex.phi, p.r, p.s);
    out.admissible = true;
    rec["phi"] = jet.value();
    rec["F"] = p.u * jet.value();

    stage = "geometry";
    const MetricPack m = metric_pack(jet, p);
    const CartanPack c = cartan_pack(jet, p);
    rec["det_direct"] = m.det_direct;
    rec["det_formula"] = m.det_formula;
    rec["regular_1"] = m.regular[0];
    rec["regular_2"] = m.regular[1];
    rec["mu"] = c.mu;
    rec["nu"] = c.nu;

    stage = "spray";
    const SprayPack own = pq_from_phi(jet, p);
    SprayPack sp = own;
    if (cfg.subcommand == Subcommand::metrize) sp = spray_from_expressions(*ex.P, *ex.Q, p);
    const MetrizabilityResiduals mr = metrizability_residuals(jet, sp, p.r, p.s);
    rec["P"] = sp.P;
    rec["Q"] = sp.Q;
    rec["C1"] = mr.C1;
    rec["C2"] = mr.C2;

    stage = "curvature";
    const CurvaturePack cp = riemann_pack(sp, jet, p);
    rec["R1"] = cp.R1;
    rec["R2"] = cp.R2;
    rec["R3"] = cp.R3;
    rec["R4"] = cp.R4;
    rec["R5"] = cp.R5;
    rec["C3"] = cp.C3;
    rec["K"] = flag_curvature(cp, jet, p);
    rec["closed_form_flag"] = cp.closed_form_mismatch;

    if (cfg.subcommand == Subcommand::metrize) {
      const double phi_scale = std::max(1.0, std::abs(jet.value()));
      out.residuals.push_back({"C1", std::abs(mr.C1), phi_scale});
      out.residuals.push_back({"C2", std::abs(mr.C2), phi_scale});
      out.residuals.push_back({"C3", std::abs(cp.C3), cp.scale});
      out.ok = true;
      return out;
    }

    std::optional<BerwaldFrame> frame;
    std::optional<MainScalarPack> ms;
    if (cfg.dim == 2) {
      stage = "surface";
      frame = berwald_frame(jet, p);
      ms = main_scalar(jet, p);
      rec["I"] = ms->I;
      rec["I_direct"] = ms->I_direct;
    }

    if (cfg.subcommand == Subcommand::check) {
      add_metric_residuals(out.residuals, jet, p, m);
      add_cartan_residuals(out.residuals, p, c);
      add_spray_residuals(out.residuals, jet, p, sp, mr);
      add_curvature_residuals(out.residuals, p, cp);
      if (frame) add_surface_residuals(out.residuals, jet, p, m, *frame, *ms);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    rec["skipped"] = true;
    rec["stage"] = stage;
    rec["reason"] = skip_reason(e, stage);
    rec["message"] = e.what();
  }
  return out;
}

std::vector<PointOutcome> evaluate_grid(const std::vector<GridCell>& cells, const RunConfig& cfg,
                                        const Expressions& ex) {
  std::vector<PointOutcome> results(cells.size());
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = evaluate_point(cells[i], cfg, ex);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

json config_json(const RunConfig& c) {
  auto range = [](const Range& r) { return json{{"start", r.start}, {"stop", r.stop}, {"count", r.count}}; };
  json j;
  j["subcommand"] = std::string(to_string(c.subcommand));
  j["phi"] = c.phi;
  j["p"] = c.p_expr ? json(*c.p_expr) : json(nullptr);
  j["q"] = c.q_expr ? json(*c.q_expr) : json(nullptr);
  j["dim"] = c.dim;
  j["r"] = range(c.r);
  j["s_fraction"] = range(c.s_fraction);
  j["u"] = range(c.u);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["tol_abs"] = c.tol_abs;
  j["tol_rel"] = c.tol_rel;
  j["jet_degree"] = kJetDegree;
  j["degeneracy_tol"] = Tolerances{}.degeneracy;
  j["curvature_tol"] = Tolerances{}.curvature;
  return j;
}

std::vector<CheckSummary> summarize(const std::vector<PointOutcome>& results, const RunConfig& cfg) {
  std::vector<CheckSummary> checks;
  for (const PointOutcome& pt : results) {
    if (!pt.ok) continue;
    for (const Residual& res : pt.residuals) {
      auto it = std::find_if(checks.begin(), checks.end(), [&](const CheckSummary& c) { return c.name == res.name; });
      if (it == checks.end()) {
        checks.push_back({res.name, 0.0, 0.0, true});
        it = std::prev(checks.end());
      }
      const double ratio = res.value / (cfg.tol_abs + cfg.tol_rel * res.magnitude);
      it->max_residual = std::max(it->max_residual, res.value);
      it->max_ratio = std::max(it->max_ratio, std::isfinite(ratio) ? ratio : HUGE_VAL);
      if (!(ratio <= 1.0)) it->pass = false;
    }
  }
  return checks;
}

json classify_verdicts(const std::vector<PointOutcome>& results, const RunConfig& cfg, const Expressions& ex) {
  const Tolerances tol{cfg.tol_abs, cfg.tol_rel};
  std::vector<EvalPoint> admissible, evaluated;
  for (const PointOutcome& pt : results) {
    if (pt.admissible) admissible.push_back(pt.point);
    if (pt.ok) evaluated.push_back(pt.point);
  }

  json v;
  try {
    const DegeneracyReport d = degeneracy_classify(ex.phi, admissible, tol);
    v["degeneracy"] = {{"verdict", to_string(d.verdict)},
                       {"max_first_factor", d.max_first_factor},
                       {"max_second_factor", d.max_second_factor},
                       {"det_consistent", d.det_consistent}};
  } catch (const Error& e) {
    v["degeneracy"] = {{"error", e.what()}};
  }

  try {
    const ScalarCurvatureReport s = scalar_classify(ex.phi, evaluated, tol);
    json samples = json::array();
    double max_abs_K = 0.0;
    for (const KSample& k : s.K_samples) {
      samples.push_back({{"r", k.point.r}, {"s", k.point.s}, {"u", k.point.u}, {"K", k.K}});
      max_abs_K = std::max(max_abs_K, std::abs(k.K));
    }
    v["scalar_curvature"] = {{"is_scalar", s.is_scalar},
                             {"n", s.n},
                             {"max_R3_residual", s.max_R3_residual},
                             {"max_reconstruction_error", s.max_reconstruction_error},
                             {"failing_point", s.failing_point ? json(*s.failing_point) : json(nullptr)},
                             {"max_abs_K", max_abs_K},
                             {"K_samples", samples}};
  } catch (const Error& e) {
    v["scalar_curvature"] = {{"error", e.what()}};
  }

  if (cfg.dim == 2) {
    try {
      const RiemannianReport rr = riemannian_test(ex.phi, admissible, tol);
      v["riemannian"] = {{"riemannian", rr.riemannian},
                         {"max_mu", rr.max_mu},
                         {"max_nu", rr.max_nu},
                         {"nu_consistent", rr.nu_consistent}};
    } catch (const Error& e) {
      v["riemannian"] = {{"error", e.what()}};
    }
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

std::string render(const ReportDocument& doc, const RunConfig& cfg, std::size_t skipped) {
  std::ostringstream os;
  os << kVersion << "  " << to_string(cfg.subcommand) << "  phi = " << cfg.phi << "  dim = " << cfg.dim << "\n";
  if (doc.json.contains("error")) {
    os << "error: " << doc.json["error"].get<std::string>() << "\n";
    return os.str();
  }
  const auto& points = doc.json["points"];
  os << "points: " << points.size() - skipped << " evaluated, " << skipped << " skipped\n";
  for (const auto& p : points)
    if (p["skipped"].get<bool>())
      os << "  skipped #" << p["index"].get<std::size_t>() << " (" << p["reason"].get<std::string>()
         << "): " << p["message"].get<std::string>() << "\n";

  if (cfg.subcommand == Subcommand::report || cfg.subcommand == Subcommand::metrize) {
    os << std::left << std::setw(10) << "r" << std::setw(10) << "s" << std::setw(8) << "u";
    const char* cols_report[] = {"P", "Q", "R1", "R3", "K", "C3"};
    const char* cols_metrize[] = {"P", "Q", "C1", "C2", "C3"};
    const bool metrize = cfg.subcommand == Subcommand::metrize;
    const auto cols = metrize ? std::vector<const char*>(std::begin(cols_metrize), std::end(cols_metrize))
                              : std::vector<const char*>(std::begin(cols_report), std::end(cols_report));
    for (const char* c : cols) os << std::setw(15) << c;
    os << "\n";
    for (const auto& p : points) {
      if (p["skipped"].get<bool>()) continue;
      os << std::setw(10) << std::setprecision(4) << std::defaultfloat << p["r"].get<double>() << std::setw(10)
         << p["s"].get<double>() << std::setw(8) << p["u"].get<double>();
      for (const char* c : cols) os << std::setw(15) << fmt(p[c].get<double>());
      os << "\n";
    }
  }
  if (!doc.checks.empty()) {
    os << std::left << std::setw(30) << "check" << std::setw(16) << "max residual" << std::setw(16) << "max ratio"
       << "result\n";
    for (const CheckSummary& c : doc.checks)
      os << std::setw(30) << c.name << std::setw(16) << fmt(c.max_residual) << std::setw(16) << fmt(c.max_ratio)
         << (c.pass ? "pass" : "FAIL") << "\n";
  }
  if (doc.json.contains("verdicts") && !doc.json["verdicts"].empty()) {
    os << "verdicts:\n";
    for (const auto& [name, value] : doc.json["verdicts"].items()) {
      json shown = value;
      if (shown.is_object()) shown.erase("K_samples");
      os << "  " << name << ": " << shown.dump() << "\n";
    }
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string ReportDocument::serialize() const { return json.dump(2) + "\n"; }

ReportDocument run(const RunConfig& cfg) {
  ReportDocument doc;
  doc.json["version"] = std::string(kVersion);
  doc.json["config"] = config_json(cfg);

  Expressions ex{Expression::number(0.0), std::nullopt, std::nullopt};
  try {
    validate(cfg);
    ex.phi = parse(cfg.phi);
    if (cfg.p_expr) ex.P = parse(*cfg.p_expr);
    if (cfg.q_expr) ex.Q = parse(*cfg.q_expr);
  } catch (const Error& e) {
    doc.json["error"] = e.what();
    doc.json["points"] = json::array();
    doc.json["checks"] = json::array();
    doc.json["verdicts"] = json::object();
    doc.exit_code = exit_code::parse_failed;
    doc.summary = render(doc, cfg, 0);
    return doc;
  }

  std::vector<GridCell> cells;
  for (double r : cfg.r.values())
    for (double f : cfg.s_fraction.values())
      for (double u : cfg.u.values()) cells.push_back({cells.size(), r, f, u});

  const std::vector<PointOutcome> results = evaluate_grid(cells, cfg, ex);

  std::size_t skipped = 0;
  json points = json::array();
  for (const PointOutcome& pt : results) {
    points.push_back(pt.record);
    if (!pt.ok) ++skipped;
  }
  doc.json["points"] = std::move(points);

  doc.checks = summarize(results, cfg);
  json checks = json::array();
  for (const CheckSummary& c : doc.checks)
    checks.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"max_ratio", c.max_ratio}, {"pass", c.pass}});
  doc.json["checks"] = std::move(checks);

  json verdicts = json::object();
  if (cfg.subcommand == Subcommand::classify) verdicts = classify_verdicts(results, cfg, ex);
  std::size_t flagged = 0;
  for (const PointOutcome& pt : results)
    if (pt.ok && pt.record.value("closed_form_flag", false)) ++flagged;
  verdicts["closed_form_flags"] = flagged;
  doc.json["verdicts"] = std::move(verdicts);

  if (!cells.empty() && skipped == cells.size()) {
    doc.exit_code = exit_code::all_points_failed;
  } else {
    const auto failed = std::find_if(doc.checks.begin(), doc.checks.end(), [](const CheckSummary& c) { return !c.pass; });
    if (failed != doc.checks.end()) {
      doc.exit_code = exit_code::check_failed;
      doc.json["failed_check"] = failed->name;
    }
  }
  doc.summary = render(doc, cfg, skipped);
  return doc;
}

}  // namespace finsler
