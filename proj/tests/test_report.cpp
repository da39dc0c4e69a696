#include <doctest.h>

#include "finsler/report.hpp"

using namespace finsler;

namespace {

RunConfig config(Subcommand sub, const std::string& phi) {
  RunConfig c;
  c.subcommand = sub;
  c.phi = phi;
  return c;
}

const nlohmann::json* find_check(const ReportDocument& doc, const std::string& name) {
  for (const auto& c : doc.json["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("ranges") {
  const Range r = Range::parse("0.5:2:4");
  CHECK(r.values() == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK(Range::parse("1:1:1").values() == std::vector<double>{1.0});
  CHECK(Range::parse("-0.8:0.8:5").values()[2] == 0.0);
  CHECK_THROWS_AS(Range::parse("1:2"), ConfigError);
  CHECK_THROWS_AS(Range::parse("1:2:0"), ConfigError);
  CHECK_THROWS_AS(Range::parse("a:2:3"), ConfigError);
  CHECK_THROWS_AS(Range::parse("1:2:3:4"), ConfigError);
}

TEST_CASE("configuration validation") {
  RunConfig c = config(Subcommand::report, "1");
  CHECK_NOTHROW(validate(c));
  c.dim = 1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(Subcommand::report, "1");
  c.s_fraction = Range::parse("-1:0:3");
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(Subcommand::metrize, "1");
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK(subcommand_from_string("classify") == Subcommand::classify);
  CHECK_THROWS_AS(subcommand_from_string("plot"), ConfigError);
}

TEST_CASE("check passes for a Riemannian metric") {
  RunConfig c = config(Subcommand::check, "sqrt(1+s^2)");
  c.r = Range::parse("0.3:0.9:4");
  c.u = Range::parse("1:2:2");
  const ReportDocument doc = run(c);
  CHECK(doc.exit_code == exit_code::ok);
  CHECK(doc.json["points"].size() == 40);
  CHECK(doc.checks.size() > 15);
  for (const CheckSummary& s : doc.checks) CHECK_MESSAGE(s.pass, s.name);
  for (const char* key : {"config", "points", "checks", "verdicts", "version"}) CHECK(doc.json.contains(key));
  CHECK(doc.json["config"]["jet_degree"] == 4);
  const auto& pt = doc.json["points"][0];
  for (const char* key : {"r", "s", "u", "F", "P", "Q", "R1", "R2", "R3", "R4", "R5", "K", "I", "I_direct", "C1", "C2",
                          "C3", "det_direct", "det_formula", "regular_1", "regular_2"})
    CHECK_MESSAGE(pt.contains(key), key);
}

TEST_CASE("classify reports zero curvature") {
  RunConfig c = config(Subcommand::classify, "1/r^5*sqrt(r^2-s^2)*exp(2*s/sqrt(r^2-s^2))");
  const ReportDocument doc = run(c);
  CHECK(doc.exit_code == exit_code::ok);
  const auto& sc = doc.json["verdicts"]["scalar_curvature"];
  CHECK(sc["is_scalar"] == true);
  for (const auto& k : sc["K_samples"]) CHECK(std::abs(k["K"].get<double>()) < 1e-8);
  CHECK(doc.json["verdicts"]["riemannian"]["riemannian"] == false);
  CHECK(doc.json["verdicts"]["degeneracy"]["verdict"] == "NONDEGENERATE");
}

TEST_CASE("classify sees degenerate families") {
  RunConfig c = config(Subcommand::classify, "3*s");
  c.s_fraction = Range::parse("0.1:0.7:3");
  const ReportDocument doc = run(c);
  CHECK(doc.json["verdicts"]["degeneracy"]["verdict"] == "DEGENERATE_TYPE_A");
  CHECK(doc.exit_code == exit_code::all_points_failed);
  for (const auto& p : doc.json["points"]) CHECK(p["skipped"] == true);
}

TEST_CASE("metrize flags a spray that is not metrizable") {
  RunConfig c = config(Subcommand::metrize, "1+s");
  c.p_expr = "0";
  c.q_expr = "0";
  c.r = Range::parse("0.5:0.9:3");
  const ReportDocument doc = run(c);
  CHECK(doc.exit_code == exit_code::check_failed);
  const auto* c1 = find_check(doc, "C1");
  REQUIRE(c1);
  CHECK((*c1)["pass"] == false);
  CHECK((*c1)["max_residual"].get<double>() == doctest::Approx(1.0));
  CHECK((*find_check(doc, "C2"))["pass"] == true);
  CHECK(doc.json["failed_check"] == "C1");

  c.p_expr = "0";
  c.q_expr = "0";
  c.phi = "1";
  CHECK(run(c).exit_code == exit_code::ok);
}

TEST_CASE("exit codes and skipped points") {
  CHECK(run(config(Subcommand::report, "r +")).exit_code == exit_code::parse_failed);
  CHECK(run(config(Subcommand::report, "foo(s)")).exit_code == exit_code::parse_failed);
  CHECK(run(config(Subcommand::report, "sqrt(s-10)")).exit_code == exit_code::all_points_failed);

  RunConfig c = config(Subcommand::report, "2+ln(1+s)");
  const ReportDocument doc = run(c);
  CHECK(doc.exit_code == exit_code::ok);
  std::size_t violations = 0;
  for (const auto& p : doc.json["points"]) {
    if (p["s"].get<double>() > -1.0) continue;
    ++violations;
    CHECK(p["skipped"] == true);
    CHECK(p["reason"] == "domain_violation");
    CHECK(p["stage"] == "phi");
    CHECK(p.contains("message"));
  }
  CHECK(violations == 2);

  const ReportDocument neg = run(config(Subcommand::report, "1+2*s"));
  bool saw_non_positive = false;
  for (const auto& p : neg.json["points"])
    if (p["skipped"] == true) saw_non_positive |= p["reason"] == "non_positive_phi";
  CHECK(saw_non_positive);
}

TEST_CASE("serialization is deterministic across thread counts") {
  RunConfig c = config(Subcommand::check, "sqrt(1+r^2)+s+0.1*s^2");
  c.dim = 3;
  c.seed = 12345;
  c.threads = 1;
  const std::string one = run(c).serialize();
  c.threads = 4;
  const std::string four = run(c).serialize();
  CHECK(one == four);
  CHECK(run(c).serialize() == four);
  c.seed = 54321;
  CHECK(run(c).serialize() != four);
  CHECK(one.back() == '\n');
}
