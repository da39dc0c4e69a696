// finsler-lab: evaluate, check and classify spherically symmetric Finsler
// metrics F = |y| phi(|x|, <x,y>/|y|) on a grid of canonical points.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "finsler/report.hpp"

int main(int argc, char** argv) {
  using namespace finsler;

  CLI::App app{"Spherically symmetric Finsler metric laboratory", "finsler-lab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string r_text = "0.5:2:4", s_text = "-0.8:0.8:5", u_text = "1:1:1";
  std::string p_text, q_text;
  std::uint64_t seed = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--phi", cfg.phi, "phi(r, s) expression")->required();
    sub->add_option("--dim", cfg.dim, "dimension n >= 2")->capture_default_str();
    sub->add_option("--r", r_text, "radius grid start:stop:count")->capture_default_str();
    sub->add_option("--s-frac", s_text, "s / r grid start:stop:count")->capture_default_str();
    sub->add_option("--u", u_text, "|y| grid start:stop:count")->capture_default_str();
    sub->add_option("--seed", seed, "rotate each point by a random orthogonal matrix");
    sub->add_option("--tol-abs", cfg.tol_abs, "absolute tolerance")->capture_default_str();
    sub->add_option("--tol-rel", cfg.tol_rel, "relative tolerance")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads, 0 = all cores");
    sub->add_option("--json", cfg.output, "write the JSON document to PATH ('-' for stdout)");
    sub->add_flag("--quiet", quiet, "suppress the text summary");
  };

  for (Subcommand c : {Subcommand::report, Subcommand::check, Subcommand::classify, Subcommand::metrize}) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(c)));
    add_common(sub);
    if (c == Subcommand::metrize) {
      sub->add_option("--p", p_text, "candidate P(r, s)")->required();
      sub->add_option("--q", q_text, "candidate Q(r, s)")->required();
    }
    sub->callback([&cfg, c] { cfg.subcommand = c; });
  }
  app.get_subcommand("report")->description("tabulate P, Q, R1..R5, K and residuals");
  app.get_subcommand("check")->description("run the self-consistency suite");
  app.get_subcommand("classify")->description("scalar curvature, Riemannian and degeneracy verdicts");
  app.get_subcommand("metrize")->description("test whether a given (P, Q) spray is metrized by phi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::parse_failed;
  }

  try {
    cfg.r = Range::parse(r_text);
    cfg.s_fraction = Range::parse(s_text);
    cfg.u = Range::parse(u_text);
  } catch (const ConfigError& e) {
    std::cerr << "finsler-lab: " << e.what() << "\n";
    return exit_code::parse_failed;
  }
  if (app.got_subcommand("metrize")) {
    cfg.p_expr = p_text;
    cfg.q_expr = q_text;
  }
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) cfg.seed = seed;

  const ReportDocument doc = run(cfg);

  if (cfg.output == "-") {
    std::cout << doc.serialize();
  } else {
    if (!cfg.output.empty()) {
      std::ofstream out(cfg.output);
      if (!out) {
        std::cerr << "finsler-lab: cannot write " << cfg.output << "\n";
        return exit_code::parse_failed;
      }
      out << doc.serialize();
    }
    if (!quiet) std::cout << doc.summary;
  }
  if (doc.json.contains("error")) std::cerr << "finsler-lab: " << doc.json["error"].get<std::string>() << "\n";
  return doc.exit_code;
}
