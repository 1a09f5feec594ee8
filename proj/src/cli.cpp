#include "ncconv/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ncconv/expr.hpp"
#include "ncconv/json_io.hpp"
#include "ncconv/transforms.hpp"
#include "ncconv/verify.hpp"

namespace ncconv {

namespace {

std::string num17(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0, b = 0;
  long n = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%ld", &a, &b, &n) != 3 || n < 2 || !(a < b))
    throw PreconditionError("grid must be a:b:n with a < b and n >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) /
                                                static_cast<double>(n - 1);
  return grid;
}

std::vector<double> parse_ladder(const std::string& spec) {
  std::vector<double> ladder;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    ladder.push_back(std::stod(spec.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (ladder.empty()) throw PreconditionError("empty epsilon ladder");
  return ladder;
}

Complex parse_point(const std::string& spec) {
  double re = 0, im = 0;
  if (std::sscanf(spec.c_str(), "%lf,%lf", &re, &im) != 2)
    throw PreconditionError("--at expects re,im");
  return Complex(re, im);
}

struct CommonOptions {
  std::string domain;
  std::uint64_t seed = default_seed();
  int max_iter = 10000;
  double tol = 1e-12;

  EvalOptions eval_options() const {
    EvalOptions opts;
    if (domain == "real") opts.literal_domain = Domain::RealLine;
    else if (domain == "positive") opts.literal_domain = Domain::PositiveHalfLine;
    else if (domain == "circle") opts.literal_domain = Domain::UnitCircle;
    else if (!domain.empty())
      throw PreconditionError("--domain must be real, positive or circle");
    opts.solve.max_iter = max_iter;
    opts.solve.tol = tol;
    opts.seed = seed;
    return opts;
  }
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--domain", common.domain,
                  "force atomic literals onto a domain (real|positive|circle)");
  cmd->add_option("--seed", common.seed, "sampling seed (default NCCONV_SEED or 0xC0FFEE)");
  cmd->add_option("--max-iter", common.max_iter, "solver iteration budget");
  cmd->add_option("--tol", common.tol, "solver tolerance");
}

void print_atoms_csv(std::ostream& out, const AtomicMeasure& mu) {
  out << "x,w\n";
  for (const auto& a : mu.atoms())
    out << num17(a.position) << "," << num17(a.weight) << "\n";
}

int do_eval(const std::string& text, bool csv, const CommonOptions& common,
            std::ostream& out) {
  const MeasureExpr expr = parse_expression(text);
  const EvalValue value = evaluate_expression(expr, common.eval_options());
  if (value.is_undefined()) {
    const auto& witness = value.undefined().witness;
    out << "undefined: class P violation";
    if (!witness.witnesses.empty()) {
      const auto& w = witness.witnesses.front();
      out << " of '" << w.condition << "' at z = (" << num17(w.point.real())
          << "," << num17(w.point.imag()) << ") by " << num17(w.violation);
    }
    out << "\n";
    return 0;
  }
  if (!value.is_atomic()) {
    out << "transform-level result on " << domain_name(value.domain)
        << "; use the invert subcommand to recover a density\n";
    return 0;
  }
  if (csv)
    print_atoms_csv(out, value.atoms());
  else
    out << measure_to_json(Measure{value.atoms()}) << "\n";
  return 0;
}

int do_transform(const std::string& text, const std::string& which, Complex at,
                 const CommonOptions& common, std::ostream& out) {
  const MeasureExpr expr = parse_expression(text);
  const EvalValue value = evaluate_expression(expr, common.eval_options());
  const TransformHandle h = value.handle();
  Complex result;
  if (which == "G") result = h.G(at);
  else if (which == "F") result = h.F(at);
  else if (which == "psi") result = h.psi(at);
  else if (which == "K") result = h.K(at);
  else if (which == "W") result = h.W(at);
  else throw PreconditionError("--which must be G, F, psi, K or W");
  out << num17(result.real()) << " " << num17(result.imag()) << "\n";
  return 0;
}

int do_invert(const std::string& text, const std::string& grid_spec,
              const std::string& ladder_spec, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
  const MeasureExpr expr = parse_expression(text);
  const EvalValue value = evaluate_expression(expr, common.eval_options());
  const std::vector<double> grid = parse_grid(grid_spec);
  InversionOptions options;
  if (!ladder_spec.empty()) options.eps_ladder = parse_ladder(ladder_spec);
  InversionDiagnostics diag;
  const DensityMeasure density =
      stieltjes_invert(value.handle(), grid, options, &diag);
  out << "x,density\n";
  for (std::size_t i = 0; i < density.grid().size(); ++i)
    out << num17(density.grid()[i]) << "," << num17(density.density()[i]) << "\n";
  out << "\n";
  out << atom_part_to_json(density.domain(), density.atom_part()) << "\n";
  err << "raw mass " << num17(diag.raw_mass) << ", worst extrapolation disagreement "
      << num17(diag.worst_disagreement) << "\n";
  return 0;
}

int do_model(const std::string& text, const CommonOptions& common, std::ostream& out) {
  const MeasureExpr expr = parse_expression(text);
  const RootConvolution root = root_convolution(expr, common.eval_options());
  const ModelDump dump = model_for(root.op, root.mu, root.nu);
  out << model_to_json(dump.model) << "\n";
  return 0;
}

int do_verify(const std::string& suite, const CommonOptions& common,
              std::ostream& out) {
  std::vector<SuiteResult> results;
  if (suite == "all")
    results = run_all_suites(common.seed);
  else if (suite == "diracs")
    results = {run_suite_diracs(common.seed)};
  else if (suite == "oracles")
    results = {run_suite_oracles(common.seed)};
  else if (suite == "associativity")
    results = {run_suite_associativity(common.seed)};
  else
    throw PreconditionError("--suite must be diracs, oracles, associativity or all");
  int failures = 0;
  for (const auto& r : results) {
    for (const auto& line : r.lines) out << line << "\n";
    out << "suite " << r.name << ": " << (r.checks - r.failures) << "/" << r.checks
        << " checks passed\n";
    failures += r.failures;
  }
  out << (failures == 0 ? "PASS" : "FAIL") << "\n";
  return failures == 0 ? 0 : 4;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"non-commutative convolutions of probability measures"};
  app.require_subcommand(1);

  CommonOptions common;

  std::string eval_expr;
  bool eval_json = false, eval_csv = false;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a measure expression");
  eval_cmd->add_option("expr", eval_expr, "measure expression")->required();
  eval_cmd->add_flag("--json", eval_json, "JSON output (default)");
  eval_cmd->add_flag("--csv", eval_csv, "CSV output (columns x,w)");
  add_common(eval_cmd, common);

  std::string inv_expr, inv_grid, inv_ladder;
  CLI::App* inv_cmd =
      app.add_subcommand("invert", "Stieltjes inversion to a density table");
  inv_cmd->add_option("expr", inv_expr, "measure expression")->required();
  inv_cmd->add_option("--grid", inv_grid, "a:b:n evaluation grid")->required();
  inv_cmd->add_option("--eps-ladder", inv_ladder, "comma-separated epsilon ladder");
  add_common(inv_cmd, common);

  std::string ver_suite = "all";
  CLI::App* ver_cmd = app.add_subcommand("verify", "run the invariant suites");
  ver_cmd->add_option("--suite", ver_suite, "diracs|oracles|associativity|all");
  add_common(ver_cmd, common);

  std::string model_expr;
  bool model_dump = false;
  CLI::App* model_cmd =
      app.add_subcommand("model", "operator model of a convolution node");
  model_cmd->add_option("expr", model_expr, "measure expression")->required();
  model_cmd->add_flag("--dump", model_dump, "dump the model as JSON");
  add_common(model_cmd, common);

  std::string tr_expr, tr_which = "G", tr_at;
  CLI::App* tr_cmd = app.add_subcommand("transform", "evaluate a transform at a point");
  tr_cmd->add_option("expr", tr_expr, "measure expression")->required();
  tr_cmd->add_option("--at", tr_at, "evaluation point re,im")->required();
  tr_cmd->add_option("--which", tr_which, "G|F|psi|K|W");
  add_common(tr_cmd, common);

  std::vector<std::string> argv_storage = args;
  std::vector<const char*> argv;
  argv.push_back("ncconv");
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (eval_cmd->parsed()) return do_eval(eval_expr, eval_csv, common, out);
    if (inv_cmd->parsed())
      return do_invert(inv_expr, inv_grid, inv_ladder, common, out, err);
    if (ver_cmd->parsed()) return do_verify(ver_suite, common, out);
    if (model_cmd->parsed()) {
      if (!model_dump) throw PreconditionError("model requires --dump");
      return do_model(model_expr, common, out);
    }
    if (tr_cmd->parsed())
      return do_transform(tr_expr, tr_which, parse_point(tr_at), common, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const WeightSumError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PoleError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotPSDError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NonNormalError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const NoSolutionError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ncconv
