#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frontlp/bench.hpp"
#include "frontlp/estimator.hpp"
#include "frontlp/frontier.hpp"
#include "frontlp/kernel.hpp"
#include "frontlp/lp_model.hpp"
#include "frontlp/simplex.hpp"
#include "frontlp/util.hpp"

namespace {

using namespace frontlp;

struct FrontierFlags {
  std::string kind = "sine";
  double a0 = 1.0, a1 = 0.5, a2 = 0.0;
  std::string table_csv;

  void attach(CLI::App* cmd, bool required)
  {
    auto* opt = cmd->add_option("--frontier", kind,
                                "constant | sine | sum_of_sines | table");
    if (required) opt->required();
    cmd->add_option("--a0", a0, "constant term");
    cmd->add_option("--a1", a1, "first sine amplitude");
    cmd->add_option("--a2", a2, "second sine amplitude");
    cmd->add_option("--table", table_csv, "CSV of (x,y) nodes for --frontier table");
  }

  FrontierFn build() const
  {
    if (kind == "constant") return FrontierFn::constant(a0);
    if (kind == "sine") return FrontierFn::sine(a0, a1);
    if (kind == "sum_of_sines") return FrontierFn::sum_of_sines(a0, a1, a2);
    if (kind == "table") {
      std::ifstream in(table_csv);
      if (!in) throw std::runtime_error("cannot open table file " + table_csv);
      SampleSet s = read_sample_csv(in);
      return FrontierFn::user_table(s.xs, s.ys);
    }
    throw std::runtime_error("unknown frontier kind '" + kind + "'");
  }
};

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

const char* status_name(SolveStatus s)
{
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

int cmd_sample(const FrontierFlags& ff, int n, std::uint64_t seed,
               const std::string& out)
{
  const FrontierFn f = ff.build();
  const SampleSet s = sample_uniform_on_S(f, n, seed);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  write_sample_csv(os, s);
  std::cerr << "wrote " << s.n << " points to " << out
            << " (acceptance rate " << format_double(s.acceptance_rate)
            << ")\n";
  return 0;
}

int cmd_fit(const std::string& in, double beta, double lbeta, double fmax,
            double h1, double calpha, const std::string& out,
            const std::string& grid_out, int grid_points,
            const std::string& lp_out, const FrontierFlags& ff,
            bool have_frontier)
{
  std::ifstream is(in);
  if (!is) throw std::runtime_error("cannot open " + in);
  const SampleSet s = read_sample_csv(is);
  const KernelSpec kernel = KernelSpec::make_default();
  const EstimatorModel m =
      fit(s, kernel, FitConstants{beta, lbeta, fmax}, h1, calpha);
  if (!lp_out.empty()) {
    const FrontierLP lp =
        build_lp(s, kernel, m.bandwidth,
                 LpConstants{lbeta, m.c_alpha, fmax});
    std::ofstream ls(lp_out);
    if (!ls) throw std::runtime_error("cannot write " + lp_out);
    write_lp_text(ls, lp);
  }
  spill(out, model_to_json(m) + "\n");
  std::cerr << "fit: n=" << s.n << " h=" << format_double(m.bandwidth.h)
            << " objective=" << format_double(m.objective)
            << " relaxation_level=" << m.diagnostics.relaxation_level << "\n";
  if (!grid_out.empty()) {
    FrontierFn truth;
    if (have_frontier) truth = ff.build();
    std::ofstream gs(grid_out);
    if (!gs) throw std::runtime_error("cannot write " + grid_out);
    gs << (have_frontier ? "x,fhat,f\n" : "x,fhat\n");
    for (int g = 0; g < grid_points; ++g) {
      const double x = grid_points == 1 ? 0.0 : double(g) / (grid_points - 1);
      gs << format_double(x) << ',' << format_double(eval_estimate(m, x, 0));
      if (have_frontier) gs << ',' << format_double(truth.eval(x, 0));
      gs << '\n';
    }
  }
  return 0;
}

int cmd_solve(const std::string& lp_path, const std::string& out)
{
  std::ifstream is(lp_path);
  if (!is) throw std::runtime_error("cannot open " + lp_path);
  const GenericLP lp = read_lp_text(is);
  const SolveResult res = solve(lp);
  nlohmann::json j;
  j["status"] = status_name(res.status);
  j["iterations"] = res.iterations;
  if (res.status == SolveStatus::optimal) {
    j["objective"] = res.objective;
    j["x"] = res.alpha;
    j["max_residual"] = res.max_residual;
  }
  if (!res.infeasible_rows.empty()) j["infeasible_rows"] = res.infeasible_rows;
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    spill(out, text);
  return res.status == SolveStatus::optimal ? 0 : 1;
}

int cmd_check_kernel()
{
  const KernelSpec k = KernelSpec::make_default();
  double worst = 0.0;
  for (double h : {0.05, 0.1, 0.2}) {
    const BochnerReport rep = check_bochner_identities(k, Bandwidth(h), 101);
    std::cout << "h=" << format_double(h)
              << " mass_u=" << format_double(rep.dev_mass_u)
              << " moment_u=" << format_double(rep.dev_moment_u)
              << " mass_x=" << format_double(rep.dev_mass_x)
              << " moment_x=" << format_double(rep.dev_moment_x) << "\n";
    worst = std::max(worst, rep.max_deviation());
  }
  std::cout << "max deviation " << format_double(worst)
            << (worst <= 1e-8 ? " (pass)" : " (FAIL)") << "\n";
  return worst <= 1e-8 ? 0 : 1;
}

int cmd_study(const std::string& config, const std::string& out,
              const std::string& csv_out, bool no_meta)
{
  const StudyConfig cfg = study_config_from_json(slurp(config));
  const StudyReport rep = run_study(cfg);
  spill(out, study_report_to_json(rep, !no_meta) + "\n");
  if (!csv_out.empty()) {
    std::ofstream cs(csv_out);
    if (!cs) throw std::runtime_error("cannot write " + csv_out);
    study_report_to_csv(cs, rep, !no_meta);
  }
  if (rep.rate_fit.present)
    std::cerr << "rate slope " << format_double(rep.rate_fit.slope)
              << " (theory " << format_double(rep.theory_slope) << ", r2 "
              << format_double(rep.rate_fit.r2) << ")\n";
  return 0;
}

int cmd_diagnose(const std::string& model_path, const FrontierFlags& ff,
                 bool have_frontier, double lbeta, double calpha, double fmax,
                 double fmin)
{
  const EstimatorModel m = model_from_json(slurp(model_path));
  FrontierFn truth;
  if (have_frontier) truth = ff.build();
  DiagnosticsConstants dc;
  dc.c_alpha = calpha > 0 ? calpha : m.c_alpha;
  dc.l_beta = lbeta;
  dc.f_max = fmax > 0 ? fmax : (have_frontier ? truth.f_max : 1.0);
  dc.f_min = fmin > 0 ? fmin : (have_frontier ? truth.f_min : 1.0);
  if (lbeta <= 0 && have_frontier) dc.l_beta = truth.l_beta;

  const LemmaReport rep =
      lemma_diagnostics(m, dc, have_frontier ? &truth : nullptr);
  nlohmann::json j;
  j["sup_d1"] = rep.sup_d1;
  j["lipschitz_bound"] = rep.lipschitz_bound;
  j["lipschitz_pass"] = rep.lipschitz_pass;
  j["sup_d2"] = rep.sup_d2;
  j["curvature_bound"] = rep.curvature_bound;
  j["curvature_pass"] = rep.curvature_pass;
  j["min_fhat"] = rep.min_fhat;
  j["surface_dev"] = rep.surface_dev;
  j["surface_identity_pass"] = rep.surface_dev <= 1e-6;
  j["realized_ratio"] = rep.realized_ratio;
  if (rep.has_truth) {
    j["shortfall"] = rep.shortfall;
    j["rate_scale"] = rep.rate_scale;
    j["objective_gap"] = rep.objective_gap;
  }
  std::cout << j.dump(2) << "\n";
  return rep.lipschitz_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"L1-optimal linear-programming frontier estimator"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "draw points uniformly under a frontier");
  FrontierFlags sample_ff;
  sample_ff.attach(sample, true);
  int sample_n = 0;
  std::uint64_t sample_seed = 0;
  std::string sample_out;
  sample->add_option("--n", sample_n, "sample size")->required();
  sample->add_option("--seed", sample_seed, "RNG seed")->required();
  sample->add_option("--out", sample_out, "output CSV")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "fit the LP-estimator to a CSV sample");
  std::string fit_in, fit_out, fit_grid_out;
  double fit_beta = 0, fit_lbeta = 0, fit_fmax = 0, fit_h1 = 1.0,
         fit_calpha = 0;
  int fit_grid_points = 201;
  FrontierFlags fit_ff;
  fitc->add_option("--in", fit_in, "input CSV")->required();
  fitc->add_option("--beta", fit_beta, "smoothness exponent in (1,2]")->required();
  fitc->add_option("--lbeta", fit_lbeta, "Hoelder constant of f'")->required();
  fitc->add_option("--fmax", fit_fmax, "upper bound on f")->required();
  fitc->add_option("--h1", fit_h1, "bandwidth prefactor");
  fitc->add_option("--calpha", fit_calpha, "mass cap (default 8*fmax)");
  fitc->add_option("--out", fit_out, "output model JSON")->required();
  fitc->add_option("--grid-out", fit_grid_out, "CSV of the fitted curve");
  fitc->add_option("--grid-points", fit_grid_points, "grid size for --grid-out");
  std::string fit_lp_out;
  fitc->add_option("--lp-out", fit_lp_out,
                   "export the constraint system as frontier-lp v1 text");
  fit_ff.attach(fitc, false);

  // solve
  auto* solvec = app.add_subcommand("solve", "solve a frontier-lp v1 text file");
  std::string solve_lp, solve_out;
  solvec->add_option("--lp", solve_lp, "LP text file")->required();
  solvec->add_option("--out", solve_out, "write solution JSON here");

  // check-kernel
  app.add_subcommand("check-kernel", "verify the kernel integral identities");

  // study
  auto* studyc = app.add_subcommand("study", "Monte Carlo convergence study");
  std::string study_config, study_out, study_csv;
  bool study_no_meta = false;
  studyc->add_option("--config", study_config, "study config JSON")->required();
  studyc->add_option("--out", study_out, "output report JSON")->required();
  studyc->add_option("--csv-out", study_csv, "also write flat CSV rows");
  studyc->add_flag("--no-meta", study_no_meta,
                   "omit timing/metadata for byte-stable output");

  // diagnose
  auto* diagc = app.add_subcommand("diagnose", "lemma diagnostics for a model");
  std::string diag_model;
  double diag_lbeta = 0, diag_calpha = 0, diag_fmax = 0, diag_fmin = 0;
  FrontierFlags diag_ff;
  diagc->add_option("--model", diag_model, "model JSON")->required();
  diagc->add_option("--lbeta", diag_lbeta, "Hoelder constant of f'");
  diagc->add_option("--calpha", diag_calpha, "mass cap used in the fit");
  diagc->add_option("--fmax", diag_fmax, "upper bound on f");
  diagc->add_option("--fmin", diag_fmin, "lower bound on f");
  diag_ff.attach(diagc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits 0, any usage problem exits 2
  }

  try {
    if (sample->parsed())
      return cmd_sample(sample_ff, sample_n, sample_seed, sample_out);
    if (fitc->parsed())
      return cmd_fit(fit_in, fit_beta, fit_lbeta, fit_fmax, fit_h1, fit_calpha,
                     fit_out, fit_grid_out, fit_grid_points, fit_lp_out, fit_ff,
                     fit_ff.kind != "sine" || fitc->count("--frontier") > 0);
    if (solvec->parsed()) return cmd_solve(solve_lp, solve_out);
    if (app.get_subcommand("check-kernel")->parsed()) return cmd_check_kernel();
    if (studyc->parsed())
      return cmd_study(study_config, study_out, study_csv, study_no_meta);
    if (diagc->parsed())
      return cmd_diagnose(diag_model, diag_ff,
                          diagc->count("--frontier") > 0, diag_lbeta,
                          diag_calpha, diag_fmax, diag_fmin);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
