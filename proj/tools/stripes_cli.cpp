// Command line front end: verify, coeffs, diagram, oracle, calibrate, scan.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stripes/io/config.hpp"
#include "stripes/io/emit.hpp"
#include "stripes/oracle/compare.hpp"

using namespace stripes;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_dir(const io::RunConfig& cfg) {
  if (const char* env = std::getenv("STRIPES_OUTPUT_DIR")) return env;
  return cfg.output_dir;
}

void print_turing_report(const SystemSpec& sys) {
  const TuringReport rep = verify_turing(sys);
  std::cout << "condition 1 (stable base state):     " << (rep.base_state_stable ? "ok" : "FAIL")
            << "\n";
  std::cout << "condition 2 (critical circle only):  " << (rep.critical_circle ? "ok" : "FAIL")
            << "  [discriminant " << io::fmt12(rep.discriminant) << ", det at kc "
            << io::fmt12(rep.det_at_kc) << "]\n";
  std::cout << "condition 3 (simple root):           " << (rep.simple_root ? "ok" : "FAIL") << "\n";
  std::cout << "product identity defect a2a3-b1b4:   " << io::fmt12(rep.product_identity_defect)
            << "\n";
  if (!rep.all()) throw NumericalError("Turing conditions not satisfied");
  const TuringData t = linear_coeffs(sys);
  std::cout << "kc        = " << io::fmt12(t.kc) << "\n";
  std::cout << "E0        = (" << io::fmt12(t.E0(0)) << ", " << io::fmt12(t.E0(1)) << ")\n";
  std::cout << "E0*       = (" << io::fmt12(t.E0_star(0)) << ", " << io::fmt12(t.E0_star(1))
            << ")\n";
  std::cout << "lambda_b  = " << io::fmt12(t.lambda_beta) << "\n";
  std::cout << "lambda_bb = " << io::fmt12(t.lambda_betabeta) << "\n";
  std::cout << "lambda_M  = " << io::fmt12(t.lambda_M) << "\n";
  std::cout << "rho_beta  = " << io::fmt12(t.rho_beta) << "\n";
  std::cout << "rho_kappa = " << io::fmt12(t.rho_kappa) << "\n";
  std::cout << "stripe onset alpha(beta=0.2): "
            << io::fmt12(hom_instability_threshold(t, 0.2, HomMode::stripe)) << "\n";
  std::cout << "hex onset alpha(beta=0.2):    "
            << io::fmt12(hom_instability_threshold(t, 0.2, HomMode::hex)) << "\n";
}

void print_coeffs(const SystemSpec& sys, double gamma_cal) {
  const TuringData t = linear_coeffs(sys);
  CoefficientSet cs = compute_coefficients(sys, t);
  cs.gamma_cal = gamma_cal;
  std::cout << "q_raw  = " << io::fmt12(cs.q_raw) << "   (gamma_cal " << io::fmt12(cs.gamma_cal)
            << " -> q_eff " << io::fmt12(cs.q_eff()) << ")\n";
  std::cout << "q0     = " << io::fmt12(cs.q0) << "\n";
  std::cout << "q2     = " << io::fmt12(cs.q2) << "\n";
  std::cout << "q1     = " << io::fmt12(cs.q1) << "\n";
  std::cout << "q11    = " << io::fmt12(cs.q11) << "\n";
  std::cout << "k0     = " << io::fmt12(cs.k0) << "\n";
  std::cout << "rho_nl = " << io::fmt12(cs.rho_nl) << "\n";
  std::cout << "xi     = " << io::fmt12(cs.xi) << "\n";
  std::cout << "eta    = " << io::fmt12(cs.eta) << "\n";
  std::cout << "c      = " << io::fmt12(cs.c) << "\n";
  std::cout << "Q0     = (" << io::fmt12(cs.Q0(0)) << ", " << io::fmt12(cs.Q0(1)) << ")\n";
  std::cout << "Q2     = (" << io::fmt12(cs.Q2(0)) << ", " << io::fmt12(cs.Q2(1)) << ")\n";
  std::cout << "Q1     = (" << io::fmt12(cs.Q1(0)) << ", " << io::fmt12(cs.Q1(1)) << ")\n";
  std::cout << "w_Aa   = (" << io::fmt12(cs.w_Aalpha(0)) << ", " << io::fmt12(cs.w_Aalpha(1))
            << ")\n";
  std::cout << "w_Ab   = (" << io::fmt12(cs.w_Abeta(0)) << ", " << io::fmt12(cs.w_Abeta(1))
            << ")\n";
  std::cout << "w_Ak   = (" << io::fmt12(cs.w_Akappa(0)) << ", " << io::fmt12(cs.w_Akappa(1))
            << ")\n";
  std::cout << "rho_beta check  (response route): " << io::fmt12(rho_beta_alt(sys, t, cs)) << "\n";
  std::cout << "rho_kappa check (response route): " << io::fmt12(rho_kappa_alt(sys, t, cs))
            << "\n";
}

void run_diagram(const io::RunConfig& cfg) {
  const SystemSpec sys = cfg.build_system();
  const TuringData t = linear_coeffs(sys);
  CoefficientSet cs = compute_coefficients(sys, t);
  cs.gamma_cal = cfg.diagram.gamma_cal;
  io::DiagramConfig d = cfg.diagram;
  if (!d.q_eff_given) d.params.q_eff = cs.q_eff();
  const DiagramGrid grid = diagram_grid(sys, t, cs, d.plane, d.params, d.grid);
  const std::string dir = output_dir(cfg);
  const std::string base = dir + "/diagram-" + io::plane_name(d.plane);
  io::emit_grid(grid, base + ".csv");
  io::emit_plot(grid, grid.boundaries, base + ".svg");
  std::cout << "wrote " << base << ".csv and .svg (" << grid.x.size() << "x" << grid.y.size()
            << " cells)\n";
}

oracle::Scenario scenario_by_name(const std::string& name) {
  oracle::Scenario sc;
  sc.name = name;
  if (name == "hex") {
    sc.kind = oracle::LatticeKind::hexagonal;
    sc.alpha_p = 1.0;
    sc.beta_p = 0.5;
    sc.kappa_p = 0.3;
  } else if (name == "quasihex") {
    sc.kind = oracle::LatticeKind::quasihexagonal;
    sc.alpha_p = 4.0;
    sc.beta_p = 0.0;
    sc.kappa_p = 1.0;
    sc.ell_p = -1.0 / 3.0;  // theta = 1, the most unstable detuning
  } else if (name == "square") {
    sc.kind = oracle::LatticeKind::square;
    sc.alpha_p = 1.0;
    sc.beta_p = 0.5;
    sc.kappa_p = 0.4;
    sc.ell_p = 0.0;
  } else if (name == "l1") {
    sc.kind = oracle::LatticeKind::square;
    sc.alpha_p = 1.0;
    sc.beta_p = 0.0;
    sc.kappa_p = 0.0;
    sc.ell_p = 0.0;
  } else {
    throw io::RangeError("unknown oracle scenario: " + name);
  }
  return sc;
}

void print_report(const oracle::ConvergenceReport& rep) {
  std::cout << "scenario " << rep.scenario.name << ": eps =";
  for (double e : rep.eps) std::cout << " " << io::fmt12(e);
  std::cout << "\n";
  std::cout << "translation |lambda|:";
  for (double t : rep.translation_abs) std::cout << " " << io::fmt12(t);
  std::cout << (rep.translation_ok() ? "  (<= 1e-8 ok)" : "  (FAIL)") << "\n";
  for (const auto& tr : rep.tracks) {
    std::cout << "  " << tr.label << ": errors";
    for (double e : tr.error) std::cout << " " << io::fmt12(e);
    std::cout << "  order " << io::fmt12(tr.order_fit)
              << (tr.pass(2.5) ? "  (>= 2.5 ok)" : "  (FAIL)") << "\n";
  }
}

void run_scan(const io::RunConfig& cfg) {
  oracle::KlausmeierScanConfig sc = cfg.scan;
  const oracle::KlausmeierScanResult res = oracle::klausmeier_scan(sc);
  const std::string dir = output_dir(cfg);
  std::ostringstream tag;
  tag << dir << "/klausmeier-beta" << io::fmt12(sc.beta);
  io::emit_grid(io::scan_to_grid(res), tag.str() + ".csv");
  io::write_file(tag.str() + ".log", io::render_scan_log(res));
  io::emit_plot(io::scan_to_grid(res), {}, tag.str() + ".svg");
  const int comps = oracle::count_components(
      res, [](const oracle::CellResult& c) { return c.exists && c.rhomb_breakup; });
  std::cout << "scan done: " << res.kappa_values.size() << "x" << res.a_values.size()
            << " cells, a_T = " << io::fmt12(res.a_turing)
            << ", kc = " << io::fmt12(res.kc_ref) << "\n";
  std::cout << "rhomb-unstable components: " << comps << "\n";
  const oracle::BranchCrossing bc = oracle::find_rhomb_branch_crossing(res);
  if (bc.found)
    std::cout << "rhomb criticality-curve crossing near kappa = " << io::fmt12(bc.kappa)
              << ", a = " << io::fmt12(bc.a) << "\n";
  std::cout << "wrote " << tag.str() << ".csv/.log/.svg\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stripe existence and lattice stability near planar Turing instabilities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset = "designed_example";
  double epsilon = 0.4;
  double gamma_cal = 1.0;
  app.add_option("--config", config_path, "JSON run configuration (comments allowed)");
  app.add_option("--preset", preset, "system preset: designed_example | klausmeier");
  app.add_option("--epsilon", epsilon, "quadratic strength of the designed example");
  app.add_option("--gamma-cal", gamma_cal, "q convention factor (see `calibrate`)");

  auto* cmd_verify = app.add_subcommand("verify", "check the Turing conditions, print linear data");
  auto* cmd_coeffs = app.add_subcommand("coeffs", "print the nonlinear coefficient set");
  auto* cmd_diagram = app.add_subcommand("diagram", "classify a parameter-plane grid");
  auto* cmd_oracle = app.add_subcommand("oracle", "eps-sweep comparison against the blocks");
  auto* cmd_calibrate = app.add_subcommand("calibrate", "fix the q convention by brute force");
  auto* cmd_scan = app.add_subcommand("scan", "Klausmeier breakup scan over (kappa, a)");

  std::string plane = "kappa-alpha";
  double beta = 0.0, kappa_tilde = 0.0, theta = 1.0, ell_sq = 0.0;
  double q_eff = std::nan("");
  std::vector<double> grid_x = {-0.25, 0.25}, grid_y = {-0.02, 0.3};
  std::size_t nx = 121, ny = 121;
  std::string out_dir = ".";
  cmd_diagram->add_option("--plane", plane, "kappa-alpha | q-alpha | beta-alphatilde | epsilon-alpha");
  cmd_diagram->add_option("--beta", beta, "advection strength");
  cmd_diagram->add_option("--kappa-tilde", kappa_tilde, "wavenumber offset");
  cmd_diagram->add_option("--theta", theta, "quasi-hex detuning parameter in (0,1]");
  cmd_diagram->add_option("--ell-sq", ell_sq, "quasi-square transverse offset");
  cmd_diagram->add_option("--q-eff", q_eff, "override the effective q");
  cmd_diagram->add_option("--x-range", grid_x, "abscissa range")->expected(2);
  cmd_diagram->add_option("--y-range", grid_y, "ordinate range")->expected(2);
  cmd_diagram->add_option("--x-count", nx, "abscissa samples");
  cmd_diagram->add_option("--y-count", ny, "ordinate samples");
  cmd_diagram->add_option("--out", out_dir, "output directory");

  std::string scenario = "hex";
  std::vector<double> eps_list = {0.05, 0.025, 0.0125};
  cmd_oracle->add_option("--scenario", scenario, "hex | quasihex | square | l1");
  cmd_oracle->add_option("--eps-list", eps_list, "decreasing eps sweep")->expected(-2);

  double scan_beta = 0.0;
  std::vector<double> a_range = {2.60, 2.89}, k_range = {0.40, 0.55};
  double a_step = 0.005, k_step = 0.002;
  int scan_N = 64, scan_Nlat = 6, threads = 0;
  std::string model = "klausmeier";
  cmd_scan->add_option("--model", model, "only 'klausmeier' is available");
  cmd_scan->add_option("--beta", scan_beta, "advection strength");
  cmd_scan->add_option("--a-range", a_range, "rainfall range")->expected(2);
  cmd_scan->add_option("--kappa-range", k_range, "wavenumber range")->expected(2);
  cmd_scan->add_option("--a-step", a_step, "rainfall spacing");
  cmd_scan->add_option("--kappa-step", k_step, "wavenumber spacing");
  cmd_scan->add_option("--n", scan_N, "1d truncation");
  cmd_scan->add_option("--n-lat", scan_Nlat, "lattice truncation");
  cmd_scan->add_option("--threads", threads, "worker threads (0 = auto)");
  cmd_scan->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    io::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = io::parse_config(read_file(config_path));
      if (app.count("--preset")) cfg.system_preset = preset;
      if (app.count("--epsilon")) cfg.epsilon = epsilon;
      if (cmd_diagram->count("--out") || cmd_scan->count("--out")) cfg.output_dir = out_dir;
    } else {
      cfg.system_preset = preset;
      cfg.epsilon = epsilon;
      cfg.output_dir = out_dir;
    }
    try {
      if (cmd_verify->parsed()) {
        print_turing_report(cfg.build_system());
      } else if (cmd_coeffs->parsed()) {
        print_coeffs(cfg.build_system(), gamma_cal);
      } else if (cmd_diagram->parsed()) {
        // a config file provides the baseline; explicit flags override it
        cfg.command = io::Command::diagram;
        const bool from_config = !config_path.empty();
        if (!from_config || cmd_diagram->count("--plane")) cfg.diagram.plane = io::plane_of(plane);
        if (!from_config || cmd_diagram->count("--beta")) cfg.diagram.params.beta = beta;
        if (!from_config || cmd_diagram->count("--kappa-tilde"))
          cfg.diagram.params.kappa_tilde = kappa_tilde;
        if (!from_config || cmd_diagram->count("--theta")) cfg.diagram.params.theta = theta;
        if (!from_config || cmd_diagram->count("--ell-sq"))
          cfg.diagram.params.ell_tilde_square = ell_sq;
        if (!from_config || app.count("--gamma-cal")) cfg.diagram.gamma_cal = gamma_cal;
        if (!std::isnan(q_eff)) {
          cfg.diagram.params.q_eff = q_eff;
          cfg.diagram.q_eff_given = true;
        }
        if (!from_config || cmd_diagram->count("--x-range") || cmd_diagram->count("--x-count") ||
            cmd_diagram->count("--y-range") || cmd_diagram->count("--y-count"))
          cfg.diagram.grid = GridSpec{grid_x[0], grid_x[1], nx, grid_y[0], grid_y[1], ny};
        run_diagram(cfg);
      } else if (cmd_oracle->parsed()) {
        const SystemSpec base = cfg.system_preset == "klausmeier"
                                    ? oracle::klausmeier_unfolded_at_onset(
                                          cfg.klausmeier_params.m, cfg.klausmeier_params.d)
                                    : designed_example(1.0);
        const auto rep = oracle::compare_asymptotics(base, scenario_by_name(scenario), eps_list,
                                                     gamma_cal);
        print_report(rep);
        if (!rep.pass()) return 3;
      } else if (cmd_calibrate->parsed()) {
        const SystemSpec base = cfg.system_preset == "klausmeier"
                                    ? oracle::klausmeier_unfolded_at_onset(
                                          cfg.klausmeier_params.m, cfg.klausmeier_params.d)
                                    : designed_example(1.0);
        const auto cal = oracle::calibrate_q_convention(base);
        std::cout << "gamma_cal = " << io::fmt12(cal.gamma_cal) << "\n";
        std::cout << "  order with gamma=1:   " << io::fmt12(cal.order_gamma_full) << "\n";
        std::cout << "  order with gamma=1/2: " << io::fmt12(cal.order_gamma_half) << "\n";
        const TuringData t = linear_coeffs(cfg.build_system());
        CoefficientSet cs = compute_coefficients(cfg.build_system(), t);
        cs.gamma_cal = cal.gamma_cal;
        std::cout << "q_raw(system) = " << io::fmt12(cs.q_raw)
                  << ", q_eff = " << io::fmt12(cs.q_eff()) << "\n";
      } else if (cmd_scan->parsed()) {
        if (model != "klausmeier") throw io::RangeError("unknown scan model: " + model);
        cfg.command = io::Command::scan;
        const bool from_config = !config_path.empty();
        if (!from_config || cmd_scan->count("--beta")) cfg.scan.beta = scan_beta;
        if (!from_config || cmd_scan->count("--a-range")) {
          cfg.scan.a_min = a_range[0];
          cfg.scan.a_max = a_range[1];
        }
        if (!from_config || cmd_scan->count("--a-step")) cfg.scan.a_step = a_step;
        if (!from_config || cmd_scan->count("--kappa-range")) {
          cfg.scan.kappa_min = k_range[0];
          cfg.scan.kappa_max = k_range[1];
        }
        if (!from_config || cmd_scan->count("--kappa-step")) cfg.scan.kappa_step = k_step;
        if (!from_config || cmd_scan->count("--n")) cfg.scan.N = scan_N;
        if (!from_config || cmd_scan->count("--n-lat")) cfg.scan.N_lat = scan_Nlat;
        if (!from_config || cmd_scan->count("--threads")) cfg.scan.threads = threads;
        run_scan(cfg);
      }
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 3;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
