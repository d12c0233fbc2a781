// idmbdf: convergence sweeps, truncation studies and weight tables from the
// command line. Exit codes: 0 success, 2 invalid configuration, 3 resource
// limit exceeded.

#include "idmbdf/cq_kernel.hpp"
#include "idmbdf/experiment.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace idmbdf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct SweepArgs {
  std::string scheme = "id2-bdf2";
  std::string format = "csv";
  std::string out;
  bool paper = false;
  std::vector<int> l_list{5, 10, 20, 40};
};

void add_config_options(CLI::App& cmd, ExperimentConfig& cfg, SweepArgs& args) {
  cmd.add_option("--scheme", args.scheme, "id1-bdf2, id2-bdf2 or id3-bdf3")->capture_default_str();
  cmd.add_option("--alpha", cfg.alpha_list, "comma-separated alpha values")->delimiter(',')->capture_default_str();
  cmd.add_option("--gamma", cfg.gamma_list, "comma-separated gamma values")->delimiter(',')->capture_default_str();
  cmd.add_option("--N", cfg.N_list, "comma-separated step counts, doubling")->delimiter(',')->capture_default_str();
  cmd.add_option("--traj", cfg.trajectories, "Monte Carlo trajectories M")->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  cmd.add_option("--l", cfg.l, "noise truncation level")->capture_default_str();
  cmd.add_option("--J", cfg.J, "spectral modes")->capture_default_str();
  cmd.add_option("--fine-L", cfg.fine_L, "reference grid has 2^fine-L steps")->capture_default_str();
  cmd.add_option("--T", cfg.T, "final time")->capture_default_str();
  cmd.add_option("--sigma-exponent", cfg.sigma_exponent, "sigma_j = j^-exponent")->capture_default_str();
  cmd.add_option("--workers", cfg.workers, "worker threads, 0 for all cores")->capture_default_str();
  cmd.add_flag("--zero-noise", cfg.zero_noise, "deterministic run");
  cmd.add_flag("--paper-scale", args.paper, "M = 1000 and fine-L = 20 unless given explicitly");
  cmd.add_option("--out", args.out, "output file (default stdout)");
  cmd.set_config("--config", "", "key=value configuration file; flags take precedence");
}

void finish_config(const CLI::App& cmd, ExperimentConfig& cfg, const SweepArgs& args) {
  try {
    cfg.scheme = parse_scheme(args.scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (args.paper) {
    const ExperimentConfig scaled = paper_scale(cfg);
    if (cmd.count("--traj") == 0) cfg.trajectories = scaled.trajectories;
    if (cmd.count("--fine-L") == 0) cfg.fine_L = scaled.fine_L;
  }
}

void write_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << text;
}

void warn_stability(const ConvergenceReport& rep) {
  for (const auto& c : rep.cells) {
    if (c.stability_warning) {
      std::cerr << "warning: " << scheme_name(rep.scheme) << " with alpha = " << c.alpha
                << " is only conditionally stable\n";
    }
  }
}

int run_sweep_cmd(const CLI::App& cmd, ExperimentConfig cfg, const SweepArgs& args) {
  finish_config(cmd, cfg, args);
  const ReportFormat format = parse_format(args.format);
  const auto rep = run_sweep(cfg);
  warn_stability(rep);
  if (args.out.empty()) {
    std::cout << format_report(rep, format);
  } else {
    emit_report(rep, format, args.out);
  }
  std::cerr << rep.cells.size() << " cells, M = " << rep.trajectories << ", " << rep.wall_seconds << " s\n";
  return 0;
}

int run_truncation_cmd(const CLI::App& cmd, ExperimentConfig cfg, const SweepArgs& args) {
  finish_config(cmd, cfg, args);
  const auto rep = truncation_study(cfg, args.l_list);
  std::string text = "l,mean_sq,std_err,l_ref,N,alpha,gamma,M\n";
  for (std::size_t i = 0; i < rep.l.size(); ++i) {
    text += std::to_string(rep.l[i]) + "," + shortest(rep.mean_sq[i]) + "," + shortest(rep.std_err_sq[i]) + "," +
            std::to_string(rep.l_ref) + "," + std::to_string(rep.N) + "," + shortest(rep.alpha) + "," +
            shortest(rep.gamma) + "," + std::to_string(rep.trajectories) + "\n";
  }
  write_text(text, args.out);
  std::cerr << "log-log slope " << rep.fitted_slope << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Each subcommand is parsed as its own app so that its key=value config
  // file maps directly onto its flags.
  const std::string usage =
      "IDm-BDFk solver for the stochastic diffusion-wave equation with integrated additive noise\n"
      "usage: idmbdf <command> [options]   (idmbdf <command> --help for options)\n"
      "commands:\n"
      "  sweep                coupled-path convergence sweep over (alpha, gamma, N)\n"
      "  truncation           noise truncation error against l (reference l = --l)\n"
      "  deterministic-order  single-mode error against the Mittag-Leffler solution\n"
      "  weights-dump         print convolution quadrature weights\n";
  const std::string command = argc > 1 ? argv[1] : "";
  if (command == "-h" || command == "--help") {
    std::cout << usage;
    return 0;
  }

  ExperimentConfig sweep_cfg;
  SweepArgs sweep_args;
  CLI::App sweep_app{"coupled-path convergence sweep over (alpha, gamma, N)", "idmbdf sweep"};
  auto* sweep = &sweep_app;
  add_config_options(*sweep, sweep_cfg, sweep_args);
  sweep->add_option("--format", sweep_args.format, "csv, tsv or json-lines")->capture_default_str();

  ExperimentConfig trunc_cfg;
  trunc_cfg.N_list = {128, 256};
  trunc_cfg.trajectories = 500;
  SweepArgs trunc_args;
  CLI::App trunc_app{"noise truncation error against l (reference l = --l)", "idmbdf truncation"};
  auto* trunc = &trunc_app;
  add_config_options(*trunc, trunc_cfg, trunc_args);
  trunc->add_option("--l-list", trunc_args.l_list, "truncation levels")->delimiter(',')->capture_default_str();

  std::string det_scheme = "id2-bdf2";
  double det_alpha = 1.7;
  std::vector<std::size_t> det_N{64, 128, 256, 512};
  std::string det_out;
  CLI::App det_app{"single-mode error against the Mittag-Leffler solution", "idmbdf deterministic-order"};
  auto* det = &det_app;
  det->add_option("--scheme", det_scheme)->capture_default_str();
  det->add_option("--alpha", det_alpha)->capture_default_str();
  det->add_option("--N", det_N)->delimiter(',')->capture_default_str();
  det->add_option("--out", det_out);

  int w_k = 2;
  double w_beta = 1.5;
  std::size_t w_n = 16;
  std::string w_out;
  CLI::App wd_app{"print convolution quadrature weights", "idmbdf weights-dump"};
  auto* wd = &wd_app;
  wd->add_option("--k", w_k, "BDF order 1-3")->capture_default_str();
  wd->add_option("--beta", w_beta, "power")->capture_default_str();
  wd->add_option("--n", w_n, "highest index")->capture_default_str();
  wd->add_option("--out", w_out);

  CLI::App* selected = nullptr;
  if (command == "sweep") selected = sweep;
  if (command == "truncation") selected = trunc;
  if (command == "deterministic-order") selected = det;
  if (command == "weights-dump") selected = wd;
  if (selected == nullptr) {
    std::cerr << (command.empty() ? std::string("missing command") : "unknown command '" + command + "'") << "\n"
              << usage;
    return kExitConfig;
  }

  try {
    selected->parse(argc - 1, argv + 1);
  } catch (const CLI::CallForHelp& e) {
    return selected->exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return selected->exit(e);
  } catch (const CLI::ParseError& e) {
    selected->exit(e);
    return kExitConfig;
  }

  try {
    if (selected == sweep) return run_sweep_cmd(*sweep, sweep_cfg, sweep_args);
    if (selected == trunc) return run_truncation_cmd(*trunc, trunc_cfg, trunc_args);
    if (selected == det) {
      SchemeKind kind;
      try {
        kind = parse_scheme(det_scheme);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      const auto rep = deterministic_order(kind, det_alpha, det_N);
      std::string text = "N,error,rate,oracle\n";
      for (std::size_t i = 0; i < rep.N.size(); ++i) {
        text += std::to_string(rep.N[i]) + "," + shortest(rep.errors[i]) + "," +
                (rep.rates[i] ? shortest(*rep.rates[i]) : std::string()) + "," + shortest(rep.oracle) + "\n";
      }
      write_text(text, det_out);
      return 0;
    }
    if (selected == wd) {
      const auto w = frac_weights(w_k, w_beta, w_n);
      std::string text = "j,w\n";
      for (std::size_t j = 0; j < w.size(); ++j) text += std::to_string(j) + "," + shortest(w[j]) + "\n";
      write_text(text, w_out);
      return 0;
    }
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
