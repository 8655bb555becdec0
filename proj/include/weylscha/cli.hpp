#ifndef WEYLSCHA_CLI_HPP
#define WEYLSCHA_CLI_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "weylscha/afm_bulk.hpp"
#include "weylscha/afm_chain.hpp"
#include "weylscha/classical_boundary.hpp"
#include "weylscha/errors.hpp"
#include "weylscha/fock.hpp"
#include "weylscha/quadratic.hpp"
#include "weylscha/report.hpp"
#include "weylscha/weyl.hpp"

#include "CLI11.hpp"

namespace weylscha::cli {

enum class Command { NormalForm, BulkSf, ChainPhase, ClassicalNc, WeylDemo };

struct RunConfig {
  Command command = Command::WeylDemo;

  // normal-form
  std::string input_path;
  double hbar = 1.0;

  // shared sweep parameters
  double mu_min = 1.0, mu_max = 1.0;
  int mu_steps = 1;
  double spin = 0.5;
  double beta = kBetaInfinity;

  // bulk-sf
  int dim = 1;
  int grid = 1024;

  // chain-phase
  int n_sites = 13;

  // classical-nc
  double h_min = 0.0, h_max = 1.0;
  int nc_grid = 64;

  // output
  std::string output_path;  // default ./out/<command>-<timestamp>.<format>
  bool output_explicit = false;
  std::string format = "csv";
  std::string svg_path;  // optional plot
  int threads = 0;       // 0 = default (env or hardware)
};

inline const char* command_name(Command c) {
  switch (c) {
    case Command::NormalForm: return "normal-form";
    case Command::BulkSf: return "bulk-sf";
    case Command::ChainPhase: return "chain-phase";
    case Command::ClassicalNc: return "classical-nc";
    case Command::WeylDemo: return "weyl-demo";
  }
  return "?";
}

/// Parse command line (and optional `key = value` config file; flags given on
/// the command line override file values).  Throws ConfigError listing every
/// invalid field.
inline RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Phase-space self-consistent harmonic approximation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file with key = value lines");
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: WEYLSCHA_THREADS or hardware)");

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", cfg.output_path, "Output file path");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--svg", cfg.svg_path, "Also emit an SVG plot to this path");
  };

  auto* nf = app.add_subcommand("normal-form",
                                "Reduce a quadratic Hamiltonian read from a matrix file");
  nf->add_option("--input", cfg.input_path, "Matrix file: N, then A2, B2, X blocks")
      ->required();
  nf->add_option("--hbar", cfg.hbar, "Effective Planck constant")
      ->check(CLI::PositiveNumber);
  nf->add_option("--beta", cfg.beta, "Inverse temperature (default: ground state)");
  add_output(nf);

  auto* bulk = app.add_subcommand("bulk-sf", "Bulk AFM spin-flop field sweep over mu");
  bulk->add_option("--dim", cfg.dim, "Lattice dimension")->check(CLI::Range(1, 3));
  bulk->add_option("--mu-min", cfg.mu_min, "Anisotropy sweep start")->required();
  bulk->add_option("--mu-max", cfg.mu_max, "Anisotropy sweep end")->required();
  bulk->add_option("--mu-steps", cfg.mu_steps, "Sweep points")
      ->check(CLI::PositiveNumber);
  bulk->add_option("--spin", cfg.spin, "Spin S")->check(CLI::PositiveNumber);
  bulk->add_option("--grid", cfg.grid, "Brillouin-zone points per axis (even)");
  bulk->add_option("--beta", cfg.beta, "Inverse temperature (default: ground state)");
  add_output(bulk);

  auto* chain = app.add_subcommand("chain-phase",
                                   "Odd-N chain phase boundaries: classical, HA, SCHA");
  chain->add_option("--n", cfg.n_sites, "Chain length (odd)")->required();
  chain->add_option("--mu-min", cfg.mu_min, "Anisotropy sweep start")->required();
  chain->add_option("--mu-max", cfg.mu_max, "Anisotropy sweep end")->required();
  chain->add_option("--mu-steps", cfg.mu_steps, "Sweep points")
      ->check(CLI::PositiveNumber);
  chain->add_option("--spin", cfg.spin, "Spin S")->check(CLI::PositiveNumber);
  add_output(chain);

  auto* nc = app.add_subcommand("classical-nc",
                                "Critical chain size N_c(mu, h) on a parameter grid");
  nc->add_option("--mu-min", cfg.mu_min, "Anisotropy grid start")->required();
  nc->add_option("--mu-max", cfg.mu_max, "Anisotropy grid end")->required();
  nc->add_option("--h-min", cfg.h_min, "Field grid start")->required();
  nc->add_option("--h-max", cfg.h_max, "Field grid end")->required();
  nc->add_option("--grid", cfg.nc_grid, "Points per axis")->check(CLI::PositiveNumber);
  add_output(nc);

  auto* demo = app.add_subcommand("weyl-demo", "Run the symbol-identity checks");
  add_output(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::stringstream out;
    out << app.help();
    throw ConfigError("help\n" + out.str());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }

  std::vector<std::string> problems;
  if (nf->parsed()) cfg.command = Command::NormalForm;
  if (bulk->parsed()) {
    cfg.command = Command::BulkSf;
    if (cfg.grid < 2 || cfg.grid % 2 != 0) problems.push_back("grid must be even and >= 2");
  }
  if (chain->parsed()) {
    cfg.command = Command::ChainPhase;
    if (cfg.n_sites < 3 || cfg.n_sites % 2 == 0) problems.push_back("N must be odd and >= 3");
  }
  if (nc->parsed()) cfg.command = Command::ClassicalNc;
  if (demo->parsed()) cfg.command = Command::WeylDemo;

  if (cfg.mu_max < cfg.mu_min) problems.push_back("mu-max must be >= mu-min");
  if (cfg.h_max < cfg.h_min) problems.push_back("h-max must be >= h-min");
  if (cfg.mu_steps < 1) problems.push_back("mu-steps must be >= 1");
  if (!(cfg.beta > 0.0)) problems.push_back("beta must be positive");
  if (!problems.empty()) {
    std::string msg = "config error:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

  if (threads > 0) {
    cfg.threads = threads;
  } else if (const char* env = std::getenv("WEYLSCHA_THREADS")) {
    cfg.threads = std::max(1, std::atoi(env));
  } else {
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  }

  cfg.output_explicit = !cfg.output_path.empty();
  if (!cfg.output_explicit) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::localtime(&tt));
    cfg.output_path = std::string("out/") + command_name(cfg.command) + "-" + stamp +
                      "." + cfg.format;
  }
  return cfg;
}

inline RunConfig parse_config(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("weylscha");
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

enum class RowStatus { Ok, GapClosed, NoWindow, NoConvergence };

inline const char* status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::GapClosed: return "gap-closed";
    case RowStatus::NoWindow: return "no-window";
    case RowStatus::NoConvergence: return "no-convergence";
  }
  return "?";
}

struct ResultRecord {
  std::vector<report::Cell> cells;
  RowStatus status = RowStatus::Ok;
  std::string message;
};

namespace detail {

/// Run fn(i) for i in [0, count) on cfg.threads workers; results land in
/// submission order regardless of completion order, and one row's failure
/// never touches another row.
template <typename Fn>
std::vector<ResultRecord> ordered_parallel(int count, int threads, Fn&& fn) {
  std::vector<ResultRecord> out(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        out[i] = fn(i);
      } catch (const GapClosed& e) {
        out[i].status = RowStatus::GapClosed;
        out[i].message = e.what();
      } catch (const NoStableWindow& e) {
        out[i].status = RowStatus::NoWindow;
        out[i].message = e.what();
      } catch (const NotPositiveDefinite& e) {
        out[i].status = RowStatus::NoWindow;
        out[i].message = e.what();
      } catch (const DivergentCorrelator& e) {
        out[i].status = RowStatus::GapClosed;
        out[i].message = e.what();
      } catch (const NoConvergence& e) {
        out[i].status = RowStatus::NoConvergence;
        out[i].message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::max(1, std::min(threads, count));
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

inline double sweep_value(double lo, double hi, int steps, int i) {
  return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
}

inline const double kNan = std::nan("");

}  // namespace detail

struct SweepOutput {
  report::Table table;
  std::vector<ResultRecord> records;
  int ok_count = 0;

  void collect() {
    for (auto& rec : records) {
      table.add_row(rec.cells);
      if (rec.status == RowStatus::Ok) ++ok_count;
    }
  }
};

inline SweepOutput run_bulk_sf(const RunConfig& cfg) {
  SweepOutput out;
  out.table.columns = {"mu",      "h_cl",  "h_scha", "h_first_order", "D",
                       "D_prime", "theta", "mu_eff", "converged"};
  out.records = detail::ordered_parallel(cfg.mu_steps, cfg.threads, [&](int i) {
    const double mu = detail::sweep_value(cfg.mu_min, cfg.mu_max, cfg.mu_steps, i);
    BulkLattice lat{cfg.dim, cfg.grid, mu, 0.0, cfg.spin + 0.5};
    const BulkState st = scha_bulk(lat, SchaConfig{}, cfg.beta);
    const SpinFlopFields f = h_sf(st, lat);
    ResultRecord rec;
    rec.cells = {mu,         f.h_classical, f.h_scha, f.h_first_order,
                 st.D,       st.D_prime,    st.theta, st.mu_eff,
                 static_cast<long long>(st.converged)};
    return rec;
  });
  const double nan = detail::kNan;
  for (int i = 0; i < cfg.mu_steps; ++i) {
    auto& rec = out.records[i];
    if (rec.status != RowStatus::Ok) {
      const double mu = detail::sweep_value(cfg.mu_min, cfg.mu_max, cfg.mu_steps, i);
      const double h_cl =
          cfg.dim * 2.0 * std::sqrt(std::max(mu * mu - 1.0, 0.0));
      rec.cells = {mu, h_cl, nan, nan, nan, nan, nan, nan, static_cast<long long>(0)};
    }
  }
  out.collect();
  return out;
}

inline SweepOutput run_chain_phase(const RunConfig& cfg) {
  SweepOutput out;
  out.table.columns = {"N",          "mu",           "h_minus_cl",   "h_plus_cl",
                       "h_minus_HA", "h_plus_HA",    "h_minus_scha", "h_plus_scha",
                       "converged",  "iterations"};
  out.records = detail::ordered_parallel(cfg.mu_steps, cfg.threads, [&](int i) {
    const double mu = detail::sweep_value(cfg.mu_min, cfg.mu_max, cfg.mu_steps, i);
    const StabilityWindow cl = solve_h_pm(cfg.n_sites, mu);
    const ChainModel model{cfg.n_sites, mu, 0.0, cfg.spin + 0.5};
    const ChainSchaResult scha = scha_chain(model);
    ResultRecord rec;
    rec.cells = {static_cast<long long>(cfg.n_sites),
                 mu,
                 cl.h_minus,
                 cl.h_plus,
                 scha.ha.h_minus,
                 scha.ha.h_plus,
                 scha.h_minus_q,
                 scha.h_plus_q,
                 static_cast<long long>(scha.state.converged),
                 static_cast<long long>(scha.state.iterations)};
    return rec;
  });
  const double nan = detail::kNan;
  for (int i = 0; i < cfg.mu_steps; ++i) {
    auto& rec = out.records[i];
    if (rec.status != RowStatus::Ok) {
      const double mu = detail::sweep_value(cfg.mu_min, cfg.mu_max, cfg.mu_steps, i);
      rec.cells = {static_cast<long long>(cfg.n_sites),
                   mu,
                   nan,
                   nan,
                   nan,
                   nan,
                   nan,
                   nan,
                   static_cast<long long>(0),
                   static_cast<long long>(0)};
    }
  }
  out.collect();
  return out;
}

inline SweepOutput run_classical_nc(const RunConfig& cfg) {
  SweepOutput out;
  out.table.columns = {"mu", "h", "N_c"};
  const int g = cfg.nc_grid;
  out.records = detail::ordered_parallel(g * g, cfg.threads, [&](int idx) {
    const double mu = detail::sweep_value(cfg.mu_min, cfg.mu_max, g, idx / g);
    const double h = detail::sweep_value(cfg.h_min, cfg.h_max, g, idx % g);
    ResultRecord rec;
    double nc = detail::kNan;
    if (h < 2.0 * mu) {
      const double value = n_critical(h, mu);
      nc = std::isinf(value) ? detail::kNan : value;
    }
    rec.cells = {mu, h, nc};
    return rec;
  });
  out.collect();
  return out;
}

inline SweepOutput run_normal_form(const RunConfig& cfg) {
  std::ifstream in(cfg.input_path);
  if (!in) throw ConfigError("config error: cannot open input file " + cfg.input_path);
  int n = 0;
  in >> n;
  if (n < 1) throw ConfigError("config error: bad matrix dimension in " + cfg.input_path);
  auto read_block = [&](Matrix& m) {
    m.resize(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!(in >> m(r, c))) throw ConfigError("config error: truncated matrix block");
      }
    }
  };
  QuadraticHamiltonian h;
  read_block(h.A2);
  read_block(h.B2);
  read_block(h.X);
  h.p0 = Vector::Zero(n);
  h.q0 = Vector::Zero(n);
  h.hbar_eff = cfg.hbar;

  SweepOutput out;
  out.table.columns = {"mode", "omega", "alpha"};
  const NormalModeBasis basis = normal_form(h);
  const CorrelatorSet c = correlators(h, basis, cfg.beta);
  for (int k = 0; k < n; ++k) {
    out.records.push_back({{static_cast<long long>(k), basis.Omega[k], c.alpha[k]},
                           RowStatus::Ok,
                           ""});
  }
  out.collect();
  return out;
}

/// Plain-text pass/fail report over the symbol identities.
inline std::string weyl_demo_report(int* failures = nullptr) {
  std::string out;
  int failed = 0;
  auto check = [&](const std::string& name, bool ok) {
    out += (ok ? "[PASS] " : "[FAIL] ") + name + "\n";
    if (!ok) ++failed;
  };

  HolomorphicPolynomial number_op({{{1, 1}, 1.0}});
  const auto weyl = normal_to_weyl(number_op);
  check("normal_to_weyl(a* a) = a* a - 1/2",
        std::abs(weyl.coeff(1, 1) - 1.0) < 1e-15 && std::abs(weyl.coeff(0, 0) + 0.5) < 1e-15);
  check("round trip weyl_to_normal(normal_to_weyl(P)) = P",
        weyl_to_normal(weyl).almost_equal(number_op, 1e-15));

  HolomorphicPolynomial quartic({{{2, 2}, 1.0}, {{2, 0}, {0.0, 0.25}}, {{0, 2}, {0.0, -0.25}}});
  check("gaussian smoothing route equals derivative route",
        gaussian_smoothing_weyl(quartic).almost_equal(normal_to_weyl(quartic), 1e-14));
  check("hermitian input stays real on the real grid", [&] {
    const auto w = normal_to_weyl(quartic);
    for (double q = -1.5; q <= 1.5; q += 0.5) {
      for (double p = -1.5; p <= 1.5; p += 0.5) {
        const Complex a{q / std::sqrt(2.0), p / std::sqrt(2.0)};
        if (std::abs(w.evaluate(std::conj(a), a).imag()) > 1e-12) return false;
      }
    }
    return true;
  }());

  const auto thermal = thermal_ho_weyl(2.0, 1.0);
  double integral = 0.0;
  const int m = 400;
  const double lim = 10.0, step = 2.0 * lim / m;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const double wt = ((i == 0 || i == m) ? 0.5 : 1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);
      integral += wt * thermal.evaluate(-lim + i * step, -lim + j * step);
    }
  }
  integral *= step * step / (2.0 * M_PI);
  check("thermal HO phase-space integral = 1/(2 sinh f)",
        std::abs(integral - thermal.partition_function()) < 1e-10);

  const Complex a_pt{0.4, 0.3};
  const Complex lin = fn_times_a_weyl([](double) { return Complex{1.0, 0.0}; }, 1,
                                      std::conj(a_pt), a_pt);
  check("f == 1 symbol is the linear symbol a", std::abs(lin - a_pt) < 1e-15);

  if (failures) *failures = failed;
  return out;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline report::PlotSpec plot_spec_for(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::BulkSf:
      return {"mu", {"h_cl", "h_scha", "h_first_order"}, "", "bulk AFM spin-flop field",
              "mu", "h"};
    case Command::ChainPhase:
      return {"mu",
              {"h_minus_cl", "h_plus_cl", "h_minus_scha", "h_plus_scha"},
              "",
              "odd-N chain phase boundaries",
              "mu",
              "h"};
    case Command::ClassicalNc:
      return {"h", {"N_c"}, "mu", "critical chain size", "h", "N_c"};
    default:
      return {"mode", {"omega"}, "", "mode frequencies", "mode", "omega"};
  }
}

/// Execute a parsed config: run, persist, return the process exit code
/// (0: at least one row ok, 1: all rows failed, 2: config error upstream).
inline int run(const RunConfig& cfg, std::ostream& log) {
  if (cfg.command == Command::WeylDemo) {
    int failures = 0;
    const std::string rep = weyl_demo_report(&failures);
    log << rep;
    if (cfg.output_explicit) report::write_file(cfg.output_path, rep);
    return failures == 0 ? 0 : 1;
  }

  SweepOutput out;
  try {
    switch (cfg.command) {
      case Command::NormalForm: out = run_normal_form(cfg); break;
      case Command::BulkSf: out = run_bulk_sf(cfg); break;
      case Command::ChainPhase: out = run_chain_phase(cfg); break;
      case Command::ClassicalNc: out = run_classical_nc(cfg); break;
      default: break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    log << command_name(cfg.command) << ": " << e.what() << "\n";
    return 1;
  }

  const std::filesystem::path path(cfg.output_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  report::write_file(cfg.output_path,
                     cfg.format == "json" ? report::to_json(out.table)
                                          : report::to_csv(out.table));
  log << command_name(cfg.command) << ": " << out.ok_count << "/" << out.records.size()
      << " rows ok -> " << cfg.output_path << "\n";
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    if (out.records[i].status != RowStatus::Ok) {
      log << "  row " << i << " " << status_name(out.records[i].status) << ": "
          << out.records[i].message << "\n";
    }
  }
  if (!cfg.svg_path.empty()) {
    report::write_file(cfg.svg_path, report::emit_svg(out.table, plot_spec_for(cfg)));
    log << "plot -> " << cfg.svg_path << "\n";
  }
  return out.ok_count > 0 ? 0 : 1;
}

}  // namespace weylscha::cli

#endif
