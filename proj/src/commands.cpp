#include "thermo/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "thermo/errors.hpp"
#include "thermo/numerics.hpp"

namespace thermo {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunContext {
  const ExperimentConfig& cfg;
  const CommandOptions& opts;
  std::ostream& out;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  template <class Fn>
  auto timed(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    timings.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return result;
  }
};

class CsvWriter {
public:
  CsvWriter(const RunContext& ctx, const std::string& command) : hash_(ctx.cfg.hash_hex) {
    body_ << "# tool: thermo-lab " << kToolkitVersion << "\n";
    body_ << "# command: " << command << "\n";
    body_ << "# config_hash: " << hash_ << "\n";
  }
  void comment(const std::string& line) { body_ << "# " << line << "\n"; }
  void header(const std::vector<std::string>& cols) {
    body_ << "config_hash";
    for (const auto& c : cols) body_ << "," << c;
    body_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    body_ << hash_;
    for (const auto& c : cells) body_ << "," << c;
    body_ << "\n";
  }
  std::string str() const { return body_.str(); }

private:
  std::string hash_;
  std::ostringstream body_;
};

void write_outputs(RunContext& ctx, const std::string& command, CsvWriter& csv) {
  std::filesystem::create_directories(ctx.opts.out_dir);
  const auto csv_path = ctx.opts.out_dir / (command + ".csv");
  std::ofstream(csv_path, std::ios::binary) << csv.str();

  nlohmann::ordered_json m;
  m["command"] = command;
  m["config"] = ctx.cfg.source_path;
  m["config_hash"] = ctx.cfg.hash_hex;
  m["toolkit_version"] = kToolkitVersion;
  m["threads"] = ctx.opts.threads;
  auto& t = m["stage_seconds"] = nlohmann::ordered_json::object();
  for (const auto& [stage, secs] : ctx.timings) t[stage] = secs;
  m["warnings"] = ctx.warnings;
  m["details"] = ctx.extra;
  std::ofstream(ctx.opts.out_dir / (command + "_manifest.json"), std::ios::binary) << m.dump(2) << "\n";
  ctx.out << "wrote " << csv_path.string() << "\n";
}

void add_warnings(RunContext& ctx, CsvWriter& csv) {
  for (const auto& w : ctx.warnings) csv.comment("warning: " + w);
}

PressureCurve make_curve(const ExperimentConfig& cfg) { return PressureCurve(*cfg.f, *cfg.tau, *cfg.g, cfg.pressure); }

int cmd_pressure(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& eig = cfg.pressure.eigen;
  const SpectralData sd = ctx.timed("eigen", [&] { return leading_eigendata(TransferOperator(*cfg.f), eig); });
  const Potential f0 = normalize_potential(*cfg.f, sd, eig.tol);
  const double p_norm = pressure_sigma(f0, eig);
  const PressureCurve curve = ctx.timed("flow", [&] { return make_curve(cfg); });
  const double a_star = curve.a_star();
  const auto [lo, hi] = ctx.timed("range", [&] { return curve.achievable_range(); });

  CsvWriter csv(ctx, "pressure");
  add_warnings(ctx, csv);
  csv.header({"P_sigma", "P_flow", "a_star", "a_min", "a_max", "P_normalized"});
  csv.row({num(sd.pressure), num(curve.centering_shift()), num(a_star), num(lo), num(hi), num(p_norm)});
  ctx.out << "P = " << num(sd.pressure) << "\nflow pressure = " << num(curve.centering_shift())
          << "\na_star = " << num(a_star) << "\nachievable a-range = (" << num(lo) << ", " << num(hi) << ")\n"
          << "normalized P = " << num(p_norm) << "\n";
  write_outputs(ctx, "pressure", csv);
  return exit_ok;
}

int cmd_rates(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.rates) throw ValidationError("config has no [rates] section");
  const PressureCurve curve = make_curve(cfg);
  std::vector<double> grid = cfg.rates->a_grid;
  if (grid.empty())
    for (double off : cfg.rates->a_star_offsets) grid.push_back(curve.a_star() + off);

  CsvWriter csv(ctx, "rates");
  std::vector<std::vector<std::string>> rows;
  ctx.timed("rates", [&] {
    for (double a : grid) {
      try {
        const RateReport r = rate_J(curve, a);
        std::string status = "ok";
        double gp = kNaN;
        try {
          gp = gamma_prime(curve, a);
        } catch (const OutOfRange&) {
          status = "stencil_out_of_range";
        }
        rows.push_back({num(a), num(r.xi), num(r.J), num(r.gamma), num(r.omega), num(r.mean_tau),
                        num(r.J_identity_defect), num(gp + r.xi), num(r.eta), num(r.J_inf), num(r.beta_second),
                        status});
      } catch (const OutOfRange& e) {
        ctx.warnings.push_back("OutOfRange at a = " + num(a) + ": achievable interval (" + num(e.lo()) + ", " +
                               num(e.hi()) + ")");
        std::vector<std::string> row{num(a)};
        for (int i = 0; i < 10; ++i) row.push_back(num(kNaN));
        row.push_back("OutOfRange");
        rows.push_back(row);
      }
    }
    return 0;
  });
  add_warnings(ctx, csv);
  csv.comment("a_star: " + num(curve.a_star()));
  csv.header({"a", "xi", "J", "gamma", "omega", "mean_tau", "J_minus_gamma_meantau", "gamma_prime_plus_xi", "eta",
              "J_inf", "beta_second", "status"});
  for (const auto& r : rows) csv.row(r);
  ctx.out << rows.size() << " rate rows\n";
  write_outputs(ctx, "rates", csv);
  return exit_ok;
}

int cmd_ldp(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.ldp) throw ValidationError("config has no [ldp] section");
  const PressureCurve curve = make_curve(cfg);
  const double a = ctx.timed("resolve_a", [&] { return resolve_ldp_a(curve, *cfg.ldp); });
  LdpRunConfig run = cfg.ldp->run;
  run.a = a;
  run.enumeration.threads = ctx.opts.threads;
  run.quad.threads = ctx.opts.threads;

  const LdpSystem sys = prepare_ldp(curve, a);
  const auto u_grid = cfg.lattice.u_grid.empty() ? default_lattice_grid() : cfg.lattice.u_grid;
  const LatticeReport lat = ctx.timed("lattice", [&] {
    return lattice_check(sys.f0, sys.g_a, u_grid, cfg.lattice.iterations, cfg.lattice.tol);
  });
  if (lat.lattice)
    ctx.warnings.push_back("Lattice: r(u) = " + num(lat.max_radius) + " >= 1 - " + num(lat.tol) + " at u = " +
                           num(lat.u_at_max) + " for g - a tau");

  const LdpTable table = ctx.timed("ldp", [&] { return build_ldp_table(curve, run); });
  if (table.guard_tripped)
    ctx.warnings.push_back("guard tripped: some rows carry the spectral path only (guard = " +
                           std::to_string(run.enumeration.guard) + " cylinders)");

  auto& delta_info = ctx.extra["delta_constraint"];
  delta_info["rho_hat"] = lat.max_radius;
  if (lat.max_radius > 0.0 && lat.max_radius < 1.0 && run.n_max >= run.n_min) {
    const auto dc = delta_constraint_check(run.delta, lat.max_radius, run.n_min, run.n_max);
    delta_info["ceiling"] = dc.ceiling;
    delta_info["delta_ok"] = dc.delta_ok;
    delta_info["sequence_ok"] = dc.sequence_ok;
    delta_info["worst_n"] = dc.worst_n;
    delta_info["worst_value"] = dc.worst_value;
    if (!dc.delta_ok || !dc.sequence_ok)
      ctx.warnings.push_back("advisory: delta constraint not met (delta = " + num(run.delta) + ", ceiling " +
                             num(dc.ceiling) + ", worst n rho^n e^{2 delta n} = " + num(dc.worst_value) + ")");
  } else {
    delta_info["note"] = "rho_hat outside (0,1); delta constraint not evaluated";
  }
  const auto& rr = table.rates;
  ctx.extra["rates"] = {{"a", rr.a}, {"xi", rr.xi}, {"J", rr.J}, {"omega", rr.omega}, {"mean_tau", rr.mean_tau}};

  CsvWriter csv(ctx, "ldp");
  add_warnings(ctx, csv);
  csv.comment("a: " + num(rr.a) + " xi: " + num(rr.xi) + " J: " + num(rr.J) + " omega: " + num(rr.omega) +
              " delta: " + num(run.delta));
  csv.header({"n", "delta_n", "rho_exact", "rho_smooth_direct", "rho_smooth_spectral", "asymptote_indicator",
              "asymptote_smooth", "ratio_exact", "ratio_smooth", "T_n", "C_a", "boundary_hits", "spectral_imag",
              "guard_tripped"});
  for (const auto& r : table.rows)
    csv.row({std::to_string(r.n), num(r.delta_n), num(r.rho_exact), num(r.rho_smooth_direct),
             num(r.rho_smooth_spectral), num(r.asymptote_indicator), num(r.asymptote_smooth), num(r.ratio_exact),
             num(r.ratio_smooth), num(r.T_n), num(r.C_a), std::to_string(r.boundary_hits), num(r.spectral_imag),
             r.guard_tripped ? "1" : "0"});
  ctx.out << table.rows.size() << " ldp rows at a = " << num(a) << "\n";
  write_outputs(ctx, "ldp", csv);
  return table.guard_tripped ? exit_guard : exit_ok;
}

int cmd_scan(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.scan) throw ValidationError("config has no [scan] section");
  ScanConfig sc = *cfg.scan;
  sc.threads = ctx.opts.threads;
  const auto& eig = cfg.pressure.eigen;
  const SpectralData sd = leading_eigendata(TransferOperator(*cfg.f), eig);
  const Potential f0 = normalize_potential(*cfg.f, sd, eig.tol);
  const ScanSystem sys(f0, *cfg.tau, *cfg.g, sc.a, sc.c, eig);
  const ScanMatrix mat = ctx.timed("sweep", [&] { return two_parameter_sweep(sys, sc); });

  auto& env_json = ctx.extra["envelope"] = nlohmann::ordered_json::array();
  std::vector<std::string> env_lines;
  for (std::size_t ik = 0; ik < mat.kappa_values.size(); ++ik) {
    std::vector<DecayFit> column;
    for (std::size_t ib = 0; ib < mat.b_values.size(); ++ib) column.push_back(mat.at(ib, ik));
    const auto rep = envelope_report(column, sc.epsilon);
    const double kappa = mat.kappa_values[ik];
    nlohmann::ordered_json j{{"kappa", kappa},
                             {"rho_global", rep.rho_global},
                             {"e_fit", rep.e_fit ? nlohmann::ordered_json(*rep.e_fit) : nlohmann::ordered_json()},
                             {"C", rep.C},
                             {"notes", rep.notes}};
    env_json.push_back(j);
    env_lines.push_back("envelope kappa " + num(kappa) + ": rho_global " + num(rep.rho_global) + " e_fit " +
                        (rep.e_fit ? num(*rep.e_fit) : std::string("undefined")) + " C " + num(rep.C));
    if (rep.exponent_flag || rep.no_decay_flag)
      for (const auto& n : rep.notes) ctx.warnings.push_back("advisory: kappa " + num(kappa) + ": " + n);
  }

  CsvWriter csv(ctx, "scan");
  add_warnings(ctx, csv);
  csv.comment("P: " + num(sys.pressure()) + " a: " + num(sc.a) + " c: " + num(sc.c) + " m_max: " +
              std::to_string(sc.m_max));
  for (const auto& l : env_lines) csv.comment(l);
  csv.header({"b", "kappa", "w", "rho_hat", "fit_residual", "max_step_growth", "y_m_max"});
  for (std::size_t ib = 0; ib < mat.b_values.size(); ++ib)
    for (std::size_t ik = 0; ik < mat.kappa_values.size(); ++ik) {
      const auto& c = mat.at(ib, ik);
      csv.row({num(mat.b_values[ib]), num(mat.kappa_values[ik]), num(c.w), num(c.rho_hat), num(c.fit_residual),
               num(c.max_step_growth), num(c.y(sc.m_max))});
    }
  ctx.out << mat.cells.size() << " scan cells\n";
  write_outputs(ctx, "scan", csv);
  return exit_ok;
}

}  // namespace

std::vector<double> default_lattice_grid() {
  std::vector<double> u;
  for (int j = 1; j <= 200; ++j) u.push_back(0.25 * j);
  return u;
}

double gamma_of(const PressureCurve& curve, double a) {
  const double xi = solve_xi(curve, a);
  return curve.beta(xi) - xi * a;
}

double gamma_prime(const PressureCurve& curve, double a, double step) {
  return numerics::first_derivative([&](double x) { return gamma_of(curve, x); }, a, step);
}

double a_for_rate_level(const PressureCurve& curve, double level) {
  if (!(level < 0.0)) throw ValidationError("rate level must be negative");
  const double a_star = curve.a_star();
  const double hi = curve.achievable_range().second;
  auto J = [&](double a) { return rate_J(curve, a).J - level; };
  const double top = a_star + 0.999 * (hi - a_star);
  return numerics::find_root(J, a_star, top, -level, J(top));
}

double resolve_ldp_a(const PressureCurve& curve, const LdpBlock& blk) {
  if (blk.a) return *blk.a;
  if (blk.a_offset) return curve.a_star() + *blk.a_offset;
  if (blk.target_J) return a_for_rate_level(curve, *blk.target_J);
  throw ValidationError("[ldp] needs a, a_offset or target_J");
}

int run_command(const std::string& command, const std::filesystem::path& config, const CommandOptions& opts,
                std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = parse_config(config);
    RunContext ctx{cfg, opts, out, {}, {}};
    if (command == "pressure") return cmd_pressure(ctx);
    if (command == "rates") return cmd_rates(ctx);
    if (command == "ldp") return cmd_ldp(ctx);
    if (command == "scan") return cmd_scan(ctx);
    err << "unknown command '" << command << "'\n";
    return exit_validation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return exit_validation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const TooLarge& e) {
    err << "guard: " << e.what() << "\n";
    return exit_guard;
  }
}

}  // namespace thermo
