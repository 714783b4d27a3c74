#include "qread/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qread/bell.hpp"
#include "qread/bounds.hpp"
#include "qread/fock.hpp"
#include "qread/gaussian.hpp"
#include "qread/parallel.hpp"

namespace qread::cli {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json optional_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

struct MemoryArgs {
  double r0 = 0.0;
  double r1 = 1.0;
  double nbar = 0.0;
  double eps = 0.0;
  std::int64_t m_star = 0;  // 0 = unbounded

  MemorySpec spec() const {
    MemorySpec m{r0, r1, nbar, eps, std::nullopt};
    if (m_star > 0) m.m_star = m_star;
    return m;
  }
};

void add_memory_options(CLI::App* app, MemoryArgs& m, bool required) {
  auto* r0 = app->add_option("--r0", m.r0, "reflectivity encoding bit 0")->check(CLI::Range(0.0, 1.0));
  auto* r1 = app->add_option("--r1", m.r1, "reflectivity encoding bit 1")->check(CLI::Range(0.0, 1.0));
  if (required) {
    r0->required();
    r1->required();
  }
  app->add_option("--nbar", m.nbar, "thermal background photons per mode")->check(CLI::NonNegativeNumber);
  app->add_option("--eps", m.eps, "internal added noise (vacuum units)")->check(CLI::NonNegativeNumber);
  app->add_option("--mstar", m.m_star, "classical bandwidth cap M* (0 = unbounded)")
      ->check(CLI::NonNegativeNumber);
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write to " + path);
  return file;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  MemoryArgs memory;
  double N = 1.0;
  std::int64_t M = 1;
  bool minf = false;
  bool mbar = false;
  bool json = false;
};

struct PointResult {
  double C = 0.5;
  double Q = 0.5;
  double G = 0.0;
  double t_star = 0.5;
  bool conclusive = false;
};

PointResult evaluate_point(const MemorySpec& memory, double N, std::int64_t M, bool minf) {
  if (!minf) {
    const BoundReport rep = bound_report({M, N}, memory);
    return {rep.C, rep.Q, rep.G, rep.t_star, rep.conclusive};
  }
  PointResult p;
  p.C = classical_bound_for(N, memory);
  p.Q = qcb_infinite_bandwidth(N, memory);
  p.G = binary_entropy(p.C) - binary_entropy(p.Q);
  p.t_star = std::nan("");
  p.conclusive = p.Q < p.C;
  return p;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const MemorySpec memory = a.memory.spec();
  const PointResult p = evaluate_point(memory, a.N, a.M, a.minf);
  std::optional<std::int64_t> m_bar;
  if (a.mbar) m_bar = find_min_bandwidth(a.N, memory).m_bar;

  if (a.json) {
    json j;
    j["r0"] = a.memory.r0;
    j["r1"] = a.memory.r1;
    j["nbar"] = a.memory.nbar;
    j["eps"] = a.memory.eps;
    j["m_star"] = optional_int(memory.m_star);
    j["N"] = a.N;
    j["M"] = a.minf ? json("inf") : json(a.M);
    j["C"] = p.C;
    j["Q"] = p.Q;
    j["G"] = p.G;
    j["t_star"] = a.minf ? json(nullptr) : json(p.t_star);
    j["m_bar"] = optional_int(m_bar);
    j["conclusive"] = p.conclusive;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "C = " << fmt12(p.C) << "\n"
      << "Q = " << fmt12(p.Q) << "\n"
      << "G = " << fmt12(p.G) << "\n";
  if (!a.minf) out << "t_star = " << fmt12(p.t_star) << "\n";
  if (a.mbar) out << "M_bar = " << (m_bar ? std::to_string(*m_bar) : "not-found") << "\n";
  out << "conclusive = " << (p.conclusive ? "true" : "false") << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ scan

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  double value(int i) const { return min + (max - min) * i / (steps - 1); }
};

struct ScanArgs {
  BoundsArgs fixed;
  Axis x{"r0", 0.0, 1.0, 101};
  Axis y{"r1", 0.0, 1.0, 101};
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;
};

const std::vector<std::string> kAxisNames = {"r0", "r1", "N", "M", "nbar", "eps"};

void set_param(BoundsArgs& p, const std::string& name, double v) {
  if (name == "r0") p.memory.r0 = v;
  else if (name == "r1") p.memory.r1 = v;
  else if (name == "N") p.N = v;
  else if (name == "M") p.M = std::max<std::int64_t>(1, std::llround(v));
  else if (name == "nbar") p.memory.nbar = v;
  else if (name == "eps") p.memory.eps = v;
  else throw UsageError("unknown axis " + name);
}

double get_param(const BoundsArgs& p, const std::string& name) {
  if (name == "r0") return p.memory.r0;
  if (name == "r1") return p.memory.r1;
  if (name == "N") return p.N;
  if (name == "M") return static_cast<double>(p.M);
  if (name == "nbar") return p.memory.nbar;
  return p.memory.eps;
}

int cmd_scan(const ScanArgs& a, std::ostream& stdout_stream) {
  if (a.x.name == a.y.name) throw UsageError("scan axes must name distinct parameters");
  if (a.x.steps < 2 || a.y.steps < 2) throw UsageError("axes need at least 2 steps");
  if (a.fixed.minf && (a.x.name == "M" || a.y.name == "M")) {
    throw UsageError("--minf cannot be combined with an M axis");
  }
  const std::size_t n = static_cast<std::size_t>(a.x.steps) * a.y.steps;

  std::vector<BoundsArgs> points(n, a.fixed);
  for (int i = 0; i < a.x.steps; ++i) {
    for (int j = 0; j < a.y.steps; ++j) {
      auto& p = points[static_cast<std::size_t>(i) * a.y.steps + j];
      set_param(p, a.x.name, a.x.value(i));
      set_param(p, a.y.name, a.y.value(j));
    }
  }
  const auto results = parallel_map(n, resolve_threads(a.threads), [&](std::size_t k) {
    return evaluate_point(points[k].memory.spec(), points[k].N, points[k].M, a.fixed.minf);
  });

  std::ofstream file;
  std::ostream& out = open_output(a.out_path, file, stdout_stream);
  if (a.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto& r = results[k];
      rows.push_back({{a.x.name, get_param(points[k], a.x.name)},
                      {a.y.name, get_param(points[k], a.y.name)},
                      {"C", r.C},
                      {"Q", r.Q},
                      {"G", r.G},
                      {"conclusive", r.conclusive}});
    }
    out << rows.dump(2) << "\n";
  } else {
    out << a.x.name << "," << a.y.name << ",C,Q,G,conclusive\n";
    for (std::size_t k = 0; k < n; ++k) {
      const auto& r = results[k];
      out << fmt12(get_param(points[k], a.x.name)) << "," << fmt12(get_param(points[k], a.y.name))
          << "," << fmt12(r.C) << "," << fmt12(r.Q) << "," << fmt12(r.G) << ","
          << (r.conclusive ? "true" : "false") << "\n";
    }
  }
  if (!out) throw UsageError("write failed");
  return kExitOk;
}

// ------------------------------------------------------------------ bell

struct BellArgs {
  MemoryArgs memory;
  double N = 35.0;
  std::int64_t m_min = 1;
  std::int64_t m_max = 60;
  double phi_min = 1e-4;
  double phi_max = 0.5;
  int phi_steps = 100;
  std::uint64_t seed = 1;
  std::int64_t trials = 100'000;
  bool mc_check = false;
  std::string out_path;
  unsigned threads = 0;
};

int cmd_bell(const BellArgs& a, std::ostream& stdout_stream, std::ostream& err) {
  if (a.m_min < 1 || a.m_max < a.m_min) throw UsageError("need 1 <= --m-min <= --m-max");
  if (!(a.phi_min > 0.0 && a.phi_max < 1.0 && a.phi_min <= a.phi_max) || a.phi_steps < 1) {
    throw UsageError("need 0 < --phi-min <= --phi-max < 1 and --phi-steps >= 1");
  }
  std::vector<std::int64_t> m_grid;
  for (std::int64_t m = a.m_min; m <= a.m_max; ++m) m_grid.push_back(m);
  std::vector<double> phi_grid;
  for (int i = 0; i < a.phi_steps; ++i) {
    const double f = a.phi_steps == 1 ? 0.0 : static_cast<double>(i) / (a.phi_steps - 1);
    phi_grid.push_back(a.phi_min * std::pow(a.phi_max / a.phi_min, f));
  }

  const MemorySpec memory = a.memory.spec().normalized();
  const bell::BellOptimum opt = bell::optimize_bell_gain(memory, a.N, m_grid, phi_grid);

  std::vector<bell::MonteCarloEstimate> mc;
  if (a.mc_check && !memory.degenerate()) {
    mc = parallel_map(opt.surface.size(), resolve_threads(a.threads), [&](std::size_t k) {
      const auto& pt = opt.surface[k];
      const auto v = bell::epr_variances(a.N / static_cast<double>(pt.M), memory);
      return bell::mc_error_prob(pt.M, pt.phi, v.v0, v.v1, a.trials, bell::derive_seed(a.seed, k));
    });
  }

  std::ofstream file;
  std::ostream& out = open_output(a.out_path, file, stdout_stream);
  int disagreements = 0;
  out << "M,phi,P_err,G" << (mc.empty() ? "" : ",P_mc,std_err,mc_agree") << "\n";
  for (std::size_t k = 0; k < opt.surface.size(); ++k) {
    const auto& pt = opt.surface[k];
    out << pt.M << "," << fmt12(pt.phi) << "," << fmt12(pt.p_err) << "," << fmt12(pt.G);
    if (!mc.empty()) {
      const bool agree = std::abs(mc[k].p_err - pt.p_err) <= 3.0 * mc[k].std_err;
      if (!agree) ++disagreements;
      out << "," << fmt12(mc[k].p_err) << "," << fmt12(mc[k].std_err) << ","
          << (agree ? "true" : "false");
    }
    out << "\n";
  }
  if (!out) throw UsageError("write failed");

  std::ostream& summary = a.out_path.empty() ? err : stdout_stream;
  summary << "C = " << fmt12(opt.C) << "\n"
          << "G_best = " << fmt12(opt.G_best) << "\n"
          << "M_best = " << opt.M_best << "\n"
          << "phi_best = " << fmt12(opt.phi_best) << "\n"
          << "P_err_best = " << fmt12(opt.p_err_best) << "\n";
  if (a.mc_check) summary << "mc_disagreements = " << disagreements << "\n";
  if (a.mc_check && a.trials < bell::kMinTrials) {
    summary << "warning: fewer than " << bell::kMinTrials << " Monte Carlo trials\n";
  }
  return kExitOk;
}

// ---------------------------------------------------- threshold / overhead

int cmd_threshold(double r0, double r1, std::ostream& out) {
  out << fmt12(threshold_energy(r0, r1)) << "\n";
  return kExitOk;
}

struct OverheadArgs {
  std::optional<double> perr;
  MemoryArgs memory;
  std::optional<double> N;
  std::int64_t M = 1;
  bool minf = false;
};

int cmd_overhead(const OverheadArgs& a, std::ostream& out) {
  if (a.perr) {
    out << fmt12(ecc_overhead(*a.perr)) << "\n";
    return kExitOk;
  }
  if (!a.N) throw UsageError("overhead needs --perr or --N");
  const PointResult p = evaluate_point(a.memory.spec(), *a.N, a.M, a.minf);
  out << "C = " << fmt12(p.C) << "\n"
      << "Q = " << fmt12(p.Q) << "\n"
      << "classical_overhead = " << fmt12(ecc_overhead(p.C)) << "\n"
      << "epr_overhead = " << fmt12(ecc_overhead(p.Q)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  double ns = 0.5;
  double r0 = 0.4;
  double r1 = 1.0;
  int nmax = fock::kDefaultNMax;
  double tolerance = 1e-6;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const auto g0 = apply_channel(tmsv_state(a.ns), 0, pure_loss(a.r0));
  const auto g1 = apply_channel(tmsv_state(a.ns), 0, pure_loss(a.r1));
  const auto pure = fock::tmsv_fock(a.ns, a.nmax);
  const auto f0 = fock::apply_pure_loss_fock(pure, 0, a.r0);
  const auto f1 = fock::apply_pure_loss_fock(pure, 0, a.r1);

  double worst = 0.0;
  out << "quantity,gaussian,fock,abs_dev\n";
  auto row = [&](const std::string& name, double g, double f) {
    const double dev = std::abs(g - f);
    worst = std::max(worst, dev);
    out << name << "," << fmt12(g) << "," << fmt12(f) << "," << fmt12(dev) << "\n";
  };
  row("overlap", gaussian_overlap(g0, g1), fock::overlap_fock(f0, f1));
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    row("Q_t(" + fmt12(t) + ")", qcb_overlap_t(g0, g1, t), fock::overlap_t_fock(f0, f1, t));
  }
  row("Q_min", qcb(g0, g1).q_min, fock::qcb_fock(f0, f1).q_min);

  // Fock fidelities need both states on the same truncation.
  auto matched = [](const std::function<fock::FockDensity(int)>& make0,
                    const std::function<fock::FockDensity(int)>& make1, int n_max) {
    auto a = make0(n_max);
    auto b = make1(a.n_max);
    if (b.n_max != a.n_max) a = make0(b.n_max);
    return fock::fidelity_fock(a, b);
  };
  const double th0 = a.r0 * a.ns;
  const double th1 = a.r1 * a.ns;
  row("fidelity_thermal", gaussian_fidelity_1mode(GaussianState::thermal(th0), GaussianState::thermal(th1)),
      matched([&](int n) { return fock::thermal_fock(th0, n); },
              [&](int n) { return fock::thermal_fock(th1, n); }, a.nmax));

  const double amp0 = std::sqrt(th0);
  const double amp1 = std::sqrt(th1);
  row("fidelity_coherent",
      gaussian_fidelity_1mode(GaussianState::coherent(amp0), GaussianState::coherent(amp1)),
      matched([&](int n) { return fock::coherent_fock(amp0, n); },
              [&](int n) { return fock::coherent_fock(amp1, n); }, a.nmax));

  out << "max_abs_deviation = " << fmt12(worst) << "\n";
  return worst < a.tolerance ? kExitOk : kExitNumeric;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical and quantum bounds for reading a binary-reflectivity optical memory"};
  app.name("qread");
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);

  unsigned threads = 0;
  auto add_threads = [&threads](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads (0 = all cores)")->envname(kThreadsEnv);
  };

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "C, Q, G and t* at one parameter point");
  add_memory_options(bounds_cmd, bounds.memory, true);
  bounds_cmd->add_option("--N", bounds.N, "signal energy (mean photons)")->required()->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--M", bounds.M, "EPR bandwidth")->check(CLI::PositiveNumber);
  bounds_cmd->add_flag("--minf", bounds.minf, "use the M -> infinity limit");
  bounds_cmd->add_flag("--mbar", bounds.mbar, "also search the minimal violating bandwidth");
  bounds_cmd->add_flag("--json", bounds.json, "machine-readable output");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "tabulate C, Q, G over a 2-D parameter grid");
  add_memory_options(scan_cmd, scan.fixed.memory, false);
  scan_cmd->add_option("--N", scan.fixed.N, "signal energy")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--M", scan.fixed.M, "EPR bandwidth")->check(CLI::PositiveNumber);
  scan_cmd->add_flag("--minf", scan.fixed.minf, "use the M -> infinity limit");
  for (auto* axis : {&scan.x, &scan.y}) {
    const std::string p = axis == &scan.x ? "--x" : "--y";
    scan_cmd->add_option(p, axis->name, "axis parameter")->check(CLI::IsMember(kAxisNames));
    scan_cmd->add_option(p + "-min", axis->min, "axis start");
    scan_cmd->add_option(p + "-max", axis->max, "axis end");
    scan_cmd->add_option(p + "-steps", axis->steps, "axis points (>= 2)");
  }
  scan_cmd->add_option("--out", scan.out_path, "output file (default stdout)");
  scan_cmd->add_option("--format", scan.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  add_threads(scan_cmd);

  BellArgs bell_args;
  auto* bell_cmd = app.add_subcommand("bell", "optimize the Bell-measurement receiver over (M, phi)");
  add_memory_options(bell_cmd, bell_args.memory, true);
  bell_cmd->add_option("--N", bell_args.N, "signal energy")->required()->check(CLI::PositiveNumber);
  bell_cmd->add_option("--m-min", bell_args.m_min, "smallest number of TMSV copies");
  bell_cmd->add_option("--m-max", bell_args.m_max, "largest number of TMSV copies");
  bell_cmd->add_option("--phi-min", bell_args.phi_min, "smallest significance level");
  bell_cmd->add_option("--phi-max", bell_args.phi_max, "largest significance level");
  bell_cmd->add_option("--phi-steps", bell_args.phi_steps, "log-spaced significance levels");
  bell_cmd->add_option("--seed", bell_args.seed, "Monte Carlo seed");
  bell_cmd->add_option("--trials", bell_args.trials, "Monte Carlo trials per hypothesis")
      ->check(CLI::PositiveNumber);
  bell_cmd->add_flag("--mc-check", bell_args.mc_check, "add Monte Carlo columns and a 3-sigma check");
  bell_cmd->add_option("--out", bell_args.out_path, "output file (default stdout)");
  add_threads(bell_cmd);

  double th_r0 = 0.0;
  double th_r1 = 1.0;
  auto* threshold_cmd = app.add_subcommand("threshold", "threshold energy N_th(r0, r1)");
  threshold_cmd->add_option("--r0", th_r0)->required()->check(CLI::Range(0.0, 1.0));
  threshold_cmd->add_option("--r1", th_r1)->required()->check(CLI::Range(0.0, 1.0));

  OverheadArgs overhead;
  auto* overhead_cmd = app.add_subcommand("overhead", "error-correction overhead in cells per bit");
  overhead_cmd->add_option("--perr", overhead.perr, "error probability")->check(CLI::Range(0.0, 1.0));
  add_memory_options(overhead_cmd, overhead.memory, false);
  overhead_cmd->add_option("--N", overhead.N, "signal energy")->check(CLI::PositiveNumber);
  overhead_cmd->add_option("--M", overhead.M, "EPR bandwidth")->check(CLI::PositiveNumber);
  overhead_cmd->add_flag("--minf", overhead.minf, "use the M -> infinity limit");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "compare Gaussian formulas with the Fock brute force");
  oracle_cmd->add_option("--ns", oracle.ns, "photons per signal mode")->check(CLI::NonNegativeNumber);
  oracle_cmd->add_option("--r0", oracle.r0)->check(CLI::Range(0.0, 1.0));
  oracle_cmd->add_option("--r1", oracle.r1)->check(CLI::Range(0.0, 1.0));
  oracle_cmd->add_option("--nmax", oracle.nmax, "initial Fock truncation")->check(CLI::Range(1, fock::kMaxNMax));
  oracle_cmd->add_option("--tol", oracle.tolerance, "maximum accepted deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bounds_cmd) return cmd_bounds(bounds, out);
    if (*scan_cmd) {
      scan.threads = threads;
      return cmd_scan(scan, out);
    }
    if (*bell_cmd) {
      bell_args.threads = threads;
      return cmd_bell(bell_args, out, err);
    }
    if (*threshold_cmd) return cmd_threshold(th_r0, th_r1, out);
    if (*overhead_cmd) return cmd_overhead(overhead, out);
    if (*oracle_cmd) return cmd_oracle(oracle, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace qread::cli
