// mrock: experiment runner for the stabilized single-rate and multirate
// integrators. Every subcommand writes CSV to --out (stdout by default) and,
// when --out names a file, echoes its effective configuration to <out>.cfg.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mrock/analysis.hpp"
#include "mrock/driver.hpp"
#include "mrock/error.hpp"
#include "mrock/fem2d.hpp"
#include "mrock/problems.hpp"

using namespace mrock;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int thread_count() {
  if (const char* env = std::getenv("MROCK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Runs body(i) for i in [0, n) on MROCK_THREADS workers. Callers write into
// per-index slots, so output order does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body body) {
  const int workers = std::min<int>(thread_count(), int(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw UsageError("invalid " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

template <>
std::vector<std::string> parse_list<std::string>(const std::string& text, const std::string&) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  for (const auto& name : parse_list<std::string>(text, "method")) {
    try {
      out.push_back(parse_method(name));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

// Output stream plus the sidecar configuration echo.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_.open(path_);
      if (!file_) throw UsageError("cannot open output file '" + path_ + "'");
    }
    stream().precision(17);
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  void echo_config(const CLI::App& app) const {
    if (path_ == "-") return;
    std::ofstream side(path_ + ".cfg");
    side << app.config_to_str(true, false);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Shared options of the PDE-based problems.
struct HeatOptions {
  int levels = 2;
  std::string forcing = "manufactured";
};

struct LshapeOptions {
  double x0 = 0.5;
  double y0 = 0.5;
  double sigma = 0.1;
  double amplitude = 10.0;
};

Forcing gaussian_forcing(const LshapeOptions& o) {
  Forcing f;
  f.kind = ForcingKind::Gaussian;
  f.center = Point2(o.x0, o.y0);
  f.sigma = o.sigma;
  f.amplitude = o.amplitude;
  return f;
}

// ---------------------------------------------------------------- integrate

struct IntegrateArgs {
  std::string problem = "robertson";
  std::string method = "mrock2";
  std::string control = "fixed";
  double dt = 0.0;
  double rtol = 1e-4;
  double atol = 1e-4;
  double t0 = 0.0;
  double t1 = 0.0;
  double eps = 0.05;
  bool scale_sep = false;
  int stage_cap = kDefaultStageCap;
  int every = 1;
  int j = 3;
  double H = 0.1;
  double h = 0.01;
  double lambda = -100.0;
  double zeta = -1.0;
  HeatOptions heat;
  LshapeOptions lshape;
  std::string out = "-";
};

struct ProblemSetup {
  SplitSystem sys;
  double t1 = 1.0;
};

ProblemSetup make_problem(const IntegrateArgs& a) {
  ProblemSetup p;
  if (a.problem == "robertson") {
    p.sys = robertson();
    p.t1 = 100.0;
  } else if (a.problem == "scalar") {
    p.sys = multirate_test(a.lambda, a.zeta);
    p.t1 = 1.0;
  } else if (a.problem == "heat") {
    Forcing f;
    f.kind = a.heat.forcing == "zero" ? ForcingKind::Zero : ForcingKind::Manufactured;
    p.sys = heat_split_system(assemble_heat(unit_square_mesh(a.j, a.heat.levels), f));
    p.t1 = 0.5;
  } else {
    p.sys = heat_split_system(assemble_heat(lshape_mesh(a.H, a.h), gaussian_forcing(a.lshape)));
    p.t1 = 1.0;
  }
  return p;
}

int cmd_integrate(const IntegrateArgs& a, const CLI::App& app) {
  const ProblemSetup p = make_problem(a);
  const double t1 = a.t1 > a.t0 ? a.t1 : p.t1;
  IntegrateOptions opts;
  opts.method = parse_method(a.method);
  opts.eps = a.eps;
  opts.scale_sep = a.scale_sep;
  opts.stage_cap = a.stage_cap;
  opts.record_history = false;
  if (a.control == "fixed") {
    if (!(a.dt > 0.0)) throw UsageError("--dt > 0 is required with --control fixed");
    opts.control = FixedStep{a.dt};
  } else {
    AdaptiveStep ctl;
    ctl.rtol = a.rtol;
    ctl.atol = a.atol;
    ctl.tau0 = a.dt;
    opts.control = ctl;
    if (!has_error_estimate(opts.method)) {
      throw UsageError("adaptive control needs rock2 or mrock2");
    }
  }

  Output out(a.out);
  auto& os = out.stream();
  os << "t,err,s,m,eta,dt";
  for (Eigen::Index i = 0; i < p.sys.dim(); ++i) os << ",y" << i;
  os << '\n';
  auto row = [&](double t, double err, int s, int m, double eta, double dt, const Vector& y) {
    os << t << ',' << err << ',' << s << ',' << m << ',' << eta << ',' << dt;
    for (Eigen::Index i = 0; i < y.size(); ++i) os << ',' << y[i];
    os << '\n';
  };
  row(a.t0, 0.0, 0, 0, 0.0, 0.0, p.sys.y0);
  std::uint64_t k = 0;
  opts.observer = [&](const StepRecord& r, double t_new, const Vector& y) {
    ++k;
    if (k % std::uint64_t(a.every) == 0 || t_new >= t1) row(t_new, r.err.value_or(0.0), r.s, r.m, r.eta, r.tau, y);
  };
  const auto res = integrate(p.sys, a.t0, t1, opts);
  out.echo_config(app);
  std::cerr << "steps " << res.stats.steps_accepted << " accepted, " << res.stats.steps_rejected
            << " rejected; evals f_S " << res.stats.evals.slow << ", f_F " << res.stats.evals.fast << ", f "
            << res.stats.evals.full << '\n';
  return 0;
}

// -------------------------------------------------------------- convergence

struct ConvergenceArgs {
  std::string methods = "rkc,mrkc,rock2,mrock2";
  std::string dts = "1,0.5,0.25,0.125,0.0625,0.03125";
  double t1 = 100.0;
  double ref_dt = 1e-4;
  double eps = 0.05;
  std::string out = "-";
};

// Single-rate methods evaluate the unsplit f, which costs one f_S and one
// f_F each, so both columns carry the full count for them.
std::pair<std::uint64_t, std::uint64_t> split_counts(const EvalCounter& c) {
  return {c.slow + c.full, c.fast + c.full};
}

int cmd_convergence(const ConvergenceArgs& a, const CLI::App& app) {
  const auto methods = parse_methods(a.methods);
  const auto dts = parse_list<double>(a.dts, "dt");
  for (double dt : dts) {
    if (!(dt > 0.0)) throw UsageError("dt values must be > 0");
  }
  Output out(a.out);
  auto& os = out.stream();
  os << "method,dt,error,evals_fS,evals_fF\n";
  if (!dts.empty() && !methods.empty()) {
    const SplitSystem sys = robertson();
    const Vector ref = rk4_solve(robertson_rhs, 0.0, sys.y0, a.t1, a.ref_dt);
    std::vector<std::string> rows(methods.size() * dts.size());
    parallel_for(rows.size(), [&](std::size_t i) {
      const Method m = methods[i / dts.size()];
      const double dt = dts[i % dts.size()];
      IntegrateOptions opts;
      opts.method = m;
      opts.eps = a.eps;
      opts.control = FixedStep{dt};
      opts.record_history = false;
      const auto res = integrate(sys, 0.0, a.t1, opts);
      const auto [fs, ff] = split_counts(res.stats.evals);
      rows[i] = to_string(m) + ',' + fmt(dt) + ',' + fmt((res.y - ref).norm()) + ',' + std::to_string(fs) + ',' +
                std::to_string(ff) + '\n';
    });
    for (const auto& r : rows) os << r;
  }
  out.echo_config(app);
  return 0;
}

// ------------------------------------------------------------ stability-scan

struct ScanArgs {
  std::string kind = "mrock2_fig3";
  ScanParams params;
  std::string grid;
  std::string out = "-";
};

int cmd_scan(ScanArgs a, const CLI::App& app) {
  try {
    a.params.kind = parse_scan_kind(a.kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.grid == "log") a.params.grid = GridKind::Log;
  if (a.grid == "linear") a.params.grid = GridKind::Linear;
  const ScanResult res = scan(a.params);
  Output out(a.out);
  write_scan_csv(out.stream(), res);
  out.echo_config(app);
  std::cerr << to_string(res.params.kind) << ": eta " << fmt(res.params.eta) << ", zeta " << fmt(res.params.zeta)
            << ", violations " << res.violations << ", worst margin " << fmt(res.worst_margin) << '\n';
  return 0;
}

// ------------------------------------------------------------------ speedup

struct SpeedupArgs {
  std::string r = "1,10,100,1000";
  std::string cf = "0,0.05,0.1,0.2,0.3,0.4,0.5";
  std::string out = "-";
};

int cmd_speedup(const SpeedupArgs& a, const CLI::App& app) {
  const auto rs = parse_list<double>(a.r, "r_rho");
  const auto cfs = parse_list<double>(a.cf, "c_F");
  for (double r : rs) {
    if (!(r >= 0.0)) throw UsageError("r_rho values must be >= 0");
  }
  for (double c : cfs) {
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError("c_F values must lie in [0, 1]");
  }
  Output out(a.out);
  auto& os = out.stream();
  os << "c_F,r_rho,S,S_bar\n";
  for (double c : cfs) {
    for (double r : rs) {
      os << c << ',' << r << ',' << speedup(r, c) << ',' << speedup(r, c, SpeedupVariant::ScaleSep) << '\n';
    }
  }
  out.echo_config(app);
  return 0;
}

// --------------------------------------------------------------- heat/lshape

struct PdeRun {
  double err = 0.0;
  double rho_s = 0.0;
  double rho_f = 0.0;
  int s = 0;
  int m = 0;
  std::uint64_t fs = 0;
  std::uint64_t ff = 0;
  std::uint64_t steps = 0;
};

PdeRun run_pde(const SplitSystem& sys, Method method, double dt, double t1, double eps,
               const std::function<double(const Vector&)>& error) {
  IntegrateOptions opts;
  opts.method = method;
  opts.eps = eps;
  opts.control = FixedStep{dt};
  const auto res = integrate(sys, 0.0, t1, opts);
  PdeRun r;
  r.err = error(res.y);
  r.rho_s = sys.rho_slow(0.0, sys.y0);
  r.rho_f = sys.rho_fast(0.0, sys.y0);
  for (const auto& st : res.stats.stage_history) {
    r.s = std::max(r.s, st.s);
    r.m = std::max(r.m, st.m);
  }
  std::tie(r.fs, r.ff) = split_counts(res.stats.evals);
  r.steps = res.stats.steps_accepted;
  return r;
}

struct HeatArgs {
  std::string js = "2,3,4";
  std::string methods = "rock2,mrock2,mrkc";
  double dt_scale = 1.0;
  double t1 = 0.5;
  double eps = 0.05;
  HeatOptions heat;
  std::string out = "-";
};

int cmd_heat(const HeatArgs& a, const CLI::App& app) {
  const auto js = parse_list<int>(a.js, "j");
  const auto methods = parse_methods(a.methods);
  for (int j : js) {
    if (j < 1 || j > 8) throw UsageError("j must lie in [1, 8]");
  }
  Forcing f;
  f.kind = a.heat.forcing == "zero" ? ForcingKind::Zero : ForcingKind::Manufactured;
  std::vector<std::string> rows(js.size() * methods.size());
  parallel_for(js.size(), [&](std::size_t ij) {
    const int j = js[ij];
    const DiscreteHeatSystem heat = assemble_heat(unit_square_mesh(j, a.heat.levels), f);
    const SplitSystem sys = heat_split_system(heat);
    const double dt = a.dt_scale * std::pow(2.0, -0.5 * j);
    for (std::size_t im = 0; im < methods.size(); ++im) {
      const auto r = run_pde(sys, methods[im], dt, a.t1, a.eps,
                             [&](const Vector& y) { return heat.lumped_norm(y - heat.exact(a.t1)); });
      rows[ij * methods.size() + im] = to_string(methods[im]) + ',' + std::to_string(j) + ',' + fmt(dt) + ',' +
                                       fmt(r.err) + ',' + fmt(r.rho_s) + ',' + fmt(r.rho_f) + ',' +
                                       std::to_string(r.s) + ',' + std::to_string(r.m) + ',' + std::to_string(r.fs) +
                                       ',' + std::to_string(r.ff) + '\n';
    }
  });
  Output out(a.out);
  out.stream() << "method,j,dt,err_exact,rho_S,rho_F,s,m,evals_fS,evals_fF\n";
  for (const auto& r : rows) out.stream() << r;
  out.echo_config(app);
  return 0;
}

struct LshapeArgs {
  std::string Hs = "0.1";
  double ratio = 10.0;
  std::string methods = "rock2,mrock2";
  double dt = 0.01;
  double ref_refine = 16.0;
  double t1 = 1.0;
  double eps = 0.05;
  LshapeOptions lshape;
  std::string out = "-";
};

int cmd_lshape(const LshapeArgs& a, const CLI::App& app) {
  const auto Hs = parse_list<double>(a.Hs, "H");
  const auto methods = parse_methods(a.methods);
  for (double H : Hs) {
    if (!(H > 0.0 && H <= 0.5)) throw UsageError("H must lie in (0, 0.5]");
  }
  if (!(a.ratio >= 1.0)) throw UsageError("--ratio must be >= 1");
  if (!(a.dt > 0.0) || !(a.ref_refine >= 1.0)) throw UsageError("--dt must be > 0 and --ref-refine >= 1");
  std::vector<std::string> rows(Hs.size() * methods.size());
  parallel_for(Hs.size(), [&](std::size_t ih) {
    const double H = Hs[ih];
    const double h = H / a.ratio;
    const DiscreteHeatSystem heat = assemble_heat(lshape_mesh(H, h), gaussian_forcing(a.lshape));
    const SplitSystem sys = heat_split_system(heat);
    // Same-mesh reference with a refined ROCK2 step: the columns measure
    // time-integration error only.
    IntegrateOptions ref_opts;
    ref_opts.method = Method::Rock2;
    ref_opts.control = FixedStep{a.dt / a.ref_refine};
    ref_opts.record_history = false;
    const Vector ref = integrate(sys, 0.0, a.t1, ref_opts).y;
    for (std::size_t im = 0; im < methods.size(); ++im) {
      const auto r = run_pde(sys, methods[im], a.dt, a.t1, a.eps,
                             [&](const Vector& y) { return heat.lumped_norm(y - ref); });
      const double per_step = r.steps ? double(r.fs) / double(r.steps) : 0.0;
      rows[ih * methods.size() + im] = to_string(methods[im]) + ',' + fmt(H) + ',' + fmt(h) + ',' + fmt(a.dt) + ',' +
                                       fmt(r.err) + ',' + fmt(r.rho_s) + ',' + fmt(r.rho_f) + ',' +
                                       std::to_string(r.s) + ',' + std::to_string(r.m) + ',' + std::to_string(r.fs) +
                                       ',' + std::to_string(r.ff) + ',' + fmt(per_step) + '\n';
    }
  });
  Output out(a.out);
  out.stream() << "method,H,h,dt,err_ref,rho_S,rho_F,s,m,evals_fS,evals_fF,fS_per_step\n";
  for (const auto& r : rows) out.stream() << r;
  out.echo_config(app);
  return 0;
}

// -------------------------------------------------------------- mesh-export

struct MeshArgs {
  std::string domain = "square";
  int j = 3;
  int levels = 2;
  double H = 0.1;
  double h = 0.01;
  std::string out = "-";
};

int cmd_mesh_export(const MeshArgs& a, const CLI::App& app) {
  const Mesh mesh = a.domain == "square" ? unit_square_mesh(a.j, a.levels) : lshape_mesh(a.H, a.h);
  Output out(a.out);
  write_mesh(out.stream(), mesh);
  out.echo_config(app);
  return 0;
}

void add_common(CLI::App* sub, std::string& out) {
  sub->add_option("--config", "key=value configuration file (flags take precedence)")->check(CLI::ExistingFile);
  sub->add_option("-o,--out", out, "output file, '-' for stdout")->capture_default_str();
}

// Turns the entries of a configuration file into "--key=value" arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::vector<std::string> args;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "config" || item.name == "out" || item.name == "++" || item.name == "--") continue;
    std::string value;
    for (const auto& in : item.inputs) value += (value.empty() ? "" : ",") + in;
    args.push_back("--" + item.name + "=" + value);
  }
  return args;
}

const std::vector<std::string> kMethods{"rkc", "rock2", "mrkc", "mrock2"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit stabilized and multirate integrators: experiment runner"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "integrate one problem, trajectory CSV");
  add_common(integ, ia.out);
  integ->add_option("--problem", ia.problem)->check(CLI::IsMember({"robertson", "scalar", "heat", "lshape"}))->capture_default_str();
  integ->add_option("--method", ia.method)->check(CLI::IsMember(kMethods))->capture_default_str();
  integ->add_option("--control", ia.control)->check(CLI::IsMember({"fixed", "adaptive"}))->capture_default_str();
  integ->add_option("--dt", ia.dt, "fixed step, or the initial step when adaptive (0: default)")->capture_default_str();
  integ->add_option("--rtol", ia.rtol)->capture_default_str();
  integ->add_option("--atol", ia.atol)->capture_default_str();
  integ->add_option("--t0", ia.t0)->capture_default_str();
  integ->add_option("--t1", ia.t1, "final time (0: problem default)")->capture_default_str();
  integ->add_option("--eps", ia.eps, "damping")->capture_default_str();
  integ->add_flag("--scale-sep", ia.scale_sep, "relaxed micro step (mrock2)");
  integ->add_option("--stage-cap", ia.stage_cap)->capture_default_str();
  integ->add_option("--every", ia.every, "write every n-th step")->check(CLI::PositiveNumber)->capture_default_str();
  integ->add_option("--j", ia.j, "heat: refinement exponent")->capture_default_str();
  integ->add_option("--levels", ia.heat.levels, "heat: local refinement levels")->check(CLI::Range(0, 2))->capture_default_str();
  integ->add_option("--forcing", ia.heat.forcing)->check(CLI::IsMember({"manufactured", "zero"}))->capture_default_str();
  integ->add_option("--coarse", ia.H, "lshape: coarse diameter")->capture_default_str();
  integ->add_option("--fine", ia.h, "lshape: fine diameter")->capture_default_str();
  integ->add_option("--x0", ia.lshape.x0)->capture_default_str();
  integ->add_option("--y0", ia.lshape.y0)->capture_default_str();
  integ->add_option("--sigma", ia.lshape.sigma)->capture_default_str();
  integ->add_option("--amplitude", ia.lshape.amplitude)->capture_default_str();
  integ->add_option("--lambda", ia.lambda, "scalar: fast rate")->capture_default_str();
  integ->add_option("--zeta", ia.zeta, "scalar: slow rate")->capture_default_str();

  ConvergenceArgs ca;
  auto* conv = app.add_subcommand("convergence", "Robertson fixed-step errors against an RK4 reference");
  add_common(conv, ca.out);
  conv->add_option("--methods", ca.methods, "comma-separated methods")->capture_default_str();
  conv->add_option("--dts", ca.dts, "comma-separated step sizes")->capture_default_str();
  conv->add_option("--t1", ca.t1)->capture_default_str();
  conv->add_option("--ref-dt", ca.ref_dt, "RK4 reference step")->capture_default_str();
  conv->add_option("--eps", ca.eps)->capture_default_str();

  ScanArgs sa;
  auto* sc = app.add_subcommand("stability-scan", "stability scans on the multirate test equation");
  add_common(sc, sa.out);
  sc->add_option("--kind", sa.kind)
      ->check(CLI::IsMember({"theorem22", "mrkc_fig2", "mrock2_fig3", "scale_sep_fig4"}))
      ->capture_default_str();
  sc->add_option("--s", sa.params.s)->check(CLI::Range(1, 200))->capture_default_str();
  sc->add_option("--m", sa.params.m)->check(CLI::Range(2, 1000))->capture_default_str();
  sc->add_option("--eps", sa.params.eps)->capture_default_str();
  sc->add_option("--tau", sa.params.tau)->capture_default_str();
  sc->add_option("--eta", sa.params.eta, "micro step (default per kind)");
  sc->add_option("--zeta", sa.params.zeta, "slow rate (default per kind)");
  sc->add_option("--grid", sa.grid, "log or linear (default per kind)")->check(CLI::IsMember({"log", "linear"}));
  sc->add_option("--points", sa.params.points)->check(CLI::NonNegativeNumber)->capture_default_str();
  sc->add_option("--decade-lo", sa.params.decade_lo)->capture_default_str();
  sc->add_option("--decade-hi", sa.params.decade_hi)->capture_default_str();
  sc->add_option("--lambda-min", sa.params.lambda_min, "linear grid start (default -ell_m/eta)");
  sc->add_option("--tol", sa.params.tol)->capture_default_str();

  SpeedupArgs spa;
  auto* sp = app.add_subcommand("speedup", "theoretical speed-up of mROCK2 over ROCK2");
  add_common(sp, spa.out);
  sp->add_option("--r", spa.r, "comma-separated r_rho = rho_F/rho_S values")->capture_default_str();
  sp->add_option("--cf", spa.cf, "comma-separated c_F values")->capture_default_str();

  HeatArgs ha;
  auto* heat = app.add_subcommand("heat", "heat equation on the locally refined unit square");
  add_common(heat, ha.out);
  heat->add_option("--js", ha.js, "comma-separated refinement exponents")->capture_default_str();
  heat->add_option("--methods", ha.methods)->capture_default_str();
  heat->add_option("--dt-scale", ha.dt_scale, "dt = scale * 2^(-j/2)")->capture_default_str();
  heat->add_option("--t1", ha.t1)->capture_default_str();
  heat->add_option("--eps", ha.eps)->capture_default_str();
  heat->add_option("--levels", ha.heat.levels)->check(CLI::Range(0, 2))->capture_default_str();
  heat->add_option("--forcing", ha.heat.forcing)->check(CLI::IsMember({"manufactured", "zero"}))->capture_default_str();

  LshapeArgs la;
  auto* lsh = app.add_subcommand("lshape", "Gaussian source on the graded L-shape");
  add_common(lsh, la.out);
  lsh->add_option("--Hs", la.Hs, "comma-separated coarse diameters")->capture_default_str();
  lsh->add_option("--ratio", la.ratio, "H/h")->capture_default_str();
  lsh->add_option("--methods", la.methods)->capture_default_str();
  lsh->add_option("--dt", la.dt)->capture_default_str();
  lsh->add_option("--ref-refine", la.ref_refine, "reference uses dt/ref_refine")->capture_default_str();
  lsh->add_option("--t1", la.t1)->capture_default_str();
  lsh->add_option("--eps", la.eps)->capture_default_str();
  lsh->add_option("--x0", la.lshape.x0)->capture_default_str();
  lsh->add_option("--y0", la.lshape.y0)->capture_default_str();
  lsh->add_option("--sigma", la.lshape.sigma)->capture_default_str();
  lsh->add_option("--amplitude", la.lshape.amplitude)->capture_default_str();

  MeshArgs ma;
  auto* mesh = app.add_subcommand("mesh-export", "plain-text mesh listing with fast-set flags");
  add_common(mesh, ma.out);
  mesh->add_option("--domain", ma.domain)->check(CLI::IsMember({"square", "lshape"}))->capture_default_str();
  mesh->add_option("--j", ma.j)->check(CLI::Range(1, 10))->capture_default_str();
  mesh->add_option("--levels", ma.levels)->check(CLI::Range(0, 2))->capture_default_str();
  mesh->add_option("--coarse", ma.H)->capture_default_str();
  mesh->add_option("--fine", ma.h)->capture_default_str();

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (const auto* cfg = sub->get_option("--config"); cfg->count() > 0) {
      // Replay with the file entries first so that explicit flags win.
      std::vector<std::string> args{sub->get_name()};
      for (auto& a : config_arguments(cfg->as<std::string>())) args.push_back(std::move(a));
      for (int k = 2; k < argc; ++k) args.emplace_back(argv[k]);
      std::reverse(args.begin(), args.end());  // CLI11 takes the arguments reversed
      app.clear();
      app.parse(std::move(args));
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*integ) return cmd_integrate(ia, *integ);
    if (*conv) return cmd_convergence(ca, *conv);
    if (*sc) return cmd_scan(sa, *sc);
    if (*sp) return cmd_speedup(spa, *sp);
    if (*heat) return cmd_heat(ha, *heat);
    if (*lsh) return cmd_lshape(la, *lsh);
    if (*mesh) return cmd_mesh_export(ma, *mesh);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
