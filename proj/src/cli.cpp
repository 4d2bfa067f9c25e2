#include "pmc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <random>

#include "pmc/artifacts.hpp"
#include "pmc/biortho.hpp"
#include "pmc/config.hpp"
#include "pmc/control.hpp"
#include "pmc/sim.hpp"

namespace pmc {

namespace {

struct CliContext {
  std::string config_path;
  std::string out_dir;
  int workers = 0;        // 0: take from config
  std::string precision;  // empty: take from config

  Config config;

  void load() {
    config = Config::parse_file(config_path);
    if (out_dir.empty()) out_dir = config.get("run", "out", "out");
  }

  SolveOptions solve_options() const {
    SolveOptions options;
    options.condition_guard =
        config.get_double("tolerances", "condition_guard", 1e12);
    const std::string prec =
        precision.empty() ? config.get("run", "precision", "double") : precision;
    if (prec == "extended")
      options.precision = Precision::extended;
    else if (prec == "double")
      options.precision = Precision::double_prec;
    else
      throw contract_error("cli: precision must be 'double' or 'extended'");
    options.workers = workers > 0 ? workers : config.get_int("run", "workers", 1);
    return options;
  }

  ArtifactWriter writer() const { return ArtifactWriter(out_dir, config.hash()); }

  Potential potential() const {
    const int grid = config.get_int("potential", "grid", default_grid_size);
    const std::string kind = config.get("potential", "kind", "zero");
    if (kind.rfind("csv:", 0) == 0) return potential_from_csv(kind.substr(4), grid);
    return Potential::named(kind, grid);
  }

  static Potential potential_from_csv(const std::string& path, int grid) {
    std::ifstream in(path);
    if (!in) throw contract_error("cli: cannot open potential csv " + path);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw contract_error("cli: potential csv expects x,value lines");
      xs.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 4) throw contract_error("cli: potential csv too short");
    // Resample onto the shared uniform grid by linear interpolation.
    Eigen::VectorXd samples(grid);
    const Eigen::VectorXd gx = uniform_grid(grid);
    for (int i = 0; i < grid; ++i) {
      const double x = gx(i);
      auto hi = std::lower_bound(xs.begin(), xs.end(), x);
      if (hi == xs.begin()) {
        samples(i) = vs.front();
      } else if (hi == xs.end()) {
        samples(i) = vs.back();
      } else {
        const auto j = static_cast<std::size_t>(hi - xs.begin());
        const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        samples(i) = (1.0 - t) * vs[j - 1] + t * vs[j];
      }
    }
    return Potential::from_samples(samples);
  }

  BoxWindow omega() const {
    const int dim = config.get_int("domain", "dim", 1);
    BoxWindow window = BoxWindow::full(dim);
    const std::string text = config.get("domain", "omega", "");
    if (text.empty()) return window;
    std::istringstream in(text);
    std::string axis;
    int i = 0;
    while (std::getline(in, axis, ';')) {
      if (i >= dim) throw contract_error("cli: omega has more axes than dim");
      const auto comma = axis.find(',');
      if (comma == std::string::npos)
        throw contract_error("cli: omega axis expects 'a,b'");
      window.axes[static_cast<std::size_t>(i)] =
          Window{std::stod(axis.substr(0, comma)), std::stod(axis.substr(comma + 1))};
      ++i;
    }
    if (i == 1 && dim > 1)
      for (int d = 1; d < dim; ++d) window.axes[static_cast<std::size_t>(d)] = window.axes[0];
    window.validate();
    return window;
  }

  SystemSpec system() const {
    SystemSpec spec;
    const std::string kind = config.get("control", "system", "boundary");
    if (kind == "dolecki")
      spec.kind = SystemSpec::Kind::dolecki;
    else if (kind == "boundary")
      spec.kind = SystemSpec::Kind::boundary;
    else if (kind == "internal")
      spec.kind = SystemSpec::Kind::internal;
    else
      throw contract_error("cli: unknown system '" + kind + "'");
    spec.dim = config.get_int("domain", "dim", 1);
    spec.x0 = config.get_double("control", "x0", 1.0);
    spec.q = potential();
    spec.b1 = config.get_double("control", "b1", 1.0);
    spec.b2 = config.get_double("control", "b2", 1.0);
    spec.grid_size = config.get_int("potential", "grid", default_grid_size);
    spec.p = config.get_int("class", "p", 2);
    spec.rho = config.get_double("class", "rho", 3.0);
    spec.theta = config.get_double("class", "theta", 0.5);
    spec.vartheta = config.get_double("class", "vartheta", 0.5);
    if (spec.kind == SystemSpec::Kind::internal) {
      const std::vector<double> ab = config.get_list("domain", "ab", {0.0, pi});
      if (ab.size() != 2) throw contract_error("cli: ab expects 'a,b'");
      spec.ab = Window{ab[0], ab[1]};
    }
    return spec;
  }

  ModeCoeffs initial_data(const SystemFrame& frame, const PrimalFamily& primal) const {
    const std::string text = config.get("control", "y0", "decay:1");
    ModeCoeffs y0;
    if (text.rfind("decay:", 0) == 0) {
      const double s = std::stod(text.substr(6));
      for (int i = 0; i < primal.size(); ++i) {
        const ModeKey key = frame.key_of(primal, i);
        y0[key] = 1.0 / std::pow(primal.mode(i).lambda, s);
      }
      return y0;
    }
    if (text.rfind("single:", 0) == 0) {
      std::istringstream in(text.substr(7));
      std::string item;
      std::vector<int> idx;
      while (std::getline(in, item, ',')) idx.push_back(std::stoi(item));
      if (idx.size() != 3) throw contract_error("cli: y0 single expects m,j,k");
      y0[ModeKey{idx[0], idx[1], idx[2]}] = 1.0;
      return y0;
    }
    if (text.rfind("file:", 0) == 0) {
      std::ifstream in(text.substr(5));
      if (!in) throw contract_error("cli: cannot open y0 file");
      nlohmann::json payload;
      in >> payload;
      for (const auto& entry : payload)
        y0[ModeKey{entry.at("m"), entry.at("j"), entry.at("k")}] =
            entry.at("c").get<double>();
      return y0;
    }
    throw contract_error("cli: y0 expects decay:<s>, single:m,j,k or file:<path>");
  }
};

nlohmann::json line_fit_json(const LineFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
}

const char* trend_name(MinimalTimeEstimate::Trend trend) {
  switch (trend) {
    case MinimalTimeEstimate::Trend::to_zero: return "to_zero";
    case MinimalTimeEstimate::Trend::growing: return "growing";
    default: return "bounded";
  }
}

int cmd_spectrum(CliContext& ctx) {
  const int K = ctx.config.get_int("truncation", "K_max", 10);
  const Potential q = ctx.potential();
  const SturmLiouvilleResult lap = sturm_liouville_eigs(
      Potential::zero(), K, ctx.config.get_int("potential", "grid", default_grid_size));
  const SturmLiouvilleResult sl = sturm_liouville_eigs(
      q, K, ctx.config.get_int("potential", "grid", default_grid_size));
  const double qbar = q.mean();

  ArtifactWriter writer = ctx.writer();
  writer.note("shift", sl.shift);
  writer.note("q_mean", qbar);
  std::vector<std::vector<double>> rows;
  for (int k = 1; k <= K; ++k) {
    const double nu1 = lap.eigs[static_cast<std::size_t>(k - 1)].nu;
    const double nu2 = sl.eigs[static_cast<std::size_t>(k - 1)].nu - sl.shift;
    rows.push_back({static_cast<double>(k), nu1, nu2, nu2 - nu1 - qbar});
  }
  writer.csv("spectrum.csv", {"k", "nu1", "nu2", "xi"}, rows);
  std::cout << "spectrum: wrote " << K << " rows (shift " << sl.shift << ")\n";
  return 0;
}

int cmd_classify(CliContext& ctx) {
  const SystemSpec spec = ctx.system();
  const int K = ctx.config.get_int("truncation", "K_max", 20);
  const SystemFrame frame = build_system_frame(spec, K);
  std::vector<double> values;
  for (const Group& g : frame.grouped.groups)
    for (const SpectralPoint& point : g.members) values.push_back(point.lambda);
  const SpectralSequence seq = SpectralSequence::from(values);
  const ClassReport report = verify_class(
      seq, spec.p, spec.rho, spec.theta,
      ctx.config.get_optional_double("class", "kappa"));

  ArtifactWriter writer = ctx.writer();
  writer.note("shift", frame.shift);
  writer.json("class_report.json",
              {{"pass", report.pass()},
               {"h3_pass", report.h3_pass},
               {"h5_pass", report.h5_pass},
               {"max_window_count", report.max_window_count},
               {"kappa_fitted", report.kappa_fitted},
               {"violation", report.violation}});
  std::cout << "classify: " << (report.pass() ? "pass" : "fail")
            << " (kappa_fitted " << report.kappa_fitted << ")\n";
  return 0;
}

int cmd_group(CliContext& ctx) {
  const SystemSpec spec = ctx.system();
  const int K = ctx.config.get_int("truncation", "K_max", 20);
  const SystemFrame frame = build_system_frame(spec, K);

  nlohmann::json groups = nlohmann::json::array();
  for (int k = 1; k <= frame.grouped.group_count(); ++k) {
    const Group& g = frame.grouped.group(k);
    nlohmann::json members = nlohmann::json::array();
    for (const SpectralPoint& point : g.members)
      members.push_back({{"family", point.family},
                         {"index", point.index},
                         {"lambda", point.lambda}});
    const double gap = k < frame.grouped.group_count()
                           ? frame.grouped.group(k + 1).min() - g.max()
                           : 0.0;
    groups.push_back({{"k", k},
                      {"size", g.size()},
                      {"diameter", g.diameter()},
                      {"gap_to_next", gap},
                      {"members", members}});
  }

  std::vector<double> values;
  for (const Group& g : frame.grouped.groups)
    for (const SpectralPoint& point : g.members) values.push_back(point.lambda);
  const ClassReport report = verify_class(
      SpectralSequence::from(values), spec.p, spec.rho, spec.theta,
      ctx.config.get_optional_double("class", "kappa"));

  ArtifactWriter writer = ctx.writer();
  writer.note("shift", frame.shift);
  writer.json("groups.json", {{"p", spec.p},
                              {"rho", spec.rho},
                              {"gap_constant", frame.grouped.gap_constant},
                              {"kappa_fitted", report.kappa_fitted},
                              {"class_pass", report.pass()},
                              {"groups", groups}});

  // Group matrices as CSV rows plus a condition/diagnostic report.
  std::vector<std::vector<double>> matrix_rows;
  nlohmann::json matrix_report = nlohmann::json::array();
  for (int k = 1; k <= frame.grouped.group_count(); ++k) {
    const GroupGram g = gram_M_k(frame.grouped.group(k), 1e300);
    for (int r = 0; r < g.M.rows(); ++r)
      for (int c = 0; c < g.M.cols(); ++c)
        matrix_rows.push_back({static_cast<double>(k), static_cast<double>(r + 1),
                               static_cast<double>(c + 1), g.M(r, c)});
    nlohmann::json inv_diag = nlohmann::json::array();
    for (int r = 0; r < g.inv_diag.size(); ++r) inv_diag.push_back(g.inv_diag(r));
    matrix_report.push_back({{"k", k},
                             {"size", g.M.rows()},
                             {"determinant", g.determinant},
                             {"condition", g.condition},
                             {"inverse_diagonal", inv_diag}});
  }
  writer.csv("group_matrices.csv", {"k", "row", "col", "value"}, matrix_rows);
  writer.json("group_matrix_report.json", {{"matrices", matrix_report}});
  std::cout << "group: " << frame.grouped.group_count() << " groups\n";
  return 0;
}

int cmd_biortho(CliContext& ctx) {
  const SystemSpec spec = ctx.system();
  const double N = ctx.config.get_double("truncation", "N", 4.0);
  const double T = ctx.config.get_double("time", "T", 1.0);
  const SystemFrame frame = build_system_frame(spec, N);
  const PrimalFamily primal = PrimalFamily::build(
      frame.transverse, frame.grouped, N, spec.vartheta, T, ctx.omega());
  const BiorthFamily family = restrict_biortho(primal, ctx.solve_options());

  ArtifactWriter writer = ctx.writer();
  writer.note("shift", frame.shift);
  writer.note("envelope_slope", family.envelope.fit.slope);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < primal.size(); ++i) {
    const TensorMode& mode = primal.mode(i);
    rows.push_back({static_cast<double>(mode.m), static_cast<double>(mode.k),
                    static_cast<double>(mode.j), mode.lambda,
                    family.sq_norms(i)});
  }
  writer.csv("biortho_norms.csv", {"m", "k", "j", "lambda", "sq_norm"}, rows);
  nlohmann::json elements = nlohmann::json::array();
  for (int i = 0; i < primal.size(); ++i) {
    const TensorMode& mode = primal.mode(i);
    nlohmann::json coeffs = nlohmann::json::array();
    for (int p = 0; p < primal.size(); ++p) coeffs.push_back(family.coeff(p, i));
    elements.push_back({{"m", mode.m},
                        {"k", mode.k},
                        {"j", mode.j},
                        {"lambda", mode.lambda},
                        {"coefficients", coeffs}});
  }
  writer.json("biortho.json",
              {{"modes", primal.size()},
               {"residual", family.residual},
               {"residual_scaled", family.residual_scaled},
               {"condition", family.condition},
               {"envelope", line_fit_json(family.envelope.fit)},
               {"min_ratio_vs_inv_diag", family.envelope.min_ratio},
               {"elements", elements}});

  // Sampled dual field on request: [biortho] sample_element = <1-based i>.
  if (ctx.config.has("biortho", "sample_element")) {
    const int element = ctx.config.get_int("biortho", "sample_element", 1);
    if (element < 1 || element > primal.size())
      throw contract_error("cli: sample_element out of range");
    const int nt = ctx.config.get_int("biortho", "sample_points", 64);
    std::vector<std::vector<double>> samples;
    for (int it = 0; it <= nt; ++it)
      for (int ix = 0; ix <= nt; ++ix) {
        const double t = T * it / nt;
        const double xp = ctx.omega().axes[0].a +
                          (ctx.omega().axes[0].b - ctx.omega().axes[0].a) * ix / nt;
        double value = 0.0;
        for (int p = 0; p < primal.size(); ++p) {
          const double obs_value = primal.obs(p).scalar_kind
                                       ? primal.obs(p).scalar
                                       : 1.0; // scalarized profile for U2 fields
          value += family.coeff(p, element - 1) * obs_value *
                   std::exp(-primal.mode(p).lambda * t) *
                   primal.transverse.psi_value(primal.mode(p).m, {xp, 0.0, 0.0});
        }
        samples.push_back({t, xp, value});
      }
    writer.csv("biortho_sample.csv", {"t", "xprime", "value"}, samples);
  }
  std::cout << "biortho: " << primal.size() << " modes, residual "
            << family.residual << ", condition " << family.condition << "\n";
  return 0;
}

int cmd_tpn_check(CliContext& ctx) {
  const SystemSpec spec = ctx.system();
  const double N = ctx.config.get_double("truncation", "N", 4.0);
  const double T = ctx.config.get_double("time", "T", 0.1);
  const BoxWindow omega = ctx.omega();
  const SystemFrame frame = build_system_frame(spec, N);
  const PrimalFamily primal = PrimalFamily::build(
      frame.transverse, frame.grouped, N, spec.vartheta, T, omega);

  WeightSpec weight;
  weight.omega = omega;
  weight.b = primal.modes.b;
  weight.alpha = ctx.config.get_double("weights", "alpha", 40.0);
  if (const auto beta = ctx.config.get_optional_double("weights", "beta")) {
    weight.beta = *beta;
  } else {
    std::vector<int> Ns;
    for (int n = 2; n <= 8; ++n) Ns.push_back(n);
    weight.beta = estimate_spectral_constant(omega, Ns).beta_hat;
  }

  const int trials = ctx.config.get_int("tpn", "trials", 100);
  std::mt19937_64 rng(static_cast<std::uint64_t>(ctx.config.get_int("run", "seed", 1)));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double max_ratio = 0.0;
  std::vector<std::vector<double>> rows;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd coeffs(primal.size());
    for (int i = 0; i < primal.size(); ++i) coeffs(i) = unit(rng);
    const TPNResult result = check_tpn(primal, coeffs, weight);
    max_ratio = std::max(max_ratio, result.ratio);
    rows.push_back({static_cast<double>(trial), result.lhs, result.rhs, result.ratio});
  }

  ArtifactWriter writer = ctx.writer();
  writer.note("alpha", weight.alpha);
  writer.note("beta", weight.beta);
  writer.note("b", weight.b);
  writer.csv("tpn.csv", {"trial", "lhs", "rhs", "ratio"}, rows);
  writer.json("tpn.json", {{"trials", trials},
                           {"max_ratio", max_ratio},
                           {"bound", 6.0},
                           {"pass", max_ratio <= 6.0}});
  std::cout << "tpn-check: max ratio " << max_ratio << " over " << trials
            << " trials (bound 6)\n";
  return 0;
}

int cmd_spectral_const(CliContext& ctx) {
  const BoxWindow omega = ctx.omega();
  std::vector<double> defaults;
  for (int n = 2; n <= 12; ++n) defaults.push_back(n);
  const std::vector<double> raw =
      ctx.config.get_list("spectral-const", "N_list", defaults);
  std::vector<int> Ns;
  for (const double v : raw) Ns.push_back(static_cast<int>(v));
  const SpectralConstantReport report = estimate_spectral_constant(omega, Ns);

  ArtifactWriter writer = ctx.writer();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < Ns.size(); ++i)
    rows.push_back({static_cast<double>(Ns[i]),
                    static_cast<double>(report.retained[i]),
                    report.constants(static_cast<Eigen::Index>(i)),
                    report.log_over_N(static_cast<Eigen::Index>(i))});
  writer.csv("spectral_const.csv", {"N", "retained", "constant", "log_over_N"}, rows);
  writer.json("spectral_const.json",
              {{"beta_hat", report.beta_hat}, {"fit", line_fit_json(report.fit)}});
  std::cout << "spectral-const: beta_hat " << report.beta_hat << " (r2 "
            << report.fit.r2 << ")\n";
  return 0;
}

int cmd_t0(CliContext& ctx) {
  const SystemSpec spec = ctx.system();
  const int K = ctx.config.get_int("t0", "K", 200);
  MinimalTimeEstimate estimate;
  switch (spec.kind) {
    case SystemSpec::Kind::dolecki:
      estimate = dolecki_T0(ctx.config.get_double("t0", "x0", spec.x0), K);
      break;
    case SystemSpec::Kind::boundary:
      estimate = coupled_T0_boundary(spec.q, K, spec.grid_size);
      break;
    case SystemSpec::Kind::internal:
      estimate = coupled_T0_internal(spec.q, spec.ab.a, spec.ab.b, K,
                                     spec.grid_size);
      break;
  }

  ArtifactWriter writer = ctx.writer();
  std::vector<std::vector<double>> rows;
  for (const auto& term : estimate.terms)
    rows.push_back({static_cast<double>(term.k), term.numerator,
                    term.denominator, term.ratio});
  writer.csv("t0.csv", {"k", "numerator", "denominator", "ratio"}, rows);
  writer.json("t0.json", {{"K", estimate.K},
                          {"surrogate", estimate.surrogate},
                          {"last_decade_max", estimate.last_decade_max},
                          {"trend", trend_name(estimate.trend)}});
  std::cout << "t0: surrogate " << estimate.surrogate << ", trend "
            << trend_name(estimate.trend) << "\n";
  return 0;
}

int cmd_control(CliContext& ctx, bool also_simulate) {
  const SystemSpec spec = ctx.system();
  const double N = ctx.config.get_double("truncation", "N", 4.0);
  const double T = ctx.config.get_double("time", "T", 1.0);
  const double N_sim = ctx.config.get_double("truncation", "N_sim", 2.0 * N);
  const BoxWindow omega = ctx.omega();

  const auto frame = std::make_shared<SystemFrame>(
      build_system_frame(spec, also_simulate ? N_sim : N));
  const PrimalFamily primal = PrimalFamily::build(
      frame->transverse, frame->grouped, N, spec.vartheta, T, omega);
  const ModeCoeffs y0 = ctx.initial_data(*frame, primal);
  const ControlField control =
      synthesize_control(spec, y0, T, N, omega, ctx.solve_options(), frame);

  ArtifactWriter writer = ctx.writer();
  writer.note("shift", frame->shift);
  nlohmann::json coeffs = nlohmann::json::array();
  for (int i = 0; i < control.primal.size(); ++i) {
    const ModeKey key = frame->key_of(control.primal, i);
    coeffs.push_back({{"m", key.m},
                      {"j", key.j},
                      {"k", key.k},
                      {"lambda", control.primal.mode(i).lambda},
                      {"coefficient", control.dual_coeffs(i)}});
  }
  writer.json("control_coeffs.json",
              {{"system", ctx.config.get("control", "system", "boundary")},
               {"T", T},
               {"N", N},
               {"modes", control.primal.size()},
               {"l2_norm", control.l2_norm()},
               {"moment_residual", control.moment_residual},
               {"coefficients", coeffs}});
  std::cout << "control: " << control.primal.size() << " modes, |v| = "
            << control.l2_norm() << ", moment residual "
            << control.moment_residual << "\n";
  if (!also_simulate) return 0;

  const SimResult sim = simulate_forward(spec, y0, control, T, N_sim);
  std::vector<std::vector<double>> rows;
  for (const SimEntry& entry : sim.entries)
    rows.push_back({static_cast<double>(entry.key.m),
                    static_cast<double>(entry.key.k),
                    static_cast<double>(entry.key.j), entry.lambda, entry.c0,
                    entry.free_decay, entry.forcing, entry.c_final,
                    entry.retained ? 1.0 : 0.0});
  writer.csv("simulate.csv",
             {"m", "k", "j", "lambda", "c0", "free_decay", "forcing",
              "final_coeff", "retained"},
             rows);
  writer.json("simulate_summary.json",
              {{"T", T},
               {"N_sim", N_sim},
               {"modes", sim.entries.size()},
               {"retained_max_abs", sim.retained_max_abs},
               {"retained_norm", sim.retained_norm},
               {"tail_norm", sim.tail_norm},
               {"l2_norm", sim.l2_norm},
               {"hminus1_norm", sim.hminus1}});
  std::cout << "simulate: retained max |c(T)| = " << sim.retained_max_abs
            << ", tail norm " << sim.tail_norm << "\n";
  return 0;
}

int cmd_lr_cost(CliContext& ctx) {
  const BoxWindow omega = ctx.omega();
  const std::vector<double> T_list =
      ctx.config.get_list("lr", "T_list", {1.0, 0.5, 0.25, 0.125});
  const int N = ctx.config.get_int("lr", "N", 10);
  const CostSweepResult sweep =
      heat_lr_cost_sweep(omega, T_list, N,
                         ctx.config.get_optional_double("weights", "beta"),
                         ctx.solve_options());

  ArtifactWriter writer = ctx.writer();
  writer.note("beta", sweep.beta);
  std::vector<std::vector<double>> rows;
  for (const CostSweepRow& row : sweep.rows)
    rows.push_back({row.T, row.feasible ? 1.0 : 0.0, row.K_estimate,
                    row.T_ln_K, row.eps0, row.alpha0, row.condition});
  writer.csv("lr_cost.csv",
             {"T", "feasible", "K", "TlnK", "eps0", "alpha0", "condition"},
             rows);
  std::cout << "lr-cost: " << sweep.rows.size() << " rows, beta "
            << sweep.beta << "\n";
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"moment-method toolkit for tensorized parabolic control"};
  app.require_subcommand(1);

  CliContext ctx;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", ctx.config_path, "configuration file")->required();
    cmd->add_option("--out", ctx.out_dir, "output directory");
    cmd->add_option("--workers", ctx.workers, "worker threads");
    cmd->add_option("--precision", ctx.precision, "double | extended");
  };

  int (*handler)(CliContext&) = nullptr;
  bool control_simulates = false;
  const auto set = [&](int (*fn)(CliContext&)) { return [&, fn]() { handler = fn; }; };

  add_common(app.add_subcommand("spectrum", "1-D spectra and asymptotics")
                 ->callback(set(&cmd_spectrum)));
  add_common(app.add_subcommand("classify", "class membership report")
                 ->callback(set(&cmd_classify)));
  add_common(app.add_subcommand("group", "eigenvalue grouping report")
                 ->callback(set(&cmd_group)));
  add_common(app.add_subcommand("biortho", "restricted biorthogonal family")
                 ->callback(set(&cmd_biortho)));
  add_common(app.add_subcommand("tpn-check", "weighted restriction inequality sweep")
                 ->callback(set(&cmd_tpn_check)));
  add_common(app.add_subcommand("spectral-const", "spectral inequality constants")
                 ->callback(set(&cmd_spectral_const)));
  add_common(app.add_subcommand("t0", "minimal-time surrogate")
                 ->callback(set(&cmd_t0)));
  add_common(app.add_subcommand("control", "moment-method control synthesis")
                 ->callback([&]() { handler = nullptr; control_simulates = false; }));
  add_common(app.add_subcommand("simulate", "synthesis plus forward simulation")
                 ->callback([&]() { handler = nullptr; control_simulates = true; }));
  add_common(app.add_subcommand("lr-cost", "heat control cost sweep")
                 ->callback(set(&cmd_lr_cost)));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    ctx.load();
    if (handler) return handler(ctx);
    return cmd_control(ctx, control_simulates);
  } catch (const toolkit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

} // namespace pmc
