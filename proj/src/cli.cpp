#include "brq/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "brq/acceptance.hpp"
#include "brq/approx.hpp"
#include "brq/csv.hpp"
#include "brq/error.hpp"
#include "brq/kernels.hpp"

namespace brq::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Defaults {
  std::size_t n;
  double length;
};

Defaults grid_defaults(const std::string& command) {
  if (command == "kernel") return {std::size_t{1} << 20, 2048.0};
  if (command == "besov") return {std::size_t{1} << 17, 16.0};
  if (command == "localize") return {16384, 64.0};
  if (command == "maximal") return {8192, 64.0};
  return {32768, 64.0};
}

std::string default_mu(const std::string& command) {
  if (command == "kernel") return "16";
  if (command == "besov") return "512";
  if (command == "localize") return "2:128";
  if (command == "maximal") return "2:64";
  return "2:256";
}

GridSpec resolve_grid(ExperimentConfig& c) {
  const auto d = grid_defaults(c.command);
  if (c.n == 0) c.n = d.n;
  if (c.length == 0.0) c.length = d.length;
  return make_grid(c.dim, c.n, c.length);
}

TestFunctionSpec function_spec(const ExperimentConfig& c) {
  TestFunctionSpec spec;
  if (c.function == "gaussian") {
    spec = TestFunctionSpec::gaussian();
  } else if (c.function == "bump") {
    spec.kind = TestFunctionSpec::Kind::Bump;
  } else if (c.function == "indicator") {
    spec = TestFunctionSpec::indicator();
  } else if (c.function == "tent") {
    spec = TestFunctionSpec::tent();
  } else if (c.function == "band-limited") {
    spec = TestFunctionSpec::band_limited(c.seed, c.cutoff, c.mean_zero);
  } else if (c.function == "annular") {
    spec = TestFunctionSpec::annular(2.0 * c.delta, 2.0 * c.delta + 2.0 * c.width, true);
  } else if (c.function == "annular-indicator") {
    spec = TestFunctionSpec::annular(2.0 * c.delta, 2.0 * c.delta + 2.0 * c.width, false);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown function '" + c.function + "'");
  }
  if (spec.kind != TestFunctionSpec::Kind::Annular) spec.width = c.width;
  return spec;
}

SymbolSpec symbol_spec(const ExperimentConfig& c, double mu) {
  SymbolSpec spec;
  if (c.symbol == "quotient") spec = SymbolSpec::quotient(c.alpha, mu);
  else if (c.symbol == "complement") spec = SymbolSpec::complement(c.alpha, mu);
  else if (c.symbol == "bessel") spec = SymbolSpec::bessel(c.alpha, mu);
  else if (c.symbol == "riesz") spec = SymbolSpec::riesz(c.alpha);
  else if (c.symbol == "remainder") spec = SymbolSpec::remainder(mu);
  else throw Error(ErrorCode::InvalidArgument, "unknown symbol '" + c.symbol + "'");
  spec.validate();
  return spec;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::OutOfRange, message);
}

void validate_common(const ExperimentConfig& c) {
  require(std::isfinite(c.alpha) && c.alpha > 0.0, "--alpha must be > 0");
  require(std::isfinite(c.p) && c.p >= 1.0, "--p must satisfy 1 <= p < inf");
  require(c.mu_steps >= 1, "--mu-steps must be >= 1");
  require(c.width > 0.0, "--width must be > 0");
}

void print_curve(const CurveResult& curve, std::ostream& out) {
  out << "mu: " << curve.mu.size() << " points in [" << num(curve.mu.front()) << ", "
      << num(curve.mu.back()) << "]\n";
  for (std::size_t i = 0; i < curve.names.size(); ++i)
    out << "  " << curve.names[i] << ": " << num(curve.columns[i].front()) << " -> "
        << num(curve.columns[i].back()) << "\n";
  for (const auto& f : curve.fits)
    out << "  fit " << f.series << " over [" << num(f.lo) << ", " << num(f.hi)
        << "]: slope " << num(f.fit.slope) << ", intercept " << num(f.fit.intercept)
        << ", residual " << num(f.fit.residual) << "\n";
  for (const auto& [key, value] : curve.notes) out << "  " << key << " = " << value << "\n";
}

void emit(const CurveResult& curve, const ExperimentConfig& c, std::ostream& out) {
  print_curve(curve, out);
  if (!c.out.empty()) {
    write_csv(curve, c.out);
    out << "wrote " << c.out << "\n";
  }
}

int run_kernel(ExperimentConfig& c, std::ostream& out) {
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  require(mus.size() == 1, "kernel takes a single --mu value");
  const double mu = mus.front();
  const auto symbol = symbol_spec(c, mu);
  const auto profile = extract_kernel(symbol, grid);
  out << "kernel of " << to_string(symbol.kind) << " alpha=" << num(c.alpha) << " mu=" << num(mu)
      << ": " << profile.radial.size() << " radial samples, dc part " << num(profile.dc_part)
      << "\n";
  if (symbol.kind == SymbolKind::Quotient) {
    // The profile is still useful when the grid cannot resolve the decay window.
    try {
      const auto report = decay_check(profile, c.alpha, mu);
      out << "  compensated sup " << num(report.sup_q) << " (near " << num(report.near_sup)
          << ", far " << num(report.far_sup) << "), far slope " << num(report.far_slope) << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unresolvable) throw;
      out << "  decay check skipped: " << e.what() << "\n";
    }
  }
  if (!c.out.empty()) {
    write_profile_csv(profile, c.out);
    out << "wrote " << c.out << "\n";
  }
  return kExitOk;
}

int run_approx(ExperimentConfig& c, std::ostream& out) {
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  const auto spec = function_spec(c);
  if (c.rate) {
    require(c.alpha == 1.0, "--rate uses alpha = 1");
    emit(lipschitz_rate(grid, spec, c.alpha, c.p, mus, c.fit_lo), c, out);
    return kExitOk;
  }
  const auto f = make_test_function(grid, spec);
  emit(equivalence_curve(f, c.alpha, c.p, mus, recommended_sampling(spec)), c, out);
  return kExitOk;
}

int run_localize(ExperimentConfig& c, std::ostream& out) {
  require(c.delta > 0.0, "--delta must be > 0");
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  if (c.function == "gaussian") c.function = "annular";
  require(c.function == "annular" || c.function == "annular-indicator",
          "localize needs an annular function");
  const auto f = make_test_function(grid, function_spec(c));
  emit(localization_slope(f, c.alpha, {0.0, 0.0, 0.0}, c.delta, mus), c, out);
  return kExitOk;
}

int run_saturate(ExperimentConfig& c, std::ostream& out) {
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  const auto f = make_test_function(grid, function_spec(c));
  emit(saturation_curve(f, c.p, mus), c, out);
  return kExitOk;
}

int run_besov(ExperimentConfig& c, std::ostream& out) {
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  require(mus.size() == 1, "besov takes a single --mu value (mu_max)");
  const auto spec = function_spec(c);
  const auto f = make_test_function(grid, spec);
  const auto r = besov_ratio(f, c.s, c.p, c.q, mus.front(), recommended_sampling(spec));
  out << "besov s=" << num(c.s) << " p=" << num(c.p) << " q=" << num(c.q) << ": lhs "
      << num(r.lhs) << ", rhs " << num(r.rhs) << ", ratio " << num(r.ratio)
      << ", top-decade defects " << num(r.lhs_defect) << " / " << num(r.rhs_defect)
      << (r.truncated ? " (truncated: no claim)" : "") << "\n";
  if (!c.out.empty()) {
    CurveResult curve;
    curve.mu = mus;
    curve.add_series("lhs", {r.lhs});
    curve.add_series("rhs", {r.rhs});
    curve.add_series("ratio", {r.ratio});
    curve.notes.push_back({"lhs_defect", num(r.lhs_defect)});
    curve.notes.push_back({"rhs_defect", num(r.rhs_defect)});
    write_csv(curve, c.out);
    out << "wrote " << c.out << "\n";
  }
  return kExitOk;
}

int run_maximal(ExperimentConfig& c, std::ostream& out) {
  require(c.p > 1.0, "maximal needs --p > 1");
  const auto grid = resolve_grid(c);
  const auto mus = parse_mu(c.mu, c.mu_steps);
  const auto f = make_test_function(grid, function_spec(c));
  auto curve = muckenhoupt_wheeden_check(f, c.p, mus, c.dc_zero ? DcPolicy::Zero : DcPolicy::Error);
  const auto dom = fitted_domination(curve, "lhs", "rhs", 0, 1.5);
  curve.notes.push_back({"fitted_constant", num(dom.constant)});
  curve.notes.push_back({"domination", dom.holds ? "holds" : "fails"});
  emit(curve, c, out);
  return dom.holds ? kExitOk : kExitFailed;
}

int run_verify(ExperimentConfig& c, std::ostream& out) {
  const auto ids = acceptance::suite(c.suite);
  int failed = 0;
  for (int id : ids) {
    const auto report = acceptance::run_criterion(id);
    out << acceptance::format_report(report, true) << std::flush;
    failed += report.passed() ? 0 : 1;
  }
  out << (failed == 0 ? "all " : "") << ids.size() - failed << "/" << ids.size()
      << " criteria passed\n";
  return failed == 0 ? kExitOk : kExitFailed;
}

}  // namespace

std::string dump(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["dim"] = c.dim;
  j["n"] = c.n;
  j["length"] = c.length;
  j["alpha"] = c.alpha;
  j["mu"] = c.mu;
  j["mu_steps"] = c.mu_steps;
  j["function"] = c.function;
  j["symbol"] = c.symbol;
  j["p"] = c.p;
  j["q"] = c.q;
  j["s"] = c.s;
  j["delta"] = c.delta;
  j["width"] = c.width;
  j["cutoff"] = c.cutoff;
  j["mean_zero"] = c.mean_zero;
  j["dc_zero"] = c.dc_zero;
  j["fit_lo"] = c.fit_lo;
  j["rate"] = c.rate;
  j["suite"] = c.suite;
  j["out"] = c.out;
  j["seed"] = c.seed;
  return j.dump(2);
}

std::vector<double> parse_mu(const std::string& text, int per_octave) {
  auto parse_number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v) || v <= 0.0)
      throw Error(ErrorCode::InvalidArgument, "bad --mu value '" + text + "'");
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {parse_number(text)};
  const double lo = parse_number(text.substr(0, colon));
  const double hi = parse_number(text.substr(colon + 1));
  if (!(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "--mu range needs lo <= hi");
  return geometric_grid(lo, hi, per_octave);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  CLI::App app{"Bessel-Riesz quotient operator experiments", "brq"};
  app.require_subcommand(1, 1);

  auto grid_flags = [&](CLI::App* sub) {
    sub->add_option("--dim", c.dim, "spatial dimension (1-3)");
    sub->add_option("--n", c.n, "grid points per axis (power of two)");
    sub->add_option("--length", c.length, "period length L");
    sub->add_option("--out", c.out, "CSV output path");
    sub->add_flag("--dump-config", c.dump_config, "print the resolved configuration");
  };
  auto function_flags = [&](CLI::App* sub) {
    sub->add_option("--function", c.function,
                    "gaussian|bump|indicator|tent|band-limited|annular|annular-indicator");
    sub->add_option("--width", c.width, "profile width");
    sub->add_option("--seed", c.seed, "random seed for band-limited fields");
    sub->add_option("--cutoff", c.cutoff, "band limit for band-limited fields");
    sub->add_flag("--mean-zero", c.mean_zero, "drop the mean of band-limited fields");
  };

  auto* kernel = app.add_subcommand("kernel", "extract a radial kernel profile");
  grid_flags(kernel);
  kernel->add_option("--alpha", c.alpha);
  kernel->add_option("--symbol", c.symbol, "quotient|complement|bessel|riesz|remainder");
  kernel->add_option("--mu", c.mu, "mu value (default 16)");

  auto* approx = app.add_subcommand("approx", "error/modulus equivalence curve");
  grid_flags(approx);
  function_flags(approx);
  approx->add_option("--alpha", c.alpha);
  approx->add_option("--p", c.p);
  approx->add_flag("--rate", c.rate, "fit the Lipschitz rate of err instead");
  approx->add_option("--fit-lo", c.fit_lo, "lower end of the rate fit window");

  auto* localize = app.add_subcommand("localize", "decay at a point where f vanishes");
  grid_flags(localize);
  function_flags(localize);
  localize->add_option("--alpha", c.alpha);
  localize->add_option("--delta", c.delta, "vanishing radius");

  auto* saturate = app.add_subcommand("saturate", "saturation curve mu * err");
  grid_flags(saturate);
  function_flags(saturate);
  saturate->add_option("--p", c.p);

  auto* besov = app.add_subcommand("besov", "Besov seminorm vs error integral");
  grid_flags(besov);
  function_flags(besov);
  besov->add_option("--s", c.s);
  besov->add_option("--p", c.p);
  besov->add_option("--q", c.q);
  besov->add_option("--mu", c.mu, "mu_max (default 512)");

  auto* maximal = app.add_subcommand("maximal", "Riesz modulus vs truncated maximal function");
  grid_flags(maximal);
  function_flags(maximal);
  maximal->add_option("--p", c.p);
  maximal->add_flag("--dc-zero", c.dc_zero, "allow a nonzero mean (zero-DC Riesz convention)");

  auto* verify = app.add_subcommand("verify", "run acceptance criteria");
  verify->add_option("--suite", c.suite, "all|special|oracle|approx|kernels|localization|ids");

  for (auto* sub : {approx, localize, saturate, maximal}) {
    sub->add_option("--mu", c.mu, "mu range lo:hi (default 2:256, maximal 2:64, localize 2:128)");
    sub->add_option("--mu-steps", c.mu_steps, "geometric nodes per octave");
  }

  std::vector<std::string> owned{"brq"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInvalid;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.mu.empty()) c.mu = default_mu(c.command);

  try {
    validate_common(c);
    if (c.dump_config) {
      ExperimentConfig resolved = c;
      const auto d = grid_defaults(c.command);
      if (resolved.n == 0) resolved.n = d.n;
      if (resolved.length == 0.0) resolved.length = d.length;
      out << dump(resolved) << "\n";
    }
    if (c.command == "kernel") return run_kernel(c, out);
    if (c.command == "approx") return run_approx(c, out);
    if (c.command == "localize") return run_localize(c, out);
    if (c.command == "saturate") return run_saturate(c, out);
    if (c.command == "besov") return run_besov(c, out);
    if (c.command == "maximal") return run_maximal(c, out);
    return run_verify(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kExitFailed : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace brq::cli
