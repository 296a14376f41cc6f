#include "hardy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "format.hpp"
#include "hardy/ground_state.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

namespace {

/// PASS/FAIL/INFO lines for the terminal and (parameter, value, status) rows
/// for CSV.
class Report {
 public:
  void info(const std::string& parameter, double value, const std::string& text) {
    add(parameter, value, "INFO", text);
  }
  void check(const std::string& parameter, double value, bool ok, const std::string& text) {
    add(parameter, value, ok ? "PASS" : "FAIL", text);
    failed_ = failed_ || !ok;
  }
  void divergent(const std::string& parameter, const std::string& text) {
    rows_.push_back({parameter, "inf", "DIVERGENT"});
    lines_.push_back("DIVERGENT " + text);
  }

  bool failed() const { return failed_; }

  void print(std::ostream& os) const {
    for (const auto& l : lines_) os << l << '\n';
  }
  void csv(std::ostream& os) const {
    os << "parameter,value,status\n";
    for (const auto& r : rows_) os << r[0] << ',' << r[1] << ',' << r[2] << '\n';
  }

 private:
  void add(const std::string& parameter, double value, const std::string& status,
           const std::string& text) {
    rows_.push_back({parameter, fmt_full(value), status});
    lines_.push_back(status + " " + text);
  }

  std::vector<std::array<std::string, 3>> rows_;
  std::vector<std::string> lines_;
  bool failed_ = false;
};

std::string sig(double v) { return std::isinf(v) ? "inf" : fmt_sig(v, 6); }

/// Sends CSV text to cfg.out, or to `out` when no path is configured.
void emit_csv(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (!cfg.out) {
    write(out);
    return;
  }
  std::ofstream f(*cfg.out);
  if (!f) throw ConfigError("cannot open '" + *cfg.out + "' for writing");
  write(f);
}

int finish(const RunConfig& cfg, const Report& r, std::ostream& out) {
  r.print(out);
  if (cfg.out) {
    emit_csv(cfg, out, [&](std::ostream& os) { r.csv(os); });
  } else {
    out << '\n';
    r.csv(out);
  }
  return r.failed() ? kExitFail : kExitPass;
}

RegularTree require_tree(const RunConfig& cfg) {
  if (!cfg.has_tree()) throw ConfigError("this verb needs a tree (generations and/or tail)");
  return cfg.tree();
}

template <class T>
T require(const std::optional<T>& v, const char* key) {
  if (!v) throw ConfigError(std::string("missing required key '") + key + "'");
  return *v;
}

int tree_info(const RunConfig& cfg, std::ostream& out) {
  const RegularTree tree = require_tree(cfg);
  const std::size_t shown =
      std::min<std::size_t>(cfg.depth.value_or(10), tree.vertex_count());
  out << "listed generations: " << tree.generations().size() << ", tail: " << to_string(tree.tail())
      << '\n';
  out << "k  t_k  b_k  g0 on (t_{k-1}, t_k]\n";
  for (std::size_t k = 1; k <= shown; ++k) {
    out << k << "  " << sig(tree.vertex(k)) << "  " << tree.branching(k) << "  "
        << sig(tree.branching_product(k - 1)) << '\n';
  }
  const Certified L = reduced_height(tree);
  if (L.is_divergent()) {
    out << "reduced height: DIVERGENT (recurrent)\n";
  } else {
    out << "reduced height: " << sig(L.value()) << " (transient)\n";
    const SpectralBracket s = spectral_bottom_bracket(tree);
    out << "spectral bottom in [" << sig(s.lower) << ", " << sig(s.upper) << "]\n";
  }
  return kExitPass;
}

int tree_muckenhoupt(const RunConfig& cfg, std::ostream& out) {
  const RegularTree tree = require_tree(cfg);
  const HardyWeight psi = cfg.weight.value_or(HardyWeight::constant(1.0));
  const CriterionReport m = muckenhoupt_constant(tree, psi);
  Report r;
  if (m.divergent()) {
    r.divergent("M", "M(tree, " + to_string(psi) + ") = DIVERGENT: no Hardy inequality with this weight");
    r.print(out);
    if (cfg.out) emit_csv(cfg, out, [&](std::ostream& os) { r.csv(os); });
    return kExitFail;
  }
  const double M = m.value.value();
  r.info("M", M, "M(tree, " + to_string(psi) + ") = " + sig(M) + " +- " + sig(m.value.error()));
  r.info("maximizer", m.maximizer,
         std::string(m.escapes_to_infinity ? "supremum approached as t -> inf, last t = "
                                           : "attained at t = ") + sig(m.maximizer));
  r.info("C_upper", 4.0 * M, "Hardy constant C in [" + sig(M) + ", " + sig(4.0 * M) + "]");
  r.print(out);
  if (cfg.out) emit_csv(cfg, out, [&](std::ostream& os) { r.csv(os); });
  return kExitPass;
}

int homog_lambda_b(const RunConfig& cfg, std::ostream& out, const OutputOptions& opts) {
  const int b = require(cfg.b, "b");
  out << fmt_sig(lambda_b(b), opts.digits > 0 ? opts.digits : 17) << '\n';
  return kExitPass;
}

int homog_groundstate(const RunConfig& cfg, std::ostream& out) {
  const int b = require(cfg.b, "b");
  const int J = cfg.horizon.value_or(10);
  const int n = cfg.samples.value_or(10);
  const PiecewiseTrig omega = ground_state_homogeneous(b, J);
  emit_csv(cfg, out, [&](std::ostream& os) {
    os << "t,omega,sqrt_g0_omega_over_1pt\n";
    for (int j = 0; j < J; ++j) {
      for (int i = 0; i < n + (j + 1 == J ? 1 : 0); ++i) {
        const double t = j + static_cast<double>(i) / n;
        os << fmt_full(t) << ',' << fmt_full(omega.value(t)) << ','
           << fmt_full(omega.scaled_value(j, t) / (1.0 + t)) << '\n';
      }
    }
  });
  return kExitPass;
}

int loop_lambda_star(const RunConfig& cfg, std::ostream& out, const OutputOptions& opts) {
  const double alpha = require(cfg.alpha, "alpha");
  const double v = lambda_star(alpha, cfg.tol.value_or(1e-15));
  out << fmt_fixed(v, opts.digits > 0 ? opts.digits : 4) << '\n';
  return kExitPass;
}

int loop_figure1(const RunConfig& cfg, std::ostream& out) {
  const double lo = cfg.min.value_or(-1.5);
  const double hi = cfg.max.value_or(1.5);
  const double step = cfg.step.value_or(0.01);
  if (hi < lo) throw ConfigError("min exceeds max");
  const long n = std::lround((hi - lo) / step) + 1;
  const bool fits = n > 1 && std::abs((n - 1) * step - (hi - lo)) <= 1e-9 * step;
  std::vector<double> alpha(n);
  std::vector<double> value(n);
  for (long i = 0; i < n; ++i) {
    // interpolating between the ends keeps a grid symmetric about 0 exactly symmetric
    double a = fits ? (lo * static_cast<double>(n - 1 - i) + hi * static_cast<double>(i)) / (n - 1)
                    : lo + static_cast<double>(i) * step;
    // grid points meant to be integers or half-integers land there exactly
    const double snapped = std::round(2.0 * a) / 2.0;
    if (std::abs(a - snapped) < 1e-9 * step) a = snapped;
    alpha[i] = a;
  }
  const long workers = std::clamp<long>(std::thread::hardware_concurrency(), 1, 16);
  {
    std::vector<std::jthread> pool;
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (long i = w; i < n; i += workers) value[i] = lambda_star(alpha[i]);
      });
    }
  }
  emit_csv(cfg, out, [&](std::ostream& os) {
    os << "alpha,lambda_star\n";
    for (long i = 0; i < n; ++i) os << fmt_full(alpha[i]) << ',' << fmt_full(value[i]) << '\n';
  });
  return kExitPass;
}

int verify_hardy(const RunConfig& cfg, std::ostream& out) {
  const RegularTree tree = require_tree(cfg);
  const HardyWeight psi = cfg.weight.value_or(HardyWeight::constant(1.0));
  const double T = cfg.T.value_or(kDefaultTreeT);
  const double h = cfg.h.value_or(kDefaultH);
  const double tol = cfg.tol.value_or(kDefaultTol);
  Report r;
  const HardyEstimate e = hardy_constant_estimate(tree, psi, T, h, tol);
  r.info("C_T", e.C_T, "C_T = " + sig(e.C_T) + " at T = " + sig(T) + ", h = " + sig(h));
  if (e.M.divergent()) {
    r.divergent("M", "M = DIVERGENT");
    const HardyEstimate half = hardy_constant_estimate(tree, psi, 0.5 * T, h, tol);
    const double growth = e.C_T / half.C_T;
    const bool recurrent = reduced_height(tree).is_divergent();
    const double need = recurrent ? 2.0 : 1.0 + 1e-3;
    r.check("growth", growth, growth >= need,
            "C_T / C_{T/2} = " + sig(growth) + " (unbounded constant expected, need >= " +
                sig(need) + ")");
    return finish(cfg, r, out);
  }
  const double M = e.M.value.value();
  const double slack = tol * std::max(1.0, M) + e.M.value.error();
  r.info("M", M, "M = " + sig(M));
  r.check("upper", e.C_T / (4.0 * M), e.C_T <= 4.0 * M + slack,
          "C_T <= 4M: " + sig(e.C_T) + " <= " + sig(4.0 * M));
  r.check("lower", e.C_T / M, e.C_T >= M - slack, "C_T >= M: " + sig(e.C_T) + " >= " + sig(M));
  return finish(cfg, r, out);
}

int verify_homo(const RunConfig& cfg, std::ostream& out) {
  const int b = cfg.b.value_or(2);
  const HardyWeight psi = cfg.weight.value_or(HardyWeight::power(1.0, 3.0));
  const double T = cfg.T.value_or(kDefaultTreeT);
  const double h = cfg.h.value_or(kDefaultH);
  const HomoCheck c = homo_hardy_check(b, psi, T, h, cfg.tol.value_or(kDefaultTol));
  Report r;
  r.info("lambda_b", c.lambda_b, "lambda_b = " + sig(c.lambda_b));
  r.check("shifted_bottom", c.shifted_bottom, c.shifted_bottom > 0.0,
          "form - lambda_b * norm is positive on the truncation: bottom = " + sig(c.shifted_bottom));
  r.info("hardy_eigenvalue", c.hardy_eigenvalue, "weighted eigenvalue = " + sig(c.hardy_eigenvalue));
  if (c.M_prime.divergent()) {
    r.divergent("M_prime", "M' = DIVERGENT: the weight admits no improved inequality");
  } else {
    const double Mp = c.M_prime.value.value();
    const double upper = 4.0 * (Mp + c.M_prime.value.error());
    const double C = 1.0 / c.hardy_eigenvalue;
    r.info("M_prime", Mp, "M' = " + sig(Mp) + " +- " + sig(c.M_prime.value.error()));
    r.check("upper", C / upper, C <= upper, "C_T <= 4M': " + sig(C) + " <= " + sig(upper));
  }
  return finish(cfg, r, out);
}

int verify_decomposition(const RunConfig& cfg, std::ostream& out) {
  const int b = cfg.b.value_or(2);
  const int depth = cfg.depth.value_or(3);
  const double h = cfg.h.value_or(kDefaultH);
  const int n = cfg.n_eigs.value_or(10);
  const double margin = cfg.margin.value_or(1e-3);
  const DecompositionReport d = decomposition_check(b, depth, h, n);
  Report r;
  r.check("dofs", static_cast<double>(d.tree_dofs), d.tree_dofs == d.sum_dofs,
          "degrees of freedom: tree " + std::to_string(d.tree_dofs) + ", orthogonal sum " +
              std::to_string(d.sum_dofs));
  for (std::size_t i = 0; i < d.tree.size(); ++i) {
    r.info("eig_" + std::to_string(i + 1), d.tree[i],
           "eigenvalue " + std::to_string(i + 1) + ": tree " + sig(d.tree[i]) + ", A_" +
               std::to_string(d.source[i]) + " " + sig(d.orthogonal_sum[i]));
  }
  r.check("max_relative_difference", d.max_relative_difference,
          d.max_relative_difference <= margin,
          "spectra agree: max relative difference " + sig(d.max_relative_difference));
  return finish(cfg, r, out);
}

int verify_loop(const RunConfig& cfg, std::ostream& out) {
  const double alpha = cfg.alpha.value_or(0.5);
  const double T = cfg.T.value_or(kDefaultLoopT);
  const double h = cfg.h.value_or(kDefaultH);
  const double margin = cfg.margin.value_or(0.02);
  const double star = lambda_star(alpha);
  const double lmin = loop_hardy_estimate(alpha, T, h, h, cfg.tol.value_or(kDefaultTol));
  Report r;
  r.info("lambda_star", star, "lambda*(" + sig(alpha) + ") = " + sig(star));
  r.info("lambda_min", lmin, "lambda_min = " + sig(lmin) + " at T = " + sig(T) + ", h = " + sig(h));
  r.check("lower", lmin - star, lmin >= star - 1e-4, "lambda_min >= lambda* - 1e-4");
  const double rel = star > 0.0 ? lmin / star - 1.0 : lmin;
  r.check("sharpness", rel, rel <= margin,
          "lambda_min within " + sig(100.0 * margin) + "% above lambda*: " + sig(100.0 * rel) + "%");
  return finish(cfg, r, out);
}

int verify_gauge(const RunConfig& cfg, std::ostream& out) {
  const FluxSpec a = cfg.flux.value_or(FluxSpec::cosine(0.3, 1.0));
  const double T = cfg.T.value_or(kDefaultLoopT);
  const double h = cfg.h.value_or(kDefaultH);
  const int n = cfg.n_eigs.value_or(5);
  const double margin = cfg.margin.value_or(1e-3);
  const GaugeReport g = gauge_invariance_check(a, T, h, h, n, std::min(1e-10, 0.01 * margin));
  Report r;
  auto diff = [&](const std::vector<double>& other) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) d = std::max(d, std::abs(other[i] - g.reference[i]) / g.reference[i]);
    return d;
  };
  for (int i = 0; i < n; ++i) {
    r.info("eig_" + std::to_string(i + 1), g.reference[i],
           "eigenvalue " + std::to_string(i + 1) + " at constant flux: " + sig(g.reference[i]));
  }
  const double dp = diff(g.potential);
  const double ds = diff(g.shifted);
  const double dc = diff(g.conjugate);
  r.check("potential", dp, dp <= margin, to_string(a) + " vs its mean: " + sig(dp));
  r.check("integer_shift", ds, ds <= margin, "flux + 1: " + sig(ds));
  r.check("conjugation", dc, dc <= margin, "flux -> -flux: " + sig(dc));
  return finish(cfg, r, out);
}

using Handler = std::function<int(const RunConfig&, std::ostream&, const OutputOptions&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"tree info", [](auto& c, auto& o, auto&) { return tree_info(c, o); }},
      {"tree muckenhoupt", [](auto& c, auto& o, auto&) { return tree_muckenhoupt(c, o); }},
      {"homog lambda-b", [](auto& c, auto& o, auto& p) { return homog_lambda_b(c, o, p); }},
      {"homog groundstate", [](auto& c, auto& o, auto&) { return homog_groundstate(c, o); }},
      {"loop lambda-star", [](auto& c, auto& o, auto& p) { return loop_lambda_star(c, o, p); }},
      {"loop figure1", [](auto& c, auto& o, auto&) { return loop_figure1(c, o); }},
      {"verify hardy", [](auto& c, auto& o, auto&) { return verify_hardy(c, o); }},
      {"verify homo", [](auto& c, auto& o, auto&) { return verify_homo(c, o); }},
      {"verify decomposition", [](auto& c, auto& o, auto&) { return verify_decomposition(c, o); }},
      {"verify loop", [](auto& c, auto& o, auto&) { return verify_loop(c, o); }},
      {"verify gauge", [](auto& c, auto& o, auto&) { return verify_gauge(c, o); }},
  };
  return table;
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

}  // namespace

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {
      "tree info",     "tree muckenhoupt", "homog lambda-b",       "homog groundstate",
      "loop lambda-star", "loop figure1",  "verify hardy",         "verify homo",
      "verify decomposition", "verify loop", "verify gauge"};
  return v;
}

int run_command(const RunConfig& cfg, const std::string& verb, std::ostream& out,
                std::ostream& err, const OutputOptions& opts) {
  const auto it = handlers().find(verb);
  if (it == handlers().end()) {
    err << "error: unknown verb '" << verb << "'\n";
    return kExitUsage;
  }
  try {
    return it->second(cfg, out, opts);
  } catch (const ConfigError& e) {
    err << "error: " << verb << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << verb << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << verb << ": " << e.what() << '\n';
    return kExitFail;
  } catch (const std::out_of_range& e) {
    err << "error: " << verb << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hardy inequalities on regular metric trees and on a loop graph with flux", "hardy"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // -h would clash with the mesh step --h

  std::string config_path;
  std::map<std::string, std::string> overrides;
  OutputOptions opts;
  std::string chosen;

  auto leaf = [&](CLI::App* group, const std::string& action, const std::string& help) {
    CLI::App* sub = group->add_subcommand(action, help);
    sub->add_option("--config,-c", config_path, "configuration file (key = value lines)");
    for (const std::string& key : config_keys()) {
      sub->add_option_function<std::string>(
          flag_name(key), [&overrides, key](const std::string& v) { overrides[key] = v; },
          "override '" + key + "'");
    }
    sub->add_option("--digits", opts.digits, "printed digits");
    sub->callback([&chosen, group, action] { chosen = group->get_name() + " " + action; });
  };

  CLI::App* tree = app.add_subcommand("tree", "regular metric trees")->require_subcommand(1);
  leaf(tree, "info", "generations, reduced height and spectral bottom bracket");
  leaf(tree, "muckenhoupt", "Muckenhoupt constant M and the bracket M <= C <= 4M");
  CLI::App* homog = app.add_subcommand("homog", "homogeneous trees")->require_subcommand(1);
  leaf(homog, "lambda-b", "spectral bottom lambda_b");
  leaf(homog, "groundstate", "ground state samples as CSV");
  CLI::App* loop = app.add_subcommand("loop", "loop graph with flux")->require_subcommand(1);
  leaf(loop, "lambda-star", "sharp constant lambda*(alpha)");
  leaf(loop, "figure1", "lambda*(alpha) over an alpha grid as CSV");
  CLI::App* verify = app.add_subcommand("verify", "numerical certification reports")->require_subcommand(1);
  leaf(verify, "hardy", "truncated Hardy constant against the Muckenhoupt bracket");
  leaf(verify, "homo", "improved inequality on homogeneous trees");
  leaf(verify, "decomposition", "tree spectrum against the orthogonal sum of A_k");
  leaf(verify, "loop", "truncated loop eigenvalue against lambda*");
  leaf(verify, "gauge", "spectral invariance under gauge, integer shift and conjugation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    for (CLI::App* sub : app.get_subcommands()) {
      err << sub->help();
      break;
    }
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      try {
        cfg = parse_config(ss.str());
      } catch (const ConfigError& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    for (const std::string& key : config_keys()) {
      if (const auto it = overrides.find(key); it != overrides.end()) {
        set_config_value(cfg, key, it->second);
      }
    }
    cfg = parse_config(to_text(cfg));  // validates the merged configuration
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run_command(cfg, chosen, out, err, opts);
}

}  // namespace hardy
