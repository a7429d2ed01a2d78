#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbl/ambiguity.hpp"
#include "rbl/asymptotics.hpp"
#include "rbl/bundling.hpp"
#include "rbl/concentration.hpp"
#include "rbl/error.hpp"
#include "rbl/numeric.hpp"
#include "rbl/opt_oracle.hpp"
#include "rbl/robust_solvers.hpp"
#include "rbl/verify.hpp"

namespace rbl::cli {

namespace {

using nlohmann::json;

/// Flat `key = value` files. Unknown keys and malformed lines are reported
/// with their line number.
class KeyValueConfig : public CLI::Config {
 public:
  explicit KeyValueConfig(const CLI::App* app) : app_(app) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items;
    std::string line;
    int number = 0;
    while (std::getline(input, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto text = trim(line);
      if (text.empty()) continue;
      const auto eq = text.find('=');
      if (eq == std::string::npos) {
        throw CLI::ConfigError("config line " + std::to_string(number) + ": expected 'key = value', got '" +
                               text + "'");
      }
      auto key = trim(text.substr(0, eq));
      std::replace(key.begin(), key.end(), '_', '-');
      const auto value = trim(text.substr(eq + 1));
      if (key.empty() || app_->get_option_no_throw("--" + key) == nullptr || key == "config") {
        throw CLI::ConfigError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
      }
      // Environment beats the file.
      const auto* option = app_->get_option_no_throw("--" + key);
      if (!option->get_envname().empty() && std::getenv(option->get_envname().c_str()) != nullptr) continue;
      CLI::ConfigItem item;
      item.name = key;
      item.inputs = {value};
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  const CLI::App* app_;
};

struct Settings {
  double mu = 1.0;
  double d = 0.5;
  std::vector<int> m{100, 1000, 10000};
  std::string eps = "auto";
  std::string gamma = "auto";
  std::size_t alpha_grid = 2048;
  std::size_t price_grid = 1024;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
  std::vector<std::string> members;
  bool optimize_t = false;
  std::size_t n = 100000;
  std::vector<double> alpha{0.5};
  std::string mode = "full";
  double price = -1.0;
  std::vector<int> only;
};

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorKind::ConfigError, message); }

/// "auto" follows the m^(-1/4) schedule, pulled inside the feasible range
/// for small m.
double resolve_parameter(const std::string& text, int m, double limit, const char* name) {
  if (text == "auto") {
    const double s = schedule_parameter(m);
    return s < limit ? s : 0.5 * limit;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    invalid(std::string("--") + name + " must be a number or 'auto', got '" + text + "'");
  }
}

std::vector<double> parse_slash_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '/')) out.push_back(std::stod(part));
  return out;
}

/// kind:key=value,key=value with '/'-separated lists, e.g. pareto:a=2 or
/// three_point:points=0/1/2,probs=0.25/0.5/0.25.
MemberDist parse_member(const std::string& text, const MeanMadSpec& spec) {
  const auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  std::replace(kind.begin(), kind.end(), '-', '_');
  std::vector<std::pair<std::string, std::string>> fields;
  if (colon != std::string::npos) {
    std::stringstream in(text.substr(colon + 1));
    std::string part;
    while (std::getline(in, part, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) invalid("--member field '" + part + "' lacks '='");
      fields.emplace_back(part.substr(0, eq), part.substr(eq + 1));
    }
  }
  const auto field = [&](const std::string& key) -> std::string {
    for (const auto& [k, v] : fields) {
      if (k == key) return v;
    }
    invalid("--member " + kind + " needs " + key + "=...");
  };
  try {
    if (kind == "two_point") return make_member(make_two_point(spec, std::stod(field("alpha"))));
    if (kind == "pareto") return make_pareto_member(spec, std::stod(field("a")));
    if (kind == "three_point") {
      const auto points = parse_slash_list(field("points"));
      const auto probs = parse_slash_list(field("probs"));
      if (points.size() != 3 || probs.size() != 3) invalid("--member three_point needs 3 points and 3 probs");
      return make_three_point_member(spec, {points[0], points[1], points[2]}, {probs[0], probs[1], probs[2]});
    }
  } catch (const std::invalid_argument&) {
    invalid("--member '" + text + "' has a non-numeric value");
  }
  invalid("--member kind '" + kind + "' is not one of two_point, three_point, pareto");
}

SolverOptions solver_options(const Settings& s) {
  SolverOptions o;
  o.alpha_grid = s.alpha_grid;
  o.price_grid = s.price_grid;
  o.threads = s.threads;
  return o;
}

json saddle_json(const MeanMadSpec& spec, const std::string& objective, const SaddleReport& r) {
  return {{"mu", spec.mu()},       {"d", spec.d()},
          {"m", r.m},              {"objective", objective},
          {"value", r.value},      {"price", r.price},
          {"alpha", r.alpha},      {"one_minus_alpha", r.one_minus_alpha},
          {"lower", r.lower},      {"upper", r.upper},
          {"grid_value", r.grid_value}};
}

void run_saddle(const Settings& s, const MeanMadSpec& spec, bool minimax, std::ostream& out) {
  const auto options = solver_options(s);
  const std::string objective = minimax ? "minimax" : "maximin";
  json rows = json::array();
  if (s.format == "csv") write_saddle_csv_header(out);
  for (int m : s.m) {
    const auto r = minimax ? minimax_bundling_value(spec, m, options) : maximin_bundling_value(spec, m, options);
    if (s.format == "csv") {
      write_saddle_csv_row(out, spec, objective, r);
    } else {
      rows.push_back(saddle_json(spec, objective, r));
    }
  }
  if (s.format == "json") out << rows.dump(2) << '\n';
}

struct StudyRow {
  int m;
  double eps;
  double gamma;
  std::string objective;
  std::string mode;
  double value;
  double lower;
  double upper;
};

void emit_study(const Settings& s, const MeanMadSpec& spec, const std::vector<StudyRow>& rows, std::ostream& out) {
  if (s.format == "csv") {
    write_study_csv_header(out);
    for (const auto& r : rows) {
      write_study_csv_row(out, spec, r.m, r.eps, r.gamma, r.objective, r.mode, r.value, r.lower, r.upper);
    }
    return;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"mu", spec.mu()},
                   {"d", spec.d()},
                   {"m", r.m},
                   {"eps", r.eps},
                   {"gamma", r.gamma},
                   {"objective", r.objective},
                   {"mode", r.mode},
                   {"value", r.value},
                   {"lower", r.lower},
                   {"upper", r.upper}});
  }
  out << arr.dump(2) << '\n';
}

void run_ratio(const Settings& s, const MeanMadSpec& spec, std::ostream& out) {
  const auto targets = asymptotic_targets(spec);
  const double limit = 1.0 - spec.min_alpha();
  std::vector<StudyRow> rows;
  for (int m : s.m) {
    const double eps = resolve_parameter(s.eps, m, limit, "eps");
    const double gamma = resolve_parameter(s.gamma, m, 1.0, "gamma");
    const auto chain = ratio_bound_chain(spec, m, eps);
    rows.push_back({m, eps, chain.gamma, "ratio_bound", "closed_form", targets.ratio_limit, chain.lower, chain.upper});
    const auto emp = ratio_empirical(spec, m, solver_options(s), gamma);
    rows.push_back({m, eps, gamma, "ratio_empirical", to_string(emp.mode), emp.value, emp.lower, emp.upper});
  }
  emit_study(s, spec, rows, out);
}

void run_regret(const Settings& s, const MeanMadSpec& spec, std::ostream& out) {
  const auto targets = asymptotic_targets(spec);
  const double limit = 1.0 - spec.min_alpha();
  std::vector<StudyRow> rows;
  for (int m : s.m) {
    const double eps = resolve_parameter(s.eps, m, limit, "eps");
    const double gamma = resolve_parameter(s.gamma, m, 1.0, "gamma");
    const auto chain = regret_bound_chain(spec, m, eps, gamma);
    rows.push_back({m, eps, gamma, "regret_bound", "closed_form", targets.regret_limit, chain.lower, chain.upper});
    const auto options = solver_options(s);
    const auto emp = regret_empirical(spec, m, options, gamma, s.price);
    rows.push_back({m, eps, gamma, "regret_empirical", to_string(emp.mode), emp.value, emp.lower, emp.upper});
    if (s.price < 0.0) {
      const auto fixed = regret_empirical(spec, m, options, gamma, epsilon_star_price(spec, m, eps));
      rows.push_back(
          {m, eps, gamma, "regret_at_robust_price", to_string(fixed.mode), fixed.value, fixed.lower, fixed.upper});
    }
  }
  emit_study(s, spec, rows, out);
}

void run_concentration(const Settings& s, const MeanMadSpec& spec, std::ostream& out) {
  if (!s.seed) invalid("concentration needs --seed (Monte Carlo runs must be reproducible)");
  std::vector<MemberDist> members;
  for (const auto& text : s.members) members.push_back(parse_member(text, spec));
  if (members.empty()) members.push_back(make_member(make_two_point(spec, std::max(0.5, spec.min_alpha()))));
  const double limit = 1.0 - spec.min_alpha();
  json rows = json::array();
  if (s.format == "csv") out << "mu,d,m,eps,t,f,threshold,bound,n,seed,empirical,standard_error,pass\n";
  for (int m : s.m) {
    const double eps = resolve_parameter(s.eps, m, limit, "eps");
    const auto r = concentration_check_mc(members, m, eps, s.n, *s.seed, s.threads, s.optimize_t);
    if (s.format == "csv") {
      const auto& c = r.certificate;
      out << format_double(c.mu) << ',' << format_double(c.d) << ',' << m << ',' << format_double(c.eps) << ','
          << format_double(c.t) << ',' << format_double(c.f) << ',' << format_double(c.threshold()) << ','
          << format_double(c.bound) << ',' << r.n << ',' << r.seed << ',' << format_double(r.empirical) << ','
          << format_double(r.standard_error) << ',' << (r.pass ? "true" : "false") << '\n';
    } else {
      json row = r;
      json member_list = json::array();
      for (const auto& member : members) member_list.push_back(member);
      row["members"] = member_list;
      rows.push_back(row);
    }
  }
  if (s.format == "json") out << rows.dump(2) << '\n';
}

void run_xi(const Settings& s, const MeanMadSpec& spec, std::ostream& out) {
  const auto xi = xi_gap(spec);
  if (s.format == "json") {
    json j = xi;
    j["mu"] = spec.mu();
    j["d"] = spec.d();
    out << j.dump(2) << '\n';
    return;
  }
  out << "mu,d,gamma,tau0,xi0,xi1,xi,lambda_argmin,tail_bound\n"
      << format_double(spec.mu()) << ',' << format_double(spec.d()) << ',' << format_double(xi.gamma) << ','
      << format_double(xi.tau0) << ',' << format_double(xi.xi0) << ',' << format_double(xi.xi1) << ','
      << format_double(xi.xi) << ',' << format_double(xi.lambda_argmin) << ',' << format_double(xi.tail_bound)
      << '\n';
}

std::string menu_text(const MenuMechanism& menu) {
  std::string text;
  for (const auto& e : menu.entries()) {
    if (e.bundle == 0) continue;
    if (!text.empty()) text += ';';
    std::string goods;
    for (int i = 0; i < 32; ++i) {
      if ((e.bundle >> i) & 1U) goods += (goods.empty() ? "" : "+") + std::to_string(i);
    }
    text += goods + ':' + format_double(e.price);
  }
  return text;
}

void run_opt(const Settings& s, const MeanMadSpec& spec, std::ostream& out) {
  OptMode mode;
  if (s.mode == "full") {
    mode = OptMode::Full;
  } else if (s.mode == "symmetric") {
    mode = OptMode::Symmetric;
  } else {
    invalid("--mode must be full or symmetric, got '" + s.mode + "'");
  }
  std::vector<TwoPointDist> dists;
  for (double a : s.alpha) dists.push_back(make_two_point(spec, a));
  json rows = json::array();
  if (s.format == "csv") out << "m,mode,revenue,truthful,menu\n";
  for (int m : s.m) {
    const auto r = opt_deterministic(dists, m, mode);
    const bool truthful = verify_truthful(r.tables, BidLattice(dists, m)).ok;
    if (s.format == "csv") {
      out << m << ',' << s.mode << ',' << format_double(r.revenue) << ',' << (truthful ? "true" : "false") << ','
          << menu_text(r.witness) << '\n';
    } else {
      json witness = r.witness;
      rows.push_back({{"m", m}, {"mode", s.mode}, {"revenue", r.revenue}, {"truthful", truthful}, {"witness", witness}});
    }
  }
  if (s.format == "json") out << rows.dump(2) << '\n';
}

int run_verify(const Settings& s, std::ostream& out) {
  AcceptanceOptions options;
  options.threads = s.threads;
  if (s.seed) options.seed = *s.seed;
  options.mc_samples = s.n;
  options.only = s.only;
  bool ok = true;
  json rows = json::array();
  for (const auto& r : run_acceptance(options)) {
    ok = ok && r.pass;
    if (s.format == "json") {
      rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    } else {
      out << format_result(r) << '\n';
    }
  }
  if (s.format == "json") out << rows.dump(2) << '\n';
  return ok ? kExitOk : kExitAcceptance;
}

std::string env_name(const std::string& flag) {
  std::string name = "RBL_";
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust bundle pricing under mean-MAD ambiguity"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  Settings s;

  const auto opt = [&](const std::string& name, auto& target, const std::string& help) {
    return app.add_option("--" + name, target, help)->envname(env_name(name));
  };
  opt("mu", s.mu, "Mean of each valuation");
  opt("d", s.d, "Mean absolute deviation of each valuation");
  opt("m", s.m, "Number of goods; comma-separated ascending list")->delimiter(',');
  opt("eps", s.eps, "Robust-price parameter, or 'auto' for m^(-1/4)");
  opt("gamma", s.gamma, "Chebyshev parameter, or 'auto' for m^(-1/4)");
  opt("alpha-grid", s.alpha_grid, "Nature's grid size over 1 - alpha");
  opt("price-grid", s.price_grid, "Seller's price grid size");
  opt("seed", s.seed, "Random seed (required for Monte Carlo)");
  opt("out", s.out, "Output file (default: stdout)");
  opt("format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  opt("threads", s.threads, "Worker threads, 0 = all cores");
  opt("member", s.members, "Member law, e.g. pareto:a=2 (repeatable)");
  opt("n", s.n, "Monte Carlo sample count");
  opt("alpha", s.alpha, "Low-point masses for opt-oracle (1 or m values)")->delimiter(',');
  opt("mode", s.mode, "opt-oracle enumeration: full or symmetric");
  opt("price", s.price, "Fixed bundle price for regret (default: optimize)");
  opt("only", s.only, "verify: run only these criteria")->delimiter(',');
  app.add_flag("--optimize-t", s.optimize_t, "Minimize f over the truncation level")->envname("RBL_OPTIMIZE_T");
  app.set_config("--config", "", "Key = value settings file; flags and RBL_* variables take precedence");
  app.config_formatter(std::make_shared<KeyValueConfig>(&app));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"maximin", "Seller-first robust bundling value per m"},
      {"minimax", "Nature-first robust bundling value per m"},
      {"ratio", "Ratio objective: bound chain and empirical value"},
      {"regret", "Regret objective: bound chain and empirical value"},
      {"concentration", "Monte Carlo check of the one-sided concentration bound"},
      {"xi", "Certified minimax gap constants for mu < d < 2 mu"},
      {"opt-oracle", "Optimal deterministic truthful mechanism for small m"},
      {"verify", "Run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::ostringstream buffer;
  int status = kExitOk;
  try {
    if (s.m.empty()) invalid("--m needs at least one value");
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      if (s.m[i] < 1) invalid("--m values must be >= 1");
      if (i > 0 && s.m[i] <= s.m[i - 1]) invalid("--m must be strictly ascending");
    }
    const MeanMadSpec spec(s.mu, s.d);
    if (command == "maximin" || command == "minimax") {
      run_saddle(s, spec, command == "minimax", buffer);
    } else if (command == "ratio") {
      run_ratio(s, spec, buffer);
    } else if (command == "regret") {
      run_regret(s, spec, buffer);
    } else if (command == "concentration") {
      run_concentration(s, spec, buffer);
    } else if (command == "xi") {
      run_xi(s, spec, buffer);
    } else if (command == "opt-oracle") {
      run_opt(s, spec, buffer);
    } else {
      status = run_verify(s, buffer);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }

  if (s.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(s.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << s.out << " for writing\n";
      return kExitValidation;
    }
    file << buffer.str();
  }
  return status;
}

}  // namespace rbl::cli
