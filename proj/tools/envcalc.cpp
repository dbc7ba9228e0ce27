// envcalc: symbolic checks for smooth envelopes of C(M) (x) C(N).
//
// Exit status: 0 when everything passes, 1 when a check fails, 2 on usage
// or parse errors.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "envcalc/calculus.hpp"
#include "envcalc/numeric.hpp"
#include "envcalc/parser.hpp"
#include "envcalc/session.hpp"
#include "envcalc/suites.hpp"

namespace {

using namespace envcalc;

constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Common {
  std::string model = "2,2";
  std::uint64_t seed = 42;
  std::size_t samples = 64;
  double tol = 1e-9;
  std::string session_file;
  std::vector<std::string> defines;
};

ProductModel parse_model(const std::string& text) {
  unsigned m = 0, n = 0;
  char comma = 0;
  std::istringstream is(text);
  if (!(is >> m >> comma >> n) || comma != ',' || !is.eof() || m == 0 || n == 0) {
    throw std::invalid_argument("--model expects 'm,n' with positive integers, got '" + text + "'");
  }
  return ProductModel(m, n);
}

sym::OracleConfig oracle_config(const Common& c) {
  sym::OracleConfig cfg;
  cfg.seed = c.seed;
  cfg.samples = c.samples;
  cfg.tolerance = c.tol;
  cfg.validate();
  return cfg;
}

cli::Session open_session(const Common& c) {
  cli::Session s(parse_model(c.model));
  s.oracle = oracle_config(c);
  if (!c.session_file.empty()) {
    std::ifstream in(c.session_file);
    if (!in) throw std::invalid_argument("cannot read session file '" + c.session_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    s.load(buf.str());
  }
  for (const auto& d : c.defines) s.declare(d);
  return s;
}

void add_common(CLI::App* app, Common& c, bool with_session) {
  app->add_option("--model", c.model, "Dimensions m,n of M and N")->capture_default_str();
  app->add_option("--seed", c.seed, "Seed for sampling and generators")->envname("ENVCALC_SEED")->capture_default_str();
  app->add_option("--samples", c.samples, "Sample points per equality check")->capture_default_str();
  app->add_option("--tol", c.tol, "Scaled tolerance of the equality oracle")->capture_default_str();
  if (with_session) {
    app->add_option("--session", c.session_file, "Session file with declarations")->check(CLI::ExistingFile);
    app->add_option("--define,-D", c.defines, "Extra declaration, e.g. 'f := exp(x1*y1)'");
  }
}

std::vector<sym::Valuation> seeded_points(const ProductModel& model, std::uint64_t seed, std::size_t count) {
  oracle::SampleStream pts(oracle::derive_seed(seed, "cli"), {}, model.coordinates());
  std::vector<sym::Valuation> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(pts.next());
  return out;
}

std::string coordinates_text(const ProductModel& model, const sym::Valuation& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < model.dimension(); ++i) os << (i ? ", " : "") << p.get(model.coordinate(i));
  return os.str() + ')';
}

// --- subcommands ----------------------------------------------------------------

int run_check(const Common& c, std::vector<std::string> names, const std::string& format, bool serial) {
  suites::Settings settings;
  settings.model = parse_model(c.model);
  settings.seed = c.seed;
  settings.oracle = oracle_config(c);
  settings.execution = serial ? Execution::Serial : Execution::Parallel;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = suites::suite_names();
  const auto known = suites::suite_names();
  for (const auto& name : names) {
    if (std::find(known.begin(), known.end(), name) == known.end()) throw suites::UnknownSuite(name);
  }

  std::vector<suites::Report> reports;
  for (const auto& name : names) {
    reports.push_back(suites::run_suite(name, settings));
    std::cerr << name << ": " << reports.back().seconds << " s\n";
  }
  std::cout << (format == "json" ? suites::render_json(reports) : suites::render_text(reports));
  for (const auto& r : reports) {
    if (!r.passed()) return kFailure;
  }
  return 0;
}

int run_lift(const Common& c, const std::string& field, const std::string& function, std::size_t points) {
  const cli::Session s = open_session(c);
  const auto& x = s.derivation(field);
  const auto& f = s.function(function);
  const auto result = apply_derivation_env(s.model(), x, f);
  std::cout << "nabla_" << field << " " << function << " = " << result.flat() << "\n";
  std::cout << "  pair: " << result << "\n";

  std::vector<sym::Expr> direction;
  for (const auto& v : x.values) direction.push_back(v.flat());
  const auto coords = s.model().coordinates();
  double worst = 0;
  std::size_t used = 0;
  for (const auto& p : seeded_points(s.model(), c.seed, points)) {
    const auto fd = oracle::directional_fd(f.flat(), direction, coords, p);
    const double sym = result.evaluate(p);
    if (!fd || !std::isfinite(sym)) continue;
    worst = std::max(worst, oracle::fd_residual(sym, *fd));
    ++used;
  }
  const bool ok = worst <= 1e-5;
  std::cout << "  directional difference residual " << worst << " over " << used << " points: "
            << (ok ? "pass" : "fail") << "\n";
  return ok ? 0 : kFailure;
}

int run_differential(const Common& c, const std::string& function) {
  const cli::Session s = open_session(c);
  const auto& model = s.model();
  const auto& f = s.function(function);
  const OneFormEnv df = d_env(model, f);
  std::cout << "d " << function << ":\n";
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    std::cout << "  d" << model.coordinate(i).name() << ": " << df.coeffs[i].flat() << "\n";
  }
  const SmoothenedOneForm pre = phi_inverse(model, df);
  std::cout << "phi_inverse(d " << function << "):\n";
  if (pre.summands.empty()) std::cout << "  0\n";
  for (const auto& term : pre.summands) {
    std::size_t c_idx = 0;
    while (c_idx < term.form.coeffs.size() && term.form.coeffs[c_idx].is_zero()) ++c_idx;
    std::cout << "  (" << term.scalar.flat() << ") (x) d" << model.coordinate(c_idx).name() << "\n";
  }
  const auto round = equal_forms(phi(model, pre), df, s.oracle);
  const auto chain = equal_forms(normalize_form(model, pre), normalize_form(model, chain_preimage(model, f)), s.oracle);
  const std::string df_name = "d " + function;
  std::cout << "phi(phi_inverse(" << df_name << ")) = " << df_name << ": " << sym::to_string(round.verdict) << "\n";
  std::cout << "phi_inverse(" << df_name << ") = sum (dH/dti o a) (x) d a_i: " << sym::to_string(chain.verdict) << "\n";
  return round.holds() && chain.holds() ? 0 : kFailure;
}

sym::Valuation parse_point(const ProductModel& model, const std::string& text) {
  std::vector<double> values;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) values.push_back(std::stod(item));
  if (values.size() != model.dimension()) {
    throw std::invalid_argument("--at expects " + std::to_string(model.dimension()) + " comma-separated values");
  }
  sym::Valuation p;
  for (std::size_t i = 0; i < values.size(); ++i) p.set(model.coordinate(i), values[i]);
  return p;
}

int run_rank(const Common& c, const std::vector<std::string>& family_names, const std::vector<std::string>& at,
             std::size_t points) {
  const cli::Session s = open_session(c);
  std::vector<EnvelopeElement> family;
  for (const auto& name : family_names) family.push_back(s.function(name));
  std::vector<sym::Valuation> where;
  for (const auto& text : at) where.push_back(parse_point(s.model(), text));
  if (where.empty()) where = seeded_points(s.model(), c.seed, points);
  for (const auto& p : where) {
    std::cout << "rank at " << coordinates_text(s.model(), p) << ": " << point_cotangent_rank(s.model(), family, p)
              << "\n";
  }
  return 0;
}

int run_equal(const Common& c, const std::string& lhs, const std::string& rhs) {
  const ProductModel model = parse_model(c.model);
  const auto ctx = cli::VariableContext::product(model.m(), model.n());
  const auto r = sym::equal(cli::parse_expr(lhs, ctx), cli::parse_expr(rhs, ctx), oracle_config(c));
  std::cout << (r.holds() ? "pass: " : "fail: ") << sym::to_string(r.verdict) << (r.symbolic ? " (normal forms)" : "")
            << ", residual " << r.residual
            << " over " << r.samples << " samples\n";
  return r.holds() ? 0 : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic calculus on smooth envelopes of C(M) (x) C(N)"};
  app.require_subcommand(1);

  Common check_c, lift_c, diff_c, rank_c, equal_c;

  auto* check = app.add_subcommand("check", "Run property suites");
  add_common(check, check_c, false);
  std::vector<std::string> suite_list;
  std::string format = "text";
  bool serial = false;
  check->add_option("--suite", suite_list, "Suite to run (repeatable, default all)");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  check->add_flag("--serial", serial, "Run cases on one thread");

  auto* lift = app.add_subcommand("lift", "Apply the lifted derivation nabla_X to a function");
  add_common(lift, lift_c, true);
  std::string field, lift_fn;
  std::size_t lift_points = 20;
  lift->add_option("--field,-X", field, "Declared derivation")->required();
  lift->add_option("--function,-f", lift_fn, "Declared function")->required();
  lift->add_option("--points", lift_points, "Points for the directional difference check")->capture_default_str();

  auto* diff = app.add_subcommand("differential", "Print d f and its preimage under phi");
  add_common(diff, diff_c, true);
  std::string diff_fn;
  diff->add_option("--function,-f", diff_fn, "Declared function")->required();

  auto* rank = app.add_subcommand("rank", "Pointwise cotangent rank of a declared family");
  add_common(rank, rank_c, true);
  std::vector<std::string> family, at;
  std::size_t rank_points = 5;
  rank->add_option("--family", family, "Declared functions")->required()->delimiter(',');
  rank->add_option("--at", at, "Point as comma-separated coordinates x1..xm,y1..yn (repeatable)");
  rank->add_option("--points", rank_points, "Seeded points when --at is absent")->capture_default_str();

  auto* eq = app.add_subcommand("equal", "Compare two expressions with the equality oracle");
  add_common(eq, equal_c, false);
  std::string lhs, rhs;
  eq->add_option("lhs", lhs)->required();
  eq->add_option("rhs", rhs)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return run_check(check_c, suite_list, format, serial);
    if (*lift) return run_lift(lift_c, field, lift_fn, lift_points);
    if (*diff) return run_differential(diff_c, diff_fn);
    if (*rank) return run_rank(rank_c, family, at, rank_points);
    if (*eq) return run_equal(equal_c, lhs, rhs);
  } catch (const cli::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const suites::UnknownSuite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
