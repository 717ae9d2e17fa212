#include "hahn/cli.hpp"

#include <cstdlib>
#include <optional>

#include "CLI11.hpp"
#include "hahn/error.hpp"
#include "hahn/preparation.hpp"
#include "hahn/puiseux.hpp"
#include "hahn/solvers.hpp"
#include "hahn/term.hpp"
#include "hahn/weierstrass.hpp"
#include "json.hpp"

namespace hahn {

namespace {

using json = nlohmann::ordered_json;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InsufficientPrecision:
    case ErrorKind::UndecidableAtPrecision:
    case ErrorKind::PrecisionStall:
    case ErrorKind::BudgetExhausted:
    case ErrorKind::DepthExhausted:
    case ErrorKind::IterationLimit:
    case ErrorKind::UndecidedSign:
      return 3;
    default:
      return 2;
  }
}

json error_json(std::string_view kind, std::string message) {
  std::string prefix = std::string(kind) + ": ";
  if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
  return json{{"error", {{"kind", kind}, {"message", message}}}};
}

struct Globals {
  std::string prec = "8";
  std::string lambda = "0";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> trials;
  std::size_t rank = 1;
  unsigned degree = 8;
  bool inv_zero_is_zero = false;
  std::string functions;
};

struct Ctx {
  Globals g;
  FunctionRegistry registry;
  std::ostream& out;
  std::ostream& err;

  GroupElement prec() const { return group_arg(g.prec); }
  GroupElement lambda() const { return group_arg(g.lambda); }
  // A single rational at rank > 1 means (q, 0, ..., 0).
  GroupElement group_arg(const std::string& text) const {
    if (g.rank > 1 && text.find(',') == std::string::npos) return GroupElement::scalar(parse_rational(text), g.rank);
    return parse_group_element(text, g.rank);
  }
  std::uint64_t trials(std::uint64_t fallback) const { return g.trials.value_or(fallback); }
  EvalOptions eval() const { return EvalOptions{g.inv_zero_is_zero}; }
  TermPtr term(const std::string& text) const { return parse_term(text, registry, g.rank); }

  SeriesPoly polynomial(const std::string& text) const {
    auto p = as_polynomial(*term(text), g.rank);
    if (!p) throw Error(ErrorKind::InvalidArgument, "'" + text + "' is not a polynomial in x");
    return *p;
  }

  std::vector<HahnSeries> centers(const std::string& list) const {
    std::vector<HahnSeries> C;
    std::size_t start = 0;
    while (start <= list.size()) {
      auto end = list.find(';', start);
      if (end == std::string::npos) end = list.size();
      auto piece = list.substr(start, end - start);
      if (piece.find_first_not_of(" \t") != std::string::npos) {
        auto s = parse_series(piece, g.rank);
        if (s.prec().is_finite())
          throw Error(ErrorKind::InvalidArgument, "centre '" + piece + "' must be exact");
        C.push_back(s.approx());
      }
      start = end + 1;
    }
    if (C.empty()) throw Error(ErrorKind::InvalidArgument, "empty centre list");
    return C;
  }

  int emit(const json& j) {
    out << j.dump(2) << "\n";
    return 0;
  }

  int report(const VerificationReport& rep, json extra = json::object()) {
    json j = std::move(extra);
    j["report"] = rep.to_json();
    out << j.dump(2) << "\n";
    err << rep.op << ": " << (rep.passed() ? "pass" : "FAIL") << ", " << rep.trials << " trials, "
        << rep.violations.size() << " stored violations\n";
    return rep.passed() ? 0 : 1;
  }
};

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("HAHN_FORGE_SEED");
  if (!s || !*s) return fallback;
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (s[used] != '\0') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("HAHN_FORGE_SEED is not an integer: ") + s);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact computations with truncated Hahn series", "hahn-forge"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--prec", g.prec, "target precision p/q")->capture_default_str();
  app.add_option("--lambda", g.lambda, "rv depth p/q")->capture_default_str();
  app.add_option("--seed", g.seed, "sampling seed (HAHN_FORGE_SEED overrides)")->capture_default_str();
  app.add_option("--trials", g.trials, "number of sampled trials");
  app.add_option("--rank", g.rank, "rank of the value group")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--degree", g.degree, "total degree bound D")->capture_default_str();
  app.add_flag("--inv-zero-is-zero", g.inv_zero_is_zero, "evaluate 1/0 as 0");
  app.add_option("--functions", g.functions, "file of extra analytic functions");

  std::string text, text2, at, with_c, schedule = "batch";
  std::vector<std::string> texts;
  std::size_t nvars = 1, var = 1;
  std::string center = "0", inner, outer, gtext = "0", htext = "0";
  bool unchecked = false;

  auto* eval = app.add_subcommand("eval", "evaluate a term at a point");
  eval->add_option("term", text)->required();
  eval->add_option("--at", at, "value of x")->required();

  auto* rv = app.add_subcommand("rv", "rv_lambda of a series");
  rv->add_option("series", text)->required();

  auto* divide = app.add_subcommand("divide", "Weierstrass division of g by f");
  divide->add_option("f", text)->required();
  divide->add_option("g", text2)->required();
  divide->add_option("--nvars", nvars)->capture_default_str();
  divide->add_option("--var", var, "distinguished variable, 1-based")->capture_default_str();
  divide->add_option("--schedule", schedule)->check(CLI::IsMember({"batch", "graded"}))->capture_default_str();

  auto* split = app.add_subcommand("split", "f = f1 + y2 f2 + Q (y1 y2 - y3)");
  split->add_option("f", text)->required();
  split->add_option("--nvars", nvars, "variables of f, the last two are y1 and y2")->capture_default_str();

  auto* hensel = app.add_subcommand("hensel", "root near -1 of 1 + y + a_2 y^2 + ...");
  hensel->add_option("coeffs", texts, "a_2 a_3 ...")->required();

  auto* implicit = app.add_subcommand("implicit", "r with f(x, r(x)) = 0, y the last variable");
  implicit->add_option("f", text)->required();
  implicit->add_option("--nvars", nvars)->capture_default_str();

  auto* roots = app.add_subcommand("roots", "Puiseux roots of a polynomial term, expanded to --prec");
  roots->add_option("poly", text)->required();

  auto* polygon = app.add_subcommand("polygon", "Newton polygon of a polynomial term");
  polygon->add_option("poly", text)->required();

  auto* prepare = app.add_subcommand("prepare", "find and verify a preparing set for a term");
  prepare->add_option("term", text)->required();

  auto* verify = app.add_subcommand("verify", "check that C prepares a term");
  verify->add_option("term", text)->required();
  verify->add_option("--with-C", with_c, "centres separated by ';'")->required();

  auto* jacobian = app.add_subcommand("jacobian", "probe v(f(x) - f(y)) - v(x - y) on balls");
  jacobian->add_option("term", text)->required();
  jacobian->add_option("--with-C", with_c, "centres separated by ';' (default: prepared set)");

  auto* unit = app.add_subcommand("probe-unit", "rv invariance of a strong unit on an annulus");
  unit->add_option("--inner-part", gtext, "g, a series in x1 without constant term, at inner/(x - center)")->capture_default_str();
  unit->add_option("--outer-part", htext, "h, a series in x1 without constant term, at (x - center)/outer")->capture_default_str();
  unit->add_option("--center", center)->capture_default_str();
  unit->add_option("--inner", inner)->required();
  unit->add_option("--outer", outer)->required();
  unit->add_flag("--unchecked", unchecked, "skip the coefficient norm check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    out << error_json("UsageError", e.what()).dump(2) << "\n";
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  Ctx ctx{g, {}, out, err};
  try {
    ctx.g.seed = env_seed(g.seed);
    if (!g.functions.empty()) ctx.registry.load_file(g.functions);
    const std::size_t rank = g.rank;

    if (*eval) {
      auto v = eval_term(*ctx.term(text), parse_series(at, rank), ctx.prec(), ctx.registry, ctx.eval());
      err << "value: " << to_string(v) << "\n";
      return ctx.emit({{"value", to_string(v)}});
    }
    if (*rv) {
      auto r = rv_lambda(parse_series(text, rank), ctx.lambda());
      err << "rv: " << r.to_string() << "\n";
      return ctx.emit({{"rv", r.to_string()}});
    }
    if (*divide) {
      if (var < 1 || var > nvars) throw Error(ErrorKind::InvalidArgument, "--var must be in 1..--nvars");
      auto d = weierstrass_divide(parse_multiseries(text, nvars, rank), parse_multiseries(text2, nvars, rank),
                                  var - 1, g.degree, ctx.prec(),
                                  schedule == "graded" ? DivisionSchedule::graded : DivisionSchedule::batch);
      json R = json::array();
      for (const auto& r : d.R) R.push_back(to_string(r));
      err << "divide: quotient and " << d.R.size() << " remainder coefficients\n";
      return ctx.emit({{"Q", to_string(d.Q)}, {"R", R}});
    }
    if (*split) {
      if (nvars < 2) throw Error(ErrorKind::InvalidArgument, "split needs --nvars >= 2");
      auto s = strong_split(parse_multiseries(text, nvars, rank));
      err << "split: done\n";
      return ctx.emit({{"f1", to_string(s.f1)}, {"f2", to_string(s.f2)}, {"Q", to_string(s.Q)}});
    }
    if (*hensel) {
      std::vector<TruncatedSeries> a;
      for (const auto& c : texts) a.push_back(parse_series(c, rank));
      auto tr = hensel_root_traced(a, ctx.prec());
      err << "hensel: " << tr.residual_valuations.size() - 1 << " Newton steps\n";
      return ctx.emit({{"root", to_string(tr.root)},
                       {"residual_valuation", tr.residual_valuations.back().to_string()}});
    }
    if (*implicit) {
      auto r = implicit_series(parse_multiseries(text, nvars, rank), g.degree, ctx.prec());
      err << "implicit: done\n";
      return ctx.emit({{"series", to_string(r)}});
    }
    if (*roots) {
      json arr = json::array();
      auto rs = puiseux_roots(ctx.polynomial(text), ctx.prec());
      for (const auto& r : rs) arr.push_back(r.to_json());
      err << "roots: " << rs.size() << " branches\n";
      return ctx.emit({{"roots", arr}});
    }
    if (*polygon) {
      json arr = json::array();
      for (const auto& e : newton_polygon(ctx.polynomial(text)))
        arr.push_back({{"root_valuation", e.root_valuation.to_string()}, {"multiplicity", e.multiplicity}});
      err << "polygon: " << arr.size() << " edges\n";
      return ctx.emit({{"edges", arr}});
    }
    if (*prepare) {
      PrepareTermOptions opt;
      opt.trials = ctx.trials(500);
      opt.seed = ctx.g.seed;
      opt.eval = ctx.eval();
      try {
        auto r = prepare_term(ctx.term(text), ctx.lambda(), ctx.registry, opt);
        return ctx.report(r.report, {{"preparing_set", r.set.to_json()}});
      } catch (const BudgetExhausted& e) {
        json j = error_json(to_string(e.kind()), e.what());
        j["report"] = e.report().to_json();
        out << j.dump(2) << "\n";
        err << "prepare: budget exhausted\n";
        return 3;
      }
    }
    if (*verify) {
      auto f = term_evaluable(ctx.term(text), ctx.registry, ctx.eval());
      return ctx.report(verify_preparation(f, ctx.centers(with_c), ctx.lambda(), ctx.trials(5000), ctx.g.seed));
    }
    if (*jacobian) {
      auto t = ctx.term(text);
      std::vector<HahnSeries> C;
      if (with_c.empty()) {
        PrepareTermOptions opt;
        opt.seed = ctx.g.seed;
        opt.eval = ctx.eval();
        C = prepare_term(t, GroupElement(rank), ctx.registry, opt).set.centers();
      } else {
        C = ctx.centers(with_c);
      }
      json cj = json::array();
      for (const auto& c : C) cj.push_back(to_string(c));
      return ctx.report(jacobian_probe(term_evaluable(t, ctx.registry, ctx.eval()), C, ctx.trials(500), ctx.g.seed),
                        {{"C", cj}});
    }
    if (*unit) {
      auto c = ctx.centers(center);
      auto ri = ctx.centers(inner), ro = ctx.centers(outer);
      if (c.size() != 1 || ri.size() != 1 || ro.size() != 1)
        throw Error(ErrorKind::InvalidArgument, "annulus data must be single series");
      StrongUnit u{parse_multiseries(gtext, 1, rank), parse_multiseries(htext, 1, rank)};
      return ctx.report(strong_unit_probe(u, Annulus{c[0], ri[0], ro[0]}, ctx.lambda(), ctx.trials(1000),
                                          ctx.g.seed, !unchecked));
    }
  } catch (const Error& e) {
    out << error_json(to_string(e.kind()), e.what()).dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    out << error_json("InternalError", e.what()).dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace hahn
