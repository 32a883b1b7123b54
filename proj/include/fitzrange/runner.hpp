#pragma once

// Executes a scenario and renders its report as JSON and as text tables.

#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "fitzrange/random.hpp"
#include "fitzrange/scenario.hpp"

namespace fitzrange {

/// Command-line overrides; unset fields fall back to the scenario, then to
/// FITZRANGE_BOX / FITZRANGE_GRID_N, then to the built-in defaults.
struct RunOptions {
  std::optional<int> grid_n;
  std::optional<double> box;
  std::optional<double> tol;  // grid-backed tolerance
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  Json report;
  std::string text;
  bool disagreement = false;
};

namespace detail {

inline std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

inline std::string fmt(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os << std::setprecision(6) << (v == 0.0 ? 0.0 : v);
  return os.str();
}
inline std::string fmt(ExtReal v) { return fmt(v.value()); }

inline std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

inline std::string fmt_point(const std::optional<Point2>& z) {
  if (!z) return "-";
  return "(" + fmt((*z)[0]) + ", " + fmt((*z)[1]) + ")";
}

inline RepresentativeKind parse_kind(const std::optional<std::string>& s) {
  return s && *s == "fitzpatrick" ? RepresentativeKind::kFitzpatrick : RepresentativeKind::kFenchel;
}

inline VerifyConfig config_for(const Scenario& s, const RunOptions& o) {
  VerifyConfig c;
  if (const auto b = env("FITZRANGE_BOX")) {
    try {
      c.grid.box = std::stod(*b);
    } catch (const std::exception&) {
      throw ScenarioError("$FITZRANGE_BOX", "malformed number '" + *b + "'");
    }
  }
  if (const auto n = env("FITZRANGE_GRID_N")) {
    try {
      c.grid.n = std::stoi(*n);
    } catch (const std::exception&) {
      throw ScenarioError("$FITZRANGE_GRID_N", "malformed integer '" + *n + "'");
    }
  }
  if (s.box) c.grid.box = *s.box;
  if (s.grid_n) c.grid.n = *s.grid_n;
  if (s.tol_exact) c.tol_exact = *s.tol_exact;
  if (s.tol_grid) c.tol_grid = *s.tol_grid;
  if (o.box) c.grid.box = *o.box;
  if (o.grid_n) c.grid.n = *o.grid_n;
  if (o.tol) c.tol_grid = *o.tol;
  if (!(c.grid.box > 0) || !std::isfinite(c.grid.box)) throw ScenarioError("/grid/box", "box must be positive");
  if (c.grid.n < 3) throw ScenarioError("/grid/n", "grid needs at least 3 nodes");
  c.rep_S = parse_kind(s.rep_S);
  c.rep_T = parse_kind(s.rep_T);
  return c;
}

inline Json config_json(const VerifyConfig& c, std::optional<std::uint64_t> seed) {
  Json j{{"grid", {{"box", c.grid.box}, {"n", c.grid.n}}},
         {"tol", {{"exact", c.tol_exact}, {"grid", c.tol_grid}}},
         {"representatives", {{"S", to_string(c.rep_S)}, {"T", to_string(c.rep_T)}}}};
  if (seed) j["seed"] = *seed;
  return j;
}

inline std::string range_table(const std::vector<RangeCheckReport>& rs) {
  std::ostringstream os;
  os << pad("p*", 10) << pad("verdict", 26) << pad("value", 12) << pad("target", 12) << pad("witness (u*, u)", 24)
     << "oracle\n";
  for (const auto& r : rs) {
    os << pad(fmt(r.ps), 10) << pad(to_string(r.verdict), 26) << pad(fmt(r.value), 12) << pad(fmt(r.target), 12)
       << pad(fmt_point(r.witness), 24) << (r.oracle ? "in range" : "not in range") << "\n";
  }
  return os.str();
}

inline std::string sweep_line(const SweepReport& s) {
  int yes = 0;
  for (const auto& r : s.reports) yes += r.verdict == Verdict::kYes;
  std::ostringstream os;
  os << (s.all_yes ? "YES on grid" : "not YES on grid") << " (" << yes << "/" << s.reports.size() << ")";
  return os.str();
}

inline std::string header(const std::string& task, const VerifyConfig& c) {
  std::ostringstream os;
  os << "task " << task << "  representatives S: " << to_string(c.rep_S) << ", T: " << to_string(c.rep_T)
     << "  grid " << c.grid.n << " on [" << fmt(-c.grid.box) << ", " << fmt(c.grid.box) << "]\n";
  return os.str();
}

inline std::string disagreement_line(bool d) { return d ? "DISAGREEMENT with the oracle\n" : "no disagreement\n"; }

}  // namespace detail

/// Runs the scenario's task. Verification errors propagate as exceptions;
/// input errors are ScenarioError.
inline RunResult run(const Scenario& s, const RunOptions& o = {}) {
  const VerifyConfig cfg = detail::config_for(s, o);
  const ScenarioEnv env(s);
  const std::optional<std::uint64_t> seed = o.seed ? o.seed : s.seed;
  RunResult out;
  out.report = {{"schema", kReportSchema},
                {"task", s.task},
                {"config", detail::config_json(cfg, seed)},
                {"scenario", Json::parse(render_scenario(s))}};
  std::ostringstream text;
  text << detail::header(s.task, cfg);
  const double p = s.p.value_or(0.0);
  auto S = [&] { return env.op(s.roles.at("S"), "/S"); };
  auto T = [&] { return env.op(s.roles.at("T"), "/T"); };

  if (s.task == "range") {
    const auto r = s.shifted ? range_membership_shifted(S(), T(), p, *s.ps, cfg) : range_membership(S(), T(), p, *s.ps, cfg);
    out.report["result"] = to_json(r);
    out.disagreement = !r.agrees();
    text << "p = " << detail::fmt(p) << (s.shifted ? "  (tilt on f_S*)" : "") << "\n" << detail::range_table({r});
    text << "gap " << detail::fmt(r.gap) << "  route " << to_string(r.route) << "  " << r.reason << "\n";
  } else if (s.task == "sweep") {
    const auto r = surjectivity_sweep(S(), T(), p, s.ps_grid, cfg);
    out.report["result"] = to_json(r);
    out.disagreement = r.disagreement;
    text << "p = " << detail::fmt(p) << "\n" << detail::range_table(r.reports);
    text << "surjectivity " << detail::sweep_line(r) << "\noracle R(S(p+.)+T) = " << r.oracle_range.to_string() << "\n";
  } else if (s.task == "zero" || s.task == "total-duality") {
    const auto S0 = S(), T0 = T();
    const auto z = zero_in_range(S0, T0, cfg);
    out.report["result"] = {{"range", to_json(z.range)},
                            {"total_duality", z.total_duality ? to_json(*z.total_duality) : Json(nullptr)}};
    out.disagreement = !z.range.agrees() || (z.total_duality && !z.total_duality->ok());
    if (s.task == "total-duality" && !z.total_duality) {
      out.report["result"]["reason"] = "0 is not certified in R(S+T); total duality does not apply";
      // The oracle placing 0 in the range while the check cannot run is a
      // theorem disagreement.
      out.disagreement = out.disagreement || z.range.oracle;
    }
    text << "0 in R(S+T): " << to_string(z.range.verdict) << "  value " << detail::fmt(z.range.value) << "  oracle "
         << (z.range.oracle ? "in range" : "not in range") << "\n";
    if (z.total_duality) {
      const auto& t = *z.total_duality;
      text << "primal " << detail::fmt(t.primal_value) << " at (x, x*) = " << detail::fmt_point(t.primal_point)
           << "\ndual   " << detail::fmt(t.dual_value) << " at (u*, u) = " << detail::fmt_point(t.dual_point)
           << "\nf_S - c = " << detail::fmt(t.eq_S) << ", hat f_T + c = " << detail::fmt(t.eq_T)
           << "\ntotal duality " << (t.ok() ? "HOLDS" : "FAILS") << "\n";
    }
  } else if (s.task == "single") {
    const auto r = single_surjectivity(S(), s.ps_grid, cfg);
    out.report["result"] = to_json(r);
    out.disagreement = r.disagreement;
    text << detail::pad("p*", 10) << detail::pad("verdict", 26) << detail::pad("reduced", 12) << detail::pad("x", 12)
         << detail::pad("lsc", 6) << "oracle\n";
    for (const auto& e : r.entries) {
      text << detail::pad(detail::fmt(e.ps), 10) << detail::pad(to_string(e.verdict), 26)
           << detail::pad(detail::fmt(e.reduced), 12) << detail::pad(e.witness ? detail::fmt(*e.witness) : "-", 12)
           << detail::pad(e.lsc ? "yes" : "no", 6) << (e.oracle ? "in range" : "not in range") << "\n";
    }
    text << "oracle R(S) = " << r.oracle_range.to_string() << "\n";
  } else if (s.task == "normal-cone") {
    const auto r = normal_cone_driver(S(), s.interval->first, s.interval->second, p, s.ps_grid, cfg);
    out.report["result"] = to_json(r);
    out.report["result"]["interval"] = Json::array({to_json(s.interval->first), to_json(s.interval->second)});
    out.disagreement = r.disagreement;
    text << "U = [" << detail::fmt(s.interval->first) << ", " << detail::fmt(s.interval->second) << "]  p = "
         << detail::fmt(p) << "\n"
         << detail::range_table(r.reports) << "surjectivity " << detail::sweep_line(r)
         << "\noracle R(S(p+.)+N_U) = " << r.oracle_range.to_string() << "\n";
  } else if (s.task == "subdiff") {
    const auto f = env.convex_function(s.roles.at("f"), "/f");
    const auto g = env.convex_function(s.roles.at("g"), "/g");
    const auto r = subdiff_driver(f, g, p, s.ps_grid, cfg);
    out.report["result"] = to_json(r);
    out.disagreement = r.disagreement;
    text << "p = " << detail::fmt(p) << "  dom f meets p + dom g: " << (r.hypothesis ? "yes" : "no") << "\n";
    text << detail::pad("p*", 10) << detail::pad("verdict", 26) << detail::pad("primal", 10) << detail::pad("dual", 10)
         << detail::pad("bivariate", 26) << "oracle\n";
    for (const auto& e : r.entries) {
      text << detail::pad(detail::fmt(e.ps), 10) << detail::pad(to_string(e.verdict), 26)
           << detail::pad(e.primal.holds ? "holds" : "fails", 10) << detail::pad(e.dual.holds ? "holds" : "fails", 10)
           << detail::pad(e.bivariate ? to_string(*e.bivariate) : "-", 26) << (e.oracle ? "in range" : "not in range")
           << "\n";
    }
    text << "oracle R(df(p+.)+dg) = " << r.oracle_range.to_string() << "\n";
  } else if (s.task == "conditions") {
    const auto r = classical_conditions(S(), T(), s.ps_grid, cfg, p);
    out.report["result"] = to_json(r);
    out.disagreement = r.rc.disagreement || r.rc_bar.disagreement || !r.rc_tilde.agrees() || !r.chain_consistent();
    auto row = [&](const std::string& name, const std::string& status, const std::string& extra = "") {
      text << detail::pad(name, 44) << detail::pad(status, 20) << extra << "\n";
    };
    row("condition", "status");
    row("dom f_T = R x R", to_string(r.dom_fT_whole));
    row("dom f_S - dom hat f_T = R x R", to_string(r.difference_whole),
        r.difference ? "set " + r.difference->to_string() : "");
    row("(0,0) in sqri(dom f_S - dom hat f_T)", to_string(r.sqri),
        r.difference ? "ri " + relative_interior_string(*r.difference) : "");
    row("(0,0) in core(co G(S) - co G(-T))", to_string(r.core), r.core_set ? "set " + r.core_set->to_string() : "");
    row("(RC) at p = " + detail::fmt(p), detail::sweep_line(r.rc));
    row("(RC-bar)", detail::sweep_line(r.rc_bar));
    row("(RC-tilde)", to_string(r.rc_tilde.verdict));
    row("oracle R(S+T)", r.rc_bar.oracle_range.to_string());
    text << "condition hierarchy " << (r.chain_consistent() ? "consistent" : "VIOLATED") << "\n";
  } else {  // fuzz
    Rng rng(*seed);
    const int count = s.instances.value_or(200);
    int yes = 0, no = 0, boundary = 0, resolution = 0, disagreements = 0, td_checked = 0, td_ok = 0;
    Json entries = Json::array();
    for (int i = 0; i < count; ++i) {
      const auto S0 = random_maximal_graph(rng);
      const auto T0 = random_maximal_graph(rng);
      const double pi = rng.quantized(-3, 3, 0.25), psi = rng.quantized(-4, 4, 0.25);
      const auto r = range_membership(S0, T0, pi, psi, cfg);
      switch (r.verdict) {
        case Verdict::kYes: ++yes; break;
        case Verdict::kNo: ++no; break;
        case Verdict::kInconclusiveBoundary: ++boundary; break;
        case Verdict::kInconclusiveResolution: ++resolution; break;
      }
      Json e{{"instance", i}, {"S", to_json(S0)}, {"T", to_json(T0)}, {"range", to_json(r)}};
      if (!r.agrees()) ++disagreements;
      if (sum_range_oracle(S0, T0, 0.0).contains(0.0)) {
        ++td_checked;
        try {
          const auto t = total_duality_check(S0, T0, cfg);
          td_ok += t.ok();
          e["total_duality"] = to_json(t);
        } catch (const std::domain_error& err) {
          e["total_duality"] = {{"ok", false}, {"reason", err.what()}};
        }
      }
      entries.push_back(std::move(e));
    }
    const double rate = static_cast<double>(boundary) / count;
    out.report["result"] = {{"instances", entries},
                            {"summary",
                             {{"count", count},
                              {"yes", yes},
                              {"no", no},
                              {"inconclusive_boundary", boundary},
                              {"inconclusive_resolution", resolution},
                              {"boundary_rate", rate},
                              {"disagreements", disagreements},
                              {"total_duality_checked", td_checked},
                              {"total_duality_ok", td_ok}}}};
    out.disagreement = disagreements > 0 || td_ok != td_checked;
    text << "seed " << *seed << "  instances " << count << "\n"
         << "YES " << yes << "  NO " << no << "  INCONCLUSIVE-boundary " << boundary << "  INCONCLUSIVE-resolution "
         << resolution << "\n"
         << "boundary rate " << detail::fmt(rate) << "\n"
         << "oracle disagreements " << disagreements << "\n"
         << "total duality " << td_ok << "/" << td_checked << " instances with 0 in R(S+T)\n";
  }
  out.report["disagreement"] = out.disagreement;
  text << detail::disagreement_line(out.disagreement);
  std::istringstream lines(text.str());
  for (std::string line; std::getline(lines, line);) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.text += line + "\n";
  }
  return out;
}

}  // namespace fitzrange
