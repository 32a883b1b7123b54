#pragma once

// JSON forms of functions, operators, representatives and reports.

#include <json.hpp>

#include <stdexcept>
#include <string>

#include "fitzrange/verify.hpp"

namespace fitzrange {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "fitzrange-report/1";
inline constexpr const char* kScenarioSchema = "fitzrange-scenario/1";

inline Json to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}
inline Json to_json(ExtReal v) { return to_json(v.value()); }

/// Number or "inf" / "-inf"; throws std::invalid_argument otherwise.
inline double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw std::invalid_argument("expected a number or \"inf\", got " + j.dump());
}

inline Json to_json(const std::optional<Point2>& z) {
  if (!z) return nullptr;
  return Json::array({(*z)[0], (*z)[1]});
}

inline Json to_json(const SetOnLine& s) {
  Json out = Json::array();
  for (const auto& i : s.components()) {
    out.push_back({{"lo", to_json(i.lo.at)}, {"lo_closed", i.lo.closed}, {"hi", to_json(i.hi.at)},
                   {"hi_closed", i.hi.closed}});
  }
  return out;
}

// PLQ functions: {breakpoints, pieces: [{a,b,c} | "inf"], values}.

inline Json to_json(const PlqFunction& f) {
  Json pieces = Json::array(), values = Json::array();
  for (const auto& p : f.pieces()) {
    if (p.finite) pieces.push_back({{"a", p.q.a}, {"b", p.q.b}, {"c", p.q.c}});
    else pieces.push_back("inf");
  }
  for (auto v : f.values()) values.push_back(to_json(v));
  return {{"breakpoints", f.breakpoints()}, {"pieces", pieces}, {"values", values}};
}

inline PlqFunction plq_from_json(const Json& j) {
  std::vector<double> breaks;
  std::vector<Piece> pieces;
  std::vector<ExtReal> values;
  for (const auto& b : j.value("breakpoints", Json::array())) breaks.push_back(number_from_json(b));
  if (!j.contains("pieces")) throw std::invalid_argument("missing field \"pieces\"");
  for (const auto& p : j.at("pieces")) {
    if (p.is_string() && p.get<std::string>() == "inf") pieces.push_back(Piece::infinite());
    else pieces.push_back(Piece::quad(p.value("a", 0.0), p.value("b", 0.0), p.value("c", 0.0)));
  }
  for (const auto& v : j.value("values", Json::array())) values.push_back(number_from_json(v));
  return {breaks, pieces, values};
}

// Operators: the Minty segment list.

inline Json to_json(const MonotoneGraph& T) {
  Json segs = Json::array();
  for (const auto& g : T.segments()) {
    segs.push_back({{"m_lo", to_json(g.m_lo)},
                    {"m_hi", to_json(g.m_hi)},
                    {"m_ref", g.m_ref},
                    {"x_ref", g.x_ref},
                    {"dx", g.dx}});
  }
  return {{"segments", segs}};
}

/// Either {segments: [...]} or {vertices: [[x, s], ...], left: [dx, ds], right: [dx, ds]}.
inline MonotoneGraph graph_from_json(const Json& j) {
  if (j.contains("segments")) {
    std::vector<Segment> segs;
    for (const auto& s : j.at("segments")) {
      segs.push_back({number_from_json(s.at("m_lo")), number_from_json(s.at("m_hi")), number_from_json(s.at("m_ref")),
                      number_from_json(s.at("x_ref")), number_from_json(s.at("dx"))});
    }
    return MonotoneGraph(std::move(segs));
  }
  if (!j.contains("vertices")) throw std::invalid_argument("operator needs \"segments\" or \"vertices\"");
  std::vector<std::pair<double, double>> v;
  for (const auto& p : j.at("vertices")) v.emplace_back(number_from_json(p.at(0)), number_from_json(p.at(1)));
  auto dir = [&](const char* key) {
    const Json d = j.value(key, Json::array({0, 1}));
    return Direction{number_from_json(d.at(0)), number_from_json(d.at(1))};
  };
  return MonotoneGraph::polyline(v, dir("left"), dir("right"));
}

// Polyhedral pieces. A half-plane {a, b, c} reads a z1 + b z2 <= c.

inline Json to_json(const PolyhedralSet2D& s) {
  auto rows = [](const std::vector<HalfPlane>& hs) {
    Json out = Json::array();
    for (const auto& h : hs) out.push_back(Json::array({h.a, h.b, h.c}));
    return out;
  };
  if (s.is_empty()) return {{"empty", true}};
  return {{"inequalities", rows(s.inequalities())}, {"equalities", rows(s.equalities())}};
}

inline PolyhedralSet2D polyset_from_json(const Json& j) {
  if (j.value("empty", false)) return PolyhedralSet2D::empty();
  std::vector<HalfPlane> hs;
  for (const auto& r : j.value("inequalities", Json::array()))
    hs.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()});
  for (const auto& r : j.value("equalities", Json::array())) {
    const double a = r.at(0), b = r.at(1), c = r.at(2);
    hs.push_back({a, b, c});
    hs.push_back({-a, -b, -c});
  }
  return PolyhedralSet2D(hs);
}

inline Json to_json(const GridFn& g) {
  Json axes = Json::array(), values = Json::array();
  for (const auto& a : g.axes()) axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}});
  for (double v : g.values()) values.push_back(to_json(v));
  return {{"axes", axes}, {"values", values}};
}

inline GridFn grid_from_json(const Json& j) {
  std::vector<Axis> axes;
  for (const auto& a : j.at("axes")) axes.push_back({a.at("lo").get<double>(), a.at("hi").get<double>(), a.at("n").get<int>()});
  std::vector<double> values;
  for (const auto& v : j.at("values")) values.push_back(number_from_json(v));
  return GridFn(axes, std::move(values));
}

/// {tag, minorants | formula | grid, domain, arg_order, represents}. Exact
/// polyhedral forms are always written as minorants so that readers need no
/// closed-form evaluator.
inline Json to_json(const BivariateFn& h) {
  Json out{{"tag", h.tag()}, {"arg_order", to_string(h.arg_order())}, {"represents", h.represents()}};
  if (const auto p = h.polyhedral()) {
    Json mins = Json::array();
    for (const auto& a : p->pieces()) mins.push_back(Json::array({a.a, a.b, a.c}));
    out["tag"] = "polyhedral-max";
    out["minorants"] = mins;
    out["domain"] = to_json(p->domain());
    return out;
  }
  if (const auto* s = std::get_if<SeparableForm>(&h.rep())) {
    out["formula"] = {{"kind", "separable"}, {"first", to_json(s->first)}, {"second", to_json(s->second)}};
  } else if (const auto* f = std::get_if<FitzpatrickForm>(&h.rep())) {
    out["formula"] = {{"kind", f->hat ? "fitzpatrick-hat" : "fitzpatrick"}, {"graph", to_json(f->graph)}};
  } else {
    out["grid"] = to_json(std::get<GridFn>(h.rep()));
  }
  const Point2 t = h.tilt();
  if (t[0] != 0.0 || t[1] != 0.0) out["tilt"] = Json::array({t[0], t[1]});
  if (const auto d = h.domain()) out["domain"] = to_json(*d);
  return out;
}

inline BivariateFn bivariate_from_json(const Json& j) {
  const auto order_s = j.at("arg_order").get<std::string>();
  ArgOrder order;
  if (order_s == to_string(ArgOrder::kPrimalDual)) order = ArgOrder::kPrimalDual;
  else if (order_s == to_string(ArgOrder::kDualPrimal)) order = ArgOrder::kDualPrimal;
  else throw std::invalid_argument("unknown arg_order " + order_s);
  const std::string rep = j.value("represents", "");
  auto finish = [&](BivariateFn h) {
    if (j.contains("tilt")) h = h.tilted({j["tilt"].at(0).get<double>(), j["tilt"].at(1).get<double>()});
    return h;
  };
  if (j.contains("minorants")) {
    std::vector<AffinePiece> ps;
    for (const auto& m : j.at("minorants")) ps.push_back({m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>()});
    return {PolyhedralFn2D(ps, polyset_from_json(j.at("domain"))), order, rep};
  }
  if (j.contains("formula")) {
    const auto& f = j.at("formula");
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "separable")
      return finish({SeparableForm{plq_from_json(f.at("first")), plq_from_json(f.at("second"))}, order, rep});
    if (kind == "fitzpatrick" || kind == "fitzpatrick-hat")
      return finish({FitzpatrickForm{graph_from_json(f.at("graph")), kind == "fitzpatrick-hat"}, order, rep});
    throw std::invalid_argument("unknown formula kind " + kind);
  }
  return finish({grid_from_json(j.at("grid")), order, rep});
}

// Reports.

inline Json to_json(const RangeCheckReport& r) {
  Json residuals = nullptr;
  if (r.residuals) residuals = {{"S", r.residuals->first}, {"T", r.residuals->second}};
  Json reps{{"S", {{"kind", r.rep_S}}}, {"T", {{"kind", r.rep_T}}}};
  if (r.f_S) reps["S"]["function"] = to_json(*r.f_S);
  if (r.f_T) reps["T"]["function"] = to_json(*r.f_T);
  return {{"query", {{"p", r.p}, {"ps", r.ps}, {"shifted_form", r.shifted_form}}},
          {"representatives", reps},
          {"route", to_string(r.route)},
          {"value", to_json(r.value)},
          {"target", r.target},
          {"gap", to_json(r.gap)},
          {"tol", r.tol},
          {"witness", to_json(r.witness)},
          {"residuals", residuals},
          {"oracle", r.oracle},
          {"verdict", to_string(r.verdict)},
          {"conditions", {{"domain_clause", r.domain_clause}}},
          {"reason", r.reason}};
}

/// Range report without the embedded representatives, for sweeps that
/// share one pair of representatives.
inline Json to_json_brief(const RangeCheckReport& r) {
  Json j = to_json(r);
  j.erase("representatives");
  return j;
}

inline Json representatives_json(const RangeCheckReport& r) { return to_json(r)["representatives"]; }

inline Json to_json(const SweepReport& s) {
  Json entries = Json::array();
  for (const auto& r : s.reports) entries.push_back(to_json_brief(r));
  Json out{{"p", s.p},
           {"entries", entries},
           {"oracle_range", to_json(s.oracle_range)},
           {"oracle_range_text", s.oracle_range.to_string()},
           {"all_yes", s.all_yes},
           {"inconclusive", s.inconclusive},
           {"disagreement", s.disagreement}};
  if (!s.reports.empty()) out["representatives"] = representatives_json(s.reports.front());
  return out;
}

inline Json to_json(const TotalDualityReport& t) {
  return {{"route", to_string(t.route)},
          {"primal_value", to_json(t.primal_value)},
          {"primal_point", to_json(t.primal_point)},
          {"dual_value", to_json(t.dual_value)},
          {"dual_point", to_json(t.dual_point)},
          {"equalities",
           {{"f_S_minus_c", to_json(t.eq_S)},
            {"hat_f_T_plus_c", to_json(t.eq_T)},
            {"f_S_minus_c_from_dual", to_json(t.eq_S_dual)},
            {"hat_f_T_plus_c_from_dual", to_json(t.eq_T_dual)}}},
          {"tol", t.tol},
          {"ok", t.ok()}};
}

inline Json to_json(const RegularityReport& r) {
  auto opt_set = [](const std::optional<PolyhedralSet2D>& s) -> Json {
    if (!s) return nullptr;
    return {{"set", to_json(*s)}, {"text", s->to_string()}, {"relative_interior", relative_interior_string(*s)}};
  };
  return {{"conditions",
           {{"dom_f_T_whole", to_string(r.dom_fT_whole)},
            {"difference_whole", to_string(r.difference_whole)},
            {"sqri", to_string(r.sqri)},
            {"core", to_string(r.core)}}},
          {"difference", opt_set(r.difference)},
          {"core_set", opt_set(r.core_set)},
          {"rc", to_json(r.rc)},
          {"rc_bar", to_json(r.rc_bar)},
          {"rc_tilde", to_json(r.rc_tilde)},
          {"chain_consistent", r.chain_consistent()}};
}

inline Json to_json(const SingleReport& s) {
  Json entries = Json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"query", {{"ps", e.ps}}},
                       {"value", to_json(e.reduced)},
                       {"target", 0.0},
                       {"witness", e.witness ? Json(*e.witness) : Json(nullptr)},
                       {"residuals", {{"fenchel_young_gap", to_json(e.fy_gap)}}},
                       {"oracle", e.oracle},
                       {"verdict", to_string(e.verdict)},
                       {"conditions", {{"lsc", e.lsc}}},
                       {"reason", e.reason}});
  }
  return {{"representative", s.rep},
          {"entries", entries},
          {"oracle_range", to_json(s.oracle_range)},
          {"oracle_range_text", s.oracle_range.to_string()},
          {"all_yes", s.all_yes},
          {"disagreement", s.disagreement}};
}

inline Json to_json(const InfConvCheck& c) {
  return {{"value", to_json(c.value)},
          {"closure", to_json(c.closure)},
          {"witness", c.witness ? Json(*c.witness) : Json(nullptr)},
          {"holds", c.holds}};
}

inline Json to_json(const SubdiffReport& s) {
  Json entries = Json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"query", {{"ps", e.ps}}},
                       {"conditions",
                        {{"dual_domains_meet", e.dual_domains_meet},
                         {"primal", to_json(e.primal)},
                         {"dual", to_json(e.dual)}}},
                       {"bivariate", e.bivariate ? Json(to_string(*e.bivariate)) : Json(nullptr)},
                       {"oracle", e.oracle},
                       {"verdict", to_string(e.verdict)},
                       {"reason", e.reason}});
  }
  return {{"hypothesis", s.hypothesis},
          {"entries", entries},
          {"oracle_range", to_json(s.oracle_range)},
          {"oracle_range_text", s.oracle_range.to_string()},
          {"all_yes", s.all_yes},
          {"disagreement", s.disagreement}};
}

}  // namespace fitzrange
