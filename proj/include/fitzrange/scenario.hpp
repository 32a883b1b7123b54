#pragma once

// Scenario files: named definitions plus one verification task, as JSON.
//
//   {
//     "definitions": {"f": "ind[0,inf]", "S": "subdiff(f)", "T": "J"},
//     "task": "sweep", "S": "S", "T": "T", "p": 0,
//     "ps_grid": {"lo": -2, "hi": 2, "n": 9}
//   }
//
// Expressions: ind[l,u], sup[l,u], quad(a,b,c), abs (functions);
// ncone[l,u], subdiff(<function>), J (operators); or a defined name.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fitzrange/serialize.hpp"

namespace fitzrange {

/// Parse or resolution failure located by a JSON pointer and, inside an
/// expression string, a character offset.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, std::string message, std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(format(field, message, position)),
        field_(std::move(field)),
        message_(std::move(message)),
        position_(position) {}

  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  std::optional<std::size_t> position() const { return position_; }

 private:
  static std::string format(const std::string& field, const std::string& message, std::optional<std::size_t> pos) {
    std::string out = (field.empty() ? std::string("<root>") : field) + ": " + message;
    if (pos) out += " (at character " + std::to_string(*pos) + ")";
    return out;
  }

  std::string field_;
  std::string message_;
  std::optional<std::size_t> position_;
};

inline const std::vector<std::string>& scenario_tasks() {
  static const std::vector<std::string> tasks{"range",      "sweep",   "zero",       "single",        "normal-cone",
                                              "subdiff",    "conditions", "total-duality", "fuzz"};
  return tasks;
}

struct Scenario {
  std::string task;
  Json definitions = Json::object();     // name -> expression string or object
  std::map<std::string, Json> roles;     // "S", "T", "f", "g" -> expression
  std::optional<double> p;
  std::optional<double> ps;
  std::vector<double> ps_grid;
  std::optional<std::pair<double, double>> interval;
  std::optional<int> grid_n;
  std::optional<double> box;
  std::optional<double> tol_exact;
  std::optional<double> tol_grid;
  std::optional<std::string> rep_S;
  std::optional<std::string> rep_T;
  std::optional<std::uint64_t> seed;
  std::optional<int> instances;
  bool shifted = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

enum class ExprKind { kFunction, kOperator };

struct Builtin {
  std::string name;
  std::vector<double> numbers;
  std::string inner;  // subdiff argument
  std::size_t inner_offset = 0;
};

class ExprParser {
 public:
  ExprParser(const std::string& text, std::string field) : s_(text), field_(std::move(field)) {}

  Builtin parse() {
    skip();
    Builtin b;
    b.name = ident();
    skip();
    if (at_end()) return b;
    if (s_[i_] == '[') {
      ++i_;
      b.numbers.push_back(number());
      expect(',');
      b.numbers.push_back(number());
      expect(']');
    } else if (s_[i_] == '(') {
      ++i_;
      if (b.name == "subdiff") {
        skip();
        const std::size_t start = i_;
        int depth = 0;
        while (!at_end() && !(depth == 0 && s_[i_] == ')')) {
          if (s_[i_] == '(' || s_[i_] == '[') ++depth;
          if (s_[i_] == ')' || s_[i_] == ']') --depth;
          ++i_;
        }
        if (at_end()) fail("missing ')'");
        b.inner = s_.substr(start, i_ - start);
        while (!b.inner.empty() && b.inner.back() == ' ') b.inner.pop_back();
        b.inner_offset = start;
        if (b.inner.empty()) fail("subdiff needs an argument");
        ++i_;
      } else {
        b.numbers.push_back(number());
        while (peek() == ',') {
          ++i_;
          b.numbers.push_back(number());
        }
        expect(')');
      }
    } else {
      fail(std::string("unexpected '") + s_[i_] + "'");
    }
    skip();
    if (!at_end()) fail("trailing characters");
    return b;
  }

 private:
  bool at_end() const { return i_ >= s_.size(); }
  void skip() {
    while (!at_end() && s_[i_] == ' ') ++i_;
  }
  char peek() {
    skip();
    return at_end() ? '\0' : s_[i_];
  }
  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(field_, what, i_); }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string ident() {
    const std::size_t start = i_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (start == i_) fail("expected a name");
    return s_.substr(start, i_ - start);
  }
  double number() {
    skip();
    const std::size_t start = i_;
    while (!at_end() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != ')' && s_[i_] != ' ') ++i_;
    const std::string tok = s_.substr(start, i_ - start);
    if (tok == "inf" || tok == "+inf") return kInf;
    if (tok == "-inf") return -kInf;
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (tok.empty() || ec != std::errc() || ptr != e) throw ScenarioError(field_, "malformed number '" + tok + "'", start);
    skip();
    return v;
  }

  const std::string& s_;
  std::string field_;
  std::size_t i_ = 0;
};

inline const std::set<std::string>& function_builtins() {
  static const std::set<std::string> s{"ind", "sup", "quad", "abs"};
  return s;
}
inline const std::set<std::string>& operator_builtins() {
  static const std::set<std::string> s{"ncone", "subdiff", "J"};
  return s;
}

inline std::string pointer(const std::string& key) {
  std::string out = "/";
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// Resolves expressions against the scenario's definitions.
class ScenarioEnv {
 public:
  explicit ScenarioEnv(const Scenario& s) : s_(s) {}

  PlqFunction function(const Json& expr, const std::string& field) const {
    return std::get<PlqFunction>(resolve(expr, field, detail::ExprKind::kFunction, 0));
  }
  MonotoneGraph op(const Json& expr, const std::string& field) const {
    return std::get<MonotoneGraph>(resolve(expr, field, detail::ExprKind::kOperator, 0));
  }
  /// A convex function, for subdifferentials and the subdiff task.
  PlqFunction convex_function(const Json& expr, const std::string& field) const {
    auto f = function(expr, field);
    if (!convexity_check(f)) throw ScenarioError(field, "convexity_check failed for " + expr.dump());
    return f;
  }

  /// Kind of an expression without building it; throws on dangling names
  /// and unknown builtins.
  detail::ExprKind kind(const Json& expr, const std::string& field, int depth = 0) const {
    if (depth > 32) throw ScenarioError(field, "definitions are cyclic");
    if (expr.is_object()) {
      if (expr.contains("segments") || expr.contains("vertices")) return detail::ExprKind::kOperator;
      if (expr.contains("pieces")) return detail::ExprKind::kFunction;
      throw ScenarioError(field, "object is neither a function nor an operator");
    }
    if (!expr.is_string()) throw ScenarioError(field, "expected an expression string or object");
    const auto b = detail::ExprParser(expr.get<std::string>(), field).parse();
    const bool bare = b.numbers.empty() && b.inner.empty();
    if (bare && s_.definitions.contains(b.name))
      return kind(s_.definitions.at(b.name), "/definitions" + detail::pointer(b.name), depth + 1);
    if (detail::function_builtins().count(b.name)) return detail::ExprKind::kFunction;
    if (detail::operator_builtins().count(b.name)) {
      if (b.name == "subdiff") {
        const auto inner = kind(b.inner, field, depth + 1);
        if (inner != detail::ExprKind::kFunction)
          throw ScenarioError(field, "subdiff needs a function, '" + b.inner + "' is an operator", b.inner_offset);
      }
      return detail::ExprKind::kOperator;
    }
    if (bare) throw ScenarioError(field, "dangling reference '" + b.name + "'", 0);
    throw ScenarioError(field, "unknown builtin '" + b.name + "'", 0);
  }

 private:
  using Value = std::variant<PlqFunction, MonotoneGraph>;

  Value resolve(const Json& expr, const std::string& field, detail::ExprKind want, int depth) const {
    if (depth > 32) throw ScenarioError(field, "definitions are cyclic");
    const auto got = kind(expr, field, depth);
    if (got != want)
      throw ScenarioError(field, std::string("expected ") + (want == detail::ExprKind::kFunction ? "a function" : "an operator"));
    try {
      if (expr.is_object()) {
        if (want == detail::ExprKind::kFunction) return plq_from_json(expr);
        return graph_from_json(expr);
      }
      const auto b = detail::ExprParser(expr.get<std::string>(), field).parse();
      const bool bare = b.numbers.empty() && b.inner.empty();
      if (bare && s_.definitions.contains(b.name))
        return resolve(s_.definitions.at(b.name), "/definitions" + detail::pointer(b.name), want, depth + 1);
      static const std::map<std::string, std::size_t> arity{{"ind", 2},   {"sup", 2}, {"quad", 3},
                                                            {"abs", 0},   {"ncone", 2}, {"J", 0}};
      if (const auto it = arity.find(b.name); it != arity.end() && b.numbers.size() != it->second)
        throw ScenarioError(field, b.name + " takes " + std::to_string(it->second) + " numbers", 0);
      const auto& n = b.numbers;
      if (b.name == "ind") return PlqFunction::indicator(n[0], n[1]);
      if (b.name == "sup") return PlqFunction::support(n[0], n[1]);
      if (b.name == "quad") return PlqFunction::quadratic(n[0], n[1], n[2]);
      if (b.name == "abs") return PlqFunction::abs();
      if (b.name == "ncone") return normal_cone(n[0], n[1]);
      if (b.name == "J") return duality_map();
      return from_subdifferential(convex_function(Json(b.inner), field));
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(field, e.what());
    }
  }

  const Scenario& s_;
};

namespace detail {

inline double scenario_number(const Json& j, const std::string& field) {
  try {
    return number_from_json(j);
  } catch (const std::invalid_argument&) {
    throw ScenarioError(field, "malformed number " + j.dump());
  }
}

inline std::vector<std::string> required_roles(const std::string& task) {
  if (task == "single" || task == "normal-cone") return {"S"};
  if (task == "subdiff") return {"f", "g"};
  if (task == "fuzz") return {};
  return {"S", "T"};
}

inline bool needs_grid(const std::string& task) {
  return task == "sweep" || task == "single" || task == "normal-cone" || task == "subdiff" || task == "conditions";
}

}  // namespace detail

/// Parses and validates a scenario; every failure is a ScenarioError.
inline Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioError("", std::string("invalid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  static const std::set<std::string> known{"schema", "definitions", "task",    "S",      "T",         "f",
                                           "g",      "p",           "ps",      "ps_grid", "interval",  "grid",
                                           "tol",    "representatives", "seed", "instances", "shifted"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ScenarioError(detail::pointer(it.key()), "unknown field");
  if (j.contains("schema") && j["schema"] != kScenarioSchema)
    throw ScenarioError("/schema", "unsupported schema " + j["schema"].dump());

  Scenario s;
  if (!j.contains("task") || !j["task"].is_string() || j["task"].get<std::string>().empty())
    throw ScenarioError("/task", "task required");
  s.task = j["task"].get<std::string>();
  const auto& tasks = scenario_tasks();
  if (std::find(tasks.begin(), tasks.end(), s.task) == tasks.end())
    throw ScenarioError("/task", "unknown task '" + s.task + "'");

  if (j.contains("definitions")) {
    if (!j["definitions"].is_object()) throw ScenarioError("/definitions", "expected an object");
    s.definitions = j["definitions"];
  }
  for (const char* role : {"S", "T", "f", "g"})
    if (j.contains(role)) s.roles[role] = j[role];

  auto num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    return detail::scenario_number(j[key], detail::pointer(key));
  };
  s.p = num("p");
  s.ps = num("ps");
  if (j.contains("ps_grid")) {
    const auto& g = j["ps_grid"];
    if (g.is_array()) {
      for (std::size_t k = 0; k < g.size(); ++k)
        s.ps_grid.push_back(detail::scenario_number(g[k], "/ps_grid/" + std::to_string(k)));
    } else if (g.is_object()) {
      const double lo = detail::scenario_number(g.value("lo", Json()), "/ps_grid/lo");
      const double hi = detail::scenario_number(g.value("hi", Json()), "/ps_grid/hi");
      if (!g.contains("n") || !g["n"].is_number_integer() || g["n"].get<int>() < 1)
        throw ScenarioError("/ps_grid/n", "expected a positive integer");
      const int n = g["n"];
      if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw ScenarioError("/ps_grid", "need finite lo <= hi");
      for (int k = 0; k < n; ++k) s.ps_grid.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
    } else {
      throw ScenarioError("/ps_grid", "expected an array or {lo, hi, n}");
    }
  }
  if (j.contains("interval")) {
    const auto& iv = j["interval"];
    if (!iv.is_array() || iv.size() != 2) throw ScenarioError("/interval", "expected [lo, hi]");
    s.interval = std::make_pair(detail::scenario_number(iv[0], "/interval/0"),
                                detail::scenario_number(iv[1], "/interval/1"));
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("n")) {
      if (!g["n"].is_number_integer() || g["n"].get<int>() < 3) throw ScenarioError("/grid/n", "expected an integer >= 3");
      s.grid_n = g["n"].get<int>();
    }
    if (g.contains("box")) s.box = detail::scenario_number(g["box"], "/grid/box");
  }
  if (j.contains("tol")) {
    const auto& t = j["tol"];
    if (t.contains("exact")) s.tol_exact = detail::scenario_number(t["exact"], "/tol/exact");
    if (t.contains("grid")) s.tol_grid = detail::scenario_number(t["grid"], "/tol/grid");
  }
  if (j.contains("representatives")) {
    for (const char* role : {"S", "T"}) {
      if (!j["representatives"].contains(role)) continue;
      const auto v = j["representatives"][role];
      if (v != "fenchel" && v != "fitzpatrick")
        throw ScenarioError(std::string("/representatives/") + role, "expected \"fenchel\" or \"fitzpatrick\"");
      (role[0] == 'S' ? s.rep_S : s.rep_T) = v.get<std::string>();
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ScenarioError("/seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("instances")) {
    if (!j["instances"].is_number_integer() || j["instances"].get<int>() < 1)
      throw ScenarioError("/instances", "expected a positive integer");
    s.instances = j["instances"].get<int>();
  }
  if (j.contains("shifted")) {
    if (!j["shifted"].is_boolean()) throw ScenarioError("/shifted", "expected true or false");
    s.shifted = j["shifted"];
  }

  // Task requirements and references.
  const ScenarioEnv env(s);
  for (auto it = s.definitions.begin(); it != s.definitions.end(); ++it)
    env.kind(it.value(), "/definitions" + detail::pointer(it.key()));
  for (const auto& role : detail::required_roles(s.task)) {
    if (!s.roles.count(role)) throw ScenarioError(detail::pointer(role), "task " + s.task + " requires " + role);
    const auto want = (role == "f" || role == "g") ? detail::ExprKind::kFunction : detail::ExprKind::kOperator;
    if (env.kind(s.roles[role], detail::pointer(role)) != want)
      throw ScenarioError(detail::pointer(role), want == detail::ExprKind::kFunction ? "expected a function" : "expected an operator");
  }
  if (s.task == "range" && (!s.p || !s.ps)) throw ScenarioError(s.p ? "/ps" : "/p", "task range requires p and ps");
  if (detail::needs_grid(s.task) && s.ps_grid.empty())
    throw ScenarioError("/ps_grid", "task " + s.task + " requires a nonempty ps_grid");
  if (s.task == "normal-cone" && !s.interval) throw ScenarioError("/interval", "task normal-cone requires interval");
  if (s.task == "fuzz" && !s.seed) throw ScenarioError("/seed", "task fuzz requires seed");
  return s;
}

/// Canonical JSON text; parse_scenario(render_scenario(s)) == s.
inline std::string render_scenario(const Scenario& s) {
  Json j{{"schema", kScenarioSchema}, {"task", s.task}};
  if (!s.definitions.empty()) j["definitions"] = s.definitions;
  for (const auto& [role, expr] : s.roles) j[role] = expr;
  if (s.p) j["p"] = to_json(*s.p);
  if (s.ps) j["ps"] = to_json(*s.ps);
  if (!s.ps_grid.empty()) {
    j["ps_grid"] = Json::array();
    for (double v : s.ps_grid) j["ps_grid"].push_back(to_json(v));
  }
  if (s.interval) j["interval"] = Json::array({to_json(s.interval->first), to_json(s.interval->second)});
  if (s.grid_n) j["grid"]["n"] = *s.grid_n;
  if (s.box) j["grid"]["box"] = *s.box;
  if (s.tol_exact) j["tol"]["exact"] = *s.tol_exact;
  if (s.tol_grid) j["tol"]["grid"] = *s.tol_grid;
  if (s.rep_S) j["representatives"]["S"] = *s.rep_S;
  if (s.rep_T) j["representatives"]["T"] = *s.rep_T;
  if (s.seed) j["seed"] = *s.seed;
  if (s.instances) j["instances"] = *s.instances;
  if (s.shifted) j["shifted"] = true;
  return j.dump(2) + "\n";
}

}  // namespace fitzrange
