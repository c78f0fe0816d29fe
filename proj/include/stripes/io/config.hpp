#pragma once

#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "stripes/boundaries.hpp"
#include "stripes/oracle/klausmeier_scan.hpp"

namespace stripes::io {

using json = nlohmann::ordered_json;

struct ParseError : ConfigError {
  ParseError(int line, int column, const std::string& message)
      : ConfigError("parse error at line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + message),
        line(line), column(column) {}
  int line, column;
};
struct UnknownKey : ConfigError {
  explicit UnknownKey(const std::string& key) : ConfigError("unknown config key: " + key) {}
};
struct RangeError : ConfigError {
  explicit RangeError(const std::string& what) : ConfigError(what) {}
};

enum class Command { verify, coeffs, diagram, oracle, calibrate, scan };

struct DiagramConfig {
  DiagramPlane plane = DiagramPlane::kappa_alpha;
  DiagramParams params;
  bool q_eff_given = false;  // otherwise q_eff = gamma_cal * q_raw of the system
  double gamma_cal = 1.0;
  GridSpec grid;
};

struct OracleConfig {
  std::string scenario = "hex";
  std::vector<double> eps_list = {0.05, 0.025, 0.0125};
  double gamma_cal = 1.0;
};

struct RunConfig {
  std::string system_preset = "designed_example";  // or "klausmeier" or "" for inline
  SystemSpec inline_system;
  bool has_inline = false;
  double epsilon = 0.4;  // quadratic strength of the designed example
  KlausmeierParams klausmeier_params;
  Command command = Command::verify;
  std::string output_dir = ".";
  DiagramConfig diagram;
  OracleConfig oracle;
  oracle::KlausmeierScanConfig scan;

  SystemSpec build_system() const {
    if (has_inline) return inline_system;
    if (system_preset == "designed_example") return designed_example(epsilon);
    if (system_preset == "klausmeier")
      return oracle::klausmeier_unfolded_at_onset(klausmeier_params.m, klausmeier_params.d);
    throw RangeError("unknown system preset: " + system_preset);
  }
};

namespace detail {

// strip // and /* */ comments (JSON with comments pre-pass); string-aware
inline std::string strip_comments(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  bool in_string = false, escape = false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char ch = in[i];
    if (in_string) {
      out.push_back(ch);
      if (escape) escape = false;
      else if (ch == '\\') escape = true;
      else if (ch == '"') in_string = false;
      continue;
    }
    if (ch == '"') {
      in_string = true;
      out.push_back(ch);
      continue;
    }
    if (ch == '/' && i + 1 < in.size() && in[i + 1] == '/') {
      while (i < in.size() && in[i] != '\n') ++i;
      if (i < in.size()) out.push_back('\n');
      continue;
    }
    if (ch == '/' && i + 1 < in.size() && in[i + 1] == '*') {
      i += 2;
      while (i + 1 < in.size() && !(in[i] == '*' && in[i + 1] == '/')) {
        if (in[i] == '\n') out.push_back('\n');  // keep line numbers stable
        ++i;
      }
      ++i;
      continue;
    }
    out.push_back(ch);
  }
  return out;
}

inline void line_col_of(const std::string& text, std::size_t byte, int& line, int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw UnknownKey(where + "." + item.key());
}

inline double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw RangeError(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw RangeError(where + " must be finite");
  return x;
}

inline Mat2 mat2_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || v[0].size() != 2 || v[1].size() != 2)
    throw RangeError(where + " must be a 2x2 array");
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = finite_number(v[i][j], where);
  return m;
}

inline SystemSpec system_of(const json& v) {
  require_keys(v, "system", {"d", "L", "M", "Q", "K", "poly"});
  SystemSpec s;
  if (v.contains("poly")) {
    const json& p = v.at("poly");
    require_keys(p, "system.poly", {"base_state", "f1", "f2"});
    ReactionPoly rp;
    const json& bs = p.at("base_state");
    if (!bs.is_array() || bs.size() != 2) throw RangeError("system.poly.base_state must have 2 entries");
    rp.base_state = Vec2(finite_number(bs[0], "base_state"), finite_number(bs[1], "base_state"));
    for (int comp = 0; comp < 2; ++comp) {
      const json& f = p.at(comp == 0 ? "f1" : "f2");
      if (!f.is_array() || f.size() != 10)
        throw RangeError("system.poly.f* must list 10 Taylor coefficients");
      for (int i = 0; i < 10; ++i) rp.c[comp][i] = finite_number(f[i], "system.poly");
    }
    s = tensors_from_poly(rp);
  }
  if (v.contains("L")) s.L = mat2_of(v.at("L"), "system.L");
  if (v.contains("M")) s.M = mat2_of(v.at("M"), "system.M");
  if (v.contains("d")) {
    const json& d = v.at("d");
    if (!d.is_array() || d.size() != 2) throw RangeError("system.d must have 2 entries");
    s.d1 = finite_number(d[0], "system.d");
    s.d2 = finite_number(d[1], "system.d");
  }
  if (v.contains("Q")) {
    const json& q = v.at("Q");
    if (!q.is_array() || q.size() != 2 || q[0].size() != 3 || q[1].size() != 3)
      throw RangeError("system.Q must be 2 rows of {u^2, uv, v^2} coefficients");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) s.Q.c[i][j] = finite_number(q[i][j], "system.Q");
  }
  if (v.contains("K")) {
    const json& k = v.at("K");
    if (!k.is_array() || k.size() != 2 || k[0].size() != 4 || k[1].size() != 4)
      throw RangeError("system.K must be 2 rows of {u^3, u^2v, uv^2, v^3} coefficients");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 4; ++j) s.K.c[i][j] = finite_number(k[i][j], "system.K");
  }
  return validate_system(s);
}

inline GridSpec grid_of(const json& v, const std::string& where) {
  require_keys(v, where, {"x_min", "x_max", "x_count", "y_min", "y_max", "y_count"});
  GridSpec g;
  g.x_min = finite_number(v.at("x_min"), where);
  g.x_max = finite_number(v.at("x_max"), where);
  g.y_min = finite_number(v.at("y_min"), where);
  g.y_max = finite_number(v.at("y_max"), where);
  g.x_count = v.at("x_count").get<std::size_t>();
  g.y_count = v.at("y_count").get<std::size_t>();
  if (g.x_count < 2 || g.y_count < 2) throw RangeError(where + ": grid counts must be >= 2");
  return g;
}

}  // namespace detail

inline DiagramPlane plane_of(const std::string& s) {
  if (s == "kappa-alpha") return DiagramPlane::kappa_alpha;
  if (s == "q-alpha") return DiagramPlane::q_alpha;
  if (s == "beta-alphatilde") return DiagramPlane::beta_alphatilde;
  if (s == "epsilon-alpha") return DiagramPlane::epsilon_alpha;
  throw RangeError("unknown diagram plane: " + s);
}

inline std::string plane_name(DiagramPlane p) {
  switch (p) {
    case DiagramPlane::kappa_alpha: return "kappa-alpha";
    case DiagramPlane::q_alpha: return "q-alpha";
    case DiagramPlane::beta_alphatilde: return "beta-alphatilde";
    case DiagramPlane::epsilon_alpha: return "epsilon-alpha";
  }
  return "";
}

inline RunConfig parse_config(const std::string& text) {
  const std::string clean = detail::strip_comments(text);
  json root;
  try {
    root = json::parse(clean);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    detail::line_col_of(clean, e.byte > 0 ? e.byte - 1 : 0, line, col);
    throw ParseError(line, col, e.what());
  }
  detail::require_keys(root, "<root>",
                       {"system", "epsilon", "klausmeier", "command", "output_dir", "diagram",
                        "oracle", "scan"});
  RunConfig cfg;
  if (root.contains("system")) {
    const json& s = root.at("system");
    if (s.is_string()) {
      cfg.system_preset = s.get<std::string>();
      if (cfg.system_preset != "designed_example" && cfg.system_preset != "klausmeier")
        throw RangeError("unknown system preset: " + cfg.system_preset);
    } else if (s.is_object()) {
      cfg.inline_system = detail::system_of(s);
      cfg.has_inline = true;
      cfg.system_preset.clear();
    } else {
      throw RangeError("system must be a preset name or an object");
    }
  }
  if (root.contains("epsilon")) {
    cfg.epsilon = detail::finite_number(root.at("epsilon"), "epsilon");
  }
  if (root.contains("klausmeier")) {
    const json& k = root.at("klausmeier");
    detail::require_keys(k, "klausmeier", {"a", "m", "d"});
    if (k.contains("a")) cfg.klausmeier_params.a = detail::finite_number(k.at("a"), "klausmeier.a");
    if (k.contains("m")) cfg.klausmeier_params.m = detail::finite_number(k.at("m"), "klausmeier.m");
    if (k.contains("d")) cfg.klausmeier_params.d = detail::finite_number(k.at("d"), "klausmeier.d");
  }
  if (root.contains("command")) {
    const std::string c = root.at("command").get<std::string>();
    if (c == "verify") cfg.command = Command::verify;
    else if (c == "coeffs") cfg.command = Command::coeffs;
    else if (c == "diagram") cfg.command = Command::diagram;
    else if (c == "oracle") cfg.command = Command::oracle;
    else if (c == "calibrate") cfg.command = Command::calibrate;
    else if (c == "scan") cfg.command = Command::scan;
    else throw RangeError("unknown command: " + c);
  }
  if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();
  if (root.contains("diagram")) {
    const json& d = root.at("diagram");
    detail::require_keys(d, "diagram",
                         {"plane", "beta", "kappa_tilde", "q_eff", "gamma_cal", "theta",
                          "ell_tilde_square", "grid"});
    if (d.contains("plane")) cfg.diagram.plane = plane_of(d.at("plane").get<std::string>());
    if (d.contains("beta")) cfg.diagram.params.beta = detail::finite_number(d.at("beta"), "diagram.beta");
    if (d.contains("kappa_tilde"))
      cfg.diagram.params.kappa_tilde = detail::finite_number(d.at("kappa_tilde"), "diagram.kappa_tilde");
    if (d.contains("q_eff")) {
      cfg.diagram.params.q_eff = detail::finite_number(d.at("q_eff"), "diagram.q_eff");
      cfg.diagram.q_eff_given = true;
    }
    if (d.contains("gamma_cal"))
      cfg.diagram.gamma_cal = detail::finite_number(d.at("gamma_cal"), "diagram.gamma_cal");
    if (d.contains("theta")) {
      cfg.diagram.params.theta = detail::finite_number(d.at("theta"), "diagram.theta");
      if (!(cfg.diagram.params.theta > 0.0) || cfg.diagram.params.theta > 1.0)
        throw RangeError("diagram.theta must lie in (0,1]");
    }
    if (d.contains("ell_tilde_square"))
      cfg.diagram.params.ell_tilde_square =
          detail::finite_number(d.at("ell_tilde_square"), "diagram.ell_tilde_square");
    if (d.contains("grid")) cfg.diagram.grid = detail::grid_of(d.at("grid"), "diagram.grid");
  }
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    detail::require_keys(o, "oracle", {"scenario", "eps_list", "gamma_cal"});
    if (o.contains("scenario")) cfg.oracle.scenario = o.at("scenario").get<std::string>();
    if (o.contains("eps_list")) {
      cfg.oracle.eps_list.clear();
      for (const auto& e : o.at("eps_list"))
        cfg.oracle.eps_list.push_back(detail::finite_number(e, "oracle.eps_list"));
      if (cfg.oracle.eps_list.size() < 2) throw RangeError("oracle.eps_list needs >= 2 entries");
    }
    if (o.contains("gamma_cal"))
      cfg.oracle.gamma_cal = detail::finite_number(o.at("gamma_cal"), "oracle.gamma_cal");
  }
  if (root.contains("scan")) {
    const json& s = root.at("scan");
    detail::require_keys(s, "scan",
                         {"beta", "a_min", "a_max", "a_step", "kappa_min", "kappa_max",
                          "kappa_step", "N", "N_lat", "N_bloch", "ell_per_decade", "threads"});
    auto num = [&](const char* key, double& slot) {
      if (s.contains(key)) slot = detail::finite_number(s.at(key), std::string("scan.") + key);
    };
    num("beta", cfg.scan.beta);
    num("a_min", cfg.scan.a_min);
    num("a_max", cfg.scan.a_max);
    num("a_step", cfg.scan.a_step);
    num("kappa_min", cfg.scan.kappa_min);
    num("kappa_max", cfg.scan.kappa_max);
    num("kappa_step", cfg.scan.kappa_step);
    if (s.contains("N")) cfg.scan.N = s.at("N").get<int>();
    if (s.contains("N_lat")) cfg.scan.N_lat = s.at("N_lat").get<int>();
    if (s.contains("N_bloch")) cfg.scan.N_bloch = s.at("N_bloch").get<int>();
    if (s.contains("ell_per_decade")) cfg.scan.ell_per_decade = s.at("ell_per_decade").get<int>();
    if (s.contains("threads")) cfg.scan.threads = s.at("threads").get<int>();
    if (cfg.scan.a_step <= 0.0 || cfg.scan.kappa_step <= 0.0)
      throw RangeError("scan steps must be positive");
    cfg.scan.m = cfg.klausmeier_params.m;
    cfg.scan.d = cfg.klausmeier_params.d;
  }
  return cfg;
}

// canonical serialisation; parse(serialize(cfg)) reproduces cfg
inline std::string serialize_config(const RunConfig& cfg) {
  json root;
  if (cfg.has_inline) {
    json s;
    s["d"] = {cfg.inline_system.d1, cfg.inline_system.d2};
    s["L"] = {{cfg.inline_system.L(0, 0), cfg.inline_system.L(0, 1)},
              {cfg.inline_system.L(1, 0), cfg.inline_system.L(1, 1)}};
    s["M"] = {{cfg.inline_system.M(0, 0), cfg.inline_system.M(0, 1)},
              {cfg.inline_system.M(1, 0), cfg.inline_system.M(1, 1)}};
    s["Q"] = {cfg.inline_system.Q.c[0], cfg.inline_system.Q.c[1]};
    s["K"] = {cfg.inline_system.K.c[0], cfg.inline_system.K.c[1]};
    root["system"] = s;
  } else {
    root["system"] = cfg.system_preset;
  }
  root["epsilon"] = cfg.epsilon;
  root["klausmeier"] = {{"a", cfg.klausmeier_params.a},
                        {"m", cfg.klausmeier_params.m},
                        {"d", cfg.klausmeier_params.d}};
  switch (cfg.command) {
    case Command::verify: root["command"] = "verify"; break;
    case Command::coeffs: root["command"] = "coeffs"; break;
    case Command::diagram: root["command"] = "diagram"; break;
    case Command::oracle: root["command"] = "oracle"; break;
    case Command::calibrate: root["command"] = "calibrate"; break;
    case Command::scan: root["command"] = "scan"; break;
  }
  root["output_dir"] = cfg.output_dir;
  json d;
  d["plane"] = plane_name(cfg.diagram.plane);
  d["beta"] = cfg.diagram.params.beta;
  d["kappa_tilde"] = cfg.diagram.params.kappa_tilde;
  if (cfg.diagram.q_eff_given) d["q_eff"] = cfg.diagram.params.q_eff;
  d["gamma_cal"] = cfg.diagram.gamma_cal;
  d["theta"] = cfg.diagram.params.theta;
  d["ell_tilde_square"] = cfg.diagram.params.ell_tilde_square;
  d["grid"] = {{"x_min", cfg.diagram.grid.x_min}, {"x_max", cfg.diagram.grid.x_max},
               {"x_count", cfg.diagram.grid.x_count}, {"y_min", cfg.diagram.grid.y_min},
               {"y_max", cfg.diagram.grid.y_max}, {"y_count", cfg.diagram.grid.y_count}};
  root["diagram"] = d;
  root["oracle"] = {{"scenario", cfg.oracle.scenario},
                    {"eps_list", cfg.oracle.eps_list},
                    {"gamma_cal", cfg.oracle.gamma_cal}};
  root["scan"] = {{"beta", cfg.scan.beta},
                  {"a_min", cfg.scan.a_min},
                  {"a_max", cfg.scan.a_max},
                  {"a_step", cfg.scan.a_step},
                  {"kappa_min", cfg.scan.kappa_min},
                  {"kappa_max", cfg.scan.kappa_max},
                  {"kappa_step", cfg.scan.kappa_step},
                  {"N", cfg.scan.N},
                  {"N_lat", cfg.scan.N_lat},
                  {"N_bloch", cfg.scan.N_bloch},
                  {"ell_per_decade", cfg.scan.ell_per_decade},
                  {"threads", cfg.scan.threads}};
  return root.dump(2) + "\n";
}

}  // namespace stripes::io
