#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "analysis.hpp"
#include "builder.hpp"
#include "coder.hpp"
#include "diagram.hpp"

namespace toeplitz {

using Json = nlohmann::json;

inline std::pair<Role, int> parse_role(const std::string& s) {
  if (s == "root_A") return {Role::root_a, 0};
  if (s == "root_B") return {Role::root_b, 0};
  if (s == "sentinel_low") return {Role::sentinel_low, 0};
  if (s == "sentinel_high") return {Role::sentinel_high, 0};
  if (s == "filler") return {Role::filler, 0};
  if (s.rfind("tracking:", 0) == 0) {
    const std::string idx = s.substr(9);
    if (!is_integer_token(idx) || idx.size() > 6 || parse_int(idx) < 1)
      throw Error(Errc::parse, "bad tracking index in role '" + s + "'");
    return {Role::tracking, static_cast<int>(parse_int(idx))};
  }
  throw Error(Errc::parse, "unknown role '" + s + "'");
}

/// {"levels":[{"height":"H","columns":[{"comp":[...],"role":"..."}]}]}
/// Heights are decimal strings (they outgrow every native integer width).
inline Json diagram_to_json(const Diagram& d) {
  Json levels = Json::array();
  for (int n = 0; n <= d.top_index(); ++n) {
    const Level& lvl = d.level(n);
    Json cols = Json::array();
    for (const auto& c : lvl.columns)
      cols.push_back({{"comp", c.comp}, {"role", role_to_string(c.role, c.track)}});
    levels.push_back({{"height", to_string(lvl.height)}, {"columns", cols}});
  }
  return Json{{"levels", levels}};
}

/// Rebuild a diagram from JSON. Levels are re-validated through the normal
/// append path and the recorded heights are cross-checked. Malformed JSON
/// shapes surface as parse errors, not as library-internal exceptions.
inline Diagram diagram_from_json(const Json& j) try {
  if (!j.contains("levels") || !j["levels"].is_array() || j["levels"].empty())
    throw Error(Errc::parse, "diagram JSON needs a nonempty 'levels' array");
  const auto& levels = j.at("levels");
  {
    const auto& root = levels.at(0);
    const auto& cols = root.at("columns");
    if (cols.size() != 2 || parse_role(cols.at(0).at("role").get<std::string>()).first != Role::root_a ||
        parse_role(cols.at(1).at("role").get<std::string>()).first != Role::root_b ||
        parse_int(root.at("height").get<std::string>()) != 1)
      throw Error(Errc::parse, "level 0 must be the two root atoms A, B at height 1");
  }
  Diagram d = Diagram::new_root();
  for (size_t n = 1; n < levels.size(); ++n) {
    std::vector<std::vector<int>> comps;
    std::vector<std::pair<Role, int>> roles;
    for (const auto& col : levels.at(n).at("columns")) {
      comps.push_back(col.at("comp").get<std::vector<int>>());
      roles.push_back(parse_role(col.at("role").get<std::string>()));
    }
    d.append_level(std::move(comps), roles);
    const Int recorded = parse_int(levels.at(n).at("height").get<std::string>());
    if (recorded != d.level(static_cast<int>(n)).height)
      throw Error(Errc::parse, "height mismatch at level " + std::to_string(n) + ": file says " +
                                   recorded.str() + ", compositions give " +
                                   d.level(static_cast<int>(n)).height.str());
  }
  return d;
} catch (const Json::exception& e) {
  throw Error(Errc::parse, std::string("malformed diagram JSON: ") + e.what());
}

/// One node per (level, column), one edge per composition entry, labeled by
/// the order position.
inline std::string diagram_to_dot(const Diagram& d) {
  std::ostringstream os;
  os << "digraph bratteli {\n  rankdir=TB;\n";
  for (int n = 0; n <= d.top_index(); ++n) {
    const Level& lvl = d.level(n);
    for (size_t i = 1; i <= lvl.arity(); ++i) {
      os << "  L" << n << "C" << i << " [label=\"" << n << ":" << i << " "
         << role_to_string(lvl.columns[i - 1].role, lvl.columns[i - 1].track) << "\"];\n";
    }
  }
  for (int n = 1; n <= d.top_index(); ++n) {
    const Level& lvl = d.level(n);
    for (size_t i = 1; i <= lvl.arity(); ++i) {
      const auto& comp = lvl.columns[i - 1].comp;
      for (size_t t = 0; t < comp.size(); ++t)
        os << "  L" << (n - 1) << "C" << comp[t] << " -> L" << n << "C" << i << " [label=\""
           << (t + 1) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

inline Json skeleton_to_json(const SkeletonReport& rep) {
  Json filled = Json::object();
  for (const auto& [r, c] : rep.filled) filled[to_string(r)] = std::string(1, c);
  return Json{{"level", rep.level}, {"filled", filled}, {"density", to_string(rep.density)}};
}

/// skeleton.json body: the skeleton of a level plus the smallest period the
/// emitted window exhibits at that level (informational; a finite window
/// cannot prove aperiodicity).
inline Json skeleton_file_json(const Diagram& d, int level) {
  Json j = skeleton_to_json(skeleton(d, level));
  j["window_period"] = smallest_period(window(d, level).letters);
  return j;
}

inline Json cert_to_json(const CertReport& rep) {
  Json errs = Json::array();
  for (const auto& e : rep.tracking_errors) errs.push_back(to_string(e));
  Json verts = Json::array();
  for (const auto& v : rep.vertices) {
    Json vv = Json::array();
    for (const auto& c : v) vv.push_back(to_string(c));
    verts.push_back(vv);
  }
  return Json{{"level", rep.level},
              {"anchor_level", rep.anchor_level},
              {"signature_dim", rep.full_dim},
              {"projected_dim", rep.projected_dim},
              {"vertex_count", rep.vertex_count},
              {"vertices", verts},
              {"tracking_errors", errs},
              {"hull_slack", to_string(rep.hull_slack)},
              {"affine_ok", rep.affine_ok}};
}

/// Config: {"targets":["1/4","3/4"],"depth":8,"L_floor":8,"anchor_level":1,
///          "emit":["diagram-json","diagram-dot","word","skeleton","cert"]}
/// "emit" is optional and defaults to everything.
struct RunConfig {
  TargetSpec targets;
  BuildParams params;
  std::set<std::string> emit{"diagram-json", "diagram-dot", "word", "skeleton", "cert"};
};

inline RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  if (!j.contains("targets") || !j["targets"].is_array())
    throw Error(Errc::config, "config needs a 'targets' array of rational strings");
  for (const auto& t : j["targets"]) cfg.targets.p.push_back(parse_rational(t.get<std::string>()));
  if (j.contains("depth")) cfg.params.depth = j["depth"].get<int>();
  if (j.contains("L_floor")) cfg.params.comp_length_floor = j["L_floor"].get<long>();
  if (j.contains("anchor_level")) cfg.params.anchor_level = j["anchor_level"].get<int>();
  if (j.contains("emit")) {
    cfg.emit.clear();
    for (const auto& e : j["emit"]) {
      const auto name = e.get<std::string>();
      if (name != "diagram-json" && name != "diagram-dot" && name != "word" &&
          name != "skeleton" && name != "cert")
        throw Error(Errc::config, "unknown emit kind '" + name + "'");
      cfg.emit.insert(name);
    }
  }
  cfg.targets.validate();
  cfg.params.validate();
  return cfg;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::parse, std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config, "cannot write " + path);
  out << contents;
}

}  // namespace toeplitz
