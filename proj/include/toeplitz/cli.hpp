#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "builder.hpp"
#include "coder.hpp"
#include "diagram.hpp"
#include "engine.hpp"
#include "json_io.hpp"

namespace toeplitz {

/// Levels at which words are still materialized by the file emitters.
inline int deepest_level_with_height_at_most(const Diagram& d, const Int& cap) {
  int best = 0;
  for (int n = 1; n <= d.top_index(); ++n)
    if (d.level(n).height <= cap) best = n;
  return best;
}

/// Re-check everything a serialized diagram promises. Returns the first
/// failing invariant, or nothing when all checks pass. Structural level
/// validation has already happened during parsing; this adds the coding and
/// measure-geometry invariants at materializable scale.
inline std::optional<std::string> verify_diagram(const Diagram& d) {
  // Every level's minimal path runs through copies of column 1 and the
  // maximal path through copies of the last column.
  for (int n = 1; n <= d.top_index(); ++n) {
    const Level& lvl = d.level(n);
    for (size_t i = 0; i < lvl.arity(); ++i) {
      if (lvl.columns[i].comp.front() != 1)
        return "level " + std::to_string(n) + " column " + std::to_string(i + 1) +
               " does not start with parent 1";
      if (lvl.columns[i].comp.back() != static_cast<int>(d.level(n - 1).arity()))
        return "level " + std::to_string(n) + " column " + std::to_string(i + 1) +
               " does not end with the last parent";
    }
    if (d.letter_at(n, 1, Int(0)) != '0')
      return "origin letter at level " + std::to_string(n) + " is not '0'";
  }

  // Word/orbit coherence wherever words are small enough to enumerate.
  for (int n = 1; n <= d.top_index(); ++n) {
    if (d.level(n).height > 4096) break;
    const Level& lvl = d.level(n);
    for (int i = 1; i <= static_cast<int>(lvl.arity()); ++i) {
      const std::string w = column_word(d, n, i);
      for (Int row = 0; row < lvl.height; ++row)
        if (d.letter_at(n, i, row) != w[static_cast<size_t>(row)])
          return "word/orbit mismatch at level " + std::to_string(n) + " column " +
                 std::to_string(i) + " row " + row.str();
    }
  }

  // Skeleton residues lift with their letters.
  for (int n = 1; n < d.top_index(); ++n) {
    if (d.level(n + 1).height > Int(kWordCap)) break;
    const auto sk = skeleton(d, n);
    const auto sk_next = skeleton(d, n + 1);
    const Int h = d.level(n).height;
    for (const auto& [r, c] : sk.filled)
      for (Int rr = r; rr < d.level(n + 1).height; rr += h) {
        auto it = sk_next.filled.find(rr);
        if (it == sk_next.filled.end())
          return "skeleton residue " + r.str() + " of level " + std::to_string(n) +
                 " not filled at level " + std::to_string(n + 1);
        if (it->second != c)
          return "skeleton letter changed while lifting residue " + r.str() + " to level " +
                 std::to_string(n + 1);
      }
  }

  // Window nesting wherever windows materialize.
  for (int n = 1; n < d.top_index(); ++n) {
    if (2 * d.level(n + 1).height > Int(kWordCap)) break;
    const Window wn = window(d, n);
    const Window wn1 = window(d, n + 1);
    const size_t h = wn.origin;
    for (size_t t = 0; t < wn.letters.size(); ++t)
      if (wn.letters[t] != wn1.letters[wn1.origin - h + t])
        return "window of level " + std::to_string(n) + " is not centered in level " +
               std::to_string(n + 1);
  }

  // Signature hulls nest level over level.
  for (int n = 2; n <= d.top_index(); ++n) {
    const auto prev = d.anchor_signatures(n - 1, 0);
    for (const auto& sig : d.anchor_signatures(n, 0))
      if (!in_hull(sig, prev))
        return "signature of level " + std::to_string(n) + " escapes the level-" +
               std::to_string(n - 1) + " hull";
  }
  return std::nullopt;
}

namespace detail {

inline int do_build(const std::string& config_path, const std::string& outdir) {
  const RunConfig cfg = parse_config(load_json_file(config_path));
  const Diagram d = build(cfg.targets, cfg.params);
  std::filesystem::create_directories(outdir);
  const auto path = [&](const char* name) { return (std::filesystem::path(outdir) / name).string(); };

  if (cfg.emit.count("diagram-json"))
    write_file(path("diagram.json"), diagram_to_json(d).dump(2) + "\n");
  if (cfg.emit.count("diagram-dot")) write_file(path("diagram.dot"), diagram_to_dot(d));

  const int wlevel = deepest_level_with_height_at_most(d, Int(kWordCap / 2));
  if (cfg.emit.count("word") && wlevel >= 1) {
    const Window w = window(d, wlevel);
    write_file(path("word.txt"), "origin=" + std::to_string(w.origin) + "\n" + w.letters + "\n");
  }
  const int slevel = deepest_level_with_height_at_most(d, Int(4096));
  if (cfg.emit.count("skeleton") && slevel >= 1)
    write_file(path("skeleton.json"), skeleton_file_json(d, slevel).dump(2) + "\n");
  if (cfg.emit.count("cert") && d.top_index() >= 2) {
    const CertReport rep =
        certify_simplex(d, cfg.targets, d.top_index(), cfg.params.anchor_level);
    write_file(path("cert.json"), cert_to_json(rep).dump(2) + "\n");
  }
  std::cout << "built depth " << d.top_index() << " into " << outdir << "\n";
  return 0;
}

inline int do_verify(const std::string& diagram_path) {
  std::optional<Diagram> d;
  try {
    d = diagram_from_json(load_json_file(diagram_path));
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;  // unreadable file: usage error
    std::cout << "FAIL: " << e.what() << "\n";
    return 1;
  }
  if (auto fail = verify_diagram(*d)) {
    std::cout << "FAIL: " << *fail << "\n";
    return 1;
  }
  std::cout << "OK: all invariants hold\n";
  return 0;
}

inline int do_emit_word(const std::string& diagram_path, int level) {
  const Diagram d = diagram_from_json(load_json_file(diagram_path));
  const Window w = window(d, level);
  std::cout << "origin=" << w.origin << "\n" << w.letters << "\n";
  return 0;
}

inline int do_analyze(const std::string& diagram_path, const std::string& targets_csv, int level,
                      int anchor, const std::string& outdir) {
  const Diagram d = diagram_from_json(load_json_file(diagram_path));
  TargetSpec t;
  std::stringstream ss(targets_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) t.p.push_back(parse_rational(tok));
  const int n = (level > 0) ? level : d.top_index();
  const Json j = cert_to_json(certify_simplex(d, t, n, anchor));
  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    write_file((std::filesystem::path(outdir) / "cert.json").string(), j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 verification failure, 2 usage/config error.
inline int run(std::vector<std::string> args) {
  CLI::App app{"exact cut-and-stack construction of {0,1} Toeplitz sequences"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", analyze_out, diagram_path, targets_csv;
  int level = 0, anchor = 1;

  auto* b = app.add_subcommand("build", "build a diagram from a config and emit artifacts");
  b->add_option("--config", config_path, "config JSON path")->required();
  b->add_option("--out", out_dir, "output directory");

  auto* v = app.add_subcommand("verify", "re-check all invariants of a diagram file");
  v->add_option("diagram", diagram_path, "diagram.json path")->required();

  auto* e = app.add_subcommand("emit-word", "print the coded window of a level");
  e->add_option("diagram", diagram_path, "diagram.json path")->required();
  e->add_option("--level", level, "level to emit")->required();

  auto* a = app.add_subcommand("analyze", "certify a diagram against targets");
  a->add_option("diagram", diagram_path, "diagram.json path")->required();
  a->add_option("--targets", targets_csv, "comma-separated rational targets")->required();
  a->add_option("--level", level, "level to certify (default: top)");
  a->add_option("--anchor", anchor, "anchor level for signatures");
  a->add_option("--out", analyze_out, "directory to also write cert.json into");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);  // --help
    app.exit(err);
    return 2;
  }

  try {
    if (b->parsed()) return detail::do_build(config_path, out_dir);
    if (v->parsed()) return detail::do_verify(diagram_path);
    if (e->parsed()) return detail::do_emit_word(diagram_path, level);
    if (a->parsed()) return detail::do_analyze(diagram_path, targets_csv, level, anchor, analyze_out);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return (err.code() == Errc::config || err.code() == Errc::parse ||
            err.code() == Errc::too_large)
               ? 2
               : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace toeplitz
