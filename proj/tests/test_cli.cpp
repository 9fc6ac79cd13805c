#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <toeplitz/cli.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace toeplitz;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
};

/// Run the CLI in-process with stdout captured.
RunResult run_captured(std::vector<std::string> args) {
  std::fflush(stdout);
  std::cout.flush();
  const int saved = dup(1);
  FILE* tmp = std::tmpfile();
  REQUIRE(tmp != nullptr);
  dup2(fileno(tmp), 1);
  const int code = run(std::move(args));
  std::fflush(stdout);
  std::cout.flush();
  dup2(saved, 1);
  close(saved);
  std::fseek(tmp, 0, SEEK_SET);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, tmp)) > 0) out.append(buf, n);
  std::fclose(tmp);
  return {code, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const char* name = nullptr) const {
    return name ? (path / name).string() : path.string();
  }
};

void write_config(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

}  // namespace

TEST_CASE("build writes the artifact set and verify accepts it") {
  TempDir dir("toeplitz_cli_build");
  write_config(dir.path / "cfg.json",
               R"({"targets":["1/4","3/4"],"depth":4,"L_floor":8,"anchor_level":1})");
  auto r = run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()});
  CHECK(r.code == 0);
  for (const char* f : {"diagram.json", "diagram.dot", "word.txt", "skeleton.json", "cert.json"})
    CHECK(fs::exists(dir.path / f));

  auto v = run_captured({"verify", dir.str("diagram.json")});
  CHECK(v.code == 0);
  CHECK(v.out.find("OK") != std::string::npos);
}

TEST_CASE("two builds from one config are byte-identical") {
  TempDir a("toeplitz_cli_det_a"), b("toeplitz_cli_det_b");
  const std::string cfg = R"({"targets":["1/4","3/4"],"depth":3,"L_floor":8})";
  write_config(a.path / "cfg.json", cfg);
  write_config(b.path / "cfg.json", cfg);
  CHECK(run_captured({"build", "--config", a.str("cfg.json"), "--out", a.str()}).code == 0);
  CHECK(run_captured({"build", "--config", b.str("cfg.json"), "--out", b.str()}).code == 0);
  for (const char* f : {"diagram.json", "word.txt", "cert.json", "skeleton.json", "diagram.dot"})
    CHECK(slurp(a.path / f) == slurp(b.path / f));
}

TEST_CASE("verify rejects a corrupted diagram naming the twin invariant") {
  TempDir dir("toeplitz_cli_corrupt");
  write_config(dir.path / "cfg.json", R"({"targets":["1/4","3/4"],"depth":2,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  Json j = load_json_file(dir.str("diagram.json"));
  j["levels"][1]["columns"][1]["comp"] = j["levels"][1]["columns"][0]["comp"];
  write_file(dir.str("diagram.json"), j.dump(2));
  auto r = run_captured({"verify", dir.str("diagram.json")});
  CHECK(r.code == 1);
  CHECK(r.out.find("twin") != std::string::npos);
}

TEST_CASE("emit-word matches the library window") {
  TempDir dir("toeplitz_cli_word");
  write_config(dir.path / "cfg.json", R"({"targets":["1/2"],"depth":2,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  auto r = run_captured({"emit-word", dir.str("diagram.json"), "--level", "2"});
  CHECK(r.code == 0);
  const Diagram d = diagram_from_json(load_json_file(dir.str("diagram.json")));
  const Window w = window(d, 2);
  CHECK(r.out == "origin=" + std::to_string(w.origin) + "\n" + w.letters + "\n");
}

TEST_CASE("round trip: serialized diagram re-parses to the same bytes") {
  TempDir dir("toeplitz_cli_roundtrip");
  write_config(dir.path / "cfg.json", R"({"targets":["1/8","1/2","7/8"],"depth":3,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  const std::string bytes = slurp(dir.path / "diagram.json");
  const Diagram d = diagram_from_json(load_json_file(dir.str("diagram.json")));
  CHECK(diagram_to_json(d).dump(2) + "\n" == bytes);
}

TEST_CASE("analyze reports certification as JSON") {
  TempDir dir("toeplitz_cli_analyze");
  write_config(dir.path / "cfg.json", R"({"targets":["1/4","3/4"],"depth":3,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  auto r = run_captured({"analyze", dir.str("diagram.json"), "--targets", "1/4,3/4", "--out",
                         (dir.path / "an").string()});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["vertex_count"] == 2);
  CHECK(j["affine_ok"] == true);
  CHECK(j["tracking_errors"][0] == "0");
  CHECK(fs::exists(dir.path / "an" / "cert.json"));
}

TEST_CASE("usage and config errors exit 2") {
  CHECK(run_captured({"bogus"}).code == 2);
  CHECK(run_captured({"build"}).code == 2);
  CHECK(run_captured({"build", "--config", "/nonexistent/cfg.json"}).code == 2);
  CHECK(run_captured({"verify", "/nonexistent/diagram.json"}).code == 2);
  TempDir dir("toeplitz_cli_badcfg");
  write_config(dir.path / "cfg.json", R"({"targets":["0"],"depth":1})");
  CHECK(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 2);
}

TEST_CASE("emit-word refuses windows beyond the materialization cap") {
  TempDir dir("toeplitz_cli_cap");
  write_config(dir.path / "cfg.json", R"({"targets":["1/4","3/4"],"depth":5,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  auto r = run_captured({"emit-word", dir.str("diagram.json"), "--level", "5"});
  CHECK(r.code == 2);
}

TEST_CASE("the emit set restricts which artifacts are written") {
  TempDir dir("toeplitz_cli_emit");
  write_config(dir.path / "cfg.json",
               R"({"targets":["1/4","3/4"],"depth":2,"L_floor":8,"emit":["diagram-json","word"]})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  CHECK(fs::exists(dir.path / "diagram.json"));
  CHECK(fs::exists(dir.path / "word.txt"));
  CHECK(!fs::exists(dir.path / "diagram.dot"));
  CHECK(!fs::exists(dir.path / "skeleton.json"));
  CHECK(!fs::exists(dir.path / "cert.json"));
  TempDir bad("toeplitz_cli_emit_bad");
  write_config(bad.path / "cfg.json", R"({"targets":["1/2"],"depth":1,"emit":["nonsense"]})");
  CHECK(run_captured({"build", "--config", bad.str("cfg.json"), "--out", bad.str()}).code == 2);
}

TEST_CASE("verify cross-checks recorded heights") {
  TempDir dir("toeplitz_cli_height");
  write_config(dir.path / "cfg.json", R"({"targets":["1/2"],"depth":2,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  Json j = load_json_file(dir.str("diagram.json"));
  j["levels"][2]["height"] = "999";
  write_file(dir.str("diagram.json"), j.dump(2));
  auto r = run_captured({"verify", dir.str("diagram.json")});
  CHECK(r.code == 1);
  CHECK(r.out.find("height") != std::string::npos);
}

TEST_CASE("verify reports corrupt JSON shapes as verification failures") {
  TempDir dir("toeplitz_cli_shape");
  write_config(dir.path / "cfg.json", R"({"targets":["1/2"],"depth":2,"L_floor":8})");
  REQUIRE(run_captured({"build", "--config", dir.str("cfg.json"), "--out", dir.str()}).code == 0);
  SUBCASE("unsorted composition") {
    Json j = load_json_file(dir.str("diagram.json"));
    auto comp = j["levels"][1]["columns"][0]["comp"].get<std::vector<int>>();
    std::swap(comp.front(), comp.back());
    j["levels"][1]["columns"][0]["comp"] = comp;
    write_file(dir.str("diagram.json"), j.dump(2));
    auto r = run_captured({"verify", dir.str("diagram.json")});
    CHECK(r.code == 1);
    CHECK(r.out.find("sorted") != std::string::npos);
  }
  SUBCASE("missing keys") {
    Json j = load_json_file(dir.str("diagram.json"));
    j["levels"][1]["columns"][0].erase("comp");
    write_file(dir.str("diagram.json"), j.dump(2));
    CHECK(run_captured({"verify", dir.str("diagram.json")}).code == 1);
  }
  SUBCASE("role with a bad tracking index") {
    Json j = load_json_file(dir.str("diagram.json"));
    j["levels"][1]["columns"][0]["role"] = "tracking:zero";
    write_file(dir.str("diagram.json"), j.dump(2));
    CHECK(run_captured({"verify", dir.str("diagram.json")}).code == 1);
  }
}

TEST_CASE("dot emission lists nodes and labeled edges") {
  Diagram d = Diagram::new_root();
  d.append_level({{1, 1, 1, 2}, {1, 2, 2, 2}, {1, 1, 2, 2}});
  const std::string dot = diagram_to_dot(d);
  CHECK(dot.find("L0C1") != std::string::npos);
  CHECK(dot.find("L1C3") != std::string::npos);
  CHECK(dot.find("L0C1 -> L1C1 [label=\"1\"]") != std::string::npos);
  CHECK(dot.find("L0C2 -> L1C1 [label=\"4\"]") != std::string::npos);
  // one edge per composition entry
  size_t edges = 0;
  for (size_t pos = dot.find(" -> "); pos != std::string::npos; pos = dot.find(" -> ", pos + 1))
    ++edges;
  CHECK(edges == 12);
}
