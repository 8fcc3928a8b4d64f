#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "stefan/config_parser.hpp"
#include "stefan/experiment.hpp"
#include "stefan/export.hpp"

using namespace stefan;
namespace fs = std::filesystem;

namespace {

const fs::path kSpecDir = STEFAN_SPEC_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stefan_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(STEFAN_CLI_PATH) + " --spec-dir " + kSpecDir.string() + " --output-root " +
                          out.string() + " " + args + " > " + (out / "cli.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kQuiet = R"(name = quiet
kind = cartesian-1d
[grid]
n_x = 20
length = 1
n_t = 40
t_max = 0.5
store_stride = 10
[material]
latent_heat = 1
transition_temp = 2
smoothing_width = 0.05
[source]
type = none
)";

}  // namespace

TEST_CASE("the shipped beam spec carries the beam parameters") {
  const auto spec = load_spec_file((kSpecDir / "paper_fig6_thickness.ini").string());
  CHECK(spec.kind == ExperimentKind::kCartesian1D);
  const auto& src = std::get<LogisticBeamSource>(spec.simulation.source);
  CHECK(src.amplitude == 59.44);
  CHECK(src.x_edge == 0.07);
  CHECK(src.t_edge == 1.0);
  CHECK(src.steepness_x == 100.0);
  CHECK(src.steepness_t == 100.0);
  CHECK(spec.simulation.scheme.gamma == 0.5);
  CHECK(spec.simulation.grid_x.n_cells() == 500);
}

TEST_CASE("an empty document reports the missing kind") {
  try {
    parse_config("");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.key() == "kind");
    CHECK(std::string(e.what()).find("kind missing") != std::string::npos);
  }
}

TEST_CASE("a mistyped value names its key") {
  const std::string text = std::string(kQuiet) + "[scheme]\ngamma = abc\n";
  try {
    parse_config(text);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.key() == "scheme.gamma");
    CHECK(std::string(e.what()).find("scheme.gamma") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_document("name = a\n\n  [grid\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 7);
    CHECK(std::string(e.what()).rfind("line 3, column 7", 0) == 0);
  }
  try {
    parse_document("name = a\nkind\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_document("a = 1\nb =   \n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("missing value") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_document("a = 1\na = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_document("a = \"open\n"), ParseError);
}

TEST_CASE("comments and quoting") {
  const auto doc = parse_document("# header\nname = \"x y\" ; trailing\n[s]\nk = a#b\n");
  CHECK(doc.entries.at("name").value == "x y");
  CHECK(doc.entries.at("s.k").value == "a#b");
  CHECK(doc.entries.at("s.k").line == 4);
  CHECK(doc.entries.at("s.k").column == 5);
}

TEST_CASE("unknown keys are rejected") {
  const std::string text = std::string(kQuiet) + "bogus = 1\n";
  try {
    parse_config(text);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.key() == "source.bogus");
  }
}

TEST_CASE("invariant violations surface as schema errors") {
  const std::string text = std::string(kQuiet) + "[scheme]\ngamma = 2\n";
  CHECK_THROWS_AS(parse_config(text), SchemaError);
}

TEST_CASE("every shipped spec survives an emit/parse round trip") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kSpecDir)) {
    if (entry.path().extension() != ".ini") continue;
    ++count;
    const auto spec = load_spec_file(entry.path().string());
    CAPTURE(entry.path().string());
    const auto text = emit_config(spec);
    CHECK(parse_config(text) == spec);
    CHECK(emit_config(parse_config(text)) == text);
  }
  CHECK(count >= 6);
}

TEST_CASE("overrides patch single entries") {
  const auto base = parse_config(kQuiet);
  const auto patched = apply_overrides(base, {{"material.transition_temp", "2.5"}, {"grid.n_x", "40"}});
  CHECK(patched.simulation.material.transition_temp == 2.5);
  CHECK(patched.simulation.grid_x.n_cells() == 40);
  CHECK(patched.simulation.material.latent_heat == base.simulation.material.latent_heat);
  CHECK_THROWS_AS(apply_overrides(base, {{"material.nonsense", "1"}}), SchemaError);
}

TEST_CASE("a sourceless run stays at the initial temperature on disk") {
  const auto root = scratch("quiet");
  const auto spec = parse_config(kQuiet);
  const auto dir = run_experiment(spec, root);
  CHECK(dir == root / "quiet");
  std::istringstream in(slurp(dir / "fields.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,x,T");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "1");
  }
  CHECK(rows == 5 * 21);
  for (const char* f : {"fronts.csv", "scalars.csv", "summary.csv", "meta.ini"}) CHECK(fs::exists(dir / f));
  CHECK(parse_config(slurp(dir / "meta.ini")) == spec);
}

TEST_CASE("reruns are byte-identical") {
  const auto spec = load_spec_file((kSpecDir / "lumped_const_q.ini").string());
  const auto a = run_experiment(spec, scratch("rerun_a"));
  const auto b = run_experiment(spec, scratch("rerun_b"));
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
}

TEST_CASE("atomic writes replace the target and leave no temporaries") {
  const auto root = scratch("atomic");
  const auto target = root / "nested" / "out.csv";
  write_file_atomic(target, "first\n");
  write_file_atomic(target, "second\n");
  CHECK(slurp(target) == "second\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(target.parent_path())) ++files;
  CHECK(files == 1);

  // A regular file where a directory is expected.
  write_file_atomic(root / "blocker", "x");
  const auto bad = root / "blocker" / "out.csv";
  try {
    write_file_atomic(bad, "y");
    FAIL("expected ExportError");
  } catch (const ExportError& e) {
    CHECK(e.path() == bad);
  }
}

TEST_CASE("doubles are written round-trippable") {
  for (double v : {0.1, 1.0 / 3.0, 6.181, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("spec names resolve by path, name and unique prefix") {
  CHECK(resolve_spec("lumped_const_q", kSpecDir) == kSpecDir / "lumped_const_q.ini");
  CHECK(resolve_spec("lumped", kSpecDir) == kSpecDir / "lumped_const_q.ini");
  CHECK(resolve_spec("paper_fig6", kSpecDir) == kSpecDir / "paper_fig6_thickness.ini");
  const auto path = (kSpecDir / "spike_toy_metal.ini").string();
  CHECK(resolve_spec(path, "/nonexistent") == fs::path(path));
  CHECK_THROWS_AS(resolve_spec("control", kSpecDir), std::runtime_error);
  CHECK_THROWS_AS(resolve_spec("no_such_spec", kSpecDir), std::runtime_error);
}

TEST_CASE("command-line exit codes") {
  const auto out = scratch("cli");
  CHECK(run_cli("run lumped_const_q", out) == 0);
  CHECK(fs::exists(out / "lumped_const_q" / "fields.csv"));
  CHECK(run_cli("check lumped_const_q", out) == 0);
  CHECK(slurp(out / "cli.log").find("PASS transition_bound") != std::string::npos);
  CHECK(run_cli("converge convergence_cosine", out) == 0);
  CHECK(fs::exists(out / "convergence_cosine" / "convergence.csv"));
  CHECK(run_cli("converge convergence_cosine --levels 2", out) == 2);
  CHECK(run_cli("converge lumped_const_q", out) == 2);
  CHECK(run_cli("run no_such_spec", out) == 2);
  CHECK(run_cli("", out) == 2);
  CHECK(run_cli("frobnicate", out) == 2);
  CHECK(run_cli("sweep lumped_const_q --param lumped.t_max", out) == 2);
  CHECK(run_cli("sweep lumped_const_q --param lumped.t_max=2,3 --threads 2", out) == 0);
  CHECK(fs::exists(out / "lumped_const_q" / "sweep_summary.csv"));
}
