#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "stefan/config_parser.hpp"
#include "stefan/experiment.hpp"
#include "stefan/export.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 2;
constexpr int kFailure = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

stefan::ExperimentSpec load(const std::string& name, const std::string& spec_dir) {
  fs::path path;
  try {
    path = stefan::resolve_spec(name, spec_dir.empty() ? stefan::default_spec_dir() : fs::path(spec_dir));
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  try {
    return stefan::load_spec_file(path.string());
  } catch (const stefan::ParseError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const stefan::SchemaError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::vector<std::string>>> parse_params(const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& p : raw) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size())
      throw UsageError("--param expects key=v1,v2,...; got '" + p + "'");
    std::vector<std::string> values;
    std::string cur;
    for (char c : p.substr(eq + 1)) {
      if (c == ',') {
        values.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    values.push_back(cur);
    for (const auto& v : values)
      if (v.empty()) throw UsageError("empty value in --param '" + p + "'");
    out.push_back({p.substr(0, eq), values});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enthalpy-method phase-change experiments"};
  app.require_subcommand(1);
  std::string spec_dir, output_root;
  app.add_option("--spec-dir", spec_dir, "Directory searched for named specs");
  app.add_option("--output-root", output_root, "Output root (default $STEFAN_OUTPUT_ROOT or ./output)");

  std::string spec_name;
  auto* run = app.add_subcommand("run", "Run one experiment and export its results");
  run->add_option("spec", spec_name, "Spec name or path")->required();

  auto* sweep = app.add_subcommand("sweep", "Run the cross product of parameter values");
  sweep->add_option("spec", spec_name, "Spec name or path")->required();
  std::vector<std::string> params;
  unsigned threads = 0;
  sweep->add_option("--param", params, "section.key=v1,v2,...")->required()->take_all();
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* converge = app.add_subcommand("converge", "Grid convergence study");
  converge->add_option("spec", spec_name, "Spec name or path")->required();
  std::size_t levels = 0;
  converge->add_option("--levels", levels, "Refinement levels (>= 3)");

  auto* check = app.add_subcommand("check", "Run the invariant suite; nonzero exit on violation");
  check->add_option("spec", spec_name, "Spec name or path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const fs::path root = output_root.empty() ? stefan::default_output_root() : fs::path(output_root);
    auto spec = load(spec_name, spec_dir);

    if (*run) {
      const auto dir = stefan::run_experiment(spec, root);
      std::cout << spec.name << ": wrote " << dir.string() << "\n";
      return 0;
    }
    if (*sweep) {
      const auto runs = stefan::run_sweep(spec, parse_params(params), root, threads);
      int failed = 0;
      std::cout << "run,ok,final_front,max_sensitivity\n";
      for (const auto& r : runs) {
        std::cout << r.id << ',' << (r.ok ? 1 : 0) << ',' << stefan::format_double(r.final_front) << ','
                  << stefan::format_double(r.max_sensitivity) << "\n";
        if (!r.ok) {
          std::cerr << r.id << ": " << r.error << "\n";
          ++failed;
        }
      }
      return failed ? kFailure : 0;
    }
    if (*converge) {
      if (spec.kind == stefan::ExperimentKind::kLumped || spec.kind == stefan::ExperimentKind::kThermalSpike)
        throw UsageError("converge needs a Cartesian spec");
      if (converge->count("--levels") && levels < 3) throw UsageError("--levels must be >= 3");
      const auto result = stefan::run_convergence(
          spec, converge->count("--levels") ? std::optional<std::size_t>(levels) : std::nullopt);
      const fs::path dir = root / (spec.output_dir.empty() ? spec.name : spec.output_dir);
      stefan::export_convergence(result, spec, dir);
      std::cout << "n_x,n_t,error\n";
      for (const auto& l : result.levels)
        std::cout << l.n_x << ',' << l.n_t << ',' << stefan::format_double(l.error) << "\n";
      std::cout << "order," << stefan::format_double(result.order) << "\n";
      return 0;
    }
    if (*check) {
      const auto items = stefan::run_checks(spec);
      bool ok = true;
      for (const auto& i : items) {
        std::cout << (i.passed ? "PASS " : "FAIL ") << i.name << ": " << i.detail << "\n";
        ok = ok && i.passed;
      }
      return ok ? 0 : kFailure;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
