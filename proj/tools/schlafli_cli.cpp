// schlafli run --scene FILE [--out DIR] [--plot-data] [--threads N] [--seed-override K] [--json]
// schlafli catalog [--json]
//
// Exit status: 0 all rows pass, 1 some row failed, 2 scene or usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "schlafli/error.hpp"
#include "schlafli/rng.hpp"
#include "schlafli/scene.hpp"

namespace fs = std::filesystem;
using namespace schlafli;

namespace {

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

std::string plot_name(const std::string& task) {
  std::string s = task;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return "plot_" + s + ".csv";
}

int run(const std::string& scene_path, const std::string& out_dir, bool plot_data, bool json,
        std::optional<std::uint64_t> seed_override) {
  std::ifstream in(scene_path, std::ios::binary);
  if (!in) {
    std::cerr << scene_path << ": cannot read scene file\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  Scene scene = [&] {
    try {
      return Scene::parse(buf.str());
    } catch (const Error& e) {
      std::cerr << scene_path << ":" << e.what() << "\n";
      std::exit(2);
    }
  }();

  SceneOptions options;
  options.seed_override = seed_override;
  const SceneResult result = scene.run(options);
  const VerificationReport& report = result.report;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);
  bool ok = write_file(dir / "report.json", report.json()) && write_file(dir / "report.csv", report.csv()) &&
            write_file(dir / "timing.csv", report.timing_csv());
  if (plot_data)
    for (const auto& [task, csv] : result.plots) ok = ok && write_file(dir / plot_name(task), csv);
  if (!ok) return 2;

  if (json) {
    std::cout << report.json();
  } else {
    int failed = 0;
    for (const ReportRow& r : report.rows) {
      failed += !r.pass;
      std::printf("%-4s %-24s %-24s %-44s residual %.3e  tol %.3e\n", r.pass ? "ok" : "FAIL", r.task.c_str(),
                  r.object.c_str(), r.quantity.c_str(), r.residual, r.tolerance + r.error_budget);
    }
    std::printf("%zu rows, %d failed; reports in %s\n", report.rows.size(), failed, dir.string().c_str());
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schlafli formula verification on constant-curvature spaces"};
  app.require_subcommand(1);

  std::string scene_path, out_dir = ".";
  bool plot_data = false, run_json = false, catalog_as_json = false;
  int threads = 1;
  std::optional<std::uint64_t> seed_override;

  CLI::App* run_cmd = app.add_subcommand("run", "run the tasks of a scene file");
  run_cmd->add_option("--scene", scene_path, "scene file (JSON, schema 1)")->required();
  run_cmd->add_option("--out", out_dir, "output directory for report.json, report.csv, timing.csv");
  run_cmd->add_flag("--plot-data", plot_data, "also write plot_<task>.csv series");
  run_cmd->add_option("--threads", threads, "worker threads for Monte Carlo sampling")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed-override", seed_override, "replace the seed of every stochastic task");
  run_cmd->add_flag("--json", run_json, "print the JSON report instead of the row summary");

  CLI::App* catalog_cmd = app.add_subcommand("catalog", "list scene object and task types");
  catalog_cmd->add_flag("--json", catalog_as_json, "machine-readable schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (*catalog_cmd) {
    std::cout << (catalog_as_json ? catalog_json() : catalog_text());
    return 0;
  }
  set_default_threads(threads);
  return run(scene_path, out_dir, plot_data, run_json, seed_override);
}
