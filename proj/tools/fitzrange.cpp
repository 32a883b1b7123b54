// fitzrange: runs a verification scenario and prints its report.
//
// Exit status: 0 clean, 1 oracle or theorem disagreement, 2 bad input or
// I/O failure, 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fitzrange/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range and surjectivity verifier for sums of maximal monotone operators on the real line"};
  std::string scenario_path, format = "text", out_path;
  fitzrange::RunOptions opts;
  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--grid-n", opts.grid_n, "Grid nodes per axis")->check(CLI::Range(3, 1 << 16));
  app.add_option("--box", opts.box, "Grid half-width")->check(CLI::PositiveNumber);
  app.add_option("--tol", opts.tol, "Tolerance for grid-backed comparisons")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "Random seed for the fuzz task");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  CLI11_PARSE(app, argc, argv);

  fitzrange::RunResult result;
  try {
    const auto scenario = fitzrange::parse_scenario(read_file(scenario_path));
    result = fitzrange::run(scenario, opts);
  } catch (const fitzrange::ScenarioError& e) {
    std::cerr << scenario_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }

  const std::string body = format == "json" ? result.report.dump(2) + "\n" : result.text;
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!(out << body)) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
  }
  return result.disagreement ? 1 : 0;
}
