#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "vppfreq/commands.hpp"
#include "vppfreq/errors.hpp"
#include "vppfreq/scenario.hpp"

namespace {

using namespace vppfreq;

struct Options {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string format = "json";
  std::string which = "closed-form";
  std::string resolution = "51x51";
  bool include_required = false;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario load(const Options& o) {
  Scenario s = parse_scenario(read_file(o.scenario_path));
  if (o.seed) s.sampling.seed = *o.seed;
  if (o.samples) s.sampling.n_samples = *o.samples;
  validate(s);
  return s;
}

OutputFormat parse_format(const std::string& f) {
  return f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
}

SimulateMode parse_mode(const std::string& w) {
  if (w == "ode") return SimulateMode::Ode;
  if (w == "both") return SimulateMode::Both;
  return SimulateMode::ClosedForm;
}

// "N" or "NxM".
std::pair<std::size_t, std::size_t> parse_resolution(const std::string& r) {
  const auto bad = [&] {
    return Error(ErrorCode::InvalidInput, "bad --resolution '" + r + "', expected N or NxM");
  };
  try {
    const auto x = r.find('x');
    std::size_t used = 0;
    if (x == std::string::npos) {
      const auto n = std::stoul(r, &used);
      if (used != r.size()) throw bad();
      return {n, n};
    }
    const auto h = std::stoul(r.substr(0, x), &used);
    if (used != x) throw bad();
    const auto rest = r.substr(x + 1);
    const auto d = std::stoul(rest, &used);
    if (used != rest.size()) throw bad();
    return {h, d};
  } catch (const std::logic_error&) {
    throw bad();
  }
}

void emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + o.out_path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-regulation requirements and IBR allocation for a VPP"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_path, "Output file (default stdout)");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Override sampling seed");
    sub->add_option("--samples", o.samples, "Override number of weight samples");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", o.threads, "Worker threads (0 = hardware)");
  };

  auto* simulate = app.add_subcommand("simulate", "Frequency trajectory as CSV");
  common(simulate);
  simulate->add_option("--which", o.which, "closed-form, ode or both")
      ->check(CLI::IsMember({"closed-form", "ode", "both"}));

  auto* requirements =
      app.add_subcommand("requirements", "Required VPP inertia and damping");
  common(requirements);

  auto* allocate = app.add_subcommand("allocate", "Nash-bargaining allocation");
  common(allocate);
  sampling(allocate);

  auto* pareto = app.add_subcommand("pareto", "Pareto front of the allocation");
  common(pareto);
  sampling(pareto);

  auto* region = app.add_subcommand("region", "Feasible (H, D) region sweep as CSV");
  common(region);
  region->add_option("--resolution", o.resolution, "Grid size N or NxM");
  region->add_flag("--include-required", o.include_required,
                   "Append a row for the determined requirement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_json("InvalidInput", e.what()) << '\n';
    return 2;
  }

  try {
    const Scenario s = load(o);
    std::string text;
    if (simulate->parsed()) {
      text = cmd_simulate(s, parse_mode(o.which));
    } else if (requirements->parsed()) {
      text = cmd_requirements(s);
    } else if (allocate->parsed()) {
      text = cmd_allocate(s, parse_format(o.format), o.threads);
    } else if (pareto->parsed()) {
      text = cmd_pareto(s, parse_format(o.format), o.threads);
    } else {
      const auto [n_h, n_d] = parse_resolution(o.resolution);
      text = cmd_region(s, n_h, n_d, o.include_required);
    }
    emit(o, text);
  } catch (const Error& e) {
    std::cerr << error_json(to_string(e.code()), e.what()) << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << error_json("Internal", e.what()) << '\n';
    return 1;
  }
  return 0;
}
