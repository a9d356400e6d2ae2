// krlab: densities of complex zeros and critical points of Kostlan random
// polynomials.
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "krlab/cli.hpp"
#include "krlab/errors.hpp"

namespace {

struct RawOptions {
  int m = 1;
  std::string N;
  std::string mode = "crit";
  std::string ensemble = "complex";
  std::vector<std::string> z;
  std::string grid;
  std::string window;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  std::string output;
  std::string format = "csv";
  unsigned workers = 0;
  int y_steps = 20;
  double band = 0.1;
  std::string summary;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected densities of complex zeros and critical points of Kostlan polynomials"};
  app.require_subcommand(1);
  RawOptions raw;

  auto common = [&](CLI::App* sub, bool points) {
    sub->add_option("--m", raw.m, "number of variables")->check(CLI::PositiveNumber);
    sub->add_option("--N", raw.N, "degree, list 10,25,100 or range 10:60:5");
    sub->add_option("--mode", raw.mode, "crit | zeros")->check(CLI::IsMember({"crit", "zeros"}));
    sub->add_option("--ensemble", raw.ensemble, "real | complex")
        ->check(CLI::IsMember({"real", "complex"}));
    sub->add_option("--format", raw.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", raw.output, "output file (default stdout)");
    sub->add_option("--seed", raw.seed, "random seed (default $KRLAB_SEED)");
    sub->add_option("--workers", raw.workers, "worker threads (default: hardware)");
    if (points) {
      sub->add_option("--z", raw.z, "point a+bi, or a+bi;c+di for m > 1 (repeatable)");
      sub->add_option("--grid", raw.grid, "re0:re1:steps,im0:im1:steps (m = 1)");
    }
  };

  auto* density = app.add_subcommand("density", "density at points or on a grid");
  common(density, true);
  auto* ratio = app.add_subcommand("ratio-scan", "real/complex density ratio along the imaginary axis");
  common(ratio, false);
  ratio->add_option("--y-steps", raw.y_steps, "scan y = k / steps, k = 1..steps");
  auto* decay = app.add_subcommand("decay", "fit the decay rate of the real/complex gap");
  common(decay, true);
  auto* mc = app.add_subcommand("mc", "Monte Carlo histogram against the analytic density");
  common(mc, false);
  mc->add_option("--samples", raw.samples, "number of sampled polynomials");
  mc->add_option("--window", raw.window, "re0:re1:cells,im0:im1:cells (default -2:2:10,-2:2:10)");
  mc->add_option("--exclude-band", raw.band, "real ensemble: drop cells meeting |Im z| < band");
  mc->add_option("--summary", raw.summary, "write the JSON summary here (default stderr)");
  auto* closed = app.add_subcommand("closedform", "closed-form densities");
  common(closed, true);
  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
  common(selftest, false);

  CLI11_PARSE(app, argc, argv);

  krlab::RunConfig config;
  try {
    const auto* sub = app.get_subcommands().front();
    config.command = sub->get_name();
    config.m = raw.m;
    config.mode = krlab::parse_mode(raw.mode);
    config.field = krlab::parse_field(raw.ensemble);
    config.format = krlab::parse_format(raw.format);
    config.output = raw.output;
    config.samples = raw.samples;
    config.y_steps = raw.y_steps;
    config.exclusion_band = raw.band;
    config.summary_path = raw.summary;
    config.workers = raw.workers > 0 ? raw.workers : std::max(1u, std::thread::hardware_concurrency());
    config.seed = sub->count("--seed") > 0 ? raw.seed : krlab::seed_from_env(config.seed);

    if (!raw.N.empty())
      config.N_list = krlab::parse_n_list(raw.N);
    else if (config.command == "decay")
      config.N_list = krlab::parse_n_list("10:60:5");
    else if (config.command == "ratio-scan")
      config.N_list = {10, 25, 100};
    else if (config.command == "mc")
      config.N_list = {25};

    for (const auto& p : raw.z) config.points.push_back(krlab::parse_point(p));
    if (!raw.grid.empty()) config.grid = krlab::parse_grid(raw.grid);
    if (!raw.window.empty()) config.grid = krlab::parse_grid(raw.window);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return krlab::run_command(config, std::cout, std::cerr);
}
