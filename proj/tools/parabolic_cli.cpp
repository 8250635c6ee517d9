#include "parabolic/study.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace parabolic;

namespace {

int run(const StudyConfig &config) {
  std::ofstream file;
  std::ostream *out = &std::cout;
  if (!config.out.empty()) {
    file.open(config.out);
    if (!file)
      throw ConfigError("cannot open output file '" + config.out + "'");
    out = &file;
    std::ofstream echo(config.out + ".config");
    if (!echo)
      throw ConfigError("cannot open '" + config.out + ".config'");
    write_config(echo, config);
  }

  if (config.probe) {
    write_probe_csv(*out, run_probe(config));
    return 0;
  }

  const ConvergenceReport report = run_convergence_study(config);
  write_convergence_csv(*out, report);
  for (const ConvergenceRow &r : report.rows)
    if (r.failed)
      std::cerr << "level " << r.level << " failed: " << r.failure << '\n';
  return report.failed() ? 1 : 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"cG(1)dG(0) refinement studies for semilinear parabolic problems"};
  std::string config_path, problem, out, sigma, levels, base_level, seed;
  bool probe = false;
  int dump_mesh = -1;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--problem", problem, "eigen | cubic_mms | allen_cahn_mms | zero");
  app.add_option("--levels", levels, "number of refinement levels");
  app.add_option("--base-level", base_level, "coarsest mesh level");
  app.add_option("--sigma", sigma, "coupling exponent in k <= C h^sigma");
  app.add_option("--out", out, "CSV output path (default stdout)");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_flag("--probe", probe, "tabulate regularity ratios instead of errors");
  app.add_option("--dump-mesh", dump_mesh, "write the mesh of a level and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    if (dump_mesh >= 0) {
      write_mesh(std::cout, build_unit_square_mesh(dump_mesh));
      return 0;
    }
    ConfigEntries entries;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw ConfigError("cannot read config file '" + config_path + "'");
      entries = read_config_entries(in);
    }
    const std::pair<const char *, std::string *> flags[] = {{"problem", &problem}, {"levels", &levels},
                                                             {"base_level", &base_level}, {"sigma", &sigma},
                                                             {"out", &out}, {"seed", &seed}};
    for (const auto &[key, value] : flags)
      if (!value->empty())
        entries.emplace_back(key, *value);
    if (probe)
      entries.emplace_back("probe", "true");
    return run(build_config(entries));
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
