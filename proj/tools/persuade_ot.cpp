/* Copyright 2026 The persuade-ot Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */
#include <CLI11.hpp>
#include <iostream>

#include "persuade/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Optimal information policies over Laguerre diagrams", "persuade-ot"};
  app.require_subcommand(1);

  persuade::CliOptions opts;
  std::uint64_t seed = 0;
  std::string out_dir;
  int resolution = 0;
  double epsilon = 0.0, eta = 0.0;

  const std::pair<const char *, const char *> commands[] = {
      {"solve", "Optimize one scenario; writes result.json, diagram.json, diagram.svg"},
      {"table", "Run a parameter sweep; writes table.csv plus one directory per row"},
      {"benchmark", "No-information, full-information and Lloyd revenues only"},
      {"export", "Re-render diagram.json and diagram.svg from existing result.json files"},
  };
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Base optimizer seed");
    sub->add_option("--out-dir", out_dir, "Output directory");
    sub->add_option("--resolution", resolution, "Grid cells per axis")->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", epsilon, "Blur, in the config's epsilon_units")->check(CLI::PositiveNumber);
    sub->add_option("--eta", eta, "Penalty weight")->check(CLI::NonNegativeNumber);
    sub->callback([&, sub, name = std::string(name)] {
      opts.command = name;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--out-dir")) opts.out_dir = out_dir;
      if (sub->count("--resolution")) opts.resolution = resolution;
      if (sub->count("--epsilon")) opts.epsilon = epsilon;
      if (sub->count("--eta")) opts.eta = eta;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : persuade::kExitInvalidConfig;
  }
  return persuade::run_command(opts, std::cout, std::cerr);
}
