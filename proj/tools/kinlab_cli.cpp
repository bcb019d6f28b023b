// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Uses only the C interface of the shared library.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kinlab.h"

namespace {

int report(const std::string& stage, kl_status status) {
  if (status == KL_OK) {
    std::fprintf(stderr, "kinlab: status=0 stage=%s ok\n", stage.c_str());
  } else {
    std::fprintf(stderr, "kinlab: status=%d stage=%s reason=\"%s\"\n",
                 int(status), stage.c_str(), kl_last_error());
  }
  return int(status);
}

struct ConfigHandle {
  kl_config* cfg = nullptr;
  ~ConfigHandle() { kl_config_free(cfg); }
};

std::vector<double> parse_csv_list(const std::string& text) {
  std::vector<double> xs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) xs.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return xs;
}

// common flags shared by the pipeline subcommands
struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string time_samples;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "flat key-value configuration file");
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "base seed (overrides config)");
    cmd->add_option("--time-samples", time_samples,
                    "comma-separated sample times (overrides config)");
  }

  kl_status build(ConfigHandle& handle) const {
    kl_status st = config_path.empty()
                       ? kl_config_new(&handle.cfg)
                       : kl_config_load(config_path.c_str(), &handle.cfg);
    if (st != KL_OK) return st;
    if (!out_dir.empty()) {
      st = kl_config_set(handle.cfg, "out", out_dir.c_str());
      if (st != KL_OK) return st;
    }
    if (!seed.empty()) {
      st = kl_config_set(handle.cfg, "seed", seed.c_str());
      if (st != KL_OK) return st;
    }
    if (!time_samples.empty()) {
      std::string spaced = time_samples;
      for (char& ch : spaced)
        if (ch == ',') ch = ' ';
      st = kl_config_set(handle.cfg, "times", spaced.c_str());
      if (st != KL_OK) return st;
    }
    return KL_OK;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("kinetic limit laboratory (") + kl_version() + ")"};
  app.require_subcommand(1);
  app.footer(std::string("Configuration keys:\n") + kl_config_keys());

  struct Stage {
    const char* name;
    kl_status (*run)(const kl_config*);
    CommonOpts opts;
  };
  std::vector<std::unique_ptr<Stage>> stages;
  for (auto [name, fn, help] :
       {std::tuple{"simulate", kl_run_simulate,
                   "run the seeded ensemble and persist event logs"},
        std::tuple{"graphs", kl_run_graphs,
                   "emit collision-graph statistics from persisted logs"},
        std::tuple{"estimate", kl_run_estimate,
                   "emit histograms and cumulants from persisted logs"},
        std::tuple{"boltzmann", kl_run_boltzmann,
                   "solve the kinetic equation and persist fields"},
        std::tuple{"compare", kl_run_compare,
                   "compare persisted estimate and solver artifacts"}}) {
    auto stage = std::make_unique<Stage>();
    stage->name = name;
    stage->run = fn;
    CLI::App* cmd = app.add_subcommand(name, help);
    stage->opts.attach(cmd);
    Stage* raw = stage.get();
    cmd->callback([raw] {
      ConfigHandle handle;
      kl_status st = raw->opts.build(handle);
      if (st == KL_OK) st = raw->run(handle.cfg);
      std::exit(report(raw->name, st));
    });
    stages.push_back(std::move(stage));
  }

  // sweep
  auto sweep_opts = std::make_unique<CommonOpts>();
  std::string eps_list_text;
  {
    CLI::App* cmd = app.add_subcommand(
        "sweep", "full pipeline over a decreasing diameter list");
    sweep_opts->attach(cmd);
    cmd->add_option("--eps-list", eps_list_text,
                    "comma-separated sphere diameters, strictly decreasing")
        ->required();
    CommonOpts* raw = sweep_opts.get();
    std::string* eps_raw = &eps_list_text;
    cmd->callback([raw, eps_raw] {
      ConfigHandle handle;
      kl_status st = raw->build(handle);
      if (st == KL_OK) {
        std::vector<double> eps;
        try {
          eps = parse_csv_list(*eps_raw);
        } catch (const std::exception&) {
          std::fprintf(stderr,
                       "kinlab: status=1 stage=sweep reason=\"--eps-list: "
                       "expected comma-separated numbers\"\n");
          std::exit(1);
        }
        st = kl_run_sweep(handle.cfg, eps.data(), int(eps.size()));
      }
      std::exit(report("sweep", st));
    });
  }

  // penrose
  int max_n = 5;
  {
    CLI::App* cmd = app.add_subcommand(
        "penrose", "exhaustively verify the connected-subgraph tree bound");
    cmd->add_option("--max-n", max_n, "largest vertex count to enumerate")
        ->capture_default_str();
    cmd->callback([&max_n] {
      char line[160] = {0};
      const kl_status st = kl_run_penrose(max_n, line, sizeof line);
      if (st == KL_OK) std::printf("%s\n", line);
      std::exit(report("penrose", st));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::fprintf(stderr, "kinlab: status=1 stage=cli reason=\"%s\"\n",
                 e.what());
    return 1;
  }
  return 0;
}
