/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// dwb: command-line front end for the dendrite workbench.
//
// Parameter precedence is built-in defaults < config file < flags.

#include "dwb/error.hpp"
#include "dwb/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace ex = dwb::experiment;
using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kInvalidConfig = 3,
  kUnknownKind = 4,
  kInvalidValue = 5,
  kIoFailure = 6,
  kRunFailure = 7,
};

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::string config;
  bool check = false;
};

// A flag that, when given, overwrites one entry of params.
struct Override {
  std::string key;
  std::function<bool()> given;
  std::function<json()> value;
};

template <typename T>
Override add_override(CLI::App& app, const std::string& flag, const std::string& key,
                      std::optional<T>& target, const std::string& help) {
  app.add_option(flag, target, help);
  return {key, [&target] { return target.has_value(); }, [&target] { return json(*target); }};
}

template <typename T>
Override add_list_override(CLI::App& app, const std::string& flag, const std::string& key,
                           std::vector<T>& target, const std::string& help) {
  app.add_option(flag, target, help)->delimiter(',');
  return {key, [&target] { return !target.empty(); }, [&target] { return json(target); }};
}

ex::ExperimentConfig resolve(ex::Kind kind, const GlobalFlags& g,
                             const std::vector<Override>& overrides) {
  ex::ExperimentConfig cfg;
  bool out_dir_from_file = false;
  if (!g.config.empty()) {
    cfg = ex::load_config(g.config);
    if (cfg.kind != kind) {
      throw dwb::ValidationError("config kind '" + ex::to_string(cfg.kind) +
                                 "' does not match subcommand '" + ex::to_string(kind) + "'");
    }
    std::ifstream in(g.config);
    out_dir_from_file = json::parse(in, nullptr, false).contains("out_dir");
  } else {
    cfg.kind = kind;
    cfg.name = ex::to_string(kind);
    cfg.params = ex::default_params(kind);
  }
  for (const auto& o : overrides) {
    if (o.given()) {
      cfg.params[o.key] = o.value();
    }
  }
  if (g.seed) {
    cfg.seed = *g.seed;
  }
  if (g.threads) {
    cfg.threads = std::max(1u, *g.threads);
  }
  if (g.out_dir) {
    cfg.out_dir = *g.out_dir;
  } else if (!out_dir_from_file) {
    cfg.out_dir = "out/" + cfg.name;
  }
  return cfg;
}

int execute(const ex::ExperimentConfig& cfg, bool check) {
  const ex::RunResult res = ex::run(cfg);
  for (const auto& line : res.log) {
    std::cout << line << '\n';
  }
  for (const auto& c : res.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  std::cout << "wrote " << res.manifest.outputs.size() << " files and manifest.json to "
            << cfg.out_dir << '\n';
  if (res.failed) {
    std::cerr << "error: " << res.failure << '\n';
    return kRunFailure;
  }
  if (check) {
    if (res.checks.empty()) {
      std::cerr << "warning: --check given but the config defines no checks\n";
    }
    if (!res.checks_passed()) {
      return kCheckFailed;
    }
  }
  return kOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const dwb::UnknownKindError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnknownKind;
  } catch (const dwb::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const dwb::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const dwb::Error& e) {
    std::cerr << "invalid value: " << e.what() << '\n';
    return kInvalidValue;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dendrite workbench: wiring, mesh, GEMM, complexity, entropy and toy-training "
               "experiments"};
  app.set_version_flag("--version", ex::version());
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--out-dir", g.out_dir, "Output directory (default out/<name>)");
  app.add_option("--threads", g.threads, "Worker threads; results do not depend on it");
  app.add_flag("--check", g.check, "Exit 1 when any acceptance check fails");
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);

  std::vector<std::pair<CLI::App*, std::pair<ex::Kind, std::vector<Override>>>> kinds;

  // wiring
  std::vector<std::uint64_t> w_D, w_K, w_dims;
  std::optional<std::uint64_t> w_trials;
  auto* wiring = app.add_subcommand("wiring", "EMST wiring cost of random synapse clouds");
  kinds.push_back({wiring,
                   {ex::Kind::Wiring,
                    {add_list_override(*wiring, "--D", "D", w_D, "Neuron counts"),
                     add_list_override(*wiring, "--K", "K", w_K, "Dendrite counts"),
                     add_list_override(*wiring, "--dims", "dims", w_dims, "Dimensions (2,3)"),
                     add_override(*wiring, "--trials", "trials", w_trials, "Trials per cell")}}});

  // mesh
  std::vector<std::uint64_t> m_D, m_K;
  std::vector<double> m_sparsity;
  std::optional<std::string> m_mode;
  std::optional<std::uint64_t> m_patterns;
  auto* mesh = app.add_subcommand("mesh", "PE-mesh communication cost and eta");
  kinds.push_back(
      {mesh,
       {ex::Kind::Mesh,
        {add_override(*mesh, "--mode", "mode", m_mode, "dense or sparse"),
         add_list_override(*mesh, "--D", "D", m_D, "Neuron counts (perfect squares)"),
         add_list_override(*mesh, "--K", "K", m_K, "Dendrite counts"),
         add_list_override(*mesh, "--sparsity", "sparsity", m_sparsity, "Sparsity levels"),
         add_override(*mesh, "--patterns", "patterns", m_patterns, "Patterns per cell")}}});

  // gemm
  std::optional<std::uint64_t> g_M, g_N, g_L, g_BM, g_BN, g_BL, g_G, g_Q;
  std::vector<std::uint64_t> g_K;
  std::optional<std::string> g_policy;
  auto* gemm = app.add_subcommand("gemm", "Tiled GEMM cache traffic sweep");
  kinds.push_back({gemm,
                   {ex::Kind::Gemm,
                    {add_override(*gemm, "--M", "M", g_M, "Rows of A"),
                     add_override(*gemm, "--N", "N", g_N, "Output columns"),
                     add_override(*gemm, "--L", "L", g_L, "Inner dimension"),
                     add_list_override(*gemm, "--K", "K", g_K, "Dendrite counts"),
                     add_override(*gemm, "--B-M", "B_M", g_BM, "Block rows"),
                     add_override(*gemm, "--B-N", "B_N", g_BN, "Block columns"),
                     add_override(*gemm, "--B-L", "B_L", g_BL, "Block depth"),
                     add_override(*gemm, "--G", "G", g_G, "Group size, 0 = automatic"),
                     add_override(*gemm, "--Q", "Q", g_Q, "Cache capacity in elements"),
                     add_override(*gemm, "--policy", "policy", g_policy,
                                  "none, lru or explicit")}}});

  // complexity
  std::optional<std::string> c_mode, c_arch;
  std::vector<std::uint64_t> c_K;
  std::optional<double> c_wf;
  auto* complexity = app.add_subcommand("complexity", "Parameter, MAC and memory accounting");
  kinds.push_back(
      {complexity,
       {ex::Kind::Complexity,
        {add_override(*complexity, "--mode", "mode", c_mode, "resnet or memory"),
         add_override(*complexity, "--architecture", "architecture", c_arch,
                      "Built-in name or descriptor path"),
         add_list_override(*complexity, "--K", "K", c_K, "Dendrite counts"),
         add_override(*complexity, "--width-factor", "width_factor", c_wf,
                      "Channel multiplier")}}});

  // entropy
  std::optional<std::uint64_t> e_trials, e_maxK, e_maxV;
  auto* entropy = app.add_subcommand("entropy", "Entropy of dendritic sums");
  std::vector<Override> e_over = {
      add_override(*entropy, "--trials", "trials", e_trials, "Random joints"),
      add_override(*entropy, "--max-K", "max_K", e_maxK, "Largest component count"),
      add_override(*entropy, "--max-values", "max_values", e_maxV, "Support values per component")};
  auto* verify = entropy->add_subcommand("verify", "Check the sum-entropy identity on random joints");
  verify->fallthrough();
  kinds.push_back({entropy, {ex::Kind::Entropy, e_over}});

  // train-toy
  std::optional<std::uint64_t> t_epochs, t_seeds, t_width;
  std::optional<double> t_lr;
  std::vector<std::uint64_t> t_K;
  auto* toy = app.add_subcommand("train-toy", "Train point and dendritic MLPs on Gaussian blobs");
  kinds.push_back({toy,
                   {ex::Kind::TrainToy,
                    {add_override(*toy, "--epochs", "epochs", t_epochs, "Epochs"),
                     add_override(*toy, "--seeds", "seeds", t_seeds, "Seeds per model"),
                     add_override(*toy, "--width", "width", t_width, "Point-model hidden width"),
                     add_override(*toy, "--learning-rate", "learning_rate", t_lr, "SGD step"),
                     add_list_override(*toy, "--dendrites", "dendrites", t_K,
                                       "Dendrite counts")}}});

  // recipes
  auto* recipes = app.add_subcommand("recipes", "List, print or run the bundled recipes");
  std::string emit;
  std::string run_recipe;
  recipes->add_option("--emit", emit, "Print the named recipe's config");
  recipes->add_option("--run", run_recipe, "Run the named recipe");

  // run
  auto* run = app.add_subcommand("run", "Run a config file or a recipe");
  std::string run_path;
  std::string run_name;
  run->add_option("config", run_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--recipe", run_name, "Recipe name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto run_config = [&](ex::ExperimentConfig cfg) {
    if (g.seed) {
      cfg.seed = *g.seed;
    }
    if (g.threads) {
      cfg.threads = std::max(1u, *g.threads);
    }
    if (g.out_dir) {
      cfg.out_dir = *g.out_dir;
    }
    return execute(cfg, g.check);
  };

  if (*recipes) {
    return guarded([&] {
      if (!emit.empty()) {
        std::cout << ex::find_recipe(emit).config_json;
        return int{kOk};
      }
      if (!run_recipe.empty()) {
        auto cfg = ex::recipe_config(ex::find_recipe(run_recipe));
        cfg.out_dir = "out/" + cfg.name;
        return run_config(cfg);
      }
      for (const auto& r : ex::recipes()) {
        std::cout << r.name << " (v" << r.version << "): " << r.description << '\n';
      }
      return int{kOk};
    });
  }
  if (*run) {
    return guarded([&] {
      if (run_path.empty() == run_name.empty()) {
        std::cerr << "run: give exactly one of a config path or --recipe\n";
        return int{kUsage};
      }
      ex::ExperimentConfig cfg;
      if (!run_name.empty()) {
        cfg = ex::recipe_config(ex::find_recipe(run_name));
        cfg.out_dir = "out/" + cfg.name;
      } else {
        cfg = ex::load_config(run_path);
      }
      return run_config(cfg);
    });
  }
  for (const auto& [sub, spec] : kinds) {
    if (*sub) {
      return guarded([&] { return execute(resolve(spec.first, g, spec.second), g.check); });
    }
  }
  return kUsage;
}
