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

#include "dwb/csv.hpp"
#include "dwb/error.hpp"
#include "dwb/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace {

namespace ex = dwb::experiment;
namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dwb_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ex::ExperimentConfig parse(const json& j) { return ex::config_from_json(j.dump()); }

TEST(Config, DefaultsFillMissingParams) {
  const auto c = parse({{"kind", "wiring"}});
  EXPECT_EQ(c.kind, ex::Kind::Wiring);
  EXPECT_EQ(c.name, "wiring");
  EXPECT_EQ(c.params, ex::default_params(ex::Kind::Wiring));
  const auto d = parse({{"kind", "wiring"}, {"params", {{"trials", 3}}}});
  EXPECT_EQ(d.params.at("trials"), 3);
  EXPECT_EQ(d.params.at("D"), c.params.at("D"));
}

TEST(Config, RoundTripsLosslessly) {
  for (const auto& r : ex::recipes()) {
    auto c = ex::recipe_config(r);
    c.out_dir = "somewhere/else";
    c.threads = 3;
    EXPECT_EQ(ex::config_from_json(ex::config_to_json(c)), c) << r.name;
  }
}

TEST(Config, RejectsUnknownKindKeysAndTypes) {
  EXPECT_THROW(parse({{"kind", "fft"}}), dwb::UnknownKindError);
  EXPECT_THROW(parse({{"kind", "mesh"}, {"colour", 1}}), dwb::ValidationError);
  EXPECT_THROW(parse({{"kind", "mesh"}, {"params", {{"Dee", 4}}}}), dwb::ValidationError);
  EXPECT_THROW(parse({{"kind", "train-toy"}, {"params", {{"data", {{"colour", 1}}}}}}),
               dwb::ValidationError);
  EXPECT_THROW(ex::config_from_json("not json"), dwb::ValidationError);
  EXPECT_THROW(ex::config_from_json("[]"), dwb::ValidationError);
  EXPECT_THROW(ex::load_config("/nonexistent/config.json"), dwb::ValidationError);
}

TEST(Validate, TypeErrorsAndDomainErrorsAreDistinct) {
  EXPECT_THROW(ex::validate(parse({{"kind", "mesh"}, {"params", {{"D", "many"}}}})),
               dwb::ValidationError);
  EXPECT_THROW(ex::validate(parse({{"kind", "mesh"}, {"params", {{"D", {-4}}}}})),
               dwb::ValidationError);
  EXPECT_THROW(ex::validate(parse({{"kind", "mesh"}, {"params", {{"D", {15}}}}})),
               dwb::ArgumentError);
  EXPECT_THROW(ex::validate(parse({{"kind", "wiring"}, {"params", {{"K", {3}}}}})),
               dwb::ArgumentError);
  EXPECT_THROW(ex::validate(parse({{"kind", "wiring"}, {"params", {{"D", {65536}}}}})),
               dwb::CapacityError);
  EXPECT_THROW(ex::validate(parse({{"kind", "gemm"}, {"params", {{"B_M", 3}}}})),
               dwb::ArgumentError);
  EXPECT_THROW(ex::validate(parse({{"kind", "gemm"}, {"params", {{"policy", "fifo"}}}})),
               dwb::ValidationError);
  EXPECT_THROW(ex::validate(parse({{"kind", "complexity"}, {"params", {{"mode", "flops"}}}})),
               dwb::ValidationError);
  EXPECT_THROW(ex::validate(parse({{"kind", "train-toy"}, {"params", {{"dendrites", {2}}}}})),
               dwb::ArgumentError);
}

TEST(Hash, IgnoresOutputLocationAndThreads) {
  auto a = parse({{"kind", "mesh"}});
  auto b = a;
  b.out_dir = "elsewhere";
  b.threads = 8;
  EXPECT_EQ(ex::config_hash(a), ex::config_hash(b));
  b.seed = 2;
  EXPECT_NE(ex::config_hash(a), ex::config_hash(b));
}

TEST(Recipes, CatalogCoversTheReferenceFigures) {
  const auto& all = ex::recipes();
  EXPECT_GE(all.size(), 6u);
  std::set<std::string> names;
  for (const auto& r : all) {
    names.insert(r.name);
    EXPECT_EQ(r.version, "1");
    EXPECT_NO_THROW(ex::validate(ex::recipe_config(r))) << r.name;
  }
  EXPECT_EQ(names.size(), all.size());
  for (const char* n : {"wiring-2d", "wiring-3d", "eta-map", "sparse-slope",
                        "resnet18-complexity", "memory-constants", "gemm-sweep"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
  EXPECT_THROW(ex::find_recipe("nope"), dwb::ArgumentError);
}

TEST(Run, PointOnlyMeshHasUnitEta) {
  auto c = parse({{"kind", "mesh"}, {"params", {{"K", {1}}}}});
  c.out_dir = scratch("eta").string();
  const auto r = ex::run(c);
  const auto csv = slurp(fs::path(c.out_dir) / "mesh_eta.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "eta");
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "1");
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(r.checks.empty());
}

TEST(Run, ManifestChecksumsDescribeTheFiles) {
  auto c = ex::recipe_config(ex::find_recipe("gemm-sweep"));
  c.out_dir = scratch("manifest").string();
  const auto r = ex::run(c);
  EXPECT_TRUE(r.checks_passed());
  const auto m = json::parse(slurp(fs::path(c.out_dir) / "manifest.json"));
  EXPECT_EQ(m.at("tool"), "dwb");
  EXPECT_EQ(m.at("version"), ex::version());
  EXPECT_EQ(m.at("config_hash"), dwb::hex64(ex::config_hash(c)));
  ASSERT_EQ(m.at("outputs").size(), r.manifest.outputs.size());
  for (const auto& o : m.at("outputs")) {
    const auto bytes = slurp(fs::path(c.out_dir) / o.at("path").get<std::string>());
    EXPECT_EQ(o.at("bytes").get<std::size_t>(), bytes.size());
    EXPECT_EQ(o.at("fnv1a64").get<std::string>(), dwb::hex64(dwb::fnv1a64(bytes)));
  }
  const auto back = ex::load_config(fs::path(c.out_dir) / "config.json");
  EXPECT_EQ(ex::config_hash(back), ex::config_hash(c));
}

TEST(Run, SameSeedGivesIdenticalArtifactsRegardlessOfThreads) {
  auto c = parse({{"kind", "mesh"},
                  {"params", {{"mode", "sparse"}, {"D", {64}}, {"K", {1, 4, 16}}, {"patterns", 8}}}});
  c.out_dir = scratch("det_a").string();
  const auto a = ex::run(c);
  c.out_dir = scratch("det_b").string();
  c.threads = 4;
  const auto b = ex::run(c);
  ASSERT_EQ(a.manifest.outputs.size(), b.manifest.outputs.size());
  for (std::size_t i = 0; i < a.manifest.outputs.size(); ++i) {
    EXPECT_EQ(a.manifest.outputs[i].path, b.manifest.outputs[i].path);
    EXPECT_EQ(a.manifest.outputs[i].checksum, b.manifest.outputs[i].checksum);
  }
}

TEST(Run, EveryCsvHasAHeaderRow) {
  const std::vector<json> configs{
      {{"kind", "wiring"}, {"params", {{"D", {16, 64}}, {"K", {1, 4}}, {"trials", 2}}}},
      {{"kind", "gemm"}, {"params", {{"M", 32}, {"N", 32}, {"L", 32}, {"Q", 512}}}},
      {{"kind", "complexity"}},
      {{"kind", "entropy"}, {"params", {{"trials", 20}}}},
      {{"kind", "train-toy"}, {"params", {{"epochs", 1}, {"seeds", 1}}}}};
  int i = 0;
  for (const auto& j : configs) {
    auto c = parse(j);
    c.out_dir = scratch("csv" + std::to_string(i++)).string();
    const auto r = ex::run(c);
    EXPECT_FALSE(r.failed);
    for (const auto& o : r.manifest.outputs) {
      if (o.path.ends_with(".csv")) {
        const auto text = slurp(fs::path(c.out_dir) / o.path);
        const auto first = text.substr(0, text.find('\n'));
        EXPECT_FALSE(first.empty());
        EXPECT_TRUE(std::isalpha(static_cast<unsigned char>(first[0]))) << o.path;
      }
    }
  }
}

TEST(Run, FailingCheckIsReportedNotThrown) {
  auto c = ex::recipe_config(ex::find_recipe("memory-constants"));
  c.check["stored_bits"] = {1, 2, 3};
  c.out_dir = scratch("failcheck").string();
  const auto r = ex::run(c);
  EXPECT_FALSE(r.checks_passed());
}

TEST(Run, DivergedTrainingMarksTheRunFailed) {
  auto c = parse({{"kind", "train-toy"},
                  {"params", {{"learning_rate", 1e300}, {"epochs", 3}, {"seeds", 1}, {"dendrites", {1}}}}});
  c.out_dir = scratch("diverge").string();
  const auto r = ex::run(c);
  EXPECT_TRUE(r.failed);
  EXPECT_FALSE(r.failure.empty());
}

TEST(Run, UnwritableOutputIsAnIoError) {
  const auto blocker = scratch("blocker");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file, not a directory";
  auto c = parse({{"kind", "mesh"}});
  c.out_dir = (blocker / "sub").string();
  EXPECT_THROW(ex::run(c), dwb::IoError);
  fs::remove(blocker);
}

} // namespace
