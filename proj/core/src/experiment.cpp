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

#include "dwb/experiment.hpp"

#include "dwb/arch.hpp"
#include "dwb/csv.hpp"
#include "dwb/dendritic.hpp"
#include "dwb/entropy.hpp"
#include "dwb/error.hpp"
#include "dwb/gemm.hpp"
#include "dwb/intmath.hpp"
#include "dwb/mesh.hpp"
#include "dwb/parallel.hpp"
#include "dwb/toy_trainer.hpp"
#include "dwb/wiring.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace dwb::experiment {

using nlohmann::json;

namespace {

// ---- typed access to params ----------------------------------------------

const json& field(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw ValidationError("missing parameter '" + key + "'");
  }
  return j.at(key);
}

bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t count(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!is_count(v)) {
    throw ValidationError("parameter '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double real(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_number()) {
    throw ValidationError("parameter '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::string text(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_string()) {
    throw ValidationError("parameter '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<std::uint64_t> counts(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.empty()) {
    throw ValidationError("parameter '" + key + "' must be a nonempty list");
  }
  std::vector<std::uint64_t> out;
  for (const auto& x : v) {
    if (!is_count(x)) {
      throw ValidationError("parameter '" + key + "' must list non-negative integers");
    }
    out.push_back(x.get<std::uint64_t>());
  }
  return out;
}

std::vector<double> reals(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.empty()) {
    throw ValidationError("parameter '" + key + "' must be a nonempty list");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw ValidationError("parameter '" + key + "' must list numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

void reject_unknown(const json& given, const json& allowed, const std::string& where) {
  for (const auto& [key, value] : given.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError("unknown key '" + key + "' in " + where);
    }
    if (value.is_object() && allowed.at(key).is_object() && !allowed.at(key).empty()) {
      reject_unknown(value, allowed.at(key), where + "." + key);
    }
  }
}

void require_square(std::uint64_t K) {
  if (K == 0 || !exact_sqrt(K)) {
    throw ArgumentError("K=" + std::to_string(K) + " is not a positive perfect square");
  }
}

// ---- typed parameter sets ------------------------------------------------

struct WiringParams {
  std::vector<std::uint64_t> D, K, dims;
  std::uint64_t trials = 0;
};

WiringParams wiring_params(const json& p) {
  WiringParams w{counts(p, "D"), counts(p, "K"), counts(p, "dims"), count(p, "trials")};
  for (auto d : w.dims) {
    if (d != 2 && d != 3) {
      throw ArgumentError("dims must be 2 or 3");
    }
  }
  if (w.trials == 0) {
    throw ArgumentError("trials must be at least 1");
  }
  for (auto K : w.K) {
    require_square(K);
    for (auto D : w.D) {
      if (D == 0) {
        throw ArgumentError("D must be positive");
      }
      if (D * *exact_sqrt(K) > wiring::kMaxPoints) {
        throw CapacityError("D=" + std::to_string(D) + ", K=" + std::to_string(K) +
                            " exceeds the point limit");
      }
    }
  }
  return w;
}

struct MeshParams {
  std::string mode;
  std::vector<std::uint64_t> D, K;
  std::vector<double> sparsity;
  std::uint64_t patterns = 0;
};

MeshParams mesh_params(const json& p) {
  MeshParams m{text(p, "mode"), counts(p, "D"), counts(p, "K"), reals(p, "sparsity"),
               count(p, "patterns")};
  if (m.mode != "dense" && m.mode != "sparse") {
    throw ValidationError("mesh mode must be 'dense' or 'sparse'");
  }
  for (auto D : m.D) {
    if (D == 0 || !exact_sqrt(D)) {
      throw ArgumentError("D=" + std::to_string(D) + " is not a positive perfect square");
    }
  }
  for (auto K : m.K) {
    if (K == 0) {
      throw ArgumentError("K must be positive");
    }
  }
  if (m.mode == "sparse") {
    for (double s : m.sparsity) {
      if (!(s >= 0.0 && s < 1.0)) {
        throw ArgumentError("sparsity values must lie in [0, 1)");
      }
    }
    if (m.patterns == 0) {
      throw ArgumentError("patterns must be at least 1");
    }
    for (auto K : m.K) {
      require_square(K);
      for (auto D : m.D) {
        mesh::MeshConfig cfg(D, K);
        if (D % *exact_sqrt(K) != 0) {
          throw ArgumentError("D / sqrt(K) must be an integer for sparse runs");
        }
      }
    }
  }
  return m;
}

struct GemmParams {
  gemm::GemmShape shape;
  std::vector<std::uint64_t> K;
  gemm::TilePlan plan;
  gemm::CacheModel cache;
};

GemmParams gemm_params(const json& p) {
  GemmParams g;
  g.shape = {count(p, "M"), count(p, "N"), count(p, "L"), 1};
  g.K = counts(p, "K");
  g.plan = {count(p, "B_M"), count(p, "B_N"), count(p, "B_L"), count(p, "G"),
            gemm::Ordering::Grouped};
  g.cache = {count(p, "Q"), gemm::parse_policy(text(p, "policy"))};
  for (auto K : g.K) {
    gemm::GemmShape s = g.shape;
    s.K = K;
    gemm::TilePlan plan = g.plan;
    plan.G = plan.G == 0 ? gemm::auto_group(s, plan, g.cache.capacity) : plan.G;
    gemm::validate(s, plan);
  }
  return g;
}

struct ComplexityParams {
  std::string mode;
  std::string architecture;
  std::vector<std::uint64_t> K;
  double width_factor = 1.0;
  std::uint64_t height = 0;
  std::uint64_t width = 0;
  std::vector<std::pair<dendrite::LayerShape, dendrite::MemoryScheme>> memory_rows;
};

dendrite::MemoryScheme parse_scheme(const std::string& s, std::uint64_t bits) {
  if (s == "full_precision") {
    return dendrite::MemoryScheme::full_precision(bits);
  }
  if (s == "bit_mask") {
    return dendrite::MemoryScheme::bit_mask(bits);
  }
  throw ValidationError("unknown memory scheme '" + s + "'");
}

ComplexityParams complexity_params(const json& p) {
  ComplexityParams c;
  c.mode = text(p, "mode");
  if (c.mode == "resnet") {
    c.architecture = text(p, "architecture");
    c.K = counts(p, "K");
    c.width_factor = real(p, "width_factor");
    const json& in = field(p, "input");
    c.height = count(in, "height");
    c.width = count(in, "width");
    for (auto K : c.K) {
      require_square(K);
    }
    if (!(c.width_factor > 0.0)) {
      throw ArgumentError("width_factor must be positive");
    }
  } else if (c.mode == "memory") {
    const std::uint64_t bits = count(p, "bits");
    const json& layers = field(p, "layers");
    if (!layers.is_array() || layers.empty()) {
      throw ValidationError("parameter 'layers' must be a nonempty list");
    }
    for (const auto& l : layers) {
      dendrite::LayerShape shape{count(l, "n_inputs"), count(l, "n_neurons"), count(l, "K")};
      if (shape.n_inputs == 0 || shape.n_neurons == 0 || shape.dendrites == 0) {
        throw ArgumentError("layer shapes must be positive");
      }
      c.memory_rows.emplace_back(shape, parse_scheme(text(l, "scheme"), bits));
    }
  } else {
    throw ValidationError("complexity mode must be 'resnet' or 'memory'");
  }
  return c;
}

struct EntropyParams {
  std::uint64_t trials = 0;
  std::uint64_t max_K = 0;
  std::uint64_t max_values = 0;
};

EntropyParams entropy_params(const json& p) {
  EntropyParams e{count(p, "trials"), count(p, "max_K"), count(p, "max_values")};
  if (e.max_K == 0 || e.max_values == 0) {
    throw ArgumentError("max_K and max_values must be positive");
  }
  return e;
}

struct ToyParams {
  toy::TrainConfig base;
  std::vector<std::uint64_t> dendrites;
  std::uint64_t seeds = 0;
};

ToyParams toy_params(const json& p) {
  ToyParams t;
  const json& d = field(p, "data");
  t.base.data = {count(d, "features"),   count(d, "classes"),    count(d, "clusters_per_class"),
                 real(d, "cluster_std"), real(d, "spread"),      count(d, "train_size"),
                 count(d, "test_size")};
  t.base.width = count(p, "width");
  t.base.learning_rate = real(p, "learning_rate");
  t.base.epochs = count(p, "epochs");
  t.base.batch_size = count(p, "batch_size");
  t.base.init_gain = real(p, "init_gain");
  const std::string act = text(p, "activation");
  if (act == "relu") {
    t.base.activation = dendrite::Activation::relu();
  } else if (act == "leaky_relu") {
    t.base.activation = dendrite::Activation::leaky_relu(real(p, "negative_slope"));
  } else {
    throw ValidationError("activation must be 'relu' or 'leaky_relu'");
  }
  t.dendrites = counts(p, "dendrites");
  t.seeds = count(p, "seeds");
  if (t.seeds == 0) {
    throw ArgumentError("seeds must be at least 1");
  }
  for (auto K : t.dendrites) {
    toy::TrainConfig cfg = t.base;
    cfg.dendrites = K;
    toy::network_shapes(cfg);
  }
  if (t.base.data.classes < 2 || t.base.data.features == 0 || t.base.data.clusters_per_class == 0) {
    throw ArgumentError("data needs >= 2 classes, >= 1 feature and >= 1 cluster");
  }
  if (t.base.batch_size == 0 || !(t.base.learning_rate > 0.0)) {
    throw ArgumentError("batch_size and learning_rate must be positive");
  }
  return t;
}

// ---- artifact writing ----------------------------------------------------

class Artifacts {
public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw IoError("cannot create output directory " + dir_.string());
    }
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir_ / name, content);
    files_.push_back({name, content.size(), hex64(fnv1a64(content))});
  }
  void write(const std::string& name, const CsvTable& table) { write(name, table.str()); }

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::vector<OutputFile> files() const { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) { return format_real(v); }

bool in_range(const json& range, double v) {
  if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
    throw ValidationError("check ranges must be [low, high]");
  }
  return v >= range[0].get<double>() && v <= range[1].get<double>();
}

// ---- runners -------------------------------------------------------------

void run_wiring(const ExperimentConfig& cfg, Artifacts& out, RunResult& res) {
  const WiringParams p = wiring_params(cfg.params);
  std::vector<wiring::WiringEstimate> all;
  json fits = json::array();
  std::map<std::uint64_t, wiring::PowerLawFit> by_dim;
  for (auto dim : p.dims) {
    std::vector<wiring::WiringEstimate> cells;
    for (auto D : p.D) {
      for (auto K : p.K) {
        cells.push_back(wiring::wiring_cost(D, K, dim, p.trials, cfg.seed, cfg.threads));
      }
    }
    try {
      const auto fit = wiring::fit_power_law(cells);
      by_dim[dim] = fit;
      fits.push_back({{"dim", dim}, {"alpha", fit.alpha}, {"beta", fit.beta},
                      {"residual", fit.residual}});
      res.log.push_back("dim " + std::to_string(dim) + ": beta=" + fmt(fit.beta) +
                        " alpha=" + fmt(fit.alpha));
    } catch (const DegenerateFitError&) {
      res.log.push_back("dim " + std::to_string(dim) + ": fewer than two distinct D*sqrt(K), no fit");
    } catch (const ArgumentError&) {
      res.log.push_back("dim " + std::to_string(dim) + ": zero tree length, no fit");
    }
    all.insert(all.end(), cells.begin(), cells.end());
  }
  out.write("wiring.csv", wiring::estimates_csv(all));
  out.write("wiring_fit.json", json{{"fits", fits}}.dump(2) + "\n");

  if (cfg.check.contains("beta")) {
    for (const auto& [dim_key, range] : cfg.check.at("beta").items()) {
      const std::uint64_t dim = std::stoull(dim_key);
      CheckResult c{"beta_" + dim_key + "d", false, "no fit"};
      if (auto it = by_dim.find(dim); it != by_dim.end()) {
        c.passed = in_range(range, it->second.beta);
        c.detail = "beta=" + fmt(it->second.beta) + " range " + range.dump();
      }
      res.checks.push_back(c);
    }
  }
}

void run_mesh_dense(const ExperimentConfig& cfg, const MeshParams& p, Artifacts& out,
                    RunResult& res) {
  auto K = p.K;
  std::sort(K.begin(), K.end());
  const auto reports = mesh::eta_map(p.D, K);
  out.write("mesh_eta.csv", mesh::cost_reports_csv(reports));
  if (cfg.check.value("eta_k1_exact", false)) {
    bool ok = true;
    for (const auto& r : reports) {
      ok = ok && (r.K != 1 || r.eta == 1.0);
    }
    res.checks.push_back({"eta_k1_exact", ok, ok ? "eta(D,1) = 1 for every D" : "eta(D,1) != 1"});
  }
  if (cfg.check.contains("eta_decreasing_from_D")) {
    const std::uint64_t from = count(cfg.check, "eta_decreasing_from_D");
    bool ok = true;
    std::string detail = "strictly decreasing in K for D >= " + std::to_string(from);
    for (std::size_t i = 1; i < reports.size(); ++i) {
      const auto& a = reports[i - 1];
      const auto& b = reports[i];
      if (a.D == b.D && b.D >= from && !(b.eta < a.eta)) {
        ok = false;
        detail = "eta(" + std::to_string(b.D) + "," + std::to_string(b.K) + ") >= eta(" +
                 std::to_string(a.D) + "," + std::to_string(a.K) + ")";
      }
    }
    res.checks.push_back({"eta_decreasing", ok, detail});
  }
}

void run_mesh_sparse(const ExperimentConfig& cfg, const MeshParams& p, Artifacts& out,
                     RunResult& res) {
  CsvTable patterns({"D", "K", "sparsity", "pattern_id", "cost"});
  CsvTable summary({"D", "K", "sparsity", "mean", "stddev", "closed_form", "empty_dimensions"});
  CsvTable slopes({"D", "sparsity", "slope"});
  std::map<std::string, std::vector<double>> slope_by_sparsity;
  for (auto D : p.D) {
    for (double s : p.sparsity) {
      std::vector<std::pair<std::uint64_t, double>> costs;
      for (auto K : p.K) {
        const mesh::MeshConfig mc(D, K);
        const auto r = mesh::sparse_delivery_cost(mc, s, p.patterns, cfg.seed, cfg.threads);
        for (std::size_t i = 0; i < r.pattern_costs.size(); ++i) {
          patterns.add_row({D, K, s, i, r.pattern_costs[i]});
        }
        summary.add_row({D, K, s, r.mean, r.stddev, mesh::dendritic_delivery_cost(mc),
                         r.empty_dimensions});
        if (r.empty_dimensions > 0) {
          res.log.push_back("warning: D=" + std::to_string(D) + " K=" + std::to_string(K) +
                            " sparsity=" + fmt(s) + ": " + std::to_string(r.empty_dimensions) +
                            " input dimensions had no targets and contribute 0");
        }
        costs.emplace_back(K, r.mean);
      }
      try {
        const double slope = mesh::fit_k_slope(costs);
        slopes.add_row({D, s, slope});
        slope_by_sparsity[fmt(s)].push_back(slope);
        res.log.push_back("D=" + std::to_string(D) + " sparsity=" + fmt(s) + ": slope " +
                          fmt(slope));
      } catch (const Error&) {
        res.log.push_back("D=" + std::to_string(D) + " sparsity=" + fmt(s) + ": no slope fit");
      }
    }
  }
  out.write("mesh_sparse.csv", patterns);
  out.write("mesh_sparse_summary.csv", summary);
  out.write("mesh_slopes.csv", slopes);
  if (cfg.check.contains("slope")) {
    for (const auto& [key, range] : cfg.check.at("slope").items()) {
      CheckResult c{"slope_sparsity_" + key, false, "no slope for sparsity " + key};
      if (auto it = slope_by_sparsity.find(key); it != slope_by_sparsity.end()) {
        c.passed = true;
        c.detail.clear();
        for (double v : it->second) {
          c.passed = c.passed && in_range(range, v);
          c.detail += (c.detail.empty() ? "slope=" : ",") + fmt(v);
        }
        c.detail += " range " + range.dump();
      }
      res.checks.push_back(c);
    }
  }
}

void run_gemm(const ExperimentConfig& cfg, Artifacts& out, RunResult& res) {
  const GemmParams p = gemm_params(cfg.params);
  const auto rows = gemm::dendritic_reduction_sweep(p.shape, p.K, p.cache, p.plan);
  out.write("gemm_sweep.csv", gemm::sweep_csv(rows));
  for (const auto& r : rows) {
    res.log.push_back("K=" + std::to_string(r.shape.K) + " G=" + std::to_string(r.plan.G) +
                      ": reads " + std::to_string(r.traffic.reads_global) + " (analytic " +
                      fmt(r.traffic.analytic_reads) + "), read ratio " + fmt(r.read_ratio));
  }
  const bool ref_is_point = rows.front().shape.K == 1;
  if (cfg.check.contains("read_ratio_tolerance")) {
    const double tol = real(cfg.check, "read_ratio_tolerance");
    bool ok = ref_is_point;
    std::string detail = ref_is_point ? "" : "first K must be 1";
    for (std::size_t i = 1; i < rows.size() && ref_is_point; ++i) {
      const double target = 1.0 / std::sqrt(static_cast<double>(rows[i].shape.K));
      const double rel = std::abs(rows[i].read_ratio / target - 1.0);
      ok = ok && rel <= tol;
      detail += "K=" + std::to_string(rows[i].shape.K) + ":" + fmt(rows[i].read_ratio) + " ";
    }
    res.checks.push_back({"read_ratio", ok, detail + "tolerance " + fmt(tol)});
  }
  if (cfg.check.value("write_ratio_exact", false)) {
    bool ok = ref_is_point;
    for (std::size_t i = 1; i < rows.size() && ref_is_point; ++i) {
      const std::uint64_t root = *exact_sqrt(rows[i].shape.K);
      ok = ok && rows[i].traffic.writes_global * root == rows.front().traffic.writes_global;
    }
    res.checks.push_back({"write_ratio", ok, "writes(K) * sqrt(K) == writes(1)"});
  }
}

void run_complexity(const ExperimentConfig& cfg, Artifacts& out, RunResult& res) {
  const ComplexityParams p = complexity_params(cfg.params);
  if (p.mode == "memory") {
    CsvTable t({"n_inputs", "n_neurons", "K", "scheme", "bits_per_value", "stored_bits"});
    std::vector<std::uint64_t> bits;
    for (const auto& [shape, scheme] : p.memory_rows) {
      bits.push_back(dendrite::activation_memory_bits(shape, scheme));
      t.add_row({shape.n_inputs, shape.n_neurons, shape.dendrites,
                 scheme.kind == dendrite::MemoryScheme::Kind::FullPrecision ? "full_precision"
                                                                            : "bit_mask",
                 scheme.bits_per_value, bits.back()});
    }
    out.write("memory.csv", t);
    if (cfg.check.contains("stored_bits")) {
      const auto expected = counts(cfg.check, "stored_bits");
      const bool ok = expected == bits;
      std::string got;
      for (auto b : bits) {
        got += (got.empty() ? "" : ",") + std::to_string(b);
      }
      res.checks.push_back({"stored_bits", ok, "got " + got + " expected " +
                                                   cfg.check.at("stored_bits").dump()});
    }
    return;
  }

  const bool is_path = p.architecture.find('/') != std::string::npos ||
                       p.architecture.ends_with(".json");
  const arch::ArchDescriptor base = is_path ? arch::load_architecture(p.architecture)
                                            : arch::builtin_architecture(p.architecture);
  const arch::InputShape input{base.input.channels, p.height, p.width};
  const auto base_report = arch::count_macs(base, input);
  std::map<std::string, std::uint64_t> base_params;
  for (const auto& l : base_report.layers) {
    base_params[l.name] = l.params;
  }

  CsvTable table({"K", "psi", "MMACs", "params", "ideal_params"});
  CsvTable layers({"K", "layer", "kind", "role", "dendrites", "in", "out", "params",
                   "ideal_params", "macs", "baseline_params", "param_delta"});
  std::map<std::uint64_t, std::pair<std::uint64_t, double>> totals;
  for (auto K : p.K) {
    const auto a = arch::scale_architecture(base, K, p.width_factor);
    const auto rep = arch::count_macs(a, input);
    const double psi = arch::psi(a, base);
    table.add_row({K, psi, rep.total_macs() / 1e6, rep.total_params, rep.total_ideal_params});
    totals[K] = {rep.total_params, rep.total_macs() / 1e6};
    for (const auto& l : rep.layers) {
      const auto bp = base_params.count(l.name) ? base_params.at(l.name) : 0;
      layers.add_row({K, l.name, l.kind, l.role, l.dendrites, l.in, l.out, l.params,
                      l.ideal_params, l.macs(), bp,
                      static_cast<long long>(l.params) - static_cast<long long>(bp)});
    }
    res.log.push_back("K=" + std::to_string(K) + ": psi=" + fmt(psi) + " MMACs=" +
                      fmt(rep.total_macs() / 1e6) + " params=" + std::to_string(rep.total_params));
  }
  out.write("complexity_table.csv", table);
  out.write("complexity_layers.csv", layers);

  const double tol = cfg.check.value("tolerance", 0.01);
  auto compare = [&](const std::string& key, bool params) {
    if (!cfg.check.contains(key)) {
      return;
    }
    for (const auto& [k_key, target_json] : cfg.check.at(key).items()) {
      const std::uint64_t K = std::stoull(k_key);
      CheckResult c{key + "_K" + k_key, false, "K not in run"};
      if (auto it = totals.find(K); it != totals.end() && target_json.is_number()) {
        const double target = target_json.get<double>();
        const double got = params ? static_cast<double>(it->second.first) : it->second.second;
        const double rel = (got - target) / target;
        c.passed = std::abs(rel) <= tol;
        c.detail = "got " + fmt(got) + " target " + fmt(target) + " rel " + fmt(rel);
      }
      res.checks.push_back(c);
    }
  };
  compare("params", true);
  compare("mmacs", false);
  if (cfg.check.contains("exact_params_K") && cfg.check.contains("params")) {
    for (auto K : counts(cfg.check, "exact_params_K")) {
      const std::string key = std::to_string(K);
      const auto& targets = cfg.check.at("params");
      const bool ok = totals.count(K) && targets.contains(key) &&
                      totals.at(K).first == targets.at(key).get<std::uint64_t>();
      res.checks.push_back({"params_exact_K" + key, ok, ok ? "exact" : "mismatch"});
    }
  }
}

void run_entropy(const ExperimentConfig& cfg, Artifacts& out, RunResult& res) {
  const EntropyParams p = entropy_params(cfg.params);
  const auto r = entropy::verify_entropy_identity(cfg.seed, p.trials, p.max_K, p.max_values);
  const json summary = {{"trials", r.trials},
                        {"failures", r.failures},
                        {"passed", r.passed()},
                        {"worst_identity_residual", r.worst_identity_residual},
                        {"worst_dual_path_gap", r.worst_dual_path_gap},
                        {"worst_sum_given_components", r.worst_sum_given_components},
                        {"bound_violations", r.bound_violations},
                        {"equality_mismatches", r.equality_mismatches}};
  out.write("entropy_verify.json", summary.dump(2) + "\n");
  res.log.push_back(std::string(r.passed() ? "PASS" : "FAIL") + " " + std::to_string(r.trials) +
                    " trials, worst residual " + fmt(r.worst_identity_residual));
  if (cfg.check.contains("max_residual")) {
    const double thr = real(cfg.check, "max_residual");
    const bool ok = r.passed() && r.worst_identity_residual < thr && r.worst_dual_path_gap < thr;
    res.checks.push_back({"entropy_identity", ok,
                          "worst residual " + fmt(r.worst_identity_residual) + ", failures " +
                              std::to_string(r.failures)});
  }
}

void run_toy(const ExperimentConfig& cfg, Artifacts& out, RunResult& res) {
  const ToyParams p = toy_params(cfg.params);
  struct Job {
    std::uint64_t K;
    std::uint64_t seed;
    toy::TrainResult result;
  };
  std::vector<Job> jobs;
  for (auto K : p.dendrites) {
    for (std::uint64_t s = 0; s < p.seeds; ++s) {
      jobs.push_back({K, cfg.seed + s, {}});
    }
  }
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    toy::TrainConfig tc = p.base;
    tc.dendrites = jobs[i].K;
    jobs[i].result = toy::train_toy(tc, jobs[i].seed);
  });

  CsvTable metrics({"K", "seed", "epoch", "loss", "accuracy"});
  CsvTable summary({"K", "seed", "status", "initial_accuracy", "final_accuracy", "weights"});
  std::map<std::uint64_t, double> mean_acc;
  for (const auto& j : jobs) {
    for (const auto& m : j.result.curve) {
      metrics.add_row({j.K, j.seed, m.epoch, m.loss, m.accuracy});
    }
    const bool ok = j.result.status == toy::TrainStatus::Ok;
    summary.add_row({j.K, j.seed, ok ? "ok" : "diverged", j.result.initial_accuracy,
                     j.result.final_accuracy, j.result.weight_count});
    mean_acc[j.K] += j.result.final_accuracy / static_cast<double>(p.seeds);
    if (!ok) {
      res.failed = true;
      res.failure = "K=" + std::to_string(j.K) + " seed " + std::to_string(j.seed) + ": " +
                    j.result.message;
    }
  }
  out.write("toy_metrics.csv", metrics);
  out.write("toy_summary.csv", summary);
  for (const auto& [K, acc] : mean_acc) {
    res.log.push_back("K=" + std::to_string(K) + ": mean final accuracy " + fmt(acc));
  }
  if (cfg.check.contains("max_gap_points")) {
    const double gap = real(cfg.check, "max_gap_points");
    bool ok = mean_acc.count(1) > 0;
    std::string detail = ok ? "" : "no point-model (K=1) run";
    for (const auto& [K, acc] : mean_acc) {
      if (K == 1 || !mean_acc.count(1)) {
        continue;
      }
      const double d = 100.0 * std::abs(acc - mean_acc.at(1));
      ok = ok && d <= gap;
      detail += "K=" + std::to_string(K) + " gap " + fmt(d) + " points ";
    }
    res.checks.push_back({"accuracy_gap", ok, detail + "limit " + fmt(gap)});
  }
  if (cfg.check.contains("min_accuracy")) {
    const double floor = real(cfg.check, "min_accuracy");
    bool ok = true;
    for (const auto& [K, acc] : mean_acc) {
      ok = ok && acc > floor;
    }
    res.checks.push_back({"min_accuracy", ok, "every mean accuracy > " + fmt(floor)});
  }
}

json canonical(const ExperimentConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"name", c.name},
          {"seed", c.seed},
          {"params", c.params},
          {"check", c.check}};
}

} // namespace

std::string version() { return DWB_VERSION; }

std::string to_string(Kind kind) {
  switch (kind) {
  case Kind::Wiring:
    return "wiring";
  case Kind::Mesh:
    return "mesh";
  case Kind::Gemm:
    return "gemm";
  case Kind::Complexity:
    return "complexity";
  case Kind::Entropy:
    return "entropy";
  case Kind::TrainToy:
    return "train-toy";
  }
  return "mesh";
}

Kind parse_kind(std::string_view name) {
  for (Kind k : {Kind::Wiring, Kind::Mesh, Kind::Gemm, Kind::Complexity, Kind::Entropy,
                 Kind::TrainToy}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw UnknownKindError("unknown experiment kind '" + std::string(name) + "'");
}

json default_params(Kind kind) {
  switch (kind) {
  case Kind::Wiring:
    return {{"D", {1024}}, {"K", {1, 4, 16, 64}}, {"dims", {2, 3}}, {"trials", 10}};
  case Kind::Mesh:
    return {{"mode", "dense"},
            {"D", {16, 64, 256, 1024}},
            {"K", {1, 4, 16, 64}},
            {"sparsity", {0.85}},
            {"patterns", 100}};
  case Kind::Gemm:
    return {{"M", 256}, {"N", 256}, {"L", 256}, {"K", {1, 4, 16}}, {"B_M", 2},
            {"B_N", 2}, {"B_L", 8},   {"G", 0},   {"Q", 8192},       {"policy", "explicit"}};
  case Kind::Complexity:
    return {{"mode", "resnet"},
            {"architecture", "resnet18"},
            {"K", {1, 4, 16, 64}},
            {"width_factor", 1.0},
            {"input", {{"height", 224}, {"width", 224}}},
            {"bits", 16},
            {"layers", json::array()}};
  case Kind::Entropy:
    return {{"trials", 1000}, {"max_K", 4}, {"max_values", 6}};
  case Kind::TrainToy:
    return {{"data",
             {{"features", 8},
              {"classes", 4},
              {"clusters_per_class", 3},
              {"cluster_std", 1.0},
              {"spread", 2.0},
              {"train_size", 1024},
              {"test_size", 1024}}},
            {"width", 16},
            {"dendrites", {1, 4}},
            {"seeds", 5},
            {"learning_rate", 0.05},
            {"epochs", 30},
            {"batch_size", 32},
            {"init_gain", 1.0},
            {"activation", "relu"},
            {"negative_slope", 0.01}};
  }
  return json::object();
}

ExperimentConfig config_from_json(std::string_view text_in) {
  json j;
  try {
    j = json::parse(text_in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  const json allowed = {{"kind", 0}, {"name", 0},   {"seed", 0},  {"out_dir", 0},
                        {"threads", 0}, {"params", 0}, {"check", 0}, {"version", 0}};
  reject_unknown(j, allowed, "config");
  ExperimentConfig c;
  c.kind = parse_kind(text(j, "kind"));
  c.name = j.contains("name") ? text(j, "name") : to_string(c.kind);
  if (j.contains("seed")) {
    c.seed = count(j, "seed");
  }
  if (j.contains("out_dir")) {
    c.out_dir = text(j, "out_dir");
  }
  if (j.contains("threads")) {
    c.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, count(j, "threads")));
  }
  c.params = default_params(c.kind);
  if (j.contains("params")) {
    if (!j.at("params").is_object()) {
      throw ValidationError("'params' must be an object");
    }
    reject_unknown(j.at("params"), c.params, "params");
    c.params.merge_patch(j.at("params"));
  }
  if (j.contains("check")) {
    if (!j.at("check").is_object()) {
      throw ValidationError("'check' must be an object");
    }
    c.check = j.at("check");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot read config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["params"] = c.params;
  j["check"] = c.check;
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a64(canonical(c).dump()); }

void validate(const ExperimentConfig& c) {
  reject_unknown(c.params, default_params(c.kind), "params");
  if (!c.check.is_object()) {
    throw ValidationError("'check' must be an object");
  }
  switch (c.kind) {
  case Kind::Wiring:
    wiring_params(c.params);
    break;
  case Kind::Mesh:
    mesh_params(c.params);
    break;
  case Kind::Gemm:
    gemm_params(c.params);
    break;
  case Kind::Complexity:
    complexity_params(c.params);
    break;
  case Kind::Entropy:
    entropy_params(c.params);
    break;
  case Kind::TrainToy:
    toy_params(c.params);
    break;
  }
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["kind"] = m.kind;
  j["name"] = m.name;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : m.outputs) {
    j["outputs"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.checksum}});
  }
  return j.dump(2) + "\n";
}

bool RunResult::checks_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunResult run(const ExperimentConfig& config) {
  validate(config);
  RunResult res;
  res.manifest.version = version();
  res.manifest.kind = to_string(config.kind);
  res.manifest.name = config.name;
  res.manifest.seed = config.seed;
  res.manifest.config_hash = hex64(config_hash(config));
  res.manifest.started = utc_now();

  Artifacts out(config.out_dir);
  out.write("config.json", canonical(config).dump(2) + "\n");
  switch (config.kind) {
  case Kind::Wiring:
    run_wiring(config, out, res);
    break;
  case Kind::Mesh: {
    const MeshParams p = mesh_params(config.params);
    if (p.mode == "dense") {
      run_mesh_dense(config, p, out, res);
    } else {
      run_mesh_sparse(config, p, out, res);
    }
    break;
  }
  case Kind::Gemm:
    run_gemm(config, out, res);
    break;
  case Kind::Complexity:
    run_complexity(config, out, res);
    break;
  case Kind::Entropy:
    run_entropy(config, out, res);
    break;
  case Kind::TrainToy:
    run_toy(config, out, res);
    break;
  }
  res.manifest.outputs = out.files();
  res.manifest.finished = utc_now();
  write_text_file(out.dir() / "manifest.json", manifest_to_json(res.manifest));
  return res;
}

// ---- recipes -------------------------------------------------------------

namespace {

std::vector<Recipe> make_recipes() {
  auto recipe = [](std::string name, std::string description, json cfg) {
    cfg["name"] = name;
    return Recipe{std::move(name), "1", std::move(description), cfg.dump(2) + "\n"};
  };
  std::vector<Recipe> r;
  r.push_back(recipe("wiring-2d",
                     "EMST wiring cost in the unit square, D=1024, K in {1,4,16,64}",
                     {{"kind", "wiring"},
                      {"seed", 1},
                      {"params", {{"D", {1024}}, {"K", {1, 4, 16, 64}}, {"dims", {2}}, {"trials", 10}}},
                      {"check", {{"beta", {{"2", {0.45, 0.55}}}}}}}));
  r.push_back(recipe("wiring-3d",
                     "EMST wiring cost in the unit cube, D=1024, K in {1,4,16,64}",
                     {{"kind", "wiring"},
                      {"seed", 1},
                      {"params", {{"D", {1024}}, {"K", {1, 4, 16, 64}}, {"dims", {3}}, {"trials", 10}}},
                      {"check", {{"beta", {{"3", {0.617, 0.717}}}}}}}));
  r.push_back(recipe("eta-map", "Mesh communication ratio eta over D and K",
                     {{"kind", "mesh"},
                      {"params",
                       {{"mode", "dense"}, {"D", {16, 64, 256, 1024}}, {"K", {1, 4, 16, 64}}}},
                      {"check", {{"eta_k1_exact", true}, {"eta_decreasing_from_D", 16}}}}));
  r.push_back(recipe("sparse-slope",
                     "Sparse delivery cost vs K on a D=256 mesh, 100 patterns per cell",
                     {{"kind", "mesh"},
                      {"seed", 1},
                      {"params",
                       {{"mode", "sparse"},
                        {"D", {256}},
                        {"K", {1, 4, 16, 64}},
                        {"sparsity", {0.0, 0.5, 0.85, 0.95}},
                        {"patterns", 100}}},
                      {"check", {{"slope", {{"0.85", {-0.6, -0.4}}}}}}}));
  r.push_back(recipe("resnet18-complexity",
                     "ResNet-18 parameters, MACs and psi for K in {1,4,16,64}",
                     {{"kind", "complexity"},
                      {"params", {{"mode", "resnet"}, {"architecture", "resnet18"}, {"K", {1, 4, 16, 64}}}},
                      {"check",
                       {{"params",
                         {{"1", 11689512}, {"4", 11556200}, {"16", 11521800}, {"64", 11512664}}},
                        {"mmacs", {{"1", 1821.63}, {"4", 1804.34}, {"16", 1799.65}, {"64", 1799.37}}},
                        {"tolerance", 0.01},
                        {"exact_params_K", {1}}}}}));
  r.push_back(recipe(
      "memory-constants",
      "Activation memory of a 4-neuron K=4 layer vs an 8-neuron point layer at 16 bits",
      {{"kind", "complexity"},
       {"params",
        {{"mode", "memory"},
         {"bits", 16},
         {"layers",
          {{{"n_inputs", 8}, {"n_neurons", 4}, {"K", 4}, {"scheme", "full_precision"}},
           {{"n_inputs", 8}, {"n_neurons", 8}, {"K", 1}, {"scheme", "full_precision"}},
           {{"n_inputs", 8}, {"n_neurons", 4}, {"K", 4}, {"scheme", "bit_mask"}}}}}},
       {"check", {{"stored_bits", {320, 128, 80}}}}}));
  r.push_back(recipe("gemm-sweep",
                     "Grouped GEMM traffic at M=N=L=256, Q=8192 for K in {1,4,16}",
                     {{"kind", "gemm"},
                      {"params",
                       {{"M", 256}, {"N", 256}, {"L", 256}, {"K", {1, 4, 16}}, {"B_M", 2},
                        {"B_N", 2}, {"B_L", 8}, {"G", 0}, {"Q", 8192}, {"policy", "explicit"}}},
                      {"check", {{"read_ratio_tolerance", 0.15}, {"write_ratio_exact", true}}}}));
  r.push_back(recipe("entropy-identity",
                     "Entropy of a sum vs joint entropy over 1000 random joints",
                     {{"kind", "entropy"},
                      {"seed", 1},
                      {"params", {{"trials", 1000}, {"max_K", 4}, {"max_values", 6}}},
                      {"check", {{"max_residual", 1e-12}}}}));
  r.push_back(recipe("toy-parity",
                     "Equal-weight K=4 dendritic MLP vs point MLP on Gaussian blobs, 5 seeds",
                     {{"kind", "train-toy"},
                      {"seed", 1},
                      {"params", default_params(Kind::TrainToy)},
                      {"check", {{"max_gap_points", 2.0}}}}));
  json separable = default_params(Kind::TrainToy);
  separable["data"]["clusters_per_class"] = 1;
  separable["data"]["cluster_std"] = 0.3;
  separable["dendrites"] = {1};
  separable["seeds"] = 1;
  r.push_back(recipe("toy-separable", "Point MLP on well separated blobs",
                     {{"kind", "train-toy"},
                      {"seed", 1},
                      {"params", separable},
                      {"check", {{"min_accuracy", 0.95}}}}));
  return r;
}

} // namespace

const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> all = make_recipes();
  return all;
}

const Recipe& find_recipe(std::string_view name) {
  for (const auto& r : recipes()) {
    if (r.name == name) {
      return r;
    }
  }
  throw ArgumentError("unknown recipe '" + std::string(name) + "'");
}

ExperimentConfig recipe_config(const Recipe& recipe) { return config_from_json(recipe.config_json); }

} // namespace dwb::experiment
