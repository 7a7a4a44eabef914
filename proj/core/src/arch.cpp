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

#include "dwb/arch.hpp"

#include "dwb/error.hpp"
#include "dwb/intmath.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace dwb::arch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Main-path parametric layers in order, plus every projection.
struct Parametric {
  std::vector<Role*> main;
  std::vector<Role*> shortcuts;
};

Parametric collect(ArchDescriptor& arch) {
  Parametric p;
  for (auto& layer : arch.layers) {
    std::visit(overloaded{[&](Conv& c) { p.main.push_back(&c.role); },
                          [&](Linear& l) { p.main.push_back(&l.role); },
                          [&](ResidualBlock& b) {
                            p.main.push_back(&b.conv1.role);
                            p.main.push_back(&b.conv2.role);
                            if (b.projection) {
                              p.shortcuts.push_back(&b.projection->role);
                            }
                          },
                          [](auto&) {}},
               layer);
  }
  return p;
}

void check_conv(const Conv& c) {
  if (c.in == 0 || c.out == 0 || c.kernel == 0 || c.stride == 0 || c.dendrites == 0) {
    throw ArgumentError("layer '" + c.name + "' has a zero size, stride or dendrite count");
  }
}

std::uint64_t spatial_out(std::uint64_t size, std::uint64_t kernel, std::uint64_t stride,
                          std::uint64_t padding, const std::string& name) {
  if (size + 2 * padding < kernel) {
    throw ShapeError("layer '" + name + "': kernel " + std::to_string(kernel) +
                     " exceeds padded input " + std::to_string(size + 2 * padding));
  }
  return (size + 2 * padding - kernel) / stride + 1;
}

LayerComplexity conv_entry(const Conv& c, std::uint64_t& h, std::uint64_t& w) {
  const std::uint64_t ho = spatial_out(h, c.kernel, c.stride, c.padding, c.name);
  const std::uint64_t wo = spatial_out(w, c.kernel, c.stride, c.padding, c.name);
  const std::uint64_t e = ho * wo;
  const std::uint64_t k2 = c.kernel * c.kernel;
  const std::uint64_t K = c.dendrites;
  LayerComplexity r{c.name, "conv", to_string(c.role), K, c.in, c.out, 0, 0.0, 0};
  r.params = K * c.out * c.in * k2 + (c.bias ? K * c.out : 0) + (c.batchnorm ? 2 * c.out : 0);
  const double kd = static_cast<double>(K);
  r.ideal_params = kd * c.ideal_out * c.ideal_in * static_cast<double>(k2) +
                   (c.bias ? kd * c.ideal_out : 0.0) + (c.batchnorm ? 2.0 * c.ideal_out : 0.0);
  r.half_macs = 2 * e * c.out * K * c.in * k2 + (c.bias ? e * c.out * K : 0) +
                e * c.out * (K - 1) + (c.batchnorm ? 2 * e * c.out : 0);
  h = ho;
  w = wo;
  return r;
}

LayerComplexity linear_entry(const Linear& l) {
  const std::uint64_t K = l.dendrites;
  LayerComplexity r{l.name, "linear", to_string(l.role), K, l.in, l.out, 0, 0.0, 0};
  r.params = K * l.out * l.in + (l.bias ? K * l.out : 0);
  const double kd = static_cast<double>(K);
  r.ideal_params = kd * l.ideal_out * l.ideal_in + (l.bias ? kd * l.ideal_out : 0.0);
  r.half_macs = 2 * l.in * l.out * K + (l.bias ? l.out * K : 0) + l.out * (K - 1);
  return r;
}

std::uint64_t round_channels(double ideal, const std::string& name) {
  const auto c = static_cast<std::uint64_t>(std::llround(ideal));
  if (c == 0) {
    throw ArgumentError("layer '" + name + "' scales to " + std::to_string(ideal) +
                        " channels, which rounds to zero");
  }
  return c;
}

} // namespace

std::string to_string(Role r) {
  switch (r) {
  case Role::Input:
    return "input";
  case Role::Interior:
    return "interior";
  case Role::Shortcut:
    return "shortcut";
  case Role::Penultimate:
    return "penultimate";
  case Role::Output:
    return "output";
  }
  return "interior";
}

void validate(const ArchDescriptor& arch) {
  if (arch.input.channels == 0 || arch.input.height == 0 || arch.input.width == 0) {
    throw ArgumentError("input shape must be positive");
  }
  std::uint64_t c = arch.input.channels;
  auto chain = [&](const std::string& name, std::uint64_t in) {
    if (in != c) {
      throw ShapeError("layer '" + name + "' expects " + std::to_string(in) +
                       " input channels but receives " + std::to_string(c));
    }
  };
  for (const auto& layer : arch.layers) {
    std::visit(
        overloaded{
            [&](const Conv& conv) {
              check_conv(conv);
              chain(conv.name, conv.in);
              c = conv.out;
            },
            [&](const Linear& l) {
              if (l.in == 0 || l.out == 0 || l.dendrites == 0) {
                throw ArgumentError("layer '" + l.name + "' has a zero size or dendrite count");
              }
              chain(l.name, l.in);
              c = l.out;
            },
            [&](const MaxPool& p) {
              if (p.kernel == 0 || p.stride == 0) {
                throw ArgumentError("pool '" + p.name + "' has zero kernel or stride");
              }
            },
            [](const GlobalAvgPool&) {},
            [&](const ResidualBlock& b) {
              check_conv(b.conv1);
              check_conv(b.conv2);
              chain(b.conv1.name, b.conv1.in);
              if (b.conv2.in != b.conv1.out) {
                throw ShapeError("block '" + b.name + "': conv2 input does not match conv1");
              }
              if (b.conv2.stride != 1) {
                throw ArgumentError("block '" + b.name + "': conv2 must have stride 1");
              }
              const std::uint64_t out = b.conv2.out;
              switch (b.shortcut) {
              case Shortcut::Identity:
                if (out != c || b.conv1.stride != 1) {
                  throw ShapeError("block '" + b.name + "': identity shortcut needs equal "
                                   "channels and stride 1");
                }
                break;
              case Shortcut::Tile:
                if (out % c != 0 || b.conv1.stride != 1) {
                  throw ShapeError("block '" + b.name + "': tile shortcut needs an output "
                                   "width that is a multiple of the input and stride 1");
                }
                break;
              case Shortcut::Projection:
                if (!b.projection) {
                  throw ArgumentError("block '" + b.name + "' declares a projection but has none");
                }
                check_conv(*b.projection);
                if (b.projection->in != c || b.projection->out != out ||
                    b.projection->stride != b.conv1.stride) {
                  throw ShapeError("block '" + b.name + "': projection does not match main path");
                }
                break;
              }
              if (b.shortcut != Shortcut::Projection && b.projection) {
                throw ArgumentError("block '" + b.name + "' has an unused projection");
              }
              c = out;
            }},
        layer);
  }
}

void assign_roles(ArchDescriptor& arch) {
  Parametric p = collect(arch);
  const std::size_t n = p.main.size();
  for (std::size_t i = 0; i < n; ++i) {
    Role r = Role::Interior;
    if (i + 1 == n) {
      r = Role::Output;
    } else if (i == 0) {
      r = Role::Input;
    } else if (i + 2 == n) {
      r = Role::Penultimate;
    }
    *p.main[i] = r;
  }
  for (Role* r : p.shortcuts) {
    *r = Role::Shortcut;
  }
}

bool is_point_model(const ArchDescriptor& arch) {
  for (const auto& layer : arch.layers) {
    const bool dendritic = std::visit(
        overloaded{[](const Conv& c) { return c.dendrites != 1; },
                   [](const Linear& l) { return l.dendrites != 1; },
                   [](const ResidualBlock& b) {
                     return b.conv1.dendrites != 1 || b.conv2.dendrites != 1 ||
                            (b.projection && b.projection->dendrites != 1) ||
                            b.shortcut == Shortcut::Tile;
                   },
                   [](const auto&) { return false; }},
        layer);
    if (dendritic) {
      return false;
    }
  }
  return true;
}

ArchDescriptor scale_architecture(const ArchDescriptor& base, std::uint64_t K,
                                  double width_factor) {
  validate(base);
  if (!is_point_model(base)) {
    throw ArgumentError("scale_architecture expects a point-neuron base model");
  }
  if (!(width_factor > 0.0) || !std::isfinite(width_factor)) {
    throw ArgumentError("width factor must be positive and finite");
  }
  const auto root = K == 0 ? std::nullopt : exact_sqrt(K);
  if (!root) {
    throw ArgumentError("K=" + std::to_string(K) + " is not a perfect square");
  }
  ArchDescriptor out = base;
  assign_roles(out);
  if (K > 1 && collect(out).main.size() < 3) {
    throw ArgumentError("dendritic scaling needs input, penultimate and output layers");
  }
  const double shrink = width_factor / static_cast<double>(*root);

  std::uint64_t cur = out.input.channels;
  double cur_ideal = static_cast<double>(cur);
  auto apply = [&](auto& layer) {
    layer.in = cur;
    layer.ideal_in = cur_ideal;
    const double base_out = static_cast<double>(layer.out);
    switch (layer.role) {
    case Role::Input:
      layer.ideal_out = base_out * shrink;
      layer.dendrites = *root;
      break;
    case Role::Interior:
      layer.ideal_out = base_out * shrink;
      layer.dendrites = K;
      break;
    case Role::Penultimate:
      layer.ideal_out = base_out * width_factor;
      layer.dendrites = *root;
      break;
    case Role::Output:
    case Role::Shortcut:
      layer.ideal_out = base_out;
      layer.dendrites = 1;
      break;
    }
    layer.out = round_channels(layer.ideal_out, layer.name);
    cur = layer.out;
    cur_ideal = layer.ideal_out;
  };

  for (auto& layer : out.layers) {
    std::visit(overloaded{[&](Conv& c) { apply(c); },
                          [&](Linear& l) { apply(l); },
                          [&](ResidualBlock& b) {
                            const std::uint64_t block_in = cur;
                            const double block_in_ideal = cur_ideal;
                            apply(b.conv1);
                            apply(b.conv2);
                            if (b.projection) {
                              b.projection->in = block_in;
                              b.projection->ideal_in = block_in_ideal;
                              b.projection->out = b.conv2.out;
                              b.projection->ideal_out = b.conv2.ideal_out;
                              b.projection->dendrites = 1;
                            } else if (b.conv2.out != block_in) {
                              if (b.conv2.out % block_in != 0) {
                                throw ArgumentError("block '" + b.name + "': " +
                                                    std::to_string(block_in) +
                                                    " channels cannot tile to " +
                                                    std::to_string(b.conv2.out));
                              }
                              b.shortcut = Shortcut::Tile;
                            }
                          },
                          [](auto&) {}},
               layer);
  }
  validate(out);
  return out;
}

ArchDescriptor concatenate(const ArchDescriptor& a, const ArchDescriptor& b) {
  const ComplexityReport ra = count_params(a);
  if (ra.output.channels != b.input.channels || ra.output.height != b.input.height ||
      ra.output.width != b.input.width) {
    throw ShapeError("cannot concatenate '" + a.name + "' and '" + b.name +
                     "': output and input shapes differ");
  }
  ArchDescriptor out = a;
  out.name = a.name + "+" + b.name;
  out.layers.insert(out.layers.end(), b.layers.begin(), b.layers.end());
  validate(out);
  return out;
}

ComplexityReport count_macs(const ArchDescriptor& arch, const InputShape& input) {
  ArchDescriptor shaped = arch;
  shaped.input = input;
  validate(shaped);
  ComplexityReport rep;
  std::uint64_t c = input.channels;
  std::uint64_t h = input.height;
  std::uint64_t w = input.width;
  auto push = [&](LayerComplexity e) {
    rep.total_params += e.params;
    rep.total_ideal_params += e.ideal_params;
    rep.total_half_macs += e.half_macs;
    rep.layers.push_back(std::move(e));
  };
  for (const auto& layer : arch.layers) {
    std::visit(
        overloaded{
            [&](const Conv& conv) {
              push(conv_entry(conv, h, w));
              c = conv.out;
            },
            [&](const Linear& l) {
              if (h != 1 || w != 1) {
                throw ShapeError("linear layer '" + l.name + "' needs a 1x1 spatial input, got " +
                                 std::to_string(h) + "x" + std::to_string(w));
              }
              push(linear_entry(l));
              c = l.out;
            },
            [&](const MaxPool& p) {
              h = spatial_out(h, p.kernel, p.stride, p.padding, p.name);
              w = spatial_out(w, p.kernel, p.stride, p.padding, p.name);
              push({p.name, "maxpool", "", 1, c, c, 0, 0.0, 0});
            },
            [&](const GlobalAvgPool& p) {
              push({p.name, "avgpool", "", 1, c, c, 0, 0.0, c * (h * w - 1)});
              h = 1;
              w = 1;
            },
            [&](const ResidualBlock& b) {
              const std::uint64_t h_in = h;
              const std::uint64_t w_in = w;
              push(conv_entry(b.conv1, h, w));
              push(conv_entry(b.conv2, h, w));
              if (b.projection) {
                std::uint64_t hp = h_in;
                std::uint64_t wp = w_in;
                push(conv_entry(*b.projection, hp, wp));
                if (hp != h || wp != w) {
                  throw ShapeError("block '" + b.name + "': projection output is " +
                                   std::to_string(hp) + "x" + std::to_string(wp) +
                                   ", main path " + std::to_string(h) + "x" + std::to_string(w));
                }
              } else if (b.shortcut == Shortcut::Tile) {
                push({b.name + ".tile", "tile", "shortcut", 1, c, b.conv2.out, 0, 0.0, 0});
              }
              c = b.conv2.out;
              push({b.name + ".add", "add", "", 1, c, c, 0, 0.0, h * w * c});
            }},
        layer);
  }
  rep.output = {c, h, w};
  return rep;
}

ComplexityReport count_params(const ArchDescriptor& arch) { return count_macs(arch, arch.input); }

double psi(const ArchDescriptor& arch, const ArchDescriptor& baseline) {
  if (arch.layers.size() != baseline.layers.size()) {
    throw ArgumentError("architectures have different layer counts");
  }
  auto counted = [](Role r) {
    return r == Role::Input || r == Role::Interior || r == Role::Shortcut;
  };
  double num = 0.0;
  double den = 0.0;
  auto add = [&](const auto& x, const auto& y) {
    if (x.name != y.name) {
      throw ArgumentError("layer '" + x.name + "' does not align with '" + y.name + "'");
    }
    if (counted(y.role)) {
      num += static_cast<double>(x.out);
      den += static_cast<double>(y.out);
    }
  };
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const Layer& a = arch.layers[i];
    const Layer& b = baseline.layers[i];
    if (a.index() != b.index()) {
      throw ArgumentError("layer " + std::to_string(i) + " differs in kind");
    }
    if (const auto* x = std::get_if<Conv>(&a)) {
      add(*x, std::get<Conv>(b));
    } else if (const auto* x = std::get_if<Linear>(&a)) {
      add(*x, std::get<Linear>(b));
    } else if (const auto* x = std::get_if<ResidualBlock>(&a)) {
      const auto& y = std::get<ResidualBlock>(b);
      add(x->conv1, y.conv1);
      add(x->conv2, y.conv2);
      if (x->projection.has_value() != y.projection.has_value()) {
        throw ArgumentError("block '" + x->name + "' differs in projection");
      }
      if (x->projection) {
        add(*x->projection, *y.projection);
      }
    }
  }
  if (den == 0.0) {
    throw ArgumentError("baseline has no input, interior or shortcut layers");
  }
  return num / den;
}

CsvTable complexity_csv(const ComplexityReport& report) {
  CsvTable t({"layer", "kind", "role", "K", "in", "out", "params", "ideal_params", "macs"});
  for (const auto& l : report.layers) {
    t.add_row({l.name, l.kind, l.role, l.dendrites, l.in, l.out, l.params, l.ideal_params,
               l.macs()});
  }
  return t;
}

// ---- JSON ----------------------------------------------------------------

namespace {

using nlohmann::json;

Role parse_role(const std::string& s) {
  for (Role r : {Role::Input, Role::Interior, Role::Shortcut, Role::Penultimate, Role::Output}) {
    if (to_string(r) == s) {
      return r;
    }
  }
  throw ValidationError("unknown role '" + s + "'");
}

Conv conv_from(const json& j) {
  Conv c;
  c.name = j.at("name").get<std::string>();
  c.in = j.at("in").get<std::uint64_t>();
  c.out = j.at("out").get<std::uint64_t>();
  c.ideal_in = j.value("ideal_in", static_cast<double>(c.in));
  c.ideal_out = j.value("ideal_out", static_cast<double>(c.out));
  c.kernel = j.value("kernel", std::uint64_t{1});
  c.stride = j.value("stride", std::uint64_t{1});
  c.padding = j.value("padding", std::uint64_t{0});
  c.dendrites = j.value("dendrites", std::uint64_t{1});
  c.bias = j.value("bias", false);
  c.batchnorm = j.value("batchnorm", false);
  if (j.contains("role")) {
    c.role = parse_role(j.at("role").get<std::string>());
  }
  return c;
}

json conv_to(const Conv& c) {
  return {{"name", c.name},       {"in", c.in},         {"out", c.out},
          {"ideal_in", c.ideal_in}, {"ideal_out", c.ideal_out}, {"kernel", c.kernel},
          {"stride", c.stride},   {"padding", c.padding}, {"dendrites", c.dendrites},
          {"bias", c.bias},       {"batchnorm", c.batchnorm}, {"role", to_string(c.role)}};
}

Conv make_conv(std::string name, std::uint64_t in, std::uint64_t out, std::uint64_t k,
               std::uint64_t stride, std::uint64_t pad) {
  Conv c;
  c.name = std::move(name);
  c.in = in;
  c.out = out;
  c.ideal_in = static_cast<double>(in);
  c.ideal_out = static_cast<double>(out);
  c.kernel = k;
  c.stride = stride;
  c.padding = pad;
  c.batchnorm = true;
  return c;
}

std::string shortcut_name(Shortcut s) {
  switch (s) {
  case Shortcut::Identity:
    return "identity";
  case Shortcut::Projection:
    return "projection";
  case Shortcut::Tile:
    return "tile";
  }
  return "identity";
}

Shortcut parse_shortcut(const std::string& s) {
  for (Shortcut x : {Shortcut::Identity, Shortcut::Projection, Shortcut::Tile}) {
    if (shortcut_name(x) == s) {
      return x;
    }
  }
  throw ValidationError("unknown shortcut '" + s + "'");
}

ArchDescriptor resnet_basic(const json& j) {
  ArchDescriptor a;
  a.name = j.value("name", std::string("resnet"));
  const auto& in = j.at("input");
  a.input = {in.at("channels").get<std::uint64_t>(), in.at("height").get<std::uint64_t>(),
             in.at("width").get<std::uint64_t>()};
  const auto& stem = j.at("stem");
  std::uint64_t c = stem.at("channels").get<std::uint64_t>();
  a.layers.emplace_back(make_conv("conv1", a.input.channels, c, stem.at("kernel"),
                                  stem.at("stride"), stem.at("padding")));
  if (stem.contains("pool")) {
    const auto& p = stem.at("pool");
    a.layers.emplace_back(MaxPool{"maxpool", p.at("kernel"), p.at("stride"), p.at("padding")});
  }
  for (const auto& stage : j.at("stages")) {
    const std::string sname = stage.at("name");
    const std::uint64_t width = stage.at("channels");
    const std::uint64_t blocks = stage.at("blocks");
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t stride = b == 0 ? stage.at("stride").get<std::uint64_t>() : 1;
      const std::string bname = sname + "." + std::to_string(b);
      ResidualBlock block;
      block.name = bname;
      block.conv1 = make_conv(bname + ".conv1", c, width, 3, stride, 1);
      block.conv2 = make_conv(bname + ".conv2", width, width, 3, 1, 1);
      if (stride != 1 || c != width) {
        block.shortcut = Shortcut::Projection;
        block.projection = make_conv(bname + ".downsample", c, width, 1, stride, 0);
      }
      a.layers.emplace_back(std::move(block));
      c = width;
    }
  }
  a.layers.emplace_back(GlobalAvgPool{"avgpool"});
  Linear fc;
  fc.name = "fc";
  fc.in = c;
  fc.out = j.at("classes").get<std::uint64_t>();
  fc.ideal_in = static_cast<double>(fc.in);
  fc.ideal_out = static_cast<double>(fc.out);
  a.layers.emplace_back(fc);
  return a;
}

ArchDescriptor layer_list(const json& j) {
  ArchDescriptor a;
  a.name = j.value("name", std::string("model"));
  const auto& in = j.at("input");
  a.input = {in.at("channels").get<std::uint64_t>(), in.value("height", std::uint64_t{1}),
             in.value("width", std::uint64_t{1})};
  for (const auto& l : j.at("layers")) {
    const std::string type = l.at("type");
    if (type == "conv") {
      a.layers.emplace_back(conv_from(l));
    } else if (type == "linear") {
      Linear x;
      x.name = l.at("name");
      x.in = l.at("in");
      x.out = l.at("out");
      x.ideal_in = l.value("ideal_in", static_cast<double>(x.in));
      x.ideal_out = l.value("ideal_out", static_cast<double>(x.out));
      x.dendrites = l.value("dendrites", std::uint64_t{1});
      x.bias = l.value("bias", true);
      a.layers.emplace_back(x);
    } else if (type == "maxpool") {
      a.layers.emplace_back(MaxPool{l.at("name"), l.value("kernel", std::uint64_t{2}),
                                    l.value("stride", std::uint64_t{2}),
                                    l.value("padding", std::uint64_t{0})});
    } else if (type == "avgpool") {
      a.layers.emplace_back(GlobalAvgPool{l.at("name")});
    } else if (type == "residual") {
      ResidualBlock b;
      b.name = l.at("name");
      b.conv1 = conv_from(l.at("conv1"));
      b.conv2 = conv_from(l.at("conv2"));
      b.shortcut = parse_shortcut(l.value("shortcut", std::string("identity")));
      if (l.contains("projection")) {
        b.projection = conv_from(l.at("projection"));
      }
      a.layers.emplace_back(std::move(b));
    } else {
      throw ValidationError("unknown layer type '" + type + "'");
    }
  }
  return a;
}

} // namespace

ArchDescriptor arch_from_json(std::string_view text) {
  ArchDescriptor a;
  try {
    const json j = json::parse(text);
    const std::string format = j.value("format", std::string("layers"));
    if (format == "resnet-basic") {
      a = resnet_basic(j);
    } else if (format == "layers") {
      a = layer_list(j);
    } else {
      throw ValidationError("unknown architecture format '" + format + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("architecture JSON: ") + e.what());
  }
  assign_roles(a);
  validate(a);
  return a;
}

std::string arch_to_json(const ArchDescriptor& arch) {
  nlohmann::ordered_json j;
  j["format"] = "layers";
  j["name"] = arch.name;
  j["input"] = {{"channels", arch.input.channels},
                {"height", arch.input.height},
                {"width", arch.input.width}};
  json layers = json::array();
  for (const auto& layer : arch.layers) {
    std::visit(overloaded{[&](const Conv& c) {
                            json x = conv_to(c);
                            x["type"] = "conv";
                            layers.push_back(std::move(x));
                          },
                          [&](const Linear& l) {
                            layers.push_back({{"type", "linear"},
                                              {"name", l.name},
                                              {"in", l.in},
                                              {"out", l.out},
                                              {"ideal_in", l.ideal_in},
                                              {"ideal_out", l.ideal_out},
                                              {"dendrites", l.dendrites},
                                              {"bias", l.bias},
                                              {"role", to_string(l.role)}});
                          },
                          [&](const MaxPool& p) {
                            layers.push_back({{"type", "maxpool"},
                                              {"name", p.name},
                                              {"kernel", p.kernel},
                                              {"stride", p.stride},
                                              {"padding", p.padding}});
                          },
                          [&](const GlobalAvgPool& p) {
                            layers.push_back({{"type", "avgpool"}, {"name", p.name}});
                          },
                          [&](const ResidualBlock& b) {
                            json x = {{"type", "residual"},
                                      {"name", b.name},
                                      {"conv1", conv_to(b.conv1)},
                                      {"conv2", conv_to(b.conv2)},
                                      {"shortcut", shortcut_name(b.shortcut)}};
                            if (b.projection) {
                              x["projection"] = conv_to(*b.projection);
                            }
                            layers.push_back(std::move(x));
                          }},
               layer);
  }
  j["layers"] = std::move(layers);
  return j.dump(2);
}

ArchDescriptor load_architecture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open architecture file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return arch_from_json(ss.str());
}

std::filesystem::path find_data_file(std::string_view name) {
  const std::string file = std::string(name) + ".json";
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("DWB_DATA_DIR")) {
    dirs.emplace_back(env);
  }
  dirs.emplace_back(DWB_BUILD_DATA_DIR);
  dirs.emplace_back(DWB_INSTALL_DATA_DIR);
  for (const auto& d : dirs) {
    std::error_code ec;
    if (std::filesystem::exists(d / file, ec)) {
      return d / file;
    }
  }
  throw ArgumentError("data file '" + file + "' not found; set DWB_DATA_DIR");
}

ArchDescriptor builtin_architecture(std::string_view name) {
  return load_architecture(find_data_file(name));
}

} // namespace dwb::arch
