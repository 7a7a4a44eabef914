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

// Writes library-serialized JSON documents into a directory for schema checks.

#include <fstream>
#include <iostream>

#include "dwb/arch.hpp"
#include "dwb/dendritic.hpp"
#include "dwb/rng.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: dump_documents <dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  using namespace dwb::dendrite;
  dwb::RandomStream rng(3, 0);
  std::ofstream(dir + "/layer_relu.json")
      << layer_to_json(DendriticLayerSpec::random({6, 3, 4}, Activation::relu(), rng));
  std::ofstream(dir + "/layer_leaky.json")
      << layer_to_json(DendriticLayerSpec::random({5, 2, 1}, Activation::leaky_relu(0.1), rng));
  const auto base = dwb::arch::builtin_architecture("resnet18");
  std::ofstream(dir + "/arch_resnet18.json") << dwb::arch::arch_to_json(base);
  std::ofstream(dir + "/arch_resnet18_k4.json")
      << dwb::arch::arch_to_json(dwb::arch::scale_architecture(base, 4));
  return 0;
}
