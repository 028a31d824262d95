// Copyright 2026 The nnsur Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NNSUR_NETWORK_IO_H_
#define NNSUR_NETWORK_IO_H_

#include <stdexcept>
#include <string>

#include "nnsur/network.h"

namespace nnsur {

// Malformed network document. The message names the offending field and,
// for syntax errors, the line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON document:
//   {"dims": [n0, ..., nL], "domain_lo": [...], "domain_hi": [...],
//    "layers": [{"weights": [row-major], "biases": [...]}, ...]}
// Reals are written with shortest round-trip decimal rendering.
std::string NetworkToJson(const Network& net);
Network NetworkFromJson(const std::string& text);

void SaveNetwork(const Network& net, const std::string& path);
Network LoadNetwork(const std::string& path);

}  // namespace nnsur

#endif  // NNSUR_NETWORK_IO_H_
