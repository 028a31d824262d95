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

#ifndef NNSUR_LP_FORMAT_H_
#define NNSUR_LP_FORMAT_H_

#include <string>

#include "nnsur/milp_model.h"

namespace nnsur {

// CPLEX-style LP text (Maximize / Subject To / Bounds / Binaries / End).
// Variables and rows appear in model order and reals use shortest
// round-trip rendering, so equal models give identical bytes.
std::string ToLpString(const MilpModel& model);
void WriteLpFile(const MilpModel& model, const std::string& path);

}  // namespace nnsur

#endif  // NNSUR_LP_FORMAT_H_
