// Copyright 2026 The szilard-tls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SZILARD_SZILARD_HPP_
#define SZILARD_SZILARD_HPP_

#include "constants.hpp"
#include "model.hpp"
#include "experiment.hpp"
#include "dynamics.hpp"
#include "trajectory.hpp"
#include "estimator.hpp"
#include "fitting.hpp"
#include "thermo.hpp"
#include "device.hpp"
#include "csv.hpp"
#include "config.hpp"

#endif  // SZILARD_SZILARD_HPP_
