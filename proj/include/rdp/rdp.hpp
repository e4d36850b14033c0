// Copyright 2026 The rdp Authors.
//
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

#pragma once

// Umbrella header.

#include "rdp/anomaly.hpp"
#include "rdp/clustering.hpp"
#include "rdp/dataset.hpp"
#include "rdp/error.hpp"
#include "rdp/harness.hpp"
#include "rdp/kmeans.hpp"
#include "rdp/losses.hpp"
#include "rdp/metrics.hpp"
#include "rdp/model_io.hpp"
#include "rdp/network.hpp"
#include "rdp/random_map.hpp"
#include "rdp/rng.hpp"
#include "rdp/selftest.hpp"
#include "rdp/synth.hpp"
#include "rdp/training.hpp"
