// Copyright 2026 The ruinlab Authors.
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

#include "ruinlab/affine.hpp"
#include "ruinlab/conditions.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/cumulant.hpp"
#include "ruinlab/distribution.hpp"
#include "ruinlab/error.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/paths.hpp"
#include "ruinlab/perpetuity.hpp"
#include "ruinlab/quadrature.hpp"
#include "ruinlab/report.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/ruin.hpp"
