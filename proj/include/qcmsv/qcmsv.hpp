// Copyright 2026 The qcmsv Authors.
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

// Everything in one include.

#pragma once

#include "qcmsv/bounds.hpp"
#include "qcmsv/cmsv.hpp"
#include "qcmsv/ensembles.hpp"
#include "qcmsv/experiments.hpp"
#include "qcmsv/io.hpp"
#include "qcmsv/lp.hpp"
#include "qcmsv/nsp.hpp"
#include "qcmsv/parallel.hpp"
#include "qcmsv/projections.hpp"
#include "qcmsv/random.hpp"
#include "qcmsv/recovery.hpp"
#include "qcmsv/ric.hpp"
#include "qcmsv/simplex.hpp"
#include "qcmsv/sparsity.hpp"
#include "qcmsv/types.hpp"
