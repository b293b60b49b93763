// Copyright 2026 The LPE Authors.
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

#ifndef LPE_LPE_HPP_
#define LPE_LPE_HPP_

#include "lpe/data.hpp"
#include "lpe/dataset.hpp"
#include "lpe/density.hpp"
#include "lpe/error.hpp"
#include "lpe/experiments.hpp"
#include "lpe/geometry.hpp"
#include "lpe/model_io.hpp"
#include "lpe/neighborhood.hpp"
#include "lpe/oracle.hpp"
#include "lpe/scoring.hpp"
#include "lpe/text.hpp"

#endif  // LPE_LPE_HPP_
