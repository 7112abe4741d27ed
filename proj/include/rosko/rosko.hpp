/*
 * Copyright 2026 The Rosko Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// rosko.hpp -- umbrella header.

#pragma once

#include "rosko/baseline.hpp"
#include "rosko/bench.hpp"
#include "rosko/generate.hpp"
#include "rosko/io_ledger.hpp"
#include "rosko/kernel.hpp"
#include "rosko/machine.hpp"
#include "rosko/matrix.hpp"
#include "rosko/matrix_io.hpp"
#include "rosko/pack.hpp"
#include "rosko/schedule.hpp"
#include "rosko/tile_model.hpp"
