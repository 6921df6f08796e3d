/*
 * Copyright 2026 The rvlab Authors
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

// Everything in one include.

#pragma once

#include "rvlab/assembler.hpp"
#include "rvlab/checker.hpp"
#include "rvlab/emulator.hpp"
#include "rvlab/isa.hpp"
#include "rvlab/mem_hierarchy.hpp"
#include "rvlab/pipeline.hpp"
#include "rvlab/simulate.hpp"
#include "rvlab/single_cycle.hpp"
#include "rvlab/testgen.hpp"
#include "rvlab/trace_io.hpp"
