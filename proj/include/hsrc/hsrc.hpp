/*
Copyright 2026 The HSRC Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "hsrc/codec.hpp"
#include "hsrc/combinatorics.hpp"
#include "hsrc/error.hpp"
#include "hsrc/fragment_io.hpp"
#include "hsrc/gf.hpp"
#include "hsrc/oracle.hpp"
#include "hsrc/policies.hpp"
#include "hsrc/replay.hpp"
#include "hsrc/rng.hpp"
#include "hsrc/schedule.hpp"
#include "hsrc/sim.hpp"
#include "hsrc/trace.hpp"
#include "hsrc/validator.hpp"
