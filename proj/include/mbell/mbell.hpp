// Copyright 2026 The mbell Authors
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

#include "mbell/io.hpp"
#include "mbell/keyrate.hpp"
#include "mbell/lhv.hpp"
#include "mbell/npa.hpp"
#include "mbell/polynomial.hpp"
#include "mbell/quantum.hpp"
#include "mbell/rational.hpp"
#include "mbell/scenario.hpp"
#include "mbell/sdp.hpp"
#include "mbell/verify.hpp"
