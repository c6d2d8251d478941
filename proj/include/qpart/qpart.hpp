// Copyright 2026 The qpart Authors.
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

#include "qpart/bits.hpp"
#include "qpart/classify.hpp"
#include "qpart/concent.hpp"
#include "qpart/costshare.hpp"
#include "qpart/io.hpp"
#include "qpart/lpsolve.hpp"
#include "qpart/mph.hpp"
#include "qpart/posted.hpp"
#include "qpart/random.hpp"
#include "qpart/rational.hpp"
#include "qpart/setfn.hpp"
