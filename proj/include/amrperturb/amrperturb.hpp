// Copyright 2026 The amrperturb Authors.
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

// Convenience header pulling in the whole library.

#ifndef AMRPERTURB_AMRPERTURB_HPP
#define AMRPERTURB_AMRPERTURB_HPP

#include "amrperturb/amr.hpp"
#include "amrperturb/error.hpp"
#include "amrperturb/eval.hpp"
#include "amrperturb/lexicon.hpp"
#include "amrperturb/negfilter.hpp"
#include "amrperturb/perturb.hpp"
#include "amrperturb/pipeline.hpp"
#include "amrperturb/random.hpp"
#include "amrperturb/text.hpp"

#endif  // AMRPERTURB_AMRPERTURB_HPP
