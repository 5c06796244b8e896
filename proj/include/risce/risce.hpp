// SPDX-License-Identifier: Apache-2.0
//
// risce - RIS-assisted mmWave uplink channel estimation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISCE_RISCE_HPP
#define RISCE_RISCE_HPP

#include "risce/array_geometry.hpp"
#include "risce/channel_model.hpp"
#include "risce/codebook.hpp"
#include "risce/estimators.hpp"
#include "risce/harness.hpp"
#include "risce/mlp.hpp"
#include "risce/neural.hpp"
#include "risce/numerics.hpp"

#endif
