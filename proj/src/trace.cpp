// Copyright 2026 The qvib Authors
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

#include "qvib/trace.hpp"

#include <cmath>

#include "qvib/errors.hpp"

namespace qvib {

int SimulationSchedule::n_steps() const { return static_cast<int>(std::lround(total_fs / dt_fs)); }

void SimulationSchedule::validate() const {
  if (!(dt_fs > 0.0) || !(total_fs > 0.0) || !std::isfinite(dt_fs) || !std::isfinite(total_fs))
    throw DomainError("schedule: dt and total time must be positive");
  if (n_steps() < 1) throw DomainError("schedule: total time shorter than one step");
}

}  // namespace qvib
