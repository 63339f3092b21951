// Copyright 2026 The GRAB Toolkit Authors
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

// Reference coefficients (4 decimals) and odds ratios (3 decimals) for the
// 11 non-intercept terms of the three outcome models.

#include <array>
#include <string>

namespace reference {

struct OddsRatioCell {
  std::string term;
  std::string outcome;
  double coef;
  double odds_ratio;
};

inline const std::array<OddsRatioCell, 33> kOddsRatioTable{{
    {"Q_P", "sp", 3.7457, 42.340},
    {"Q_P", "sb", 3.7656, 43.188},
    {"Q_P", "sf", 1.7003, 5.476},
    {"Q_C", "sp", 0.5524, 1.737},
    {"Q_C", "sb", 0.4505, 1.569},
    {"Q_C", "sf", 0.1008, 1.106},
    {"Q_O", "sp", 4.6109, 100.571},
    {"Q_O", "sb", 4.4530, 85.885},
    {"Q_O", "sf", 2.2798, 9.775},
    {"Finray vs Rigid", "sp", 1.3412, 3.824},
    {"Finray vs Rigid", "sb", 1.1100, 3.034},
    {"Finray vs Rigid", "sf", 0.9061, 2.475},
    {"Q_P x Finray", "sp", -0.0215, 0.979},
    {"Q_P x Finray", "sb", -0.1245, 0.883},
    {"Q_P x Finray", "sf", -0.3935, 0.675},
    {"Q_C x Finray", "sp", -0.1135, 0.893},
    {"Q_C x Finray", "sb", 0.0512, 1.053},
    {"Q_C x Finray", "sf", 0.0489, 1.050},
    {"Q_O x Finray", "sp", -1.1672, 0.311},
    {"Q_O x Finray", "sb", -0.9245, 0.397},
    {"Q_O x Finray", "sf", -0.7718, 0.462},
    {"Suction vs Rigid", "sp", 9.7571, 17275.970},
    {"Suction vs Rigid", "sb", 10.0291, 22677.748},
    {"Suction vs Rigid", "sf", 5.4588, 234.809},
    {"Q_P x Suction", "sp", -2.8253, 0.059},
    {"Q_P x Suction", "sb", -2.8407, 0.058},
    {"Q_P x Suction", "sf", -0.8290, 0.436},
    {"Q_C x Suction", "sp", -1.5892, 0.204},
    {"Q_C x Suction", "sb", -1.6894, 0.185},
    {"Q_C x Suction", "sf", -0.7217, 0.486},
    {"Q_O x Suction", "sp", -12.9050, 0.000},
    {"Q_O x Suction", "sb", -13.1573, 0.000},
    {"Q_O x Suction", "sf", -7.7226, 0.000},
}};

}  // namespace reference
