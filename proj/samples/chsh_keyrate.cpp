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

// Prints the three-party key rate next to the Parity-CHSH rate and the CHSH
// baselines for a few noise values.

#include <iostream>

#include "mbell/mbell.hpp"

int main() {
  mbell::RateOptions options;
  options.parity = true;
  const auto curve = mbell::rate_curve(3, {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}, options);
  mbell::write_rate_csv(std::cout, curve, true);

  // Optimal GHZ value for n = 3 and the classical range it beats.
  const auto opt = mbell::optimize_theta(3);
  const auto bounds = mbell::classical_bounds_reduced(3);
  std::cout << "g_ghz(3) = " << mbell::format_number(opt.value) << " at theta = "
            << mbell::format_number(opt.theta) << ", classical range [" << bounds.min_value << ", "
            << bounds.max_value << "]\n";
  return 0;
}
