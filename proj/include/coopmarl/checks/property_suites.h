// Copyright 2026 The coopmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef COOPMARL_CHECKS_PROPERTY_SUITES_H_
#define COOPMARL_CHECKS_PROPERTY_SUITES_H_

#include <cstdint>
#include <string>
#include <vector>

// Self-contained checks of the solver and the update rules against the
// oracles, shared by the acceptance binary and `coopmarl verify`.

namespace coopmarl::checks {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit_seconds = 0.0;
};

// Random games from 2x2 to 4x4: every returned profile verifies at 1e-9 and
// reproduces its payoffs; 2x2 games match BruteForce2x2 (same supports,
// strategies within 1e-8). `games` counts all sizes; `games_2x2` more are
// drawn as 2x2.
SuiteResult SolverSoundness(int games = 600, int games_2x2 = 300,
                            std::uint64_t seed = 20261015);

// Convex bound, alpha = 0 and 1, gamma = 0, and exact geometric approach to
// a constant target.
SuiteResult UpdateMicroProperties(std::uint64_t seed = 7);

// Tabular equilibrium learner on PenniesAndDilemma with visit-count step
// sizes and uniform exploration, against JointValueIteration.
SuiteResult NashQOracle(int steps = 100000, double gamma = 0.3,
                        double tolerance = 1e-2, std::uint64_t seed = 11);

// Analytic gradient of the approximator against central differences on
// `num_params` random parameters, at initialisation and after 100 updates.
SuiteResult GradientCheck(int num_params = 100, double tolerance = 1e-4,
                          std::uint64_t seed = 5);

std::vector<SuiteResult> RunAllSuites();

}  // namespace coopmarl::checks

#endif  // COOPMARL_CHECKS_PROPERTY_SUITES_H_
