// Copyright 2026 The Stochmatch Authors
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

// End-to-end reproduction checks shared by the acceptance test and the
// `reproduce` command.

#ifndef STOCHMATCH_SRC_ACCEPTANCE_H_
#define STOCHMATCH_SRC_ACCEPTANCE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stochmatch {

struct CheckRow {
  std::string check;
  std::string expected;
  double computed = 0.0;
  std::string tolerance;
  bool pass = true;
  // Reported for context; does not affect the verdict.
  bool informational = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  double seconds = 0.0;
  std::vector<CheckRow> rows;

  bool pass() const;
};

struct AcceptanceOptions {
  unsigned threads = 0;
  std::uint64_t seed = 20260101;
  // Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

// Criteria 1-8 in order. A failing check never stops later criteria; an
// exception inside one criterion is recorded as a failed row.
std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options = {});

// Columns: criterion, check, expected, computed, tolerance, verdict.
std::string FormatAcceptanceTable(const std::vector<CriterionResult>& results);

// "criterion N: PASS|FAIL <title> (<seconds> s)".
std::string FormatCriterionLine(const CriterionResult& result);

}  // namespace stochmatch

#endif  // STOCHMATCH_SRC_ACCEPTANCE_H_
