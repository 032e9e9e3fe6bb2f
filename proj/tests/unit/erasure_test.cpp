// Copyright 2026 The apifuzz Authors
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


#include <gtest/gtest.h>

#include "apifuzz/erasure.hpp"
#include "apifuzz/ir.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace apifuzz {
namespace {

TEST(Erasure, FourCallSnippet) {
  const ApiSpec spec = testing::inference_api();
  const Program p = parse_ir(spec, R"(m1<Object>(constant(String))
m1<String>(constant(String))
m2<String,String>(constant(String))
local var x: String = m2<String,String>(constant(String))
)");
  const Program e = erase(spec, p);
  EXPECT_EQ(print_ir(spec, e), R"(m1<Object>(constant(String))
m1(constant(String))
m2<String,String>(constant(String))
local var x: String = m2(constant(String))
)");
  EXPECT_TRUE(check(spec, e));
  EXPECT_EQ(elaborate(spec, e), elaborate(spec, p));
}

TEST(Erasure, CanErase) {
  const ApiSpec spec = testing::inference_api();
  const Program p = parse_ir(spec, "m1<Object>(constant(String))\nm1<String>(constant(String))\n");
  EXPECT_FALSE(can_erase(spec, p.statements[0], std::nullopt));
  EXPECT_TRUE(can_erase(spec, p.statements[1], std::nullopt));
  const Program none = parse_ir(spec, "m1(constant(String))\n");
  EXPECT_FALSE(can_erase(spec, none.statements[0], std::nullopt));  // nothing to drop
}

TEST(Erasure, NestedCallsUseTheTargetTheyFlowInto) {
  const ApiSpec spec = testing::hierarchy_api();
  const Program p = parse_ir(spec, "local var x: List<Int> = Util.singleton<Int>(Util.ZERO)\n"
                                   "Util.total(Util.singleton<Int>(Util.ZERO))\n"
                                   "local var y: List<Number> = Util.singleton<Number>(Util.ZERO)\n");
  const Program e = erase(spec, p);
  EXPECT_EQ(erased_call_count(p.statements[0], e.statements[0]), 1u);
  EXPECT_EQ(erased_call_count(p.statements[1], e.statements[1]), 1u);
  // The argument alone would infer Int; only the target fixes Number.
  EXPECT_EQ(erased_call_count(p.statements[2], e.statements[2]), 1u);
  EXPECT_TRUE(check(spec, e));
  EXPECT_EQ(elaborate(spec, e), elaborate(spec, p));
}

TEST(Erasure, ReceiversHaveNoTarget) {
  const ApiSpec spec = testing::hierarchy_api();
  const Program p = parse_ir(spec, "local var x: Int = new ArrayList<Int>().get(Util.ZERO)\n");
  const Program e = erase(spec, p);
  EXPECT_EQ(print_ir(spec, e), print_ir(spec, p));  // a constructor with no arguments needs its types
}

TEST(Erasure, RandomProgramsRoundTrip) {
  testing::PropertyTally tally;
  for (std::uint64_t seed = 0; seed < 300; ++seed) testing::erasure_trial(seed, tally);
  EXPECT_GT(tally.checks, 1000u);
  EXPECT_TRUE(tally.ok()) << tally.violations.front();
}

}  // namespace
}  // namespace apifuzz
