// Copyright 2026 The idpas Authors
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

#ifndef IDPAS_TOOLS_SELFTEST_H_
#define IDPAS_TOOLS_SELFTEST_H_

#include <ostream>

namespace idpas {

// Gradient check, solver-vs-enumeration equivalence and neighborhood
// soundness on small generated cases. Returns true when every suite passes.
bool RunSelfTest(std::ostream& log);

}  // namespace idpas

#endif  // IDPAS_TOOLS_SELFTEST_H_
