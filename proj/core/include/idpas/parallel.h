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

#ifndef IDPAS_PARALLEL_H_
#define IDPAS_PARALLEL_H_

#include <functional>

namespace idpas {

// Runs fn(0..count-1) on up to `jobs` threads. Work items are claimed in
// index order; results must be written to per-index slots by the caller so
// the outcome does not depend on scheduling. The first exception thrown by
// any item is rethrown after all threads finish.
void ParallelFor(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace idpas

#endif  // IDPAS_PARALLEL_H_
