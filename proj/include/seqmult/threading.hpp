// Copyright (c) 2026 the seqmult authors. All Rights Reserved.
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

#ifndef SEQMULT_THREADING_HPP
#define SEQMULT_THREADING_HPP

#include <functional>

namespace seqmult {

// Worker cap: min(hardware_concurrency, SEQMULT_THREADS), at least 1.
int worker_count();

// Runs fn(0..n-1) across worker threads.  Items must be independent; results
// keyed by index stay deterministic regardless of the worker count.  Nested
// calls run serially, so replicate loops can wrap chain loops without
// oversubscribing.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace seqmult

#endif // SEQMULT_THREADING_HPP
