/*
   Copyright 2026 The pgp Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <functional>

namespace pgp {

// Work is always split into chunks of kChunkRows items, independent of the
// thread count, and reductions combine chunk results in chunk order. This
// keeps every result bit-identical under any --threads value.
inline constexpr std::size_t kChunkRows = 512;

void set_num_threads(int threads);  // 0 selects hardware concurrency
int num_threads();
int resolve_threads_from_env(int requested);  // applies PGP_THREADS when requested == 0

std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunkRows);

// Calls fn(chunk_index, begin, end) for every chunk; chunks run concurrently.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                     std::size_t chunk = kChunkRows);

// Calls fn(i) for i in [0, n); each call runs on one thread.
void parallel_tasks(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pgp
