// Copyright 2026 The mrg Authors
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

#ifndef MRG_PARALLEL_HPP_
#define MRG_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace mrg {

// Runs body(i) for i in [0, count) on up to `threads` workers (<= 0 means
// hardware concurrency). Work is handed out in index order; the first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

// Evaluates fn(i) for every index and returns the results in index order,
// so any later reduction is independent of the thread count.
template <typename Fn>
auto parallel_map(std::size_t count, int threads, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace mrg

#endif  // MRG_PARALLEL_HPP_
