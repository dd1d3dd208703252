// Copyright 2026 The pwsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PWSEL_PARALLEL_HPP_
#define PWSEL_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace pwsel {

inline constexpr std::uint64_t kTrialChunk = 4096;

// Runs fn(state, trial) for trial in [0, trials). Trials are grouped into fixed
// chunks, each with its own copy of `init`, and chunk states are merged in chunk
// order. The result does not depend on `threads`.
template <class State, class Fn, class Merge>
State run_trials(std::uint64_t trials, std::size_t threads, const State& init, Fn fn,
                 Merge merge) {
  const std::uint64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  threads = static_cast<std::size_t>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, chunks)));
  auto work = [&](State& state, std::uint64_t c) {
    const std::uint64_t end = std::min(trials, (c + 1) * kTrialChunk);
    for (std::uint64_t t = c * kTrialChunk; t < end; ++t) fn(state, t);
  };
  State total = init;
  if (threads == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      State part = init;
      work(part, c);
      merge(total, part);
    }
    return total;
  }
  // Waves of `threads` chunks; merged in chunk order after each wave.
  for (std::uint64_t first = 0; first < chunks; first += threads) {
    const std::uint64_t wave = std::min<std::uint64_t>(threads, chunks - first);
    std::vector<State> partial(static_cast<std::size_t>(wave), init);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(wave));
    std::vector<std::thread> pool;
    for (std::uint64_t i = 0; i < wave; ++i) {
      pool.emplace_back([&, i] {
        try {
          work(partial[i], first + i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (auto& p : partial) merge(total, p);
  }
  return total;
}

}  // namespace pwsel

#endif  // PWSEL_PARALLEL_HPP_
