// Copyright 2026 The RCSW Authors
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

#ifndef RCSW_COMMON_HPP
#define RCSW_COMMON_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace rcsw {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParityError : public Error {
    using Error::Error;
};
class DegreeError : public Error {
    using Error::Error;
};
class CapacityError : public Error {
    using Error::Error;
};
class FitError : public Error {
    using Error::Error;
};
class DomainError : public Error {
    using Error::Error;
};
class EmptySamples : public Error {
    using Error::Error;
};
class EmptyTable : public Error {
    using Error::Error;
};
class InfeasibleBudget : public Error {
    using Error::Error;
};

/// Malformed serialized input. `where` is a byte offset or JSON pointer.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::string where)
        : Error(what + " (at " + where + ")"), where_(std::move(where)) {}
    const std::string &where() const noexcept { return where_; }

  private:
    std::string where_;
};

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr uint64_t mix_seed(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

/// Thread cap from RCSW_THREADS (default: hardware concurrency).
unsigned thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Work items must
/// be independent; results are deterministic when fn derives its own seed from i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

} // namespace rcsw

#endif
