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

#ifndef MRG_ERROR_HPP_
#define MRG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrg {

enum class ErrorKind {
  kConfig,       // malformed or inconsistent input
  kDomain,       // argument outside the mathematical domain
  kRange,        // index beyond a table horizon
  kSizing,       // requested storage exceeds the memory budget
  kTruncation,   // tail tolerance not attainable at the window cap
  kBlowUp,       // exact second-moment recursion diverged
  kCoverage,     // surface does not cover a test-function support
  kQuadrature,   // quadrature refinement did not converge
  kStability,    // explicit time step violates stability
  kNumeric,      // NaN / non-finite values
  kCombinatorial,// enumeration exceeds its size cap
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace mrg

#endif  // MRG_ERROR_HPP_
