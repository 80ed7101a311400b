// Copyright 2026 The braggio authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace braggio {

// Base class for all library failures.  Catching this at the boundary is
// enough to distinguish "the physics/numerics went wrong" from a bug.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied parameters (non-positive duration, negative amplitude,
// truncated integration window, malformed config values, ...).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Pulse parameters outside the representable regime.
class InvalidPulse : public InvalidArgument {
 public:
  explicit InvalidPulse(const std::string& msg) : InvalidArgument(msg) {}
};

// An iterative numerical procedure exhausted its budget without meeting
// its tolerance (adaptive stepper, ladder escalation, optimizer).
class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

// A bracketing root search found no sign change over the scanned range.
class NoRootInBracket : public ConvergenceFailure {
 public:
  explicit NoRootInBracket(const std::string& msg)
      : ConvergenceFailure(msg) {}
};

// The requested quadrature grid misses too much of the distribution mass.
class QuadratureUnderflow : public InvalidArgument {
 public:
  explicit QuadratureUnderflow(const std::string& msg)
      : InvalidArgument(msg) {}
};

// Phase response is flat at the operating point; sensitivity is undefined.
class ZeroSlope : public Error {
 public:
  explicit ZeroSlope(const std::string& msg) : Error(msg) {}
};

// Mean spin has collapsed; squeezing parameters are undefined.
class DepolarizedState : public Error {
 public:
  explicit DepolarizedState(const std::string& msg) : Error(msg) {}
};

// Requested value lies outside the invertible/monotone branch.
class OutOfRange : public InvalidArgument {
 public:
  explicit OutOfRange(const std::string& msg) : InvalidArgument(msg) {}
};

// Optimization search box has no interior.
class EmptySearchBox : public InvalidArgument {
 public:
  explicit EmptySearchBox(const std::string& msg) : InvalidArgument(msg) {}
};

// Matrix handed to the unitary-dilation routine has singular values > 1.
class NotSubUnitary : public InvalidArgument {
 public:
  explicit NotSubUnitary(const std::string& msg) : InvalidArgument(msg) {}
};

// Exact reference computation requested beyond its hard size cap.
class CapExceeded : public InvalidArgument {
 public:
  explicit CapExceeded(const std::string& msg) : InvalidArgument(msg) {}
};

// A pulse sequence declares more than one phase-bearing element.
class MultiplePhaseElements : public InvalidArgument {
 public:
  explicit MultiplePhaseElements(const std::string& msg)
      : InvalidArgument(msg) {}
};

}  // namespace braggio
