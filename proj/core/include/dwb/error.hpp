/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dwb {

/// Root of every error the workbench throws. Callers that only care about
/// "something in dwb failed" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix dimensions that do not line up.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A parameter outside the operation's domain (non-square K, zero channels...).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// The requested operation is not defined for this input (e.g. a gradient
/// mask for an activation that is not piecewise linear).
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// Two inputs that must come from the same computation do not.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// Problem size beyond what the exact algorithms are meant to handle.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// Malformed distribution, descriptor, or config.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An experiment kind the runner does not know.
class UnknownKindError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// An output file or directory that cannot be written.
class IoError : public Error {
public:
  using Error::Error;
};

/// Least-squares fit with fewer than two distinct abscissae.
class DegenerateFitError : public Error {
public:
  using Error::Error;
};

} // namespace dwb
