/*
 * Copyright 2026 The MAPs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef MAPS_ERROR_HPP
#define MAPS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace maps {

enum class ErrorKind {
  Contract,     // caller violated a precondition
  Ingest,       // malformed trajectory or dataset file
  Alignment,
  Numerical,    // Cholesky failure after the full jitter ladder
  Fit,          // every optimizer start failed
  Training,     // classifier cannot be trained (missing class)
  MissingDemo,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace maps

#endif
