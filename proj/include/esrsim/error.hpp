// Copyright 2026 The esrsim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace esrsim {

/// Raised when a numeric argument lies outside an operation's domain
/// (non-finite angles, rabi <= 0, sigma <= -1, theta outside [0, 4pi], ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace esrsim
