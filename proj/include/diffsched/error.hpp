/*
Copyright 2026 The diffsched Authors

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

#include <stdexcept>
#include <string>
#include <vector>

namespace diffsched {

/// Malformed input text (JSON, edge list, schedule, LP).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid graph or schedule. Carries every violation found.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations, const std::string& heading = "invalid graph");
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// The latency bound admits no legal schedule.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, int min_latency)
      : std::runtime_error(what), min_latency_(min_latency) {}
  int min_latency() const noexcept { return min_latency_; }

 private:
  int min_latency_;
};

}  // namespace diffsched
