// Copyright 2026 The qrobust Authors
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
#include <string_view>

namespace qrobust {

/// Error categories surfaced to the CLI as machine-readable tags.
enum class ErrorCategory {
    Configuration,
    Capability,
    Data,
    Format,
    Capacity,
    DegenerateInput,
    Training,
    Io,
};

constexpr std::string_view category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Configuration:
        return "configuration";
    case ErrorCategory::Capability:
        return "capability";
    case ErrorCategory::Data:
        return "data";
    case ErrorCategory::Format:
        return "format";
    case ErrorCategory::Capacity:
        return "capacity";
    case ErrorCategory::DegenerateInput:
        return "degenerate-input";
    case ErrorCategory::Training:
        return "training";
    case ErrorCategory::Io:
        return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string &what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

#define QROBUST_DEFINE_ERROR(Name, Cat)                                        \
    class Name : public Error {                                                \
      public:                                                                  \
        explicit Name(const std::string &what)                                 \
            : Error(ErrorCategory::Cat, what) {}                               \
    };

QROBUST_DEFINE_ERROR(ConfigurationError, Configuration)
QROBUST_DEFINE_ERROR(CapabilityError, Capability)
QROBUST_DEFINE_ERROR(DataError, Data)
QROBUST_DEFINE_ERROR(FormatError, Format)
QROBUST_DEFINE_ERROR(CapacityError, Capacity)
QROBUST_DEFINE_ERROR(DegenerateInputError, DegenerateInput)
QROBUST_DEFINE_ERROR(TrainingError, Training)
QROBUST_DEFINE_ERROR(IoError, Io)

#undef QROBUST_DEFINE_ERROR

} // namespace qrobust
