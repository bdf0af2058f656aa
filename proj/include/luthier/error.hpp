// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace luthier {

/// Bad input data or configuration. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration rejected during validation.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Filesystem failure while reading or writing. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Chat-completion endpoint failure. Maps to CLI exit code 2.
class GatewayError : public std::runtime_error {
public:
    enum class Kind { Exhausted, Http, Malformed, ReplayMiss };

    GatewayError(Kind kind, const std::string& what, int status = 0)
        : std::runtime_error(what), kind_(kind), status_(status) {}

    Kind kind() const noexcept { return kind_; }
    int status() const noexcept { return status_; }

private:
    Kind kind_;
    int status_;
};

}  // namespace luthier
