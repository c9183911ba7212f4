// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace harness {

/// Base for every error the harness raises out-of-band. In-band failures
/// (tool errors, rejected tool calls) are reported to the agent instead.
class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid flags, descriptors, or configuration files. Maps to exit code 2.
class ConfigError : public HarnessError {
public:
    using HarnessError::HarnessError;
};

/// Environment failures not attributable to the model: provisioning,
/// version control, unreachable backends, unwritable sinks. Maps to exit code 3.
class InfraError : public HarnessError {
public:
    using HarnessError::HarnessError;
};

/// A domain value violates its invariants (empty id, empty fail_to_pass, ...).
class ValidationError : public HarnessError {
public:
    using HarnessError::HarnessError;
};

/// Replay backend saw a conversation that diverges from the recorded log.
class ReplayMismatch : public InfraError {
public:
    using InfraError::InfraError;
};

/// Scripted backend ran out of responses for an episode.
class QueueExhausted : public InfraError {
public:
    using InfraError::InfraError;
};

/// The run was cancelled (signal or test hook) before it completed.
class Interrupted : public HarnessError {
public:
    using HarnessError::HarnessError;
};

}  // namespace harness
