// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fiq {

/// Base of every error raised by the toolkit. `code()` is a stable,
/// machine-readable identifier that the CLI reports in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error("dimension", message) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& message) : Error("capacity", message) {}
};

class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& message) : Error("non-finite", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// Malformed on-disk data. `field()` names the offending header field or
/// record attribute.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& message)
      : Error("format", message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EmptyDescriptionError : public Error {
 public:
  explicit EmptyDescriptionError(const std::string& message)
      : Error("empty-description", message) {}
};

class AssemblyError : public Error {
 public:
  explicit AssemblyError(const std::string& message) : Error("assembly", message) {}
};

class MergeError : public Error {
 public:
  explicit MergeError(const std::string& message) : Error("merge", message) {}
};

/// Transport-level failure talking to a language model. Retryable; carries
/// the prompt that was being served.
class LmTransportError : public Error {
 public:
  LmTransportError(std::string prompt, const std::string& message)
      : Error("lm-transport", message), prompt_(std::move(prompt)) {}

  const std::string& prompt() const noexcept { return prompt_; }

 private:
  std::string prompt_;
};

class GradCheckError : public Error {
 public:
  GradCheckError(std::string param, const std::string& message)
      : Error("gradcheck", message), param_(std::move(param)) {}

  const std::string& param() const noexcept { return param_; }

 private:
  std::string param_;
};

class TrainingError : public Error {
 public:
  TrainingError(std::string record_id, const std::string& message)
      : Error("training", message), record_id_(std::move(record_id)) {}

  const std::string& record_id() const noexcept { return record_id_; }

 private:
  std::string record_id_;
};

class MissingFeaturesError : public Error {
 public:
  MissingFeaturesError(std::vector<std::string> record_ids, const std::string& message)
      : Error("missing-features", message), record_ids_(std::move(record_ids)) {}

  const std::vector<std::string>& record_ids() const noexcept { return record_ids_; }

 private:
  std::vector<std::string> record_ids_;
};

class InferenceError : public Error {
 public:
  explicit InferenceError(const std::string& message) : Error("inference", message) {}
};

}  // namespace fiq
