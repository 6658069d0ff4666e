// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace fiq::qagen {

/// Language-model backend for question generation and round-trip answering.
/// Implementations must be safe to call from several threads at once.
class LMClient {
 public:
  virtual ~LMClient() = default;

  /// Completes a question-generation prompt (see build_question_prompt).
  virtual std::string generate(const std::string& prompt) = 0;

  /// Short answer to `question` read from `context`, at most `max_tokens`
  /// proxy tokens.
  virtual std::string answer(const std::string& question, const std::string& context,
                             std::size_t max_tokens) = 0;
};

/// Offline, deterministic client: questions come from the template table and
/// answers from the span answerer.
class TemplateClient final : public LMClient {
 public:
  std::string generate(const std::string& prompt) override;
  std::string answer(const std::string& question, const std::string& context,
                     std::size_t max_tokens) override;
};

struct HttpClientSettings {
  /// Base URL of an OpenAI-compatible server, e.g. "http://127.0.0.1:8080".
  std::string endpoint;
  std::string model;
  /// Name of the environment variable holding the API key; may be empty.
  std::string api_key_env;
  int timeout_seconds = 30;
  /// Extra attempts after a failed request.
  int retries = 2;
};

/// Chat-completions client (POST <endpoint>/v1/chat/completions). Transport
/// failures and non-2xx replies raise LmTransportError carrying the prompt.
class HttpLmClient final : public LMClient {
 public:
  explicit HttpLmClient(HttpClientSettings settings);

  std::string generate(const std::string& prompt) override;
  std::string answer(const std::string& question, const std::string& context,
                     std::size_t max_tokens) override;

 private:
  std::string complete(const std::string& prompt);

  HttpClientSettings settings_;
  std::string api_key_;
};

struct LmSettings {
  /// "template" or "http".
  std::string client = "template";
  HttpClientSettings http;
};

std::unique_ptr<LMClient> make_lm_client(const LmSettings& settings);

}  // namespace fiq::qagen
