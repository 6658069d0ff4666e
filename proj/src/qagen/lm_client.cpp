// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/qagen/lm_client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "fiq/error.hpp"
#include "fiq/qagen/question.hpp"
#include "fiq/qagen/validate.hpp"

namespace fiq::qagen {

std::string TemplateClient::generate(const std::string& prompt) {
  const auto candidate = parse_question_prompt(prompt);
  if (!candidate) throw Error("lm-output", "template client cannot read the prompt");
  return template_question(*candidate);
}

std::string TemplateClient::answer(const std::string& question, const std::string& context,
                                   std::size_t max_tokens) {
  return template_answer(question, context, max_tokens);
}

HttpLmClient::HttpLmClient(HttpClientSettings settings) : settings_(std::move(settings)) {
  if (settings_.endpoint.empty()) throw ConfigError("lm endpoint is empty");
  if (!settings_.api_key_env.empty()) {
    if (const char* key = std::getenv(settings_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpLmClient::complete(const std::string& prompt) {
  nlohmann::json body = {{"model", settings_.model},
                         {"temperature", 0},
                         {"messages", {{{"role", "user"}, {"content", prompt}}}}};
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (int attempt = 0; attempt <= settings_.retries; ++attempt) {
    httplib::Client client(settings_.endpoint);
    client.set_connection_timeout(settings_.timeout_seconds, 0);
    client.set_read_timeout(settings_.timeout_seconds, 0);
    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500 && res->status != 429) break;
      continue;
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed reply: ") + e.what();
      break;
    }
  }
  throw LmTransportError(prompt, "language model request failed (" + last_error + ")");
}

std::string HttpLmClient::generate(const std::string& prompt) { return complete(prompt); }

std::string HttpLmClient::answer(const std::string& question, const std::string& context,
                                 std::size_t max_tokens) {
  const std::string prompt = "Answer the question with a short phrase copied from the context, "
                             "at most " + std::to_string(max_tokens) +
                             " words. Reply with the phrase only.\ncontext: " + context +
                             "\nquestion: " + question + "\n";
  return complete(prompt);
}

std::unique_ptr<LMClient> make_lm_client(const LmSettings& settings) {
  if (settings.client == "template") return std::make_unique<TemplateClient>();
  if (settings.client == "http") return std::make_unique<HttpLmClient>(settings.http);
  throw ConfigError("unknown lm client '" + settings.client + "' (expected template or http)");
}

}  // namespace fiq::qagen
