// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fiq/error.hpp"

namespace fiq::cli {
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto x = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value,
                                  const std::string& base)>;

std::string resolve(const std::string& base, const std::string& v) {
  if (v.empty()) return v;
  const fs::path p(v);
  return p.is_absolute() ? v : (fs::path(base) / p).lexically_normal().string();
}

#define FIQ_PATH(field) \
  {#field, [](RunConfig& c, const std::string&, const std::string& v, const std::string& b) { c.paths.field = resolve(b, v); }}
#define FIQ_FIELD(target, conv) \
  [](RunConfig& c, const std::string& k, const std::string& v, const std::string&) { c.target = conv(k, v); }

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"paths",
       {FIQ_PATH(descriptions), FIQ_PATH(dataset), FIQ_PATH(original), FIQ_PATH(generated),
        FIQ_PATH(merged), FIQ_PATH(feature_root), FIQ_PATH(checkpoint), FIQ_PATH(train_log),
        FIQ_PATH(skip_report), FIQ_PATH(eval_dataset)}},
      {"lm",
       {{"client", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           if (v != "template" && v != "http") {
             throw ConfigError("lm.client: expected template or http, got '" + v + "'");
           }
           c.lm.client = v;
         }},
        {"endpoint", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           c.lm.http.endpoint = v;
         }},
        {"model", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           c.lm.http.model = v;
         }},
        {"api_key_env", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           c.lm.http.api_key_env = v;
         }},
        {"timeout_seconds", [](RunConfig& c, const std::string& k, const std::string& v, const std::string&) {
           c.lm.http.timeout_seconds = static_cast<int>(to_u64(k, v));
         }},
        {"retries", [](RunConfig& c, const std::string& k, const std::string& v, const std::string&) {
           c.lm.http.retries = static_cast<int>(to_u64(k, v));
         }}}},
      {"qagen",
       {{"f1_threshold", FIQ_FIELD(qagen.validation.threshold, to_double)},
        {"normalize_numerals", FIQ_FIELD(qagen.validation.normalize_numerals, to_bool)},
        {"comparand", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           if (v == "candidate") {
             c.qagen.validation.comparand = qagen::Comparand::kCandidate;
           } else if (v == "source-sentence") {
             c.qagen.validation.comparand = qagen::Comparand::kSourceSentence;
           } else {
             throw ConfigError("qagen.comparand: expected candidate or source-sentence, got '" + v + "'");
           }
         }},
        {"zero_lexicon", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           c.qagen.extract.zero_lexicon = to_list(v);
         }},
        {"max_retries", FIQ_FIELD(qagen.assemble.max_retries, to_u64)},
        {"max_in_flight", FIQ_FIELD(qagen.max_in_flight, to_u64)}}},
      {"model",
       {{"dim", FIQ_FIELD(model.dim, to_u64)},
        {"heads", FIQ_FIELD(model.heads, to_u64)},
        {"clips", FIQ_FIELD(model.clips, to_u64)},
        {"frames_per_clip", FIQ_FIELD(model.frames_per_clip, to_u64)},
        {"max_frames", FIQ_FIELD(model.max_frames, to_u64)},
        {"decoder_layers", FIQ_FIELD(model.decoder_layers, to_u64)},
        {"ffn_multiplier", FIQ_FIELD(model.ffn_multiplier, to_u64)},
        {"dropout", FIQ_FIELD(model.dropout, to_double)},
        {"ln_eps", FIQ_FIELD(model.ln_eps, to_double)}}},
      {"train",
       {{"batch_size", FIQ_FIELD(train.batch_size, to_u64)},
        {"epochs", FIQ_FIELD(train.epochs, to_u64)},
        {"ema_decay", FIQ_FIELD(train.ema_decay, to_double)},
        {"lr_base", FIQ_FIELD(train.lr_base, to_double)},
        {"schedule", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           c.train.schedule = trainer::parse_schedule(v);
         }},
        {"decay_factor", FIQ_FIELD(train.decay_factor, to_double)},
        {"beta1", FIQ_FIELD(train.beta1, to_double)},
        {"beta2", FIQ_FIELD(train.beta2, to_double)},
        {"adam_eps", FIQ_FIELD(train.adam_eps, to_double)},
        {"eval_with_ema", FIQ_FIELD(train.eval_with_ema, to_bool)}}},
      {"features",
       {{"source", [](RunConfig& c, const std::string&, const std::string& v, const std::string&) {
           if (v == "store") {
             c.features.source = FeatureSourceKind::kStore;
           } else if (v == "synthetic") {
             c.features.source = FeatureSourceKind::kSynthetic;
           } else {
             throw ConfigError("features.source: expected store or synthetic, got '" + v + "'");
           }
         }}}},
      {"run",
       {{"seed", [](RunConfig& c, const std::string& k, const std::string& v, const std::string&) {
           c.set_seed(to_u64(k, v));
         }},
        {"checked_mode", FIQ_FIELD(checked_mode, to_bool)}}},
  };
  return s;
}

#undef FIQ_PATH
#undef FIQ_FIELD

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  qagen.seed = s;
  train.seed = s;
  features.seed = s;
}

encoders::SyntheticSettings RunConfig::synthetic_settings() const {
  return {features.seed, model.frames(), model.dim};
}

RunConfig parse_run_config(const std::string& ini_text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.message()) + " at line " + std::to_string(e.line()));
  }
  RunConfig c;
  const auto& s = schema();
  // [run] first so its seed does not clobber explicit section values set later
  std::vector<std::string> order;
  if (tree.find("run") != tree.not_found()) order.push_back("run");
  for (const auto& [section, body] : tree) {
    if (section != "run") order.push_back(section);
  }
  for (const auto& section : order) {
    const auto& body = tree.get_child(section);
    auto sec = s.find(section);
    if (sec == s.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("config: '" + section + "' must be a section");
    for (const auto& [key, node] : body) {
      auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError("config: unknown key " + section + "." + key);
      it->second(c, section + "." + key, node.data(), base_dir);
    }
  }
  c.model.validate();
  c.train.validate();
  if (!(c.qagen.validation.threshold >= 0.0 && c.qagen.validation.threshold <= 1.0)) {
    throw ConfigError("qagen.f1_threshold must be in [0, 1]");
  }
  if (c.qagen.max_in_flight == 0) throw ConfigError("qagen.max_in_flight must be at least 1");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto base = fs::absolute(path).parent_path().string();
  return parse_run_config(buf.str(), base);
}

void require_input(const std::string& path, const std::string& key) {
  if (path.empty()) throw ConfigError(key + " is not set");
  if (!fs::exists(path)) throw ConfigError(key + " '" + path + "' does not exist");
}

}  // namespace fiq::cli
