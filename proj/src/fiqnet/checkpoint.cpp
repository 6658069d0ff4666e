// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/fiqnet/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fiq/encoders/feature_file.hpp"
#include "fiq/encoders/features.hpp"
#include "fiq/error.hpp"

namespace fiq::fiqnet {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Parameter and extra names use [A-Za-z0-9._-]; anything else is rejected
// so file names stay portable.
std::string file_stem(const std::string& name) {
  if (name.empty()) throw ConfigError("empty checkpoint entry name");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) throw ConfigError("checkpoint entry name '" + name + "' has unsupported characters");
  }
  return name;
}

template <typename J>
const J& member(const J& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(key, std::string("checkpoint manifest lacks '") + key + "'");
  }
  return j.at(key);
}

void expect_id(const encoders::FeatureBlob& blob, const std::string& id) {
  if (blob.id != id) {
    throw FormatError("id", "checkpoint file for '" + id + "' carries id '" + blob.id + "'");
  }
}

void expect_shape(const numkit::MatrixF& m, std::size_t rows, std::size_t cols,
                  const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw FormatError(what, what + " has shape " + m.shape_string() + ", manifest says " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

std::string config_hash(const ModelConfig& config) { return encoders::sha1_hex(config.canonical()); }

ordered_json config_to_json(const ModelConfig& c) {
  return ordered_json{{"dim", c.dim},
                      {"heads", c.heads},
                      {"clips", c.clips},
                      {"frames_per_clip", c.frames_per_clip},
                      {"max_frames", c.max_frames},
                      {"decoder_layers", c.decoder_layers},
                      {"ffn_multiplier", c.ffn_multiplier},
                      {"dropout", c.dropout},
                      {"ln_eps", c.ln_eps}};
}

ModelConfig config_from_json(const ordered_json& j) {
  ModelConfig c;
  try {
    c.dim = member(j, "dim").get<std::size_t>();
    c.heads = member(j, "heads").get<std::size_t>();
    c.clips = member(j, "clips").get<std::size_t>();
    c.frames_per_clip = member(j, "frames_per_clip").get<std::size_t>();
    c.max_frames = member(j, "max_frames").get<std::size_t>();
    c.decoder_layers = member(j, "decoder_layers").get<std::size_t>();
    c.ffn_multiplier = member(j, "ffn_multiplier").get<std::size_t>();
    c.dropout = member(j, "dropout").get<double>();
    c.ln_eps = member(j, "ln_eps").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config", std::string("bad model config in manifest: ") + e.what());
  }
  c.validate();
  return c;
}

void save_checkpoint(const std::string& dir, const Checkpoint& ck) {
  const fs::path root(dir);
  fs::create_directories(root);
  fs::remove_all(root / "params");
  fs::remove_all(root / "extras");

  ordered_json manifest;
  manifest["format"] = "fiq-checkpoint";
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = config_to_json(ck.config);
  manifest["config_hash"] = config_hash(ck.config);

  ordered_json params = ordered_json::array();
  for (const auto& p : ck.params) {
    const std::string stem = file_stem(p.name);
    const std::string value_file = "params/" + stem + ".value.fiqf";
    const std::string ema_file = "params/" + stem + ".ema.fiqf";
    encoders::save_feature_file((root / value_file).string(), p.name, p.value);
    encoders::save_feature_file((root / ema_file).string(), p.name + ".ema", p.ema);
    params.push_back(ordered_json{{"name", p.name},
                                  {"rows", p.rows()},
                                  {"cols", p.cols()},
                                  {"value", value_file},
                                  {"ema", ema_file}});
  }
  manifest["params"] = std::move(params);

  ordered_json extras = ordered_json::array();
  for (const auto& [key, m] : ck.extras) {
    const std::string file = "extras/" + file_stem(key) + ".fiqf";
    encoders::save_feature_file((root / file).string(), key, m);
    extras.push_back(ordered_json{{"name", key}, {"rows", m.rows()}, {"cols", m.cols()}, {"file", file}});
  }
  manifest["extras"] = std::move(extras);
  manifest["meta"] = ck.meta;

  const fs::path tmp = root / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint manifest in '" + dir + "'");
    out << manifest.dump(2) << '\n';
  }
  fs::rename(tmp, root / "manifest.json");
}

Checkpoint load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "manifest.json", std::ios::binary);
  if (!in) throw ConfigError("no checkpoint manifest in '" + dir + "'");
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest", std::string("checkpoint manifest is not JSON: ") + e.what());
  }
  if (member(manifest, "format") != "fiq-checkpoint") {
    throw FormatError("format", "not a checkpoint manifest");
  }
  if (member(manifest, "version") != kCheckpointVersion) {
    throw FormatError("version", "unsupported checkpoint version");
  }

  Checkpoint ck;
  ck.config = config_from_json(member(manifest, "config"));
  if (member(manifest, "config_hash") != config_hash(ck.config)) {
    throw ConfigError("checkpoint config hash does not match its config");
  }
  try {
    for (const auto& e : member(manifest, "params")) {
      const auto name = member(e, "name").get<std::string>();
      const auto rows = member(e, "rows").get<std::size_t>();
      const auto cols = member(e, "cols").get<std::size_t>();
      auto& p = ck.params.add(name, rows, cols, numkit::Init::zeros());
      auto value = encoders::load_feature_file((root / member(e, "value").get<std::string>()).string());
      auto ema = encoders::load_feature_file((root / member(e, "ema").get<std::string>()).string());
      expect_id(value, name);
      expect_id(ema, name + ".ema");
      expect_shape(value.matrix, rows, cols, name);
      expect_shape(ema.matrix, rows, cols, name + ".ema");
      p.value = std::move(value.matrix);
      p.ema = std::move(ema.matrix);
    }
    for (const auto& e : member(manifest, "extras")) {
      const auto name = member(e, "name").get<std::string>();
      auto blob = encoders::load_feature_file((root / member(e, "file").get<std::string>()).string());
      expect_id(blob, name);
      expect_shape(blob.matrix, member(e, "rows").get<std::size_t>(),
                   member(e, "cols").get<std::size_t>(), name);
      ck.extras.emplace(name, std::move(blob.matrix));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest", std::string("bad checkpoint manifest entry: ") + e.what());
  }
  if (manifest.contains("meta")) ck.meta = manifest["meta"];
  return ck;
}

void restore_parameters(const Checkpoint& ck, const ModelConfig& expected,
                        numkit::ParamStore<float>& store) {
  if (config_hash(ck.config) != config_hash(expected)) {
    throw ConfigError("checkpoint was written for a different model config (" +
                      ck.config.canonical() + ")");
  }
  for (auto& p : store) {
    const auto* q = ck.params.find(p.name);
    if (q == nullptr) throw ConfigError("checkpoint lacks parameter '" + p.name + "'");
    if (!q->value.same_shape(p.value)) {
      throw DimensionError("checkpoint parameter '" + p.name + "' has shape " +
                           q->value.shape_string() + ", expected " + p.value.shape_string());
    }
    p.value = q->value;
    p.ema = q->ema;
  }
}

}  // namespace fiq::fiqnet
