// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/dataset.hpp"

#include <map>

#include "fiq/error.hpp"

namespace fiq::trainer {

namespace {

void check_width(const numkit::MatrixF& m, std::size_t dim, const std::string& record_id,
                 const char* what) {
  if (m.cols() != dim || m.rows() == 0) {
    throw DimensionError("record '" + record_id + "': " + what + " features are " +
                         m.shape_string() + ", expected width " + std::to_string(dim));
  }
}

}  // namespace

std::vector<Example> resolve_examples(const std::vector<qagen::QARecord>& records,
                                      const encoders::FeatureSource& source,
                                      const fiqnet::ModelConfig& config) {
  std::vector<std::string> missing;
  for (const auto& r : records) {
    bool ok = source.has_video(r.video_id) && source.has_text(r.question);
    for (const auto& o : r.options) ok = ok && source.has_text(o);
    if (!ok) missing.push_back(r.record_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw MissingFeaturesError(missing, std::to_string(missing.size()) +
                                            " record(s) lack features: " + list);
  }

  std::map<std::string, std::shared_ptr<const numkit::MatrixF>> videos;
  std::map<std::string, std::shared_ptr<const numkit::MatrixF>> texts;
  auto text_of = [&](const std::string& t, const std::string& record_id) {
    auto it = texts.find(t);
    if (it != texts.end()) return it->second;
    auto m = std::make_shared<const numkit::MatrixF>(source.text(t).tokens);
    check_width(*m, config.dim, record_id, "text");
    return texts.emplace(t, std::move(m)).first->second;
  };

  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Example ex;
    ex.record = r;
    auto vit = videos.find(r.video_id);
    if (vit == videos.end()) {
      auto m = std::make_shared<const numkit::MatrixF>(source.video(r.video_id).frames);
      if (m->rows() != config.frames() || m->cols() != config.dim) {
        throw DimensionError("record '" + r.record_id + "': video features are " +
                             m->shape_string() + ", expected " + std::to_string(config.frames()) +
                             "x" + std::to_string(config.dim));
      }
      vit = videos.emplace(r.video_id, std::move(m)).first;
    }
    ex.video = vit->second;
    ex.question = text_of(r.question, r.record_id);
    for (std::size_t i = 0; i < qagen::kOptionCount; ++i) ex.options[i] = text_of(r.options[i], r.record_id);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace fiq::trainer
