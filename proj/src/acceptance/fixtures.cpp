// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/acceptance/fixtures.hpp"

#include <array>
#include <set>

#include "fiq/numkit/rng.hpp"

namespace fiq::acceptance {

OverfitFixture overfit_fixture(std::size_t count, std::uint64_t seed) {
  static constexpr std::array<const char*, 8> kColors = {"red",   "blue",  "white", "black",
                                                        "green", "grey",  "silver", "yellow"};
  static constexpr std::array<const char*, 8> kThings = {"car", "truck", "bus",  "van",
                                                        "taxi", "bike", "cone", "sign"};
  static constexpr std::array<const char*, 6> kPlaces = {"lane", "corner", "bridge",
                                                        "ramp", "curb",   "tunnel"};
  OverfitFixture f;
  f.model.dim = 16;
  f.model.heads = 2;
  f.model.clips = 2;
  f.model.frames_per_clip = 4;
  f.model.max_frames = 8;
  f.model.decoder_layers = 1;
  f.model.dropout = 0.0;
  f.features = {seed, f.model.frames(), f.model.dim};
  f.train.batch_size = 8;
  f.train.epochs = 300;
  f.train.lr_base = 3e-3;
  f.train.seed = seed;
  f.train.eval_with_ema = false;

  numkit::Rng rng = numkit::Rng::derive(seed, 0x6f766572);  // "over"
  std::set<std::string> used;
  auto fresh_option = [&] {
    for (;;) {
      std::string s = std::string("a ") + kColors[rng.below(kColors.size())] + " " +
                      kThings[rng.below(kThings.size())] + " near the " +
                      kPlaces[rng.below(kPlaces.size())];
      if (used.insert(s).second) return s;
    }
  };
  const std::size_t videos = std::max<std::size_t>(1, count / 4);
  for (std::size_t i = 0; i < count; ++i) {
    qagen::QARecord r;
    r.record_id = "ov-" + std::to_string(1000 + i);
    r.video_id = "ov_video_" + std::to_string(i % videos);
    r.question = "What is seen in scene " + std::to_string(i) + "?";
    for (auto& o : r.options) o = fresh_option();
    r.answer_idx = static_cast<std::size_t>(rng.below(qagen::kOptionCount));
    r.task_type = qagen::kBenchmarkTasks[i % qagen::kBenchmarkTasks.size()];
    f.records.push_back(std::move(r));
  }
  return f;
}

std::vector<qagen::Description> generation_fixture() {
  return {
      {"gen_v01",
       {"Two cars collide at the intersection.", "A pedestrian crosses.",
        "The white van stops at the traffic lights."}},
      {"gen_v02",
       {"A red truck is parked on the road.", "Three people wait at the bus stop.",
        "A red truck is parked on the road."}},
      {"gen_v03", {"There is no bicycle on the sidewalk.", "A black taxi turns left."}},
      {"gen_v04",
       {"A motorcycle overtakes two buses on the highway.", "4 5 6 7", "The police car stopped."}},
      {"gen_v05",
       {"On a rainy evening a long line of slow vehicles including a blue sedan a silver "
        "hatchback an old delivery truck two motorcycles and a yellow school bus moves "
        "carefully along the flooded avenue while several pedestrians holding umbrellas wait "
        "near the crossing signals and a traffic officer in a bright reflective jacket waves "
        "the drivers forward one by one past the stalled minivan that blocks the right lane "
        "near the old bridge by the river market."}},
      {"gen_v06", {"A cyclist rides along Ocean Avenue.", "Five cones block the lane."}},
      {"gen_v07", {"An ambulance passes a bus.", "The green car waits at the corner."}},
      {"gen_v08", {"A man walks a dog across the street.", "Two trucks are on the bridge."}},
  };
}

}  // namespace fiq::acceptance
