/* Copyright 2026 The duplexflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "dflow/annotate/chatml.h"
#include "dflow/annotate/gap.h"
#include "dflow/annotate/labels.h"
#include "dflow/annotate/rng.h"
#include "dflow/core/error.h"
#include "dflow/core/json_util.h"
#include "dflow/core/timeline.h"

using namespace dflow;
using namespace dflow::annotate;

namespace {

Json load(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return Json::parse(in);
}

Json golden() { return load(std::string(DFLOW_GOLDEN_DIR) + "/oracle_values.json"); }

SpeechSegment user(double a, double b) { return {Channel::User, a, b}; }
SpeechSegment assistant(double a, double b) { return {Channel::Assistant, a, b}; }

}  // namespace

TEST_CASE("mt19937_64 matches the reference stream") {
  PortableRng rng(5489);
  CHECK(rng.next_u64() == golden()["mt19937_64_seed_5489_first"].get<std::uint64_t>());
}

TEST_CASE("portable_log matches the reference bit for bit") {
  for (const auto& e : golden()["portable_log"]) {
    const double x = e["x"].get<double>();
    CHECK(portable_log(x) == e["value"].get<double>());
    CHECK(portable_log(x) == doctest::Approx(std::log(x)).epsilon(1e-14));
  }
}

TEST_CASE("seeded normal draws match the reference") {
  PortableRng rng(42);
  for (const auto& v : golden()["normal_seed42_first5"]) {
    CHECK(rng.normal(0.6, 0.4) == v.get<double>());
  }
}

TEST_CASE("assistant onset is the user endpoint exactly") {
  DialogueTimeline t{{user(0.0, 2.0), assistant(2.5, 5.0)}, 6.0};
  const auto labels = annotate_timeline(t, {});
  CHECK(labels.assistant_turn_onsets == std::vector<double>{2.0});
  CHECK(labels.user_turn_onsets.empty());
  CHECK(labels.backchannel_intervals.empty());
}

TEST_CASE("user onset is the assistant end plus a seeded gap") {
  DialogueTimeline t{{assistant(2.5, 5.0), user(5.8, 7.0)}, 8.0};
  for (const auto& e : golden()["user_onset_after_assistant_5p0"]) {
    AnnotationConfig cfg;
    cfg.seed = e["seed"].get<std::uint64_t>();
    const auto labels = annotate_timeline(t, cfg);
    REQUIRE(labels.user_turn_onsets.size() == 1);
    CHECK(labels.user_turn_onsets[0] == e["onset"].get<double>());
    CHECK(labels.user_turn_onsets[0] >= 5.0);
  }
}

TEST_CASE("empty timeline gives empty labels") {
  const auto labels = annotate_timeline(DialogueTimeline{{}, 1.0}, {});
  CHECK(labels == DuplexLabels{});
}

TEST_CASE("invalid timeline is rejected") {
  DialogueTimeline t{{user(2.0, 1.0)}, 3.0};
  CHECK_THROWS_AS(annotate_timeline(t, {}), ValidationError);
}

TEST_CASE("closed-loop timeline labels match the independent reference") {
  const auto t = timeline_from_json(load(std::string(DFLOW_CONFIG_DIR) + "/closed_loop_timeline.json"));
  AnnotationConfig cfg;
  cfg.seed = 7;
  const auto got = labels_to_json(annotate_timeline(t, cfg), cfg);
  const auto want = golden()["closed_loop_labels_seed7"];
  CHECK(got["assistant_turn_onsets"] == want["assistant_turn_onsets"]);
  CHECK(got["user_turn_onsets"] == want["user_turn_onsets"]);
  CHECK(got["backchannel_intervals"] == want["backchannel_intervals"]);
  CHECK(got["meta"]["rng"] == std::string(PortableRng::kAlgorithm));
  CHECK(labels_from_json(got) == annotate_timeline(t, cfg));
  CHECK(annotate_timeline(t, cfg) == annotate_timeline(t, cfg));
}

TEST_CASE("back-channel containment boundary") {
  DialogueTimeline inside{{assistant(2.0, 6.0), user(3.0, 3.5)}, 7.0};
  CHECK(detect_backchannels(inside, 0.2) == std::vector<Interval>{{3.0, 3.5}});
  DialogueTimeline late{{assistant(2.0, 3.6), user(3.0, 3.5)}, 7.0};
  CHECK(detect_backchannels(late, 0.2).empty());
  DialogueTimeline exact{{assistant(2.0, 3.7), user(3.0, 3.5)}, 7.0};
  CHECK(detect_backchannels(exact, 0.2).size() == 1);
  DialogueTimeline apart{{user(0.0, 1.0), assistant(1.5, 3.0)}, 4.0};
  CHECK(detect_backchannels(apart, 0.2).empty());
  CHECK_THROWS_AS(detect_backchannels(inside, -0.1), ValidationError);
}

TEST_CASE("a back-channel does not start a user turn") {
  DialogueTimeline t{{user(0.0, 1.0), assistant(1.5, 6.0), user(3.0, 3.5), user(7.0, 8.0)}, 9.0};
  const auto labels = annotate_timeline(t, {});
  CHECK(labels.assistant_turn_onsets == std::vector<double>{1.0});
  CHECK(labels.user_turn_onsets.size() == 1);
  CHECK(labels.user_turn_onsets[0] >= 6.0);
  CHECK(labels.backchannel_intervals.size() == 1);
}

TEST_CASE("gap sampler: degenerate and clamped cases") {
  PortableRng rng(1);
  GapDistribution fixed{0.6, 0.0, 0.0};
  for (int i = 0; i < 10; ++i) CHECK(sample_turn_gap(fixed, rng) == 0.6);
  GapDistribution wide{0.0, 5.0, 0.25};
  for (int i = 0; i < 1000; ++i) CHECK(sample_turn_gap(wide, rng) >= 0.25);
  CHECK_THROWS(validate(GapDistribution{0.6, -1.0, 0.0}));
  CHECK_THROWS(validate(GapDistribution{0.6, 0.4, -0.1}));
  CHECK(gap_distribution_from_json(gap_distribution_to_json(wide)) == wide);
}

TEST_CASE("gap sampler moments over 10k draws") {
  PortableRng rng(123);
  double sum = 0, sq = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double g = sample_unclamped_gap(GapDistribution{}, rng);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - 0.6) <= 0.02);
  CHECK(std::abs(sd - 0.4) <= 0.02);
}

TEST_CASE("chatml: transcription sample layout") {
  const auto s = to_chatml("Speech Transcription", "a.wav", "hello");
  REQUIRE(s.messages.size() == 3);
  CHECK(s.messages[0] == ChatMessage{Role::System, std::string(kDefaultSystemPrompt)});
  CHECK(s.messages[1].content == "Speech Transcription <|startofspeech|> a.wav <|endofspeech|>");
  CHECK(s.messages[2] == ChatMessage{Role::Assistant, "hello"});
  const auto t = to_chatml("Translate zh into en", "b.wav", "hi");
  CHECK_NOTHROW(validate(t));
  CHECK(t.messages[2].content == "hi");
}

TEST_CASE("chatml: errors") {
  CHECK_THROWS_AS(to_chatml("x", "", "y"), ValidationError);
  ChatMlSample bad{{{Role::User, "hi"}}};
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {{{Role::System, "s"}, {Role::Assistant, "a"}}};
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {{{Role::System, "s"}, {Role::User, "no speech"}, {Role::Assistant, "a"}}};
  CHECK_THROWS_AS(parse_speech_task(bad), ValidationError);
  CHECK_THROWS_AS(role_from_string("robot"), ValidationError);
}

TEST_CASE("chatml: round trip for random printable inputs") {
  std::mt19937_64 rng(77);
  auto text = [&](std::size_t min_len) {
    std::string s;
    const std::size_t n = min_len + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(' ' + rng() % 95));
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const SpeechTaskExample ex{text(0), text(1), text(0)};
    if (ex.wav_path.find_first_not_of(' ') == std::string::npos) continue;
    const auto sample = to_chatml(ex.task_instruction, ex.wav_path, ex.task_output);
    REQUIRE(parse_speech_task(sample) == ex);
    REQUIRE(chatml_from_json(chatml_to_json(sample)) == sample);
  }
}
