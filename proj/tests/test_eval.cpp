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

#include <random>

#include "doctest.h"
#include "dflow/core/error.h"
#include "dflow/core/trace.h"
#include "dflow/eval/backchannel.h"
#include "dflow/eval/decomposition.h"
#include "dflow/eval/f1.h"
#include "dflow/eval/latency_stats.h"
#include "dflow/eval/report.h"
#include "oracles.h"

using namespace dflow;
using namespace dflow::eval;
using dflow::testing::optimal_matching_size;

namespace {

using Chunks = std::vector<std::int64_t>;

std::vector<std::int64_t> random_sorted_unique(std::mt19937_64& rng, std::size_t max_n,
                                               std::int64_t span) {
  std::vector<std::int64_t> v(rng() % (max_n + 1));
  for (auto& x : v) x = static_cast<std::int64_t>(rng() % span);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

TraceEvent event(TimeMs t, std::uint64_t seq, TraceKind kind, Json payload) {
  return TraceEvent{t, seq, "s", kind, std::move(payload)};
}

}  // namespace

TEST_CASE("f1: perfect predictions") {
  const Chunks labels{3, 17, 40};
  for (std::int64_t k : {0, 1, 5, 10}) CHECK(positive_f1_at_offset_k(labels, labels, k).f1 == 1.0);
}

TEST_CASE("f1: one hit, one miss, one false alarm") {
  const auto r = positive_f1_at_offset_k(Chunks{11, 70}, Chunks{10, 50}, 5);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.f1 == doctest::Approx(0.5));
  CHECK(r.matches == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
}

TEST_CASE("f1: early predictions do not match under strict-after") {
  const auto r = positive_f1_at_offset_k(Chunks{9}, Chunks{10}, 5);
  CHECK(r.tp == 0);
  CHECK(r.f1 == 0.0);
  CHECK(positive_f1_at_offset_k(Chunks{9}, Chunks{10}, 5, MatchWindow::Symmetric).tp == 1);
}

TEST_CASE("f1: K = 0 needs exact chunk equality") {
  CHECK(positive_f1_at_offset_k(Chunks{11}, Chunks{10}, 0).tp == 0);
  CHECK(positive_f1_at_offset_k(Chunks{10}, Chunks{10}, 0).tp == 1);
}

TEST_CASE("f1: empty inputs") {
  CHECK(positive_f1_at_offset_k(Chunks{}, Chunks{}, 1).f1 == 1.0);
  const auto r = positive_f1_at_offset_k(Chunks{}, Chunks{4}, 1);
  CHECK(r.f1 == 0.0);
  CHECK(r.fn == 1);
  CHECK(positive_f1_at_offset_k(Chunks{4}, Chunks{}, 1).fp == 1);
}

TEST_CASE("f1: invalid inputs") {
  CHECK_THROWS_AS(positive_f1_at_offset_k(Chunks{5, 3}, Chunks{1}, 1), ValidationError);
  CHECK_THROWS_AS(positive_f1_at_offset_k(Chunks{3, 3}, Chunks{1}, 1), ValidationError);
  CHECK_THROWS_AS(positive_f1_at_offset_k(Chunks{1}, Chunks{4, 2}, 1), ValidationError);
  CHECK_THROWS_AS(positive_f1_at_offset_k(Chunks{1}, Chunks{1}, -1), ValidationError);
  CHECK_THROWS_AS(match_window_from_string("sideways"), ValidationError);
}

TEST_CASE("f1: greedy matching equals the exhaustive optimum") {
  std::mt19937_64 rng(31);
  for (int c = 0; c < 2000; ++c) {
    const auto preds = random_sorted_unique(rng, 8, 40);
    auto labels = random_sorted_unique(rng, 8, 40);
    const std::int64_t k = static_cast<std::int64_t>(rng() % 8);
    const auto r = positive_f1_at_offset_k(preds, labels, k);
    REQUIRE(r.tp == optimal_matching_size(preds, labels, k));
    const auto s = positive_f1_at_offset_k(preds, labels, k, MatchWindow::Symmetric);
    REQUIRE(s.tp == optimal_matching_size(preds, labels, k, true));
    REQUIRE(r.tp + r.fp == preds.size());
    REQUIRE(r.tp + r.fn == labels.size());
    for (auto [li, pi] : r.matches) {
      REQUIRE(labels[li] <= preds[pi]);
      REQUIRE(preds[pi] <= labels[li] + k);
    }
  }
}

TEST_CASE("f1: monotone in K") {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 300; ++c) {
    const auto preds = random_sorted_unique(rng, 10, 60);
    const auto labels = random_sorted_unique(rng, 10, 60);
    double prev = -1.0;
    for (std::int64_t k = 0; k <= 20; ++k) {
      const double f = positive_f1_at_offset_k(preds, labels, k).f1;
      REQUIRE(f >= prev);
      prev = f;
    }
  }
}

TEST_CASE("back-channel accuracy counts intervals without halts") {
  const std::vector<ChunkRange> ranges{{10, 14}, {30, 33}, {50, 52}};
  CHECK(backchannel_accuracy(Chunks{31}, ranges) == doctest::Approx(2.0 / 3.0));
  CHECK(backchannel_accuracy(Chunks{}, ranges) == 1.0);
  CHECK(backchannel_accuracy(Chunks{9, 15, 53}, ranges) == 1.0);
  CHECK_THROWS_AS(backchannel_accuracy(Chunks{1}, std::vector<ChunkRange>{}),
                  UndefinedMetricError);
  const std::vector<ChunkRange> overlap{{10, 14}, {14, 20}};
  CHECK_THROWS_AS(backchannel_accuracy(Chunks{}, overlap), ValidationError);
}

TEST_CASE("back-channel intervals map to inclusive chunk ranges") {
  const std::vector<Interval> iv{{3.0, 3.5}, {9.25, 9.6}};
  const auto r = to_chunk_ranges(iv, ChunkGrid{});
  CHECK(r == std::vector<ChunkRange>{{30, 35}, {92, 96}});
}

TEST_CASE("latency statistics") {
  const std::vector<double> two{400.0, 800.0};
  const auto s = summarize(two);
  CHECK(s.count == 2);
  CHECK(s.mean_ms == 600.0);
  CHECK(s.p50_ms == 600.0);
  CHECK(s.p90_ms == doctest::Approx(760.0));
  CHECK(percentile({5.0}, 0.9) == 5.0);
  CHECK_THROWS_AS(percentile({}, 0.5), UndefinedMetricError);
}

TEST_CASE("user turn-taking latency is halt time minus the labeled onset") {
  DuplexLabels labels;
  labels.user_turn_onsets = {4.0};
  std::vector<TraceEvent> trace{
      event(4000 + 250, 0, TraceKind::PredictorDecision,
            Json{{"chunk", 40}, {"decision", "halt_and_listen"}, {"confidence", 1.0},
                 {"action", "halt_speech"}, {"coerced", false}}),
      event(4000 + 250, 1, TraceKind::SpeechHalted,
            Json{{"turn", 0}, {"chunk", 40}, {"speech_tokens_generated", 30},
                 {"speech_tokens_synthesized", 15}, {"speech_tokens_planned", 60},
                 {"audio_chunks", 1}}),
  };
  const auto r = response_latency_stats(trace, labels, ChunkGrid{}, 10);
  CHECK(r.user.stats.count == 1);
  CHECK(r.user.stats.mean_ms == 250.0);
  CHECK(r.warnings == 0);
}

TEST_CASE("assistant latency pairs decisions with their first audio") {
  DuplexLabels labels;
  labels.assistant_turn_onsets = {2.0, 7.0};
  std::vector<TraceEvent> trace;
  std::uint64_t seq = 0;
  const std::pair<std::int64_t, TimeMs> turns[] = {{20, 2400}, {70, 7800}};
  for (std::uint32_t i = 0; i < 2; ++i) {
    trace.push_back(event(turns[i].first * 100 + 250, seq++, TraceKind::PredictorDecision,
                          Json{{"chunk", turns[i].first}, {"decision", "take_turn"},
                               {"confidence", 1.0}, {"action", "begin_response"},
                               {"coerced", false}, {"turn", i}}));
    trace.push_back(event(turns[i].second, seq++, TraceKind::FirstAudioPacket,
                          Json{{"turn", i}, {"decision_chunk", turns[i].first}, {"tokens", 15},
                               {"latency_ms", turns[i].second - turns[i].first * 100}}));
  }
  const auto r = response_latency_stats(trace, labels, ChunkGrid{}, 10);
  CHECK(r.assistant.samples_ms == std::vector<double>{400.0, 800.0});
  CHECK(r.assistant.stats.mean_ms == 600.0);
  CHECK(r.assistant.stats.p50_ms == 600.0);
}

TEST_CASE("latency over a trace without decisions warns once") {
  DuplexLabels labels;
  labels.assistant_turn_onsets = {1.0};
  const auto r = response_latency_stats({}, labels, ChunkGrid{}, 10);
  CHECK(r.warnings == 1);
  CHECK(r.assistant.stats.count == 0);
  CHECK(r.user.stats.count == 0);
}

TEST_CASE("latency requires a totally ordered trace") {
  std::vector<TraceEvent> trace{event(10, 1, TraceKind::UserSpeechStart, Json::object()),
                                event(5, 0, TraceKind::UserSpeechEnd, Json::object())};
  CHECK_THROWS_AS(response_latency_stats(trace, {}, ChunkGrid{}, 1), ValidationError);
}

TEST_CASE("decomposition of the reference profile") {
  const auto r = latency_decomposition_report(reference_profile(), RatioPolicy{});
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].ms == 250);
  CHECK(r.rows[1].ms == 150);
  CHECK(r.rows[2].ms == 70);
  CHECK(r.rows[3].ms == 130);
  CHECK(r.total_ms == 600);
  CHECK(r.single_token_speech_to_text_ms == 95);
  CHECK(decomposition_equation(r) == "250 + 150 + 70 + 130 = 600 ms");
  const auto j = decomposition_to_json(r);
  CHECK(j["total_ms"] == 600);
  CHECK(format_decomposition_table(r).find("Token2Wav") != std::string::npos);
}

TEST_CASE("decomposition: zero and halved profiles") {
  const auto z = latency_decomposition_report(LatencyProfile{}, RatioPolicy{});
  for (const auto& row : z.rows) CHECK(row.ms == 0);
  CHECK(z.total_ms == 0);
  auto p = reference_profile();
  p.d_pred /= 2;
  p.prefill /= 2;
  p.d_llm /= 2;
  p.d_lm /= 2;
  p.d_syn /= 2;
  const auto h = latency_decomposition_report(p, RatioPolicy{});
  CHECK(h.rows[0].ms == 125);
  CHECK(h.rows[1].ms == 75);
  CHECK(h.rows[2].ms == 35);
  CHECK(h.rows[3].ms == 65);
  CHECK(h.total_ms == 300);
}

TEST_CASE("k list parsing") {
  CHECK(parse_k_list("1,5,10") == Chunks{1, 5, 10});
  CHECK(parse_k_list("3") == Chunks{3});
  CHECK_THROWS(parse_k_list(""));
  CHECK_THROWS(parse_k_list("1,x"));
  CHECK_THROWS(parse_k_list("-1"));
}

TEST_CASE("report json carries every task and K") {
  DuplexLabels labels;
  labels.assistant_turn_onsets = {2.0};
  labels.backchannel_intervals = {{3.0, 3.5}};
  std::vector<TraceEvent> trace{
      event(2250, 0, TraceKind::PredictorDecision,
            Json{{"chunk", 20}, {"decision", "take_turn"}, {"confidence", 1.0},
                 {"action", "begin_response"}, {"coerced", false}, {"turn", 0}}),
      event(2600, 1, TraceKind::FirstAudioPacket,
            Json{{"turn", 0}, {"decision_chunk", 20}, {"tokens", 15}, {"latency_ms", 600}})};
  const auto report = evaluate(trace, labels, EvalOptions{});
  const auto j = report_to_json(report);
  CHECK(j["ks"] == Json::array({1, 5, 10}));
  CHECK(j["assistant_turn_taking"].size() == 3);
  CHECK(j["assistant_turn_taking"][0]["f1"] == 1.0);
  CHECK(j["user_turn_taking"][0]["f1"] == 1.0);
  CHECK(j["backchannel"]["accuracy"] == 1.0);
  CHECK(j["latency"]["assistant_turn_taking"]["mean_ms"] == 600.0);
  CHECK_FALSE(format_report_table(report).empty());
}
