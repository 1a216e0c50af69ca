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
#include <limits>

#include "doctest.h"
#include "dflow/core/error.h"
#include "dflow/core/json_util.h"
#include "dflow/core/timeline.h"
#include "dflow/core/trace.h"
#include "dflow/core/types.h"

using namespace dflow;

TEST_CASE("time_to_chunk floors on the millisecond grid") {
  CHECK(time_to_chunk(0.25, ChunkGrid{100}) == 2);
  CHECK(time_to_chunk(0.0, ChunkGrid{100}) == 0);
  CHECK(time_to_chunk(0.999, ChunkGrid{250}) == 3);
  // 0.3 is not representable; the millisecond quantization keeps it on chunk 3.
  CHECK(time_to_chunk(0.1 + 0.2, ChunkGrid{100}) == 3);
  CHECK_THROWS_AS(time_to_chunk(-0.001, ChunkGrid{100}), ValidationError);
  CHECK_THROWS_AS(time_to_chunk(std::nan(""), ChunkGrid{100}), ValidationError);
  CHECK_THROWS_AS(validate(ChunkGrid{0}), ValidationError);
}

TEST_CASE("round_half_up_ms lands thirds on whole milliseconds") {
  CHECK(round_half_up_ms(15 * (14.0 / 3.0)) == 70);
  CHECK(round_half_up_ms(15 * (26.0 / 3.0)) == 130);
  CHECK(round_half_up_ms(0.5) == 1);
  CHECK(round_half_up_ms(2.4999) == 2);
  CHECK(round_half_up_ms(0.0) == 0);
}

TEST_CASE("speech tokens and semantic vectors are range checked") {
  CHECK(make_speech_token(1, 2).id == 1);
  CHECK_THROWS_AS(make_speech_token(2, 2), ValidationError);
  CHECK_THROWS_AS(make_speech_token(0, 1), ValidationError);
  validate_semantic_vector(SemanticVector{{1, 2, 3, 4}}, 2);
  CHECK_THROWS_AS(validate_semantic_vector(SemanticVector{{1, 2, 3}}, 2), ValidationError);
  CHECK_THROWS_AS(
      validate_semantic_vector(SemanticVector{{1, 2, 3, std::numeric_limits<double>::infinity()}}, 2),
      ValidationError);
}

TEST_CASE("ratio policy parsing") {
  CHECK(parse_ratio_policy("5:15") == RatioPolicy{5, 15});
  CHECK(parse_ratio_policy("1:1") == RatioPolicy{1, 1});
  CHECK_THROWS_AS(parse_ratio_policy("5-15"), ValidationError);
  CHECK_THROWS_AS(parse_ratio_policy("0:15"), ValidationError);
  CHECK_THROWS_AS(parse_ratio_policy("5:x"), ValidationError);
}

TEST_CASE("control markers round-trip through their names") {
  for (auto m : {ControlMarker::ConcatNextSemantics, ControlMarker::TurnOfSpeech,
                 ControlMarker::EndOfSpeech}) {
    CHECK(control_marker_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(control_marker_from_string("pause"), ValidationError);
}

TEST_CASE("latency profile validation") {
  validate(reference_profile());
  LatencyProfile p;
  p.d_llm = -1;
  CHECK_THROWS_AS(validate(p), ValidationError);
  p.d_llm = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(p), ValidationError);
}

namespace {

DialogueTimeline two_channel() {
  return {{{Channel::User, 0.0, 2.0}, {Channel::Assistant, 2.5, 5.0}}, 6.0};
}

}  // namespace

TEST_CASE("validate_timeline accepts a clean two-channel timeline") {
  CHECK(validate_timeline(two_channel()).empty());
  CHECK(validate_timeline(DialogueTimeline{{}, 0.0}).empty());
}

TEST_CASE("validate_timeline reports constructed violations") {
  using K = TimelineViolation::Kind;
  SUBCASE("same channel overlap") {
    DialogueTimeline t{{{Channel::User, 0, 2}, {Channel::User, 1, 3}}, 4};
    auto v = validate_timeline(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == K::SameChannelOverlap);
    CHECK(v[0].segments == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("degenerate segment") {
    DialogueTimeline t{{{Channel::User, 1, 1}}, 4};
    auto v = validate_timeline(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == K::DegenerateSegment);
  }
  SUBCASE("overlap is checked against the longest earlier segment") {
    DialogueTimeline t{{{Channel::User, 0, 10}, {Channel::User, 11, 12},
                        {Channel::Assistant, 11.5, 12}, {Channel::User, 11.8, 13}},
                       20};
    auto v = validate_timeline(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].segments == std::vector<std::size_t>{1, 3});
  }
  SUBCASE("other kinds") {
    DialogueTimeline t{{{Channel::User, 2, 3}, {Channel::Assistant, 1, 9}}, 5};
    auto v = validate_timeline(t);
    std::vector<K> kinds;
    for (const auto& x : v) kinds.push_back(x.kind);
    CHECK(kinds == std::vector<K>{K::ExceedsDuration, K::Unsorted});
    CHECK_THROWS_AS(require_valid(t), ValidationError);
    CHECK(validate_timeline(DialogueTimeline{{{Channel::User, -1, 1}}, 2})[0].kind ==
          K::NegativeStart);
    CHECK(validate_timeline(DialogueTimeline{{}, -1})[0].kind == K::BadDuration);
    CHECK(validate_timeline(DialogueTimeline{{{Channel::User, 0, std::nan("")}}, 2})[0].kind ==
          K::NonFiniteTime);
  }
}

TEST_CASE("timeline JSON round trip") {
  const auto t = two_channel();
  CHECK(timeline_from_json(timeline_to_json(t)) == t);
  CHECK_THROWS_AS(timeline_from_json(Json{{"duration_s", 1.0}}), ValidationError);
  CHECK_THROWS_AS(
      timeline_from_json(parse_json(R"({"duration_s":1,"segments":[{"channel":"bot","start_s":0,"end_s":1}]})", "t")),
      ValidationError);
}

TEST_CASE("trace lines are canonical and round trip") {
  TraceEvent e{250, 3, "s1", TraceKind::FirstAudioPacket, Json{{"turn", 0}, {"latency_ms", 600}}};
  const auto line = encode_trace_line(e);
  CHECK(line ==
        "{\"t_ms\":250,\"seq\":3,\"session\":\"s1\",\"kind\":\"first_audio_packet\","
        "\"payload\":{\"turn\":0,\"latency_ms\":600}}\n");
  CHECK(decode_trace_line(line) == e);

  std::vector<TraceEvent> trace{e, {250, 4, "s1", TraceKind::SpeechHalted, Json::object()}};
  CHECK(decode_trace(encode_trace(trace) + "\n\n") == trace);
  CHECK(is_totally_ordered(trace));
  std::swap(trace[0], trace[1]);
  CHECK_FALSE(is_totally_ordered(trace));
  CHECK_THROWS_AS(decode_trace_line("{\"t_ms\":1}"), ValidationError);
  CHECK_THROWS_AS(decode_trace_line("not json"), ValidationError);
  CHECK_THROWS_AS(trace_kind_from_string("bogus"), ValidationError);
}

TEST_CASE("json helpers name the offending key") {
  const Json j{{"a", 1}, {"b", "x"}};
  CHECK(required<int>(j, "a") == 1);
  CHECK(optional_or<int>(j, "z", 7) == 7);
  try {
    (void)required<int>(j, "b");
    FAIL("expected a throw");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
  CHECK_THROWS_AS((void)required<int>(j, "missing"), ValidationError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/file.json"), IoError);
}

TEST_CASE("error classes map to exit categories") {
  CHECK(ValidationError("x").error_class() == ErrorClass::Validation);
  CHECK(ConfigError("x").error_class() == ErrorClass::Validation);
  CHECK(UndefinedMetricError("x").error_class() == ErrorClass::Validation);
  CHECK(ProtocolError("x").error_class() == ErrorClass::Io);
  CHECK(StageError("x").error_class() == ErrorClass::Io);
  CHECK(IoError("x").error_class() == ErrorClass::Io);
}
