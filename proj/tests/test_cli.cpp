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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "doctest.h"
#include "dflow/core/json_util.h"
#include "dflow/core/trace.h"
#include "dflow/stagebus/wire.h"

namespace fs = std::filesystem;
using dflow::Json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = dflow::cli::dispatch(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string config(const std::string& name) { return std::string(DFLOW_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dflow_cli_" + std::to_string(std::hash<std::string>{}(
                               std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
                               std::to_string(std::rand()))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("latency prints the reference breakdown") {
  const auto r = run({"latency", "--profile", config("reference_profile.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("250 + 150 + 70 + 130 = 600 ms") != std::string::npos);
  CHECK(r.out.find("95") != std::string::npos);
  const auto j = run({"latency", "--format", "json"});
  CHECK(j.code == 0);
  CHECK(Json::parse(j.out)["total_ms"] == 600);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  const auto r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(run({"latency", "--policy", "5-15"}).code == 1);
  CHECK(run({"eval", "--trace", "x", "--labels", "y", "--chunk-ms", "0"}).code == 1);
  CHECK(run({"simulate", "--bogus"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("missing files exit 2") {
  CHECK(run({"simulate", "--scenario", "/nonexistent/scenario.json"}).code == 2);
  CHECK(run({"annotate", "--timeline", "/nonexistent/t.json"}).code == 2);
}

TEST_CASE("print-config shows the resolved configuration") {
  auto r = run({"simulate", "--scenario", config("closed_loop_scenario.json"), "--seed", "11",
                "--print-config"});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["scenario"]["seed"] == 11);
  CHECK(j["stages"].size() == 5);
  r = run({"serve-mock", "--roles", "text_llm,token2wav", "--print-config"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["roles"].size() == 2);
  CHECK(j["listen"] == "stdio");
  for (const char* sub : {"annotate", "eval", "latency", "interactive"}) {
    const auto p = run({sub, "--print-config"});
    CHECK_MESSAGE(p.code == 0, sub);
    CHECK(Json::parse(p.out).is_object());
  }
}

TEST_CASE("seed precedence: flag over environment over file") {
  const auto s = config("closed_loop_scenario.json");
  auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"simulate", "--scenario", s, "--print-config"};
    args.insert(args.end(), extra.begin(), extra.end());
    return Json::parse(run(args).out)["scenario"]["seed"].get<std::uint64_t>();
  };
  ::unsetenv(dflow::cli::kSeedEnv);
  CHECK(seed_of({}) == 7);
  ::setenv(dflow::cli::kSeedEnv, "99", 1);
  CHECK(seed_of({}) == 99);
  CHECK(seed_of({"--seed", "5"}) == 5);
  ::setenv(dflow::cli::kSeedEnv, "not-a-number", 1);
  CHECK(run({"simulate", "--scenario", s}).code == 1);
  ::unsetenv(dflow::cli::kSeedEnv);
}

TEST_CASE("simulate, annotate and eval close the loop") {
  TempDir tmp;
  const auto trace = tmp.file("trace.jsonl");
  const auto labels = tmp.file("labels.json");
  const auto report = tmp.file("report.json");
  REQUIRE(run({"simulate", "--scenario", config("closed_loop_scenario.json"), "--out", trace})
              .code == 0);
  REQUIRE(run({"annotate", "--timeline", config("closed_loop_timeline.json"), "--seed", "7",
               "--out", labels})
              .code == 0);
  REQUIRE(run({"eval", "--trace", trace, "--labels", labels, "--k", "1,5,10", "--out", report})
              .code == 0);
  const auto j = Json::parse(slurp(report));
  for (const char* task : {"assistant_turn_taking", "user_turn_taking"}) {
    REQUIRE(j[task].size() == 3);
    for (const auto& row : j[task]) CHECK(row["f1"] == 1.0);
  }
  CHECK(j["backchannel"]["accuracy"] == 1.0);
  CHECK(j["latency"]["assistant_turn_taking"]["mean_ms"] == 600.0);
  const auto table = run({"eval", "--trace", trace, "--labels", labels, "--format", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("1.0000") != std::string::npos);
}

TEST_CASE("simulate is deterministic and parallel runs match serial ones") {
  TempDir tmp;
  const auto s = config("closed_loop_scenario.json");
  const auto a = run({"simulate", "--scenario", s});
  const auto b = run({"simulate", "--scenario", s});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(dflow::is_totally_ordered(dflow::decode_trace(a.out)));
  REQUIRE(run({"simulate", "--scenario", s, "--scenario", s, "--out-dir", tmp.file("par"),
               "--jobs", "2"})
              .code == 0);
  CHECK(slurp(tmp.path / "par" / "closed_loop_scenario.jsonl") == a.out);
}

TEST_CASE("serve-mock speaks the wire protocol on stdio") {
  using namespace dflow::stagebus;
  std::string input = encode_message(make_message("s", 1, HelloPayload{})) + "\n" +
                      "{garbage\n" + encode_message(make_message("s", 2, ConfigurePayload{}));
  const auto r = run({"serve-mock"}, input);
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::vector<WireMessage> replies;
  for (std::string line; std::getline(lines, line);) replies.push_back(decode_message(line));
  REQUIRE(replies.size() == 3);
  CHECK(replies[0].type == MessageType::Hello);
  CHECK(replies[1].type == MessageType::Error);
  CHECK(std::get<ErrorPayload>(replies[1].payload).reason == "parse");
  CHECK(replies[2].type == MessageType::Ack);
  CHECK(run({"serve-mock", "--fault", "gremlins"}).code == 1);
}

TEST_CASE("annotate writes ChatML samples and checks them") {
  TempDir tmp;
  const auto sample = tmp.file("sample.json");
  REQUIRE(run({"annotate", "--chatml", "--instruction", "Speech Transcription", "--wav", "a.wav",
               "--response", "hello", "--out", sample})
              .code == 0);
  const auto j = Json::parse(slurp(sample));
  CHECK(j.dump().find("Speech Transcription <|startofspeech|> a.wav <|endofspeech|>") !=
        std::string::npos);
  CHECK(run({"annotate", "--check-chatml", sample}).code == 0);
  CHECK(run({"annotate", "--chatml", "--instruction", "x", "--wav", "", "--response", "y"}).code ==
        1);
}

TEST_CASE("interactive virtual mode replays a scripted session") {
  const auto r = run({"interactive", "--virtual"},
                     "start\nwait 1500\nstop\nwait 2000\nquit\n");
  REQUIRE(r.code == 0);
  const auto trace = dflow::decode_trace(r.out);
  REQUIRE_FALSE(trace.empty());
  CHECK(trace.front().kind == dflow::TraceKind::UserSpeechStart);
  bool audio = false;
  for (const auto& e : trace) audio = audio || e.kind == dflow::TraceKind::FirstAudioPacket;
  CHECK(audio);
  CHECK(dflow::is_totally_ordered(trace));
  // Unknown commands are reported and skipped so a live session survives typos.
  const auto typo = run({"interactive", "--virtual"}, "dance\nstart\n");
  CHECK(typo.code == 0);
  CHECK(typo.err.find("unknown command 'dance'") != std::string::npos);
  CHECK(typo.out.find("user_speech_start") != std::string::npos);
}

TEST_CASE("interactive wall-clock mode runs to end of input") {
  const auto r = run({"interactive", "--speed", "1000"}, "start\nwait 1500\nstop\nwait 2000\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("user_speech_start") != std::string::npos);
}
