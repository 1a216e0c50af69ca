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

#include "cli.h"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dflow/annotate/chatml.h"
#include "dflow/annotate/labels.h"
#include "dflow/core/error.h"
#include "dflow/core/json_util.h"
#include "dflow/core/trace.h"
#include "dflow/eval/decomposition.h"
#include "dflow/eval/report.h"
#include "dflow/stagebus/engine.h"
#include "dflow/stagebus/mock_server.h"
#include "dflow/stagebus/scenario.h"
#include "dflow/stagebus/wire.h"

namespace dflow::cli {

namespace {

namespace fs = std::filesystem;
using stagebus::Scenario;
using stagebus::StageDescriptor;

std::optional<std::uint64_t> parse_seed_text(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(what + " must be a non-negative integer, got '" + text + "'");
}

// --seed beats the environment, which beats the input file.
std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    return parse_seed_text(env, kSeedEnv);
  }
  return std::nullopt;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Scenario load_scenario(const std::string& path, const std::optional<std::uint64_t>& seed) {
  Json j = read_json_file(path);
  if (seed && j.is_object()) j["seed"] = *seed;
  return stagebus::scenario_from_json(j);
}

std::vector<StageDescriptor> resolve_stages(const Scenario& s, const std::string& stages_path,
                                            const std::string& external) {
  auto stages = stages_path.empty() ? stagebus::default_stages(s.profile)
                                    : stagebus::stages_from_json(read_json_file(stages_path));
  if (!external.empty()) {
    for (auto& d : stages) d.endpoint = external;
  }
  for (const auto& d : stages) stagebus::validate(d);
  return stages;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string out_dir;
  std::size_t jobs = 1;
  std::string stages;
  std::string external;
  std::int64_t timeout_ms = stagebus::kDefaultStageTimeout.count();
  bool print_config = false;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.scenarios.empty()) throw ValidationError("simulate needs at least one --scenario");
  if (a.scenarios.size() > 1 && a.out_dir.empty()) {
    throw ValidationError("several scenarios need --out-dir");
  }
  if (a.jobs < 1) throw ValidationError("--jobs must be >= 1");
  if (a.timeout_ms < 1) throw ValidationError("--timeout-ms must be >= 1");
  const auto seed = effective_seed(a.seed);

  std::vector<Scenario> scenarios;
  std::vector<std::vector<StageDescriptor>> stages;
  for (const auto& path : a.scenarios) {
    scenarios.push_back(load_scenario(path, seed));
    stages.push_back(resolve_stages(scenarios.back(), a.stages, a.external));
  }

  if (a.print_config) {
    Json list = Json::array();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      list.push_back(Json{{"scenario", stagebus::scenario_to_json(scenarios[i])},
                          {"stages", stagebus::stages_to_json(stages[i])},
                          {"stage_timeout_ms", a.timeout_ms}});
    }
    out << dump(list.size() == 1 ? list[0] : list);
    return 0;
  }

  stagebus::SimulationOptions options;
  options.stage_timeout = std::chrono::milliseconds(a.timeout_ms);

  std::vector<std::string> traces(scenarios.size());
  std::vector<std::exception_ptr> failures(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
      try {
        traces[i] = encode_trace(stagebus::run_simulation(scenarios[i], stages[i], options));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto width = std::min(a.jobs, scenarios.size());
  for (std::size_t w = 1; w < width; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  if (!a.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const auto name = fs::path(a.scenarios[i]).stem().string() + ".jsonl";
      write_text_file(fs::path(a.out_dir) / name, traces[i]);
    }
  } else {
    write_output(a.out, traces[0], out);
  }
  return 0;
}

// ---- annotate ---------------------------------------------------------------

struct AnnotateArgs {
  std::string timeline;
  std::optional<std::uint64_t> seed;
  std::string out;
  double epsilon_s = annotate::kDefaultBackchannelEpsilonS;
  annotate::GapDistribution gaps;
  std::string chatml_instruction;
  std::string chatml_wav;
  std::string chatml_response;
  bool chatml = false;
  std::string check_chatml;
  bool print_config = false;
};

int run_annotate(const AnnotateArgs& a, std::ostream& out) {
  if (!a.check_chatml.empty()) {
    const auto sample = annotate::chatml_from_json(read_json_file(a.check_chatml));
    annotate::validate(sample);
    write_output(a.out, dump(annotate::chatml_to_json(sample)), out);
    return 0;
  }
  if (a.chatml) {
    const auto sample =
        annotate::to_chatml(a.chatml_instruction, a.chatml_wav, a.chatml_response);
    write_output(a.out, dump(annotate::chatml_to_json(sample)), out);
    return 0;
  }
  annotate::AnnotationConfig cfg;
  cfg.gaps = a.gaps;
  cfg.epsilon_s = a.epsilon_s;
  cfg.seed = effective_seed(a.seed).value_or(0);
  annotate::validate(cfg.gaps);
  if (a.print_config) {
    out << dump(Json{{"seed", cfg.seed},
                     {"rng", std::string(annotate::PortableRng::kAlgorithm)},
                     {"epsilon_s", cfg.epsilon_s},
                     {"gap", annotate::gap_distribution_to_json(cfg.gaps)}});
    return 0;
  }
  if (a.timeline.empty()) throw ValidationError("annotate needs --timeline");
  const auto timeline = timeline_from_json(read_json_file(a.timeline));
  const auto labels = annotate::annotate_timeline(timeline, cfg);
  write_output(a.out, dump(annotate::labels_to_json(labels, cfg)), out);
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string trace;
  std::string labels;
  std::string ks = "1,5,10";
  std::string window = "strict_after";
  std::int64_t chunk_ms = 100;
  std::string format = "json";
  std::string out;
  bool print_config = false;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  eval::EvalOptions o;
  o.ks = eval::parse_k_list(a.ks);
  o.window = eval::match_window_from_string(a.window);
  if (a.chunk_ms < 1 || a.chunk_ms > 60000) {
    throw ValidationError("--chunk-ms must lie in [1, 60000]");
  }
  o.grid.chunk_ms = static_cast<std::uint32_t>(a.chunk_ms);
  if (a.format != "json" && a.format != "table") {
    throw ValidationError("--format must be json or table");
  }
  if (a.print_config) {
    out << dump(Json{{"ks", o.ks},
                     {"window", std::string(eval::to_string(o.window))},
                     {"chunk_ms", o.grid.chunk_ms},
                     {"format", a.format}});
    return 0;
  }
  if (a.trace.empty() || a.labels.empty()) {
    throw ValidationError("eval needs --trace and --labels");
  }
  const auto trace = decode_trace(read_text_file(a.trace));
  const auto labels = annotate::labels_from_json(read_json_file(a.labels));
  const auto report = eval::evaluate(trace, labels, o);
  write_output(a.out,
               a.format == "json" ? dump(eval::report_to_json(report))
                                  : eval::format_report_table(report),
               out);
  return 0;
}

// ---- latency ----------------------------------------------------------------

struct LatencyArgs {
  std::string profile;
  std::string policy = "5:15";
  std::string format = "table";
  bool print_config = false;
};

int run_latency(const LatencyArgs& a, std::ostream& out) {
  const LatencyProfile profile = a.profile.empty()
                                     ? reference_profile()
                                     : stagebus::profile_from_json(read_json_file(a.profile));
  const RatioPolicy policy = parse_ratio_policy(a.policy);
  if (a.format != "json" && a.format != "table") {
    throw ValidationError("--format must be json or table");
  }
  if (a.print_config) {
    out << dump(Json{{"profile", stagebus::profile_to_json(profile)},
                     {"policy", stagebus::policy_to_json(policy)},
                     {"format", a.format}});
    return 0;
  }
  const auto report = eval::latency_decomposition_report(profile, policy);
  out << (a.format == "json" ? dump(eval::decomposition_to_json(report))
                             : eval::format_decomposition_table(report));
  return 0;
}

// ---- serve-mock -------------------------------------------------------------

struct ServeArgs {
  std::string listen;
  std::vector<std::string> roles;
  std::size_t max_connections = 0;
  std::string fault;
  bool print_config = false;
};

int run_serve(const ServeArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  stagebus::StageServerOptions o;
  if (!a.roles.empty()) {
    o.roles.clear();
    for (const auto& r : a.roles) o.roles.push_back(stagebus::stage_role_from_string(r));
  }
  if (a.fault == "reuse-seq") {
    o.reuse_reply_seq = true;
  } else if (!a.fault.empty()) {
    throw ValidationError("unknown --fault '" + a.fault + "'");
  }
  if (a.print_config) {
    Json roles = Json::array();
    for (auto r : o.roles) roles.push_back(std::string(stagebus::to_string(r)));
    out << dump(Json{{"listen", a.listen.empty() ? "stdio" : a.listen},
                     {"roles", roles},
                     {"max_connections", a.max_connections},
                     {"protocol_version", stagebus::kProtocolVersion}});
    return 0;
  }
  if (a.listen.empty()) {
    stagebus::StageServer server(o);
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      for (const auto& reply : server.handle_line(line)) out << reply;
      out.flush();
    }
    return 0;
  }
  const auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw ValidationError("--listen must be host:port");
  const auto port = parse_seed_text(a.listen.substr(colon + 1), "listen port");
  if (*port > 65535) throw ValidationError("listen port out of range");
  stagebus::TcpListener listener(a.listen.substr(0, colon), static_cast<std::uint16_t>(*port));
  err << "listening on " << a.listen.substr(0, colon) << ":" << listener.port() << std::endl;
  stagebus::serve_listener(listener, o, a.max_connections);
  return 0;
}

// ---- interactive ------------------------------------------------------------

struct InteractiveArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  double speed = 1.0;
  bool virtual_time = false;
  bool print_config = false;
};

Scenario live_scenario() {
  Scenario s;
  s.session = "live";
  s.predictor.kind = duplex::PredictorConfig::Kind::Threshold;
  return s;
}

// Applies one command; returns false on quit.
bool apply_command(const std::string& line, stagebus::Engine& engine, TimeMs now,
                   std::ostream& err) {
  std::istringstream is(line);
  std::string cmd;
  is >> cmd;
  if (cmd.empty() || cmd[0] == '#') return true;
  if (cmd == "quit" || cmd == "exit") return false;
  if (cmd == "start") {
    engine.user_speech_start(now);
  } else if (cmd == "stop") {
    engine.user_speech_end(now);
  } else {
    err << "unknown command '" << cmd << "' (start, stop, wait <ms>, quit)\n";
  }
  return true;
}

int run_interactive(const InteractiveArgs& a, std::istream& in, std::ostream& out,
                    std::ostream& err) {
  if (!(a.speed > 0.0)) throw ValidationError("--speed must be > 0");
  Scenario s = a.scenario.empty() ? live_scenario() : load_scenario(a.scenario, std::nullopt);
  if (auto seed = effective_seed(a.seed)) s.seed = *seed;
  const auto stages = stagebus::default_stages(s.profile);
  if (a.print_config) {
    out << dump(Json{{"scenario", stagebus::scenario_to_json(s)},
                     {"stages", stagebus::stages_to_json(stages)},
                     {"speed", a.speed},
                     {"virtual", a.virtual_time}});
    return 0;
  }
  stagebus::BuiltinBackend backend(s.session, stagebus::configure_payload(s));
  stagebus::Engine engine(s, stages, backend, {true});
  auto flush = [&] {
    for (const auto& e : engine.take_new_events()) out << encode_trace_line(e);
    out.flush();
  };

  if (a.virtual_time) {
    for (std::string line; std::getline(in, line);) {
      std::istringstream is(line);
      std::string cmd;
      is >> cmd;
      if (cmd == "wait") {
        TimeMs ms = 0;
        if (!(is >> ms) || ms < 0) throw ValidationError("wait needs a non-negative ms count");
        engine.run_until(engine.now() + ms);
      } else if (!apply_command(line, engine, engine.now(), err)) {
        break;
      } else {
        engine.run_until(engine.now());  // apply the command at the current instant
      }
      flush();
      if (engine.aborted()) return 2;
    }
    flush();
    return 0;
  }

  // Wall-clock mode: a reader thread queues commands, the loop advances the
  // engine to scaled elapsed time. The queue is shared so a quit that leaves
  // the reader blocked on input does not strand it on a dead frame.
  struct InputQueue {
    std::mutex mu;
    std::deque<std::string> pending;
    std::atomic<bool> eof{false};
  };
  auto queue = std::make_shared<InputQueue>();
  std::thread([queue, &in] {
    for (std::string line; std::getline(in, line);) {
      std::lock_guard<std::mutex> lock(queue->mu);
      queue->pending.push_back(line);
    }
    queue->eof = true;
  }).detach();
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<std::chrono::steady_clock::time_point> wait_until;
  for (;;) {
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - t0);
    const auto now = static_cast<TimeMs>(elapsed.count() * a.speed);
    engine.run_until(now);
    flush();
    if (engine.aborted()) return 2;
    if (wait_until && std::chrono::steady_clock::now() < *wait_until) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      continue;
    }
    wait_until.reset();
    std::optional<std::string> line;
    {
      std::lock_guard<std::mutex> lock(queue->mu);
      if (!queue->pending.empty()) {
        line = queue->pending.front();
        queue->pending.pop_front();
      }
    }
    if (!line) {
      if (queue->eof) return 0;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      continue;
    }
    std::istringstream is(*line);
    std::string cmd;
    is >> cmd;
    if (cmd == "wait") {
      double ms = 0;
      if (!(is >> ms) || ms < 0) throw ValidationError("wait needs a non-negative ms count");
      wait_until = std::chrono::steady_clock::now() +
                   std::chrono::microseconds(static_cast<std::int64_t>(ms * 1000.0 / a.speed));
    } else if (!apply_command(*line, engine, engine.now(), err)) {
      return 0;
    }
  }
}

int exit_code_for(const Error& e) { return e.error_class() == ErrorClass::Validation ? 1 : 2; }

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Full-duplex voice interaction orchestration engine", "dflow"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::optional<std::string> seed_text;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_text,
                    std::string("Seed; overrides ") + kSeedEnv + " and the input file");
  };

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run scenarios on the virtual clock");
  simulate->add_option("--scenario", sim.scenarios, "Scenario JSON (repeatable)")->required();
  add_seed(simulate);
  simulate->add_option("--out", sim.out, "Trace JSONL path (default stdout)");
  simulate->add_option("--out-dir", sim.out_dir, "Directory for one trace per scenario");
  simulate->add_option("--jobs", sim.jobs, "Parallel scenario workers");
  simulate->add_option("--stages", sim.stages, "Stage descriptor JSON");
  simulate->add_option("--external", sim.external,
                       "Route every stage to stdio:<command> or tcp:<host>:<port>");
  simulate->add_option("--timeout-ms", sim.timeout_ms, "Per-message external stage deadline");
  simulate->add_flag("--print-config", sim.print_config, "Print the resolved configuration");

  AnnotateArgs ann;
  auto* annotate_cmd = app.add_subcommand("annotate", "Derive duplex labels or ChatML samples");
  annotate_cmd->add_option("--timeline", ann.timeline, "Timeline JSON");
  add_seed(annotate_cmd);
  annotate_cmd->add_option("--out", ann.out, "Output path (default stdout)");
  annotate_cmd->add_option("--epsilon", ann.epsilon_s, "Back-channel margin in seconds");
  annotate_cmd->add_option("--gap-mean", ann.gaps.mean_s, "Turn gap mean in seconds");
  annotate_cmd->add_option("--gap-std", ann.gaps.std_s, "Turn gap standard deviation");
  annotate_cmd->add_option("--gap-clamp", ann.gaps.clamp_min_s, "Lower clamp for the gap");
  annotate_cmd->add_flag("--chatml", ann.chatml, "Emit a ChatML speech-task sample");
  annotate_cmd->add_option("--instruction", ann.chatml_instruction, "ChatML task instruction");
  annotate_cmd->add_option("--wav", ann.chatml_wav, "ChatML wav path");
  annotate_cmd->add_option("--response", ann.chatml_response, "ChatML task output");
  annotate_cmd->add_option("--check-chatml", ann.check_chatml, "Validate a ChatML sample file");
  annotate_cmd->add_flag("--print-config", ann.print_config, "Print the resolved configuration");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a trace against labels");
  eval_cmd->add_option("--trace", ev.trace, "Trace JSONL");
  eval_cmd->add_option("--labels", ev.labels, "Labels JSON");
  eval_cmd->add_option("--k", ev.ks, "Comma-separated offsets in chunks");
  eval_cmd->add_option("--window", ev.window, "strict_after or symmetric");
  eval_cmd->add_option("--chunk-ms", ev.chunk_ms, "Chunk length in ms");
  eval_cmd->add_option("--format", ev.format, "json or table");
  eval_cmd->add_option("--out", ev.out, "Output path (default stdout)");
  eval_cmd->add_flag("--print-config", ev.print_config, "Print the resolved configuration");

  LatencyArgs lat;
  auto* latency_cmd = app.add_subcommand("latency", "Print the first-audio latency breakdown");
  latency_cmd->add_option("--profile", lat.profile, "Latency profile JSON");
  latency_cmd->add_option("--policy", lat.policy, "n_semantic:n_speech");
  latency_cmd->add_option("--format", lat.format, "table or json");
  latency_cmd->add_flag("--print-config", lat.print_config, "Print the resolved configuration");

  ServeArgs srv;
  auto* serve_cmd = app.add_subcommand("serve-mock", "Serve the built-in stages over the wire");
  serve_cmd->add_option("--listen", srv.listen, "host:port (default stdio)");
  serve_cmd->add_option("--roles", srv.roles, "Roles to serve (default all)")->delimiter(',');
  serve_cmd->add_option("--max-connections", srv.max_connections, "Stop after N clients");
  serve_cmd->add_option("--fault", srv.fault, "Inject a fault: reuse-seq");
  serve_cmd->add_flag("--print-config", srv.print_config, "Print the resolved configuration");

  InteractiveArgs ia;
  auto* inter_cmd = app.add_subcommand("interactive", "Drive a live session from stdin");
  inter_cmd->add_option("--scenario", ia.scenario, "Scenario JSON for profile and predictor");
  add_seed(inter_cmd);
  inter_cmd->add_option("--speed", ia.speed, "Virtual ms per wall ms");
  inter_cmd->add_flag("--virtual", ia.virtual_time, "Advance time only on wait commands");
  inter_cmd->add_flag("--print-config", ia.print_config, "Print the resolved configuration");

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      app.get_subcommand_no_throw(args[0]) == nullptr) {
    err << "dflow: unknown subcommand '" << args[0] << "'\n" << app.help();
    return 1;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (e.get_exit_code() != 0) err << app.help();
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    std::optional<std::uint64_t> seed;
    if (seed_text) seed = parse_seed_text(*seed_text, "--seed");
    if (simulate->parsed()) {
      sim.seed = seed;
      return run_simulate(sim, out);
    }
    if (annotate_cmd->parsed()) {
      ann.seed = seed;
      return run_annotate(ann, out);
    }
    if (eval_cmd->parsed()) return run_eval(ev, out);
    if (latency_cmd->parsed()) return run_latency(lat, out);
    if (serve_cmd->parsed()) return run_serve(srv, in, out, err);
    if (inter_cmd->parsed()) {
      ia.seed = seed;
      return run_interactive(ia, in, out, err);
    }
  } catch (const Error& e) {
    err << "dflow: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "dflow: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace dflow::cli
