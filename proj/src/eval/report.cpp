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

#include "dflow/eval/report.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "dflow/core/error.h"
#include "dflow/eval/backchannel.h"

namespace dflow::eval {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Json stats_to_json(const TaskLatency& t) {
  return Json{{"count", t.stats.count},
              {"mean_ms", t.stats.mean_ms},
              {"p50_ms", t.stats.p50_ms},
              {"p90_ms", t.stats.p90_ms}};
}

TaskScores score(OnsetTask task, const std::vector<TraceEvent>& trace,
                 const std::vector<double>& onsets, const EvalOptions& o) {
  const auto preds = extract_predictions(trace, task);
  const auto labels = onsets_to_chunks(onsets, o.grid);
  TaskScores s{task, {}};
  for (auto k : o.ks) s.at_k.push_back(positive_f1_at_offset_k(preds, labels, k, o.window));
  return s;
}

}  // namespace

std::vector<std::int64_t> parse_k_list(const std::string& text) {
  std::vector<std::int64_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto k = std::stoll(item, &used);
      if (used != item.size() || k < 0) throw std::invalid_argument(item);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw ValidationError("bad K value '" + item + "'");
    }
  }
  if (ks.empty()) throw ValidationError("K list is empty");
  return ks;
}

EvalReport evaluate(const std::vector<TraceEvent>& trace, const DuplexLabels& labels,
                    const EvalOptions& options) {
  if (options.ks.empty()) throw ValidationError("K list is empty");
  for (auto k : options.ks) {
    if (k < 0) throw ValidationError("offset K must be >= 0");
  }
  validate(options.grid);
  if (!is_totally_ordered(trace)) throw ValidationError("trace is not ordered by (t_ms, seq)");

  EvalReport r;
  r.options = options;
  r.assistant = score(OnsetTask::AssistantTurnTaking, trace, labels.assistant_turn_onsets, options);
  r.user = score(OnsetTask::UserTurnTaking, trace, labels.user_turn_onsets, options);
  r.backchannel_intervals = labels.backchannel_intervals.size();
  if (!labels.backchannel_intervals.empty()) {
    const auto ranges = to_chunk_ranges(labels.backchannel_intervals, options.grid);
    r.backchannel_accuracy = backchannel_accuracy(halt_chunks(trace), ranges);
  }
  const auto widest = *std::max_element(options.ks.begin(), options.ks.end());
  r.latency = response_latency_stats(trace, labels, options.grid, widest, options.window);
  return r;
}

Json report_to_json(const EvalReport& r) {
  auto task_json = [&](const TaskScores& s) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < s.at_k.size(); ++i) {
      const auto& f = s.at_k[i];
      arr.push_back(Json{{"k", r.options.ks[i]},
                         {"f1", f.f1},
                         {"precision", f.precision},
                         {"recall", f.recall},
                         {"tp", f.tp},
                         {"fp", f.fp},
                         {"fn", f.fn}});
    }
    return arr;
  };
  Json bc = Json{{"intervals", r.backchannel_intervals}};
  bc["accuracy"] = r.backchannel_accuracy ? Json(*r.backchannel_accuracy) : Json(nullptr);
  return Json{{"window", std::string(to_string(r.options.window))},
              {"chunk_ms", r.options.grid.chunk_ms},
              {"ks", r.options.ks},
              {"assistant_turn_taking", task_json(r.assistant)},
              {"user_turn_taking", task_json(r.user)},
              {"backchannel", std::move(bc)},
              {"latency",
               {{"assistant_turn_taking", stats_to_json(r.latency.assistant)},
                {"user_turn_taking", stats_to_json(r.latency.user)},
                {"warnings", r.latency.warnings},
                {"warning_messages", r.latency.warning_messages}}}};
}

std::string format_report_table(const EvalReport& r) {
  std::ostringstream os;
  os << "Turn-taking F1 (" << to_string(r.options.window) << ", " << r.options.grid.chunk_ms
     << " ms chunks)\n";
  os << "task                    ";
  for (auto k : r.options.ks) {
    std::string h = "K=" + std::to_string(k);
    os << h << std::string(h.size() < 8 ? 8 - h.size() : 1, ' ');
  }
  os << "\n";
  for (const auto* s : {&r.assistant, &r.user}) {
    std::string name(s->task == OnsetTask::AssistantTurnTaking ? "Assistant's turn-taking"
                                                               : "User's turn-taking");
    os << name << std::string(24 - name.size(), ' ');
    for (const auto& f : s->at_k) os << fixed(f.f1, 4) << "  ";
    os << "\n";
  }
  os << "\nBack-channel accuracy   "
     << (r.backchannel_accuracy ? fixed(*r.backchannel_accuracy, 4) : std::string("undefined"))
     << " (" << r.backchannel_intervals << " intervals)\n";
  os << "\nAverage latency (ms)    mean      p50       p90       n\n";
  for (const auto* t : {&r.latency.assistant, &r.latency.user}) {
    std::string name(t == &r.latency.assistant ? "Assistant's turn-taking"
                                                : "User's turn-taking");
    os << name << std::string(24 - name.size(), ' ');
    for (double v : {t->stats.mean_ms, t->stats.p50_ms, t->stats.p90_ms}) {
      std::string cell = fixed(v, 1);
      os << cell << std::string(cell.size() < 10 ? 10 - cell.size() : 1, ' ');
    }
    os << t->stats.count << "\n";
  }
  if (r.latency.warnings) os << "warnings: " << r.latency.warnings << "\n";
  return os.str();
}

}  // namespace dflow::eval
