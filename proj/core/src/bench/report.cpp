#include "binpick/bench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "binpick/errors.hpp"

namespace binpick::bench {

namespace {

using executor::GraspResult;
using grasp::CollisionClass;

void add(Bucket& b, bool success) {
  ++b.attempts;
  if (success) ++b.successes;
}

std::string pct(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

const std::pair<const char*, Bucket Aggregates::*> kTable1[] = {
    {"Overall", &Aggregates::overall},
    {"No Col. Pred.", &Aggregates::predicted_none},
    {"Obj. Col. Pred.", &Aggregates::predicted_object},
    {"Bin. Col. Pred.", &Aggregates::predicted_bin},
    {"No Collision", &Aggregates::no_collision},
    {"Collision", &Aggregates::collision},
    {"Timeout", &Aggregates::timeout},
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::size_t to_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("report csv", line, "not a count: '" + s + "'");
  }
  return v;
}

constexpr const char* kHeader = "table,row,column,numerator,denominator,percent";

}  // namespace

std::optional<double> Bucket::percent() const { return ratio(successes, attempts); }

std::optional<double> Aggregates::prediction_accuracy() const {
  if (overall.attempts == 0) return std::nullopt;
  return static_cast<double>(prediction_hits) / static_cast<double>(overall.attempts);
}

const std::vector<std::string>& table1_labels() {
  static const std::vector<std::string> labels{"Overall",      "No Col. Pred.", "Obj. Col. Pred.",
                                               "Bin. Col. Pred.", "No Collision", "Collision",
                                               "Timeout",      "Pred. Acc"};
  return labels;
}

Aggregates aggregate(const std::vector<EpisodeRecord>& records) {
  Aggregates a;
  std::map<int, TypeStats> types;
  for (const auto& r : records) {
    const auto& o = r.outcome;
    if (o.result == GraspResult::FailedUnreachable) continue;
    const bool ok = o.result == GraspResult::Success;
    add(a.overall, ok);
    switch (r.predicted) {
      case CollisionClass::None: add(a.predicted_none, ok); break;
      case CollisionClass::Object: add(a.predicted_object, ok); break;
      case CollisionClass::Bin: add(a.predicted_bin, ok); break;
      case CollisionClass::Rejected: break;
    }
    add(o.collision ? a.collision : a.no_collision, ok);
    if (o.timeout) add(a.timeout, ok);
    if ((r.predicted != CollisionClass::None) == o.collision) ++a.prediction_hits;
    auto& t = types[o.grasp_type];
    t.type = o.grasp_type;
    ++t.attempts;
    if (ok) ++t.successes;
    if (o.collision) ++t.collisions;
  }
  for (const auto& [id, t] : types) a.types.push_back(t);
  return a;
}

Report make_report(const std::vector<EpisodeRecord>& records, std::size_t episodes,
                   std::size_t emptied) {
  Report rep;
  rep.table = aggregate(records);
  rep.episodes = episodes;
  rep.emptied = emptied;
  std::size_t executed = 0;
  for (const auto& r : records) {
    if (r.outcome.result == GraspResult::FailedUnreachable) {
      ++rep.unreachable;
      continue;
    }
    ++executed;
    rep.mean_pick_seconds += r.pick_seconds;
    rep.mean_estimate_seconds += r.estimate_seconds;
    rep.mean_plan_seconds += r.plan_seconds;
  }
  if (executed > 0) {
    const double n = static_cast<double>(executed);
    rep.mean_pick_seconds /= n;
    rep.mean_estimate_seconds /= n;
    rep.mean_plan_seconds /= n;
  }
  return rep;
}

std::string emit_report(const Report& report, ReportFormat format) {
  const Aggregates& a = report.table;
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    out << kHeader << '\n';
    if (a.overall.attempts == 0) return out.str();
    for (const auto& [label, field] : kTable1) {
      const Bucket& b = a.*field;
      out << "I," << label << ",all," << b.successes << ',' << b.attempts << ',' << pct(b.percent())
          << '\n';
    }
    out << "I,Pred. Acc,all," << a.prediction_hits << ',' << a.overall.attempts << ','
        << pct(ratio(a.prediction_hits, a.overall.attempts)) << '\n';
    for (const auto& t : a.types) {
      out << "II,Attempts," << t.type << ',' << t.attempts << ",,\n";
      out << "II,Success," << t.type << ',' << t.successes << ',' << t.attempts << ','
          << pct(ratio(t.successes, t.attempts)) << '\n';
      out << "II,Collision," << t.type << ',' << t.collisions << ',' << t.attempts << ','
          << pct(ratio(t.collisions, t.attempts)) << '\n';
    }
    return out.str();
  }

  char line[160];
  out << "Table I: success rate (%)\n";
  for (const auto& [label, field] : kTable1) {
    const Bucket& b = a.*field;
    std::snprintf(line, sizeof line, "  %-16s %6s  (%zu/%zu)\n", label, pct(b.percent()).c_str(),
                  b.successes, b.attempts);
    out << line;
  }
  std::snprintf(line, sizeof line, "  %-16s %6s  (%zu/%zu)\n", "Pred. Acc",
                pct(ratio(a.prediction_hits, a.overall.attempts)).c_str(), a.prediction_hits,
                a.overall.attempts);
  out << line;
  out << "\nTable II: grasp types\n";
  std::snprintf(line, sizeof line, "  %-10s", "Type");
  out << line;
  for (const auto& t : a.types) {
    std::snprintf(line, sizeof line, " %8d", t.type);
    out << line;
  }
  out << '\n';
  const std::pair<const char*, std::size_t TypeStats::*> rows[] = {
      {"Attempts", &TypeStats::attempts}, {"Success", &TypeStats::successes},
      {"Collision", &TypeStats::collisions}};
  for (const auto& [label, field] : rows) {
    std::snprintf(line, sizeof line, "  %-10s", label);
    out << line;
    for (const auto& t : a.types) {
      std::snprintf(line, sizeof line, " %8zu", t.*field);
      out << line;
    }
    out << '\n';
  }
  out << "\nRun\n";
  std::snprintf(line, sizeof line, "  episodes %zu, emptied %zu, unreachable attempts %zu\n",
                report.episodes, report.emptied, report.unreachable);
  out << line;
  std::snprintf(line, sizeof line,
                "  mean wall time per executed attempt (s): pick %.3f, estimate %.3f, plan %.3f\n",
                report.mean_pick_seconds, report.mean_estimate_seconds, report.mean_plan_seconds);
  out << line;
  out << "  (simulation stage times only; not comparable to hardware cycle times)\n";
  return out.str();
}

Aggregates parse_report_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string text;
  std::size_t line_no = 0;
  Aggregates a;
  std::map<int, TypeStats> types;
  bool header = false;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (!header) {
      if (text != kHeader) throw ParseError("report csv", line_no, "unexpected header");
      header = true;
      continue;
    }
    const auto f = split(text);
    if (f.size() != 6) throw ParseError("report csv", line_no, "expected 6 columns");
    if (f[0] == "I") {
      const std::size_t num = to_count(f[3], line_no);
      const std::size_t den = to_count(f[4], line_no);
      if (f[1] == "Pred. Acc") {
        a.prediction_hits = num;
        continue;
      }
      bool known = false;
      for (const auto& [label, field] : kTable1) {
        if (label == f[1]) {
          a.*field = Bucket{den, num};
          known = true;
        }
      }
      if (!known) throw ParseError("report csv", line_no, "unknown Table I row '" + f[1] + "'");
    } else if (f[0] == "II") {
      int type = 0;
      auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), type);
      if (res.ec != std::errc() || res.ptr != f[2].data() + f[2].size()) {
        throw ParseError("report csv", line_no, "bad grasp type '" + f[2] + "'");
      }
      auto& t = types[type];
      t.type = type;
      const std::size_t num = to_count(f[3], line_no);
      if (f[1] == "Attempts") {
        t.attempts = num;
      } else if (f[1] == "Success") {
        t.successes = num;
      } else if (f[1] == "Collision") {
        t.collisions = num;
      } else {
        throw ParseError("report csv", line_no, "unknown Table II row '" + f[1] + "'");
      }
    } else {
      throw ParseError("report csv", line_no, "unknown table '" + f[0] + "'");
    }
  }
  if (!header) throw ParseError("report csv", 0, "missing header");
  for (const auto& [id, t] : types) a.types.push_back(t);
  return a;
}

}  // namespace binpick::bench
