#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binpick/executor/executor.hpp"
#include "binpick/grasp/planner.hpp"

namespace binpick::bench {

/// One grasp attempt.
struct EpisodeRecord {
  std::uint64_t seed = 0;  // episode seed
  int object_type = 0;
  std::size_t episode = 0;
  std::size_t attempt = 0;
  grasp::CollisionClass predicted = grasp::CollisionClass::None;
  executor::GraspOutcome outcome;
  double estimate_seconds = 0.0;
  double plan_seconds = 0.0;
  int execution_steps = 0;
  double pick_seconds = 0.0;
};

struct Bucket {
  std::size_t attempts = 0;
  std::size_t successes = 0;
  /// Success percentage; empty when there were no attempts.
  std::optional<double> percent() const;
  bool operator==(const Bucket&) const = default;
};

struct TypeStats {
  int type = 0;
  std::size_t attempts = 0;
  std::size_t successes = 0;
  std::size_t collisions = 0;
  bool operator==(const TypeStats&) const = default;
};

/// Table I and Table II counts. Attempts that never reached execution
/// (FailedUnreachable) are left out.
struct Aggregates {
  Bucket overall;
  Bucket predicted_none;
  Bucket predicted_object;
  Bucket predicted_bin;
  Bucket no_collision;
  Bucket collision;
  Bucket timeout;
  std::size_t prediction_hits = 0;  // predicted contact agrees with actual contact
  std::vector<TypeStats> types;     // ascending type id

  std::optional<double> prediction_accuracy() const;  // fraction in [0, 1]
  bool operator==(const Aggregates&) const = default;
};

struct Report {
  Aggregates table;
  std::size_t episodes = 0;
  std::size_t emptied = 0;
  std::size_t unreachable = 0;  // attempts without an executable grasp
  double mean_pick_seconds = 0.0;
  double mean_estimate_seconds = 0.0;
  double mean_plan_seconds = 0.0;
};

Aggregates aggregate(const std::vector<EpisodeRecord>& records);
Report make_report(const std::vector<EpisodeRecord>& records, std::size_t episodes,
                   std::size_t emptied);

enum class ReportFormat { Table, Csv };

/// Table: Table I rows, Table II rows, then run statistics and stage timings.
/// CSV columns: table,row,column,numerator,denominator,percent. Table I rows
/// use column "all"; Table II rows use the grasp type id as column. Timing is
/// left out of the CSV so equal seeds give identical files.
std::string emit_report(const Report& report, ReportFormat format);

/// Inverse of the CSV form. Throws ParseError.
Aggregates parse_report_csv(const std::string& csv);

/// Table I row labels in order.
const std::vector<std::string>& table1_labels();

}  // namespace binpick::bench
