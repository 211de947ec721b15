#pragma once

// Eight hand-written attempt records and their hand-computed report.
//
//  #  predicted  result          contact  timeout  type
//  1  none       success         no       no       1
//  2  none       success         no       no       1
//  3  none       failed_empty    no       no       2
//  4  object     success         yes      no       1
//  5  object     failed_timeout  yes      yes      2
//  6  object     failed_empty    no       no       1
//  7  bin        success         yes      yes      3
//  8  bin        failed_timeout  yes      yes      3
//
// Overall 4/8, None 2/3, Object 1/3, Bin 1/2, No Collision 2/4 (1, 2, 3, 6),
// Collision 2/4 (4, 5, 7, 8), Timeout 1/3 (5, 7, 8). Prediction agrees with
// contact everywhere except record 6: 7/8.
// Type 1: 4 attempts, 3 successes, 1 collision. Type 2: 2, 0, 1. Type 3: 2, 1, 2.

#include <string>
#include <vector>

#include "binpick/bench/report.hpp"

namespace binpick::testing {

inline std::vector<bench::EpisodeRecord> eight_record_fixture() {
  using executor::GraspResult;
  using grasp::CollisionClass;
  struct Row {
    CollisionClass predicted;
    GraspResult result;
    bool collision;
    bool timeout;
    int type;
  };
  const Row rows[] = {
      {CollisionClass::None, GraspResult::Success, false, false, 1},
      {CollisionClass::None, GraspResult::Success, false, false, 1},
      {CollisionClass::None, GraspResult::FailedEmpty, false, false, 2},
      {CollisionClass::Object, GraspResult::Success, true, false, 1},
      {CollisionClass::Object, GraspResult::FailedTimeout, true, true, 2},
      {CollisionClass::Object, GraspResult::FailedEmpty, false, false, 1},
      {CollisionClass::Bin, GraspResult::Success, true, true, 3},
      {CollisionClass::Bin, GraspResult::FailedTimeout, true, true, 3},
  };
  std::vector<bench::EpisodeRecord> out;
  std::size_t attempt = 0;
  for (const auto& r : rows) {
    bench::EpisodeRecord rec;
    rec.seed = 99;
    rec.object_type = 1;
    rec.attempt = attempt++;
    rec.predicted = r.predicted;
    rec.outcome.result = r.result;
    rec.outcome.collision = r.collision;
    rec.outcome.timeout = r.timeout;
    rec.outcome.predicted = r.predicted;
    rec.outcome.grasp_type = r.type;
    rec.pick_seconds = 1.0;
    out.push_back(rec);
  }
  return out;
}

inline bench::Aggregates eight_record_expected() {
  bench::Aggregates a;
  a.overall = {8, 4};
  a.predicted_none = {3, 2};
  a.predicted_object = {3, 1};
  a.predicted_bin = {2, 1};
  a.no_collision = {4, 2};
  a.collision = {4, 2};
  a.timeout = {3, 1};
  a.prediction_hits = 7;
  a.types = {{1, 4, 3, 1}, {2, 2, 0, 1}, {3, 2, 1, 2}};
  return a;
}

inline const char* eight_record_csv() {
  return "table,row,column,numerator,denominator,percent\n"
         "I,Overall,all,4,8,50.0\n"
         "I,No Col. Pred.,all,2,3,66.7\n"
         "I,Obj. Col. Pred.,all,1,3,33.3\n"
         "I,Bin. Col. Pred.,all,1,2,50.0\n"
         "I,No Collision,all,2,4,50.0\n"
         "I,Collision,all,2,4,50.0\n"
         "I,Timeout,all,1,3,33.3\n"
         "I,Pred. Acc,all,7,8,87.5\n"
         "II,Attempts,1,4,,\n"
         "II,Success,1,3,4,75.0\n"
         "II,Collision,1,1,4,25.0\n"
         "II,Attempts,2,2,,\n"
         "II,Success,2,0,2,0.0\n"
         "II,Collision,2,1,2,50.0\n"
         "II,Attempts,3,2,,\n"
         "II,Success,3,1,2,50.0\n"
         "II,Collision,3,2,2,100.0\n";
}

}  // namespace binpick::testing
