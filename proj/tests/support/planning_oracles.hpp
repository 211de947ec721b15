#pragma once

// Reference ordering and random candidate sets for the planner tests.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "binpick/grasp/planner.hpp"

namespace binpick::testing {

struct OrderedPair {
  std::size_t candidate = 0;
  int branch = 0;
};

inline double oracle_chebyshev(const kinematics::JointConfig& a, const kinematics::JointConfig& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double d = std::abs(std::remainder(a[i] - b[i], 2.0 * std::numbers::pi));
    if (d > m) m = d;
  }
  return m;
}

/// Selection sort with the comparator written out field by field.
inline std::vector<OrderedPair> oracle_order(const std::vector<grasp::GraspCandidate>& cands,
                                             const kinematics::JointConfig& current) {
  struct Item {
    std::size_t cand;
    std::size_t sol;
    int rank;
    double dist;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    int rank = 0;
    switch (cands[i].collision) {
      case grasp::CollisionClass::None: rank = 0; break;
      case grasp::CollisionClass::Object: rank = 1; break;
      case grasp::CollisionClass::Bin: rank = 2; break;
      case grasp::CollisionClass::Rejected: continue;
    }
    for (std::size_t s = 0; s < cands[i].ik.size(); ++s) {
      items.push_back({i, s, rank, oracle_chebyshev(cands[i].ik[s].q, current)});
    }
  }
  auto before = [&](const Item& a, const Item& b) {
    if (a.rank < b.rank) return true;
    if (a.rank > b.rank) return false;
    if (a.dist < b.dist) return true;
    if (a.dist > b.dist) return false;
    const auto& ca = cands[a.cand];
    const auto& cb = cands[b.cand];
    if (ca.object < cb.object) return true;
    if (ca.object > cb.object) return false;
    if (ca.grasp < cb.grasp) return true;
    if (ca.grasp > cb.grasp) return false;
    const int ba = ca.ik[a.sol].branch, bb = cb.ik[b.sol].branch;
    if (ba < bb) return true;
    if (ba > bb) return false;
    return a.cand < b.cand;
  };
  std::vector<OrderedPair> out;
  std::vector<bool> used(items.size(), false);
  for (std::size_t k = 0; k < items.size(); ++k) {
    std::size_t best = items.size();
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (used[j]) continue;
      if (best == items.size() || before(items[j], items[best])) best = j;
    }
    used[best] = true;
    out.push_back({items[best].cand, cands[items[best].cand].ik[items[best].sol].branch});
  }
  return out;
}

/// Candidate set of at most `max_pairs` (candidate, solution) pairs with
/// random classes. Joint values come from a coarse grid so distance ties and
/// repeated (object, grasp) keys occur often.
inline std::vector<grasp::GraspCandidate> random_candidates(std::mt19937_64& rng,
                                                            std::size_t max_pairs) {
  std::uniform_int_distribution<int> cls(0, 3), obj(0, 3), grp(0, 11), nsol(0, 8), grid(-8, 8);
  std::vector<grasp::GraspCandidate> out;
  std::size_t pairs = 0;
  while (true) {
    grasp::GraspCandidate c;
    c.collision = static_cast<grasp::CollisionClass>(cls(rng));
    c.object = static_cast<std::size_t>(obj(rng));
    c.grasp = static_cast<std::size_t>(grp(rng));
    const int n = nsol(rng);
    if (pairs + n > max_pairs) break;
    std::vector<int> branches{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(branches.begin(), branches.end(), rng);
    for (int s = 0; s < n; ++s) {
      kinematics::IkSolution sol;
      for (std::size_t j = 0; j < 6; ++j) sol.q[j] = 0.25 * grid(rng);
      sol.branch = branches[s];
      c.ik.push_back(sol);
    }
    pairs += n;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace binpick::testing
