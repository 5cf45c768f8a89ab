// SPDX-License-Identifier: Apache-2.0
#include "mmhp/grouping.hpp"

#include "mmhp/linalg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace mmhp {

void Grouping::canonicalize() {
  for (auto& subset : subsets) {
    std::sort(subset.begin(), subset.end());
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
}

void Grouping::validate(int nt) const {
  std::vector<bool> seen(static_cast<std::size_t>(nt), false);
  int total = 0;
  for (const auto& subset : subsets) {
    if (subset.empty()) {
      throw std::invalid_argument("Grouping: empty subset");
    }
    for (int idx : subset) {
      if (idx < 0 || idx >= nt) {
        throw std::invalid_argument("Grouping: antenna index out of range");
      }
      if (seen[static_cast<std::size_t>(idx)]) {
        throw std::invalid_argument("Grouping: antenna assigned twice");
      }
      seen[static_cast<std::size_t>(idx)] = true;
      ++total;
    }
  }
  if (total != nt) {
    throw std::invalid_argument("Grouping: subsets do not cover all antennas");
  }
}

CMatrix correlationMatrix(const FullyDigitalPrecoders& fOpt) {
  const int nt = fOpt.nt();
  if (nt < 1) {
    throw std::invalid_argument("correlationMatrix: empty precoder set");
  }
  CMatrix corr = CMatrix::Zero(nt, nt);
  for (const CMatrix& f : fOpt.fOpt) {
    corr.noalias() += f * f.adjoint();
  }
  return corr;
}

double minkowskiLambdaEstimate(const CMatrix& rF, const std::vector<int>& subset) {
  if (subset.empty()) {
    throw std::invalid_argument("minkowskiLambdaEstimate: empty subset");
  }
  double sum = 0.0;
  for (int i : subset) {
    for (int j : subset) {
      sum += std::abs(rF(i, j));
    }
  }
  return sum / static_cast<double>(subset.size());
}

double mutualCorrelation(const CMatrix& rF, const std::vector<int>& setA,
                         const std::vector<int>& setB) {
  if (setA.empty() || setB.empty()) {
    throw std::invalid_argument("mutualCorrelation: empty set");
  }
  for (int i : setA) {
    if (std::find(setB.begin(), setB.end(), i) != setB.end()) {
      throw std::invalid_argument("mutualCorrelation: sets overlap");
    }
  }
  double sum = 0.0;
  for (int i : setA) {
    for (int j : setB) {
      sum += std::abs(rF(i, j));
    }
  }
  return sum / (static_cast<double>(setA.size()) * static_cast<double>(setB.size()));
}

double exactLambdaSum(const CMatrix& rF, const Grouping& grouping) {
  double sum = 0.0;
  for (const auto& subset : grouping.subsets) {
    CMatrix sub(subset.size(), subset.size());
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = 0; b < subset.size(); ++b) {
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            rF(subset[a], subset[b]);
      }
    }
    sum += largestEigenvalue(sub);
  }
  return sum;
}

double minkowskiObjectiveSum(const CMatrix& rF, const Grouping& grouping) {
  double sum = 0.0;
  for (const auto& subset : grouping.subsets) {
    sum += minkowskiLambdaEstimate(rF, subset);
  }
  return sum;
}

namespace {

using Clusters = std::vector<std::vector<int>>;

// One merge pass over the pass-start snapshot. Returns the new cluster
// list; the shared-maximum rule only merges a pair when each is the
// other's best partner.
Clusters sharedMergePass(const CMatrix& rF, const Clusters& start) {
  const int n = static_cast<int>(start.size());
  std::vector<bool> merged(static_cast<std::size_t>(n), false);
  Clusters next;

  auto g = [&rF, &start](int a, int b) {
    return mutualCorrelation(rF, start[static_cast<std::size_t>(a)],
                             start[static_cast<std::size_t>(b)]);
  };

  for (int i = 0; i < n; ++i) {
    if (merged[static_cast<std::size_t>(i)]) {
      continue;
    }
    // Best unmerged partner after i; the last cluster just passes through.
    int j = -1;
    double bestG = -1.0;
    for (int l = i + 1; l < n; ++l) {
      if (merged[static_cast<std::size_t>(l)]) {
        continue;
      }
      const double value = g(i, l);
      if (value > bestG) {
        bestG = value;
        j = l;
      }
    }
    if (j < 0) {
      next.push_back(start[static_cast<std::size_t>(i)]);
      continue;
    }
    // Does j's best partner among the still-available clusters point back
    // to i? Clusters already absorbed this pass are out of the running.
    int back = -1;
    double bestBack = -1.0;
    for (int l = 0; l < n; ++l) {
      if (l == j || merged[static_cast<std::size_t>(l)]) {
        continue;
      }
      const double value = g(j, l);
      if (value > bestBack) {
        bestBack = value;
        back = l;
      }
    }
    if (back == i) {
      std::vector<int> unionSet = start[static_cast<std::size_t>(i)];
      unionSet.insert(unionSet.end(), start[static_cast<std::size_t>(j)].begin(),
                      start[static_cast<std::size_t>(j)].end());
      std::sort(unionSet.begin(), unionSet.end());
      next.push_back(std::move(unionSet));
      merged[static_cast<std::size_t>(i)] = true;
      merged[static_cast<std::size_t>(j)] = true;
    } else {
      next.push_back(start[static_cast<std::size_t>(i)]);
    }
  }
  return next;
}

} // namespace

Grouping sharedAhc(const CMatrix& rF, int nt, int ntRF) {
  if (ntRF < 1 || ntRF > nt) {
    throw std::invalid_argument("sharedAhc: ntRF must lie in [1, nt]");
  }
  Clusters clusters(static_cast<std::size_t>(nt));
  for (int i = 0; i < nt; ++i) {
    clusters[static_cast<std::size_t>(i)] = {i};
  }

  while (static_cast<int>(clusters.size()) > ntRF) {
    Clusters next = sharedMergePass(rF, clusters);
    if (static_cast<int>(next.size()) < ntRF) {
      break; // roll the pass back; reconciliation finishes the job
    }
    if (next.size() == clusters.size()) {
      break; // no shared pair left; reconciliation finishes the job
    }
    clusters = std::move(next);
  }

  if (static_cast<int>(clusters.size()) > ntRF) {
    // Merge the smallest clusters into their best surviving partner.
    std::sort(clusters.begin(), clusters.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                if (a.size() != b.size()) {
                  return a.size() < b.size();
                }
                return a.front() < b.front();
              });
    const int excess = static_cast<int>(clusters.size()) - ntRF;
    Clusters keepers(clusters.begin() + excess, clusters.end());
    for (int i = 0; i < excess; ++i) {
      const std::vector<int>& small = clusters[static_cast<std::size_t>(i)];
      int best = 0;
      double bestG = -1.0;
      for (std::size_t l = 0; l < keepers.size(); ++l) {
        const double value = mutualCorrelation(rF, small, keepers[l]);
        if (value > bestG) {
          bestG = value;
          best = static_cast<int>(l);
        }
      }
      auto& target = keepers[static_cast<std::size_t>(best)];
      target.insert(target.end(), small.begin(), small.end());
      std::sort(target.begin(), target.end());
    }
    clusters = std::move(keepers);
  }

  Grouping g;
  g.subsets = std::move(clusters);
  g.canonicalize();
  g.validate(nt);
  return g;
}

BigInt partitionCount(int nt, int ntRF) {
  if (nt < 1 || ntRF < 1 || ntRF > nt) {
    throw std::invalid_argument("partitionCount: requires 1 <= ntRF <= nt");
  }
  auto power = [](BigInt base, int exp) {
    BigInt result = 1;
    while (exp > 0) {
      if (exp & 1) {
        result *= base;
      }
      base *= base;
      exp >>= 1;
    }
    return result;
  };

  BigInt sum = 0;
  BigInt binom = 1; // C(ntRF, 0)
  for (int n = 0; n <= ntRF; ++n) {
    const BigInt term = binom * power(BigInt(n), nt);
    if ((ntRF - n) % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
    binom = binom * (ntRF - n) / (n + 1);
  }
  BigInt factorial = 1;
  for (int i = 2; i <= ntRF; ++i) {
    factorial *= i;
  }
  return sum / factorial;
}

namespace {

// Restricted-growth-string enumeration of partitions into exactly
// numBlocks unlabeled blocks, in lexicographic order.
template <typename Visitor>
void enumeratePartitions(int n, int numBlocks, Visitor&& visit) {
  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  std::vector<int> blockOf(static_cast<std::size_t>(n), 0);

  auto recurse = [&](auto&& self, int pos, int used) -> void {
    if (pos == n) {
      if (used == numBlocks) {
        visit(blockOf);
      }
      return;
    }
    // Remaining positions must still be able to open enough new blocks.
    const int remaining = n - pos;
    const int limit = std::min(used + 1, numBlocks);
    for (int b = 0; b < limit; ++b) {
      const int nextUsed = used + (b == used ? 1 : 0);
      if (nextUsed + remaining - 1 < numBlocks) {
        continue;
      }
      blockOf[static_cast<std::size_t>(pos)] = b;
      self(self, pos + 1, nextUsed);
    }
  };
  recurse(recurse, 0, 0);
}

Grouping groupingFromBlockAssignment(const std::vector<int>& blockOf, int numBlocks) {
  Grouping g;
  g.subsets.assign(static_cast<std::size_t>(numBlocks), {});
  for (std::size_t i = 0; i < blockOf.size(); ++i) {
    g.subsets[static_cast<std::size_t>(blockOf[i])].push_back(static_cast<int>(i));
  }
  return g;
}

} // namespace

ExhaustiveResult exhaustiveGrouping(const CMatrix& rF, int nt, int ntRF,
                                    GroupingObjective objective, std::uint64_t budget) {
  if (ntRF < 1 || ntRF > nt) {
    throw std::invalid_argument("exhaustiveGrouping: ntRF must lie in [1, nt]");
  }
  const BigInt count = partitionCount(nt, ntRF);
  if (count > BigInt(budget)) {
    throw std::invalid_argument("exhaustiveGrouping: partition count " + count.str() +
                                " exceeds the budget of " + std::to_string(budget));
  }

  ExhaustiveResult best;
  bool haveBest = false;
  enumeratePartitions(nt, ntRF, [&](const std::vector<int>& blockOf) {
    Grouping g = groupingFromBlockAssignment(blockOf, ntRF);
    const double value = objective == GroupingObjective::kExactLambdaSum
                             ? exactLambdaSum(rF, g)
                             : minkowskiObjectiveSum(rF, g);
    ++best.enumerated;
    if (!haveBest || value > best.objective) {
      haveBest = true;
      best.objective = value;
      best.grouping = std::move(g);
    }
  });
  best.grouping.canonicalize();
  return best;
}

Grouping greedyGrouping(const CMatrix& rF, int nt, int ntRF) {
  if (ntRF < 1 || ntRF > nt) {
    throw std::invalid_argument("greedyGrouping: ntRF must lie in [1, nt]");
  }
  std::vector<int> order(static_cast<std::size_t>(nt));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&rF](int a, int b) {
    return std::abs(rF(a, a)) > std::abs(rF(b, b));
  });

  Grouping g;
  g.subsets.reserve(static_cast<std::size_t>(ntRF));
  for (int r = 0; r < ntRF; ++r) {
    g.subsets.push_back({order[static_cast<std::size_t>(r)]});
  }
  for (int idx = ntRF; idx < nt; ++idx) {
    const int antenna = order[static_cast<std::size_t>(idx)];
    int best = 0;
    double bestGain = std::numeric_limits<double>::lowest();
    for (int r = 0; r < ntRF; ++r) {
      std::vector<int> extended = g.subsets[static_cast<std::size_t>(r)];
      extended.push_back(antenna);
      const double gain = minkowskiLambdaEstimate(rF, extended) -
                          minkowskiLambdaEstimate(rF, g.subsets[static_cast<std::size_t>(r)]);
      if (gain > bestGain) {
        bestGain = gain;
        best = r;
      }
    }
    g.subsets[static_cast<std::size_t>(best)].push_back(antenna);
  }
  g.canonicalize();
  g.validate(nt);
  return g;
}

std::string groupingToJson(const Grouping& grouping) {
  Grouping canonical = grouping;
  canonical.canonicalize();
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& subset : canonical.subsets) {
    doc.push_back(subset);
  }
  return doc.dump();
}

Grouping groupingFromJson(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_array()) {
    throw std::invalid_argument("groupingFromJson: expected a JSON array");
  }
  Grouping g;
  for (const auto& subset : doc) {
    if (!subset.is_array()) {
      throw std::invalid_argument("groupingFromJson: expected an array of arrays");
    }
    g.subsets.push_back(subset.get<std::vector<int>>());
  }
  g.canonicalize();
  return g;
}

} // namespace mmhp
