// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mmhp/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace mmhp {

using BigInt = boost::multiprecision::cpp_int;

/// R_F = sum_k fOpt[k] * fOpt[k]^H, the Gram matrix of the stacked optimal
/// precoders. Principal submatrices of it are the per-subarray Grams.
CMatrix correlationMatrix(const FullyDigitalPrecoders& fOpt);

/// Mean absolute entry of the subset's principal submatrix:
/// (1/|S|) * sum_{i,j in S} |R_F(i,j)|; estimates the largest eigenvalue.
double minkowskiLambdaEstimate(const CMatrix& rF, const std::vector<int>& subset);

/// Mutual correlation g(A, B) = (1/(|A||B|)) * sum_{i in A, j in B} |R_F(i,j)|.
/// Throws std::invalid_argument when the sets overlap or are empty.
double mutualCorrelation(const CMatrix& rF, const std::vector<int>& setA,
                         const std::vector<int>& setB);

/// Exact grouping objective sum_r lambda_max(R_F restricted to S_r).
double exactLambdaSum(const CMatrix& rF, const Grouping& grouping);

/// Minkowski-estimated grouping objective.
double minkowskiObjectiveSum(const CMatrix& rF, const Grouping& grouping);

/// Shared agglomerative hierarchical clustering. Starts from singletons and
/// repeatedly scans the pass-start clusters in index order, merging a pair
/// only when each is the other's maximum-mutual-correlation partner; a pass
/// that would drop the cluster count below ntRF is rolled back and the
/// remaining excess clusters (smallest first) are merged into their best
/// partners. All argmax ties break to the lowest index. Deterministic.
Grouping sharedAhc(const CMatrix& rF, int nt, int ntRF);

enum class GroupingObjective { kExactLambdaSum, kMinkowski };

struct ExhaustiveResult {
  Grouping grouping;
  double objective = 0.0;
  std::uint64_t enumerated = 0;
};

/// Enumerates every partition of {0..nt-1} into exactly ntRF unlabeled
/// nonempty subsets and returns the objective maximizer (first in
/// lexicographic order on ties). Refuses to run when the partition count
/// exceeds the budget.
ExhaustiveResult exhaustiveGrouping(const CMatrix& rF, int nt, int ntRF,
                                    GroupingObjective objective,
                                    std::uint64_t budget = 1000000);

/// Number of partitions of nt items into exactly ntRF nonempty unlabeled
/// subsets, via the inclusion-exclusion formula, exact.
BigInt partitionCount(int nt, int ntRF);

/// Greedy baseline grouping: seeds the ntRF clusters with the antennas of
/// largest |R_F(i,i)| and assigns the remaining antennas (descending
/// diagonal order) to the cluster with the best incremental Minkowski
/// estimate. Deterministic; ties break to the lowest index.
Grouping greedyGrouping(const CMatrix& rF, int nt, int ntRF);

/// JSON serialization: list of integer lists, ascending within and across
/// subsets.
std::string groupingToJson(const Grouping& grouping);
Grouping groupingFromJson(const std::string& text);

} // namespace mmhp
