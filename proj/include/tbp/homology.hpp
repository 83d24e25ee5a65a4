#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tbp {

// Z2 ranks in degrees low, low+1, ...: explicit values followed by a constant tail.
// Degrees below `low` have rank `low_tail`.
struct GradedRanks {
    static constexpr int kMaxDegree = 64;

    int low = 0;
    std::vector<long> ranks;
    long tail = 0;
    long low_tail = 0;
    std::set<int> not_computed;

    static GradedRanks finite(std::vector<long> r, int low = 0);
    static GradedRanks eventually(std::vector<long> r, long tail, int low = 0);

    int high() const { return low + static_cast<int>(ranks.size()); }  // first tail degree
    // nullopt for degrees outside the computed domain
    std::optional<long> rank(int degree) const;
    long rank_or_zero(int degree) const;
    long total_finite() const;  // sum of all ranks; requires both tails zero
    void validate() const;
    std::string str(int from, int to) const;
};

GradedRanks kunneth(const GradedRanks& a, const GradedRanks& b);

GradedRanks loop_ranks_sphere(int dim = 2);
GradedRanks circle_ranks();
GradedRanks path_space_ranks();

// Rank of H_*(P) + H^{-*+2d-n+1}(P) over Z-degrees in [from, to]; degrees 0 and 1 are marked not computed.
GradedRanks rfh_ranks(const GradedRanks& path, int d, int n, int from = -GradedRanks::kMaxDegree,
                      int to = GradedRanks::kMaxDegree);

}  // namespace tbp
