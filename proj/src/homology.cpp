#include "tbp/homology.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tbp {

GradedRanks GradedRanks::finite(std::vector<long> r, int low)
{
    GradedRanks g;
    g.low = low;
    g.ranks = std::move(r);
    g.validate();
    return g;
}

GradedRanks GradedRanks::eventually(std::vector<long> r, long tail, int low)
{
    GradedRanks g;
    g.low = low;
    g.ranks = std::move(r);
    g.tail = tail;
    g.validate();
    return g;
}

std::optional<long> GradedRanks::rank(int degree) const
{
    if (not_computed.count(degree)) return std::nullopt;
    if (degree < low) return low_tail;
    if (degree >= high()) return tail;
    return ranks[static_cast<std::size_t>(degree - low)];
}

long GradedRanks::rank_or_zero(int degree) const { return rank(degree).value_or(0); }

long GradedRanks::total_finite() const
{
    if (tail != 0 || low_tail != 0) throw std::logic_error("infinite total rank");
    long s = 0;
    for (long r : ranks) s += r;
    return s;
}

void GradedRanks::validate() const
{
    if (tail < 0 || low_tail < 0) throw std::invalid_argument("ranks must be nonnegative");
    for (long r : ranks)
        if (r < 0) throw std::invalid_argument("ranks must be nonnegative");
    if (high() > kMaxDegree + 1 && tail != 0) {
        // explicit entries past the cap must agree with the tail
        for (int k = kMaxDegree + 1; k < high(); ++k)
            if (ranks[static_cast<std::size_t>(k - low)] != tail) throw std::invalid_argument("explicit ranks disagree with the tail");
    }
}

std::string GradedRanks::str(int from, int to) const
{
    std::ostringstream os;
    for (int k = from; k <= to; ++k) {
        if (k > from) os << ",";
        auto r = rank(k);
        if (r)
            os << *r;
        else
            os << "-";
    }
    return os.str();
}

GradedRanks kunneth(const GradedRanks& a, const GradedRanks& b)
{
    if (a.low_tail != 0 || b.low_tail != 0) throw std::invalid_argument("kunneth needs ranks bounded below");
    if (a.tail != 0 && b.tail != 0) throw std::invalid_argument("kunneth of two infinite tails does not stabilize");
    // with b finite, out(n) = tail(a) * total(b) once n - deg(b) is past a's explicit part
    const GradedRanks& inf = a.tail != 0 ? a : b;
    const GradedRanks& fin = a.tail != 0 ? b : a;
    GradedRanks out;
    out.low = a.low + b.low;
    int stable = inf.high() + fin.high() - 1;
    out.tail = inf.tail * (inf.tail != 0 ? fin.total_finite() : 0);
    int top = inf.tail != 0 ? stable : a.high() + b.high() - 2;
    for (int n = out.low; n <= std::max(top, out.low - 1); ++n) {
        long s = 0;
        for (int i = a.low; i <= n - b.low; ++i) s += a.rank_or_zero(i) * b.rank_or_zero(n - i);
        out.ranks.push_back(s);
    }
    // trim trailing entries equal to the tail
    while (!out.ranks.empty() && out.ranks.back() == out.tail) out.ranks.pop_back();
    out.validate();
    return out;
}

GradedRanks loop_ranks_sphere(int dim)
{
    if (dim != 2) throw std::invalid_argument("loop space ranks are only provided for the 2-sphere");
    return GradedRanks::eventually({}, 1);
}

GradedRanks circle_ranks() { return GradedRanks::finite({1, 1}); }

GradedRanks path_space_ranks() { return kunneth(kunneth(loop_ranks_sphere(2), circle_ranks()), circle_ranks()); }

GradedRanks rfh_ranks(const GradedRanks& path, int d, int n, int from, int to)
{
    if (2 * d > n) throw std::invalid_argument("rfh_ranks requires d <= n/2");
    if (from > to) throw std::invalid_argument("empty degree range");
    GradedRanks out;
    out.low = from;
    const int shift = 2 * d - n + 1;
    for (int k = from; k <= to; ++k) {
        long r = 0;
        if (k >= 0) r += path.rank_or_zero(k);
        if (shift - k >= 0) r += path.rank_or_zero(shift - k);
        out.ranks.push_back(r);
        if (k == 0 || k == 1) out.not_computed.insert(k);
    }
    // outside [from, to] the two summands have stabilized
    out.tail = path.tail;
    out.low_tail = path.tail;
    return out;
}

}  // namespace tbp
