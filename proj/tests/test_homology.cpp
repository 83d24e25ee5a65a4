#include "doctest.h"
#include "tbp/homology.hpp"

using namespace tbp;

namespace {

// brute-force convolution of explicit lists
std::vector<long> convolve(const std::vector<long>& a, const std::vector<long>& b)
{
    std::vector<long> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

}  // namespace

TEST_CASE("kunneth on small examples")
{
    GradedRanks s1 = circle_ranks();
    GradedRanks t2 = kunneth(s1, s1);
    CHECK(t2.str(0, 4) == "1,2,1,0,0");

    GradedRanks u = GradedRanks::finite({1});
    GradedRanks a = GradedRanks::eventually({2, 0, 5}, 3);
    GradedRanks au = kunneth(a, u);
    for (int k = 0; k < 70; ++k) CHECK(au.rank(k) == a.rank(k));

    GradedRanks l = kunneth(loop_ranks_sphere(), s1);
    CHECK(l.str(0, 6) == "1,2,2,2,2,2,2");
    CHECK(l.tail == 2);

    // random finite lists against the explicit product
    std::vector<long> x{1, 0, 3, 2}, y{2, 1, 0, 0, 4};
    std::vector<long> z = convolve(x, y);
    GradedRanks g = kunneth(GradedRanks::finite(x), GradedRanks::finite(y));
    for (std::size_t k = 0; k < z.size() + 3; ++k) CHECK(g.rank_or_zero(static_cast<int>(k)) == (k < z.size() ? z[k] : 0));

    // commutative, and associative on a finite triple
    GradedRanks p = kunneth(GradedRanks::finite(x), loop_ranks_sphere());
    GradedRanks q = kunneth(loop_ranks_sphere(), GradedRanks::finite(x));
    for (int k = 0; k < 70; ++k) CHECK(p.rank(k) == q.rank(k));

    CHECK_THROWS(kunneth(loop_ranks_sphere(), loop_ranks_sphere()));
    CHECK_THROWS(GradedRanks::finite({1, -1}));
    CHECK_THROWS(loop_ranks_sphere(3));
}

TEST_CASE("path space of the circle in the 2-sphere")
{
    GradedRanks p = path_space_ranks();
    CHECK(p.rank(0) == 1);
    CHECK(p.rank(1) == 3);
    CHECK(p.rank(7) == 4);
    for (int k = 2; k <= 64; ++k) CHECK(p.rank(k) == 4);
    CHECK(p.rank(-1) == 0);
    CHECK(p.str(0, 5) == "1,3,4,4,4,4");
}

TEST_CASE("Rabinowitz Floer ranks")
{
    GradedRanks p = path_space_ranks();
    GradedRanks r = rfh_ranks(p, 1, 2, -30, 30);
    CHECK(r.rank(5) == 4);
    CHECK(r.rank(-3) == 4);
    CHECK(r.rank(2) == 4);
    CHECK_FALSE(r.rank(0));
    CHECK_FALSE(r.rank(1));
    for (int k = 2; k <= 20; ++k) {
        CHECK(r.rank(k) == 4);
        CHECK(r.rank(-k) == 4);
        // exchanged summands: rank(*) = rank(1 - *)
        CHECK(r.rank(k) == r.rank(1 - k));
    }
    CHECK(r.str(-2, 3) == "4,4,-,-,4,4");
    CHECK_THROWS(rfh_ranks(p, 2, 2));
}
