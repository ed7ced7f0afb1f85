#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "l2morse/group.hpp"
#include "l2morse/rng.hpp"

using namespace l2morse;

namespace {

// Closed-form l^1 ball cardinality in Z^d: sum_k 2^k C(d,k) C(m,k).
std::uint64_t l1_ball_exact(int d, std::int64_t m) {
    auto choose = [](std::int64_t n, std::int64_t k) -> std::uint64_t {
        if (k < 0 || k > n) return 0;
        std::uint64_t r = 1;
        for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        return r;
    };
    std::uint64_t total = 0;
    std::uint64_t pw = 1;
    for (int k = 0; k <= d; ++k) {
        total += pw * choose(d, k) * choose(m, k);
        pw *= 2;
    }
    return total;
}

GroupElement rand_elem(const GroupModel& G, SplitMix64& rng, std::int64_t span) {
    std::vector<std::int64_t> c(static_cast<size_t>(G.rank()));
    for (auto& v : c) v = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(2 * span + 1))) - span;
    return G.make(std::move(c));
}

} // namespace

TEST_CASE("lattice word metric satisfies the metric axioms on random triples") {
    for (int d : {1, 2, 3}) {
        const auto G = GroupModel::lattice(d);
        SplitMix64 rng(17u + static_cast<std::uint64_t>(d));
        for (int trial = 0; trial < 3000; ++trial) {
            const auto a = rand_elem(G, rng, 40);
            const auto b = rand_elem(G, rng, 40);
            const auto c = rand_elem(G, rng, 40);
            const auto dab = G.word_distance(a, b);
            CHECK(dab == G.word_distance(b, a));
            CHECK(dab >= 0);
            CHECK((dab == 0) == (a == b));
            CHECK(G.word_distance(a, c) <= dab + G.word_distance(b, c));
            // translation invariance
            CHECK(G.word_distance(G.mul(c, a), G.mul(c, b)) == dab);
        }
    }
}

TEST_CASE("cyclic word norm takes the shorter way around") {
    const auto G = GroupModel::cyclic(6);
    CHECK(G.word_norm(G.make({0})) == 0);
    CHECK(G.word_norm(G.make({1})) == 1);
    CHECK(G.word_norm(G.make({3})) == 3);
    CHECK(G.word_norm(G.make({4})) == 2);
    CHECK(G.word_norm(G.make({5})) == 1);
    // make() reduces representatives mod the order, including negatives
    CHECK(G.make({7}) == G.make({1}));
    CHECK(G.make({-1}) == G.make({5}));
    SplitMix64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = rand_elem(G, rng, 50);
        const auto b = rand_elem(G, rng, 50);
        const auto c = rand_elem(G, rng, 50);
        CHECK(G.word_distance(a, b) == G.word_distance(b, a));
        CHECK(G.word_distance(a, c) <= G.word_distance(a, b) + G.word_distance(b, c));
        CHECK(G.word_distance(G.mul(c, a), G.mul(c, b)) == G.word_distance(a, b));
    }
}

TEST_CASE("group algebra: inverses, associativity, diff") {
    for (auto G : {GroupModel::lattice(2), GroupModel::cyclic(5)}) {
        SplitMix64 rng(99);
        for (int trial = 0; trial < 500; ++trial) {
            const auto a = rand_elem(G, rng, 9);
            const auto b = rand_elem(G, rng, 9);
            const auto c = rand_elem(G, rng, 9);
            CHECK(G.mul(a, G.inverse(a)) == G.identity());
            CHECK(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
            // diff(g, h) satisfies mul(diff, h) == g
            CHECK(G.mul(G.diff(a, b), b) == a);
        }
    }
}

TEST_CASE("ball sizes match the closed-form l^1 count") {
    CHECK(GroupModel::lattice(1).ball_size(0) == 1);
    CHECK(GroupModel::lattice(1).ball_size(4) == 9);
    CHECK(GroupModel::lattice(2).ball_size(1) == 5);
    CHECK(GroupModel::lattice(2).ball_size(2) == 13);
    CHECK(GroupModel::lattice(3).ball_size(2) == 25);
    for (int d : {1, 2, 3})
        for (std::int64_t m = 0; m <= 20; ++m)
            CHECK(GroupModel::lattice(d).ball_size(m) == l1_ball_exact(d, m));
    // cyclic ball saturates at the whole group
    const auto C = GroupModel::cyclic(7);
    CHECK(C.ball_size(2) == 5);
    CHECK(C.ball_size(3) == 7);
    CHECK(C.ball_size(50) == 7);
}

TEST_CASE("Folner boxes: boundary-to-volume ratio is strictly decreasing") {
    for (int d : {1, 2}) {
        const auto G = GroupModel::lattice(d);
        double prev = 2.0;
        for (int k = 1; k <= 30; ++k) {
            const double vol = static_cast<double>(G.folner_size(k));
            const double inner = static_cast<double>(G.folner_size(k - 1));
            const double ratio = (vol - inner) / vol;
            CHECK(ratio < prev);
            prev = ratio;
        }
        // and the sizes themselves are the exact box counts
        CHECK(G.folner_size(3) == (d == 1 ? 7u : 49u));
    }
    CHECK(GroupModel::cyclic(12).folner_size(1) == 12);
}

TEST_CASE("box_elements enumerates the box in lexicographic order, exactly once") {
    const auto G = GroupModel::lattice(2);
    const auto els = G.box_elements(1);
    REQUIRE(els.size() == 9);
    CHECK(els.front() == G.make({-1, -1}));
    CHECK(els[1] == G.make({-1, 0}));
    CHECK(els.back() == G.make({1, 1}));
    std::set<GroupElement> seen(els.begin(), els.end());
    CHECK(seen.size() == els.size());
    for (size_t i = 1; i < els.size(); ++i) CHECK(els[i - 1] < els[i]);
    // cyclic: the whole group in residue order, independent of the radius
    const auto C = GroupModel::cyclic(4);
    const auto cels = C.box_elements(9);
    REQUIRE(cels.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(cels[static_cast<size_t>(i)] == C.make({i}));
}

TEST_CASE("TileWindow index/at round-trips and rejects outside elements") {
    const auto G = GroupModel::lattice(2);
    TileWindow W(G, 3);
    REQUIRE(W.count() == 49);
    for (int i = 0; i < W.count(); ++i) CHECK(W.index(W.at(i)) == i);
    CHECK(W.contains(G.make({3, -3})));
    CHECK_FALSE(W.contains(G.make({4, 0})));
    CHECK(W.index(G.make({0, 4})) == -1);

    const auto C = GroupModel::cyclic(6);
    TileWindow WC(C, 0);
    REQUIRE(WC.count() == 6); // cyclic windows always hold the whole group
    for (int i = 0; i < 6; ++i) CHECK(WC.index(WC.at(i)) == i);
}

TEST_CASE("box_norm is the sup norm; word_norm the l^1 norm") {
    const auto G = GroupModel::lattice(3);
    const auto g = G.make({-4, 2, 1});
    CHECK(G.box_norm(g) == 4);
    CHECK(G.word_norm(g) == 7);
    CHECK(G.box_norm(G.identity()) == 0);
}

TEST_CASE("make() validates coordinate rank") {
    const auto G = GroupModel::lattice(2);
    CHECK_THROWS(G.make({1}));
    CHECK_THROWS(G.make({1, 2, 3}));
    CHECK_THROWS(GroupModel::lattice(0));
    CHECK_THROWS(GroupModel::cyclic(0));
}
