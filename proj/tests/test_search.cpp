#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>

#include "ftsynth/bench.hpp"
#include "ftsynth/canondb.hpp"
#include "ftsynth/search.hpp"
#include "ftsynth/unitary.hpp"

using namespace ftsynth;

namespace {

bool same_result(const SearchResult& a, const SearchResult& b) {
    return a.best_seq == b.best_seq &&
           std::bit_cast<std::uint64_t>(a.best_dist) ==
               std::bit_cast<std::uint64_t>(b.best_dist) &&
           a.t_count == b.t_count && a.optima_count == b.optima_count &&
           a.sequences_visited == b.sequences_visited &&
           a.sequences_skipped == b.sequences_skipped;
}

} // namespace

TEST_CASE("candidate_better orders by distance, then t-count, then seq_order") {
    const GateSeq a{1};
    const GateSeq b{24};
    CHECK(candidate_better(0.1, 5, b, 0.2, 0, a));
    CHECK_FALSE(candidate_better(0.2, 0, a, 0.1, 5, b));
    // Inside the tie window the t-count decides.
    CHECK(candidate_better(0.1 + 1e-13, 0, b, 0.1, 2, a));
    CHECK_FALSE(candidate_better(0.1, 2, a, 0.1 + 1e-13, 0, b));
    // Equal t-count: earlier sequence wins.
    CHECK(candidate_better(0.1, 1, a, 0.1, 1, b));
    CHECK_FALSE(candidate_better(0.1, 1, b, 0.1, 1, a));
}

TEST_CASE("gate-set members are found exactly") {
    const CanonDb db = build_canon_db(3);
    SUBCASE("T itself") {
        const SearchResult r = search_optimal(gate_matrix(24), 4, db);
        CHECK(r.best_seq == GateSeq{24});
        CHECK(r.best_dist <= 1e-8);
        CHECK(r.t_count == 1);
    }
    SUBCASE("identity prefers the empty sequence") {
        const SearchResult r = search_optimal(Unitary2::identity(), 4, db);
        CHECK(r.best_seq.empty());
        CHECK(r.best_dist == 0.0);
        CHECK(r.t_count == 0);
    }
    SUBCASE("a composite") {
        // H T S†H T as a target: reachable at length 5.
        const Unitary2 target = evaluate(GateSeq{1, 24, 9, 24});
        const SearchResult r = search_optimal(target, 5, db);
        CHECK(r.best_dist <= 1e-7);
        CHECK(distance(target, evaluate(r.best_seq)) <= 1e-7);
        CHECK(r.best_seq.size() <= 4);
    }
}

TEST_CASE("lmax 0 degenerates to the identity candidate") {
    const CanonDb db = build_canon_db(2);
    const Unitary2 target = sample_random_target(99, 0);
    const SearchResult r = search_optimal(target, 0, db);
    CHECK(r.best_seq.empty());
    CHECK(r.best_dist == distance(target, Unitary2::identity()));
    CHECK(r.sequences_visited == 1);
    CHECK(r.sequences_skipped == 0.0);
}

TEST_CASE("optimal equals exhaustive on random targets") {
    const CanonDb db2 = build_canon_db(2);
    for (int i = 0; i < 5; ++i) {
        const Unitary2 target = sample_random_target(1234, static_cast<std::uint64_t>(i));
        const SearchResult ex = search_exhaustive(target, 3);
        const SearchResult opt = search_optimal(target, 3, db2);
        CHECK(opt.best_seq == ex.best_seq);
        CHECK(opt.best_dist == ex.best_dist); // bitwise: same fold on the winner
        CHECK(opt.t_count == ex.t_count);
        CHECK(opt.sequences_visited <= ex.sequences_visited);
    }
}

TEST_CASE("visited plus skipped is the whole space") {
    const CanonDb db = build_canon_db(3);
    const Unitary2 target = sample_random_target(7, 3);
    const SearchResult r = search_optimal(target, 5, db);
    double space = 0.0;
    for (int l = 0; l <= 5; ++l) {
        space += std::pow(24.0, l);
    }
    CHECK(static_cast<double>(r.sequences_visited) + r.sequences_skipped == space);
    CHECK(r.sequences_skipped > 0.0);

    const SearchResult ex = search_exhaustive(target, 3);
    CHECK(ex.sequences_visited == 1 + 24 + 24 * 24 + 24 * 24 * 24);
    CHECK(ex.sequences_skipped == 0.0);
}

TEST_CASE("shard count never changes the result") {
    const CanonDb db = build_canon_db(3);
    for (int i = 0; i < 3; ++i) {
        const Unitary2 target = sample_random_target(42, static_cast<std::uint64_t>(i));
        SearchOptions serial;
        serial.shards = 1;
        SearchOptions wide;
        wide.shards = 4;
        const SearchResult a = search_optimal(target, 6, db, serial);
        const SearchResult b = search_optimal(target, 6, db, wide);
        CHECK(same_result(a, b));
    }
}

TEST_CASE("profile ends at the search_optimal result and curves shadow it") {
    const CanonDb db = build_canon_db(3);
    const Unitary2 target = sample_random_target(5, 1);
    const SearchResult opt = search_optimal(target, 6, db);
    const auto profile = search_profile(target, 6, db);
    REQUIRE(profile.size() == 7);
    CHECK(same_result(profile.back(), opt));
    for (std::size_t l = 1; l < profile.size(); ++l) {
        CHECK(profile[l].best_dist <= profile[l - 1].best_dist + kTieEps);
    }

    const auto curve = convergence_curve(target, 6, db);
    REQUIRE(curve.size() == 7);
    for (std::size_t l = 1; l < curve.size(); ++l) {
        CHECK(curve[l] <= curve[l - 1]);
    }
    for (std::size_t l = 0; l < curve.size(); ++l) {
        CHECK(std::abs(curve[l] - profile[l].best_dist) <= kTieEps);
    }
}

TEST_CASE("visit budget aborts loudly") {
    const CanonDb db = build_canon_db(3);
    SearchOptions opts;
    opts.max_visited = 50;
    CHECK_THROWS_AS(search_optimal(sample_random_target(8, 0), 6, db, opts),
                    SearchBudgetError);
}

TEST_CASE("argument guards") {
    const CanonDb db = build_canon_db(2);
    CHECK_THROWS_AS(search_optimal(Unitary2::identity(), -1, db), std::invalid_argument);
    CHECK_THROWS_AS(search_exhaustive(Unitary2::identity(), 7), std::invalid_argument);
    CHECK_THROWS_AS(search_exhaustive(Unitary2::identity(), -1), std::invalid_argument);
}
