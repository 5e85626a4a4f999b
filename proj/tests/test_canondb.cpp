#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ftsynth/canondb.hpp"
#include "ftsynth/gateset.hpp"
#include "ftsynth/unitary.hpp"

using namespace ftsynth;

namespace {

// Independent reference: enumerate every sequence of each length in
// seq_order and keep the first realization of each operator, comparing
// against every kept matrix by exact distance. No hashing, no successor
// logic, no sharing with the implementation under test.
struct NaiveDb {
    std::vector<GateSeq> seqs;
    std::vector<Unitary2> mats;
};

NaiveDb naive_canonical(int lprime) {
    NaiveDb out;
    out.seqs.push_back({});
    out.mats.push_back(Unitary2::identity());
    for (int len = 1; len <= lprime; ++len) {
        GateSeq s(static_cast<std::size_t>(len), GateId{1});
        for (;;) {
            const Unitary2 m = evaluate(s);
            bool seen = false;
            for (const Unitary2& kept : out.mats) {
                if (distance(m, kept) < kUniquenessEps) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                out.seqs.push_back(s);
                out.mats.push_back(m);
            }
            if (!seq_increment(s)) {
                break;
            }
        }
    }
    return out;
}

std::string temp_path(const char* tag) {
    return std::string("canondb_test_") + tag + ".gfdb";
}

bool same_bits(const Unitary2& u, const Unitary2& v) {
    const double a[8] = {u.a().real(), u.a().imag(), u.b().real(), u.b().imag(),
                         u.c().real(), u.c().imag(), u.d().real(), u.d().imag()};
    const double b[8] = {v.a().real(), v.a().imag(), v.b().real(), v.b().imag(),
                         v.c().real(), v.c().imag(), v.d().real(), v.d().imag()};
    for (int i = 0; i < 8; ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("seq_order and seq_increment") {
    CHECK(seq_order_less(GateSeq{}, GateSeq{1}));
    CHECK(seq_order_less(GateSeq{24}, GateSeq{1, 1}));
    CHECK(seq_order_less(GateSeq{1, 24}, GateSeq{2, 1}));
    CHECK_FALSE(seq_order_less(GateSeq{2, 1}, GateSeq{1, 24}));
    CHECK_FALSE(seq_order_less(GateSeq{3}, GateSeq{3}));

    GateSeq s{1, 1};
    CHECK(seq_increment(s));
    CHECK(s == GateSeq{1, 2});
    s = {1, 24};
    CHECK(seq_increment(s));
    CHECK(s == GateSeq{2, 1});
    s = {24, 24};
    CHECK_FALSE(seq_increment(s));
    CHECK(s == GateSeq{24, 24});
}

TEST_CASE("database agrees with the naive reference at lprime 3") {
    const CanonDb db = build_canon_db(3);
    const NaiveDb ref = naive_canonical(3);

    std::size_t i = 0;
    for (int len = 0; len <= 3; ++len) {
        for (const CanonEntry& e : db.entries(len)) {
            REQUIRE(i < ref.seqs.size());
            CHECK(e.seq == ref.seqs[i]);
            CHECK(distance(e.canon, ref.mats[i]) < kUniquenessEps);
            CHECK(e.t_count == t_count(e.seq));
            ++i;
        }
    }
    CHECK(i == ref.seqs.size());
}

TEST_CASE("entries are canonical, ordered, and prefix-closed") {
    const CanonDb db = build_canon_db(4);
    CHECK(db.lprime() == 4);
    CHECK(db.entries(0).size() == 1);
    CHECK(db.entries(1).size() == 24);

    for (int len = 0; len <= 4; ++len) {
        const auto list = db.entries(len);
        for (std::size_t i = 0; i < list.size(); ++i) {
            CHECK(db.is_canonical(list[i].seq));
            if (i + 1 < list.size()) {
                CHECK(seq_order_less(list[i].seq, list[i + 1].seq));
            }
            if (len >= 1) {
                // The applied-first remainder (everything after the stored
                // head) must itself be canonical.
                const GateSeq tail(list[i].seq.begin() + 1, list[i].seq.end());
                CHECK(db.is_canonical(tail));
            }
        }
    }
}

TEST_CASE("shorter realizations make longer ones non-canonical") {
    const CanonDb db = build_canon_db(3);
    CHECK_FALSE(db.is_canonical(GateSeq{1, 1}));   // HH = I
    CHECK_FALSE(db.is_canonical(GateSeq{24, 24})); // TT = S
    CHECK_FALSE(db.is_canonical(GateSeq{4, 5}));   // S Sd = I
    CHECK(db.is_canonical(GateSeq{}));
    CHECK(db.is_canonical(GateSeq{24}));
    CHECK_THROWS_AS(db.is_canonical(GateSeq{1, 2, 1, 2}), std::out_of_range);
}

TEST_CASE("canon_successor walks the per-length lists") {
    const CanonDb db = build_canon_db(3);
    for (int len = 1; len <= 3; ++len) {
        const auto list = db.entries(len);
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            const GateSeq* next = db.canon_successor(list[i].seq);
            REQUIRE(next != nullptr);
            CHECK(*next == list[i + 1].seq);
        }
        CHECK(db.canon_successor(list.back().seq) == nullptr);
    }
    // From a non-member: first canonical sequence strictly after it.
    const GateSeq* succ = db.canon_successor(GateSeq{1, 1});
    REQUIRE(succ != nullptr);
    CHECK(seq_order_less(GateSeq{1, 1}, *succ));
    CHECK(db.is_canonical(*succ));
    CHECK_THROWS_AS(db.canon_successor(GateSeq{1, 1, 1, 1}), std::out_of_range);
}

TEST_CASE("memory budget aborts the build with the completed length") {
    try {
        build_canon_db(6, 4096);
        FAIL("expected DbBudgetError");
    } catch (const DbBudgetError& e) {
        CHECK(e.completed_length < 6);
        CHECK(e.completed_length >= 0);
    }
}

TEST_CASE("save and load round trip bit-exactly") {
    const CanonDb db = build_canon_db(3);
    const std::string path = temp_path("roundtrip");
    save_db(db, path);
    const CanonDb back = load_db(path);

    CHECK(back.lprime() == db.lprime());
    CHECK(back.total_entries() == db.total_entries());
    for (int len = 0; len <= 3; ++len) {
        const auto a = db.entries(len);
        const auto b = back.entries(len);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].seq == b[i].seq);
            CHECK(a[i].t_count == b[i].t_count);
            CHECK(same_bits(a[i].canon, b[i].canon));
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("load rejects malformed files by name") {
    const CanonDb db = build_canon_db(2);
    const std::string path = temp_path("malformed");
    save_db(db, path);

    auto read_all = [&] {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    auto write_all = [&](const std::string& bytes) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    const std::string good = read_all();

    SUBCASE("bad magic") {
        std::string bad = good;
        bad[0] = 'X';
        write_all(bad);
        CHECK_THROWS_WITH_AS(load_db(path), doctest::Contains("magic"), DbFormatError);
    }
    SUBCASE("unsupported version") {
        std::string bad = good;
        bad[4] = 9;
        write_all(bad);
        CHECK_THROWS_WITH_AS(load_db(path), doctest::Contains("version"), DbFormatError);
    }
    SUBCASE("flipped payload byte") {
        std::string bad = good;
        bad[good.size() / 2] = static_cast<char>(bad[good.size() / 2] ^ 0x40);
        write_all(bad);
        CHECK_THROWS_WITH_AS(load_db(path), doctest::Contains("checksum"), DbFormatError);
    }
    SUBCASE("truncated") {
        write_all(good.substr(0, good.size() - 9));
        CHECK_THROWS_AS(load_db(path), DbFormatError);
    }
    std::remove(path.c_str());
}

TEST_CASE("lprime bounds are enforced") {
    CHECK_THROWS_AS(build_canon_db(-1), std::invalid_argument);
    CHECK_THROWS_AS(build_canon_db(17), std::invalid_argument);
}
