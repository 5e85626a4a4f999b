#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ftsynth/canondb.hpp"
#include "ftsynth/gateset.hpp"
#include "ftsynth/unitary.hpp"

namespace ftsynth {

/// Candidate distances within this window count as a tie and fall through
/// to t-count, then seq_order. Wide enough to absorb the rounding spread
/// between different evaluation orders of the same operator, narrow enough
/// never to bridge distinct optima.
inline constexpr double kTieEps = 1e-12;

struct SearchOptions {
    /// Worker threads; 0 means hardware concurrency. Results are identical
    /// for every value: work is a fixed task grid (length, leading gate)
    /// merged in enumeration order, so threading never reorders candidates.
    int shards = 0;
    /// Abort with SearchBudgetError once this many sequences have been
    /// visited (0 = unlimited).
    std::uint64_t max_visited = 0;
};

struct SearchBudgetError : std::runtime_error {
    explicit SearchBudgetError(std::uint64_t lim)
        : std::runtime_error("search: visit budget exceeded after " +
                             std::to_string(lim) + " sequences"),
          limit(lim) {}
    std::uint64_t limit;
};

struct SearchResult {
    GateSeq best_seq; // empty = the identity
    Distance best_dist = 1.0;
    int t_count = 0;
    /// Visited candidates whose distance ties best_dist within kTieEps.
    std::uint64_t optima_count = 0;
    /// Distance evaluations performed (one per phase-distinct candidate for
    /// lengths covered by the database).
    std::uint64_t sequences_visited = 0;
    /// Sum over lengths of 24^l minus the sequences visited at that length.
    double sequences_skipped = 0.0;
    /// Wall-clock time; excluded from determinism guarantees.
    double wall_seconds = 0.0;
};

/// True when candidate (d2, t2, s2) beats incumbent (d1, t1, s1): smaller
/// distance beyond kTieEps, then fewer T gates, then earlier in seq_order.
/// Every search variant and the cross-shard merge use this one comparator.
bool candidate_better(Distance d2, int t2, std::span<const GateId> s2,
                      Distance d1, int t1, std::span<const GateId> s1);

/// Provably optimal approximation of `target` over all gate sequences of
/// length 0..lmax. Lengths up to db.lprime() are read straight off the
/// canonical database; each longer length is enumerated in seq_order with
/// every lprime-long window required canonical, jumping any non-canonical
/// window to its canon_successor (which skips whole blocks of sequences
/// that repeat already-seen operators). Throws std::invalid_argument when
/// lmax < 0 or lmax exceeds db.lprime() with db.lprime() < 1.
SearchResult search_optimal(const Unitary2& target, int lmax, const CanonDb& db,
                            const SearchOptions& opts = {});

/// profile[l] = the search_optimal result restricted to lengths 0..l, all
/// taken from one enumeration pass; profile.back() equals the result of
/// search_optimal(target, lmax, ...) exactly.
std::vector<SearchResult> search_profile(const Unitary2& target, int lmax,
                                         const CanonDb& db,
                                         const SearchOptions& opts = {});

/// Brute force over every sequence of length 0..lmax; the reference oracle
/// for search_optimal. Single-threaded; lmax is capped at 6.
SearchResult search_exhaustive(const Unitary2& target, int lmax);

/// curve[l] = best distance over all sequences of length 0..l, computed
/// from the same enumeration as search_optimal; non-increasing in l.
std::vector<Distance> convergence_curve(const Unitary2& target, int lmax,
                                        const CanonDb& db,
                                        const SearchOptions& opts = {});

} // namespace ftsynth
