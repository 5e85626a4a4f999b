#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ftsynth/gateset.hpp"
#include "ftsynth/unitary.hpp"

namespace ftsynth {

/// Enumeration order over gate sequences: shorter first; within a length,
/// lexicographic with seq[0] (the last-applied gate) most significant.
bool seq_order_less(std::span<const GateId> a, std::span<const GateId> b);

/// Advances `seq` to its successor of the same length: increments the least
/// significant position that is below G24 and resets everything after it to
/// G1. Returns false (and leaves `seq` untouched) when already all-G24.
bool seq_increment(GateSeq& seq);

/// One canonical sequence: the first, in seq_order, of all sequences that
/// realize its operator modulo global phase.
struct CanonEntry {
    GateSeq seq;
    Unitary2 canon; // phase-canonicalized operator of seq
    int t_count;
};

/// Thrown when building a database would exceed the memory budget.
/// `completed_length` is the largest length that was fully deduplicated
/// before the budget ran out.
struct DbBudgetError : std::runtime_error {
    DbBudgetError(int completed, const std::string& msg)
        : std::runtime_error(msg), completed_length(completed) {}
    int completed_length;
};

/// Thrown by load_db; the message names the failure (bad magic, unsupported
/// version, truncated file, checksum mismatch, entries out of order).
struct DbFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All canonical sequences of length 0..lprime (length 0 is the empty
/// sequence, so any longer realization of the identity is non-canonical).
/// Per-length entry lists are in seq_order. Immutable once built; safe to
/// share across search threads.
class CanonDb {
  public:
    /// Packed sequence keys hold 8 bits per gate in two 64-bit words.
    static constexpr int kMaxLprime = 16;

    int lprime() const { return lprime_; }

    std::uint64_t total_entries() const;

    /// Entries of one length, in seq_order. Throws std::out_of_range when
    /// len is negative or above lprime.
    std::span<const CanonEntry> entries(int len) const;

    /// Exact membership test. Throws std::out_of_range when the sequence is
    /// longer than lprime (canonicity is then undecidable from this db).
    bool is_canonical(std::span<const GateId> seq) const;

    /// First canonical sequence of the same length strictly after `seq` in
    /// seq_order, or nullptr when none is left. Same length guard as
    /// is_canonical.
    const GateSeq* canon_successor(std::span<const GateId> seq) const;

  private:
    using PackedKey = std::pair<std::uint64_t, std::uint64_t>;

    friend CanonDb build_canon_db(int lprime, std::size_t max_bytes);
    friend CanonDb load_db(const std::string& path);

    CanonDb() = default;
    void rebuild_keys();
    void check_length(std::size_t len) const;

    int lprime_ = -1;
    std::vector<std::vector<CanonEntry>> by_length_;
    std::vector<std::vector<PackedKey>> keys_; // parallel to by_length_
};

/// Grows the database one length at a time, deduplicating candidates
/// [g0] + C (g0 ascending, C over the canonical sequences one shorter)
/// against every operator seen so far via hash buckets confirmed by exact
/// distance. Throws std::invalid_argument for lprime outside
/// [0, kMaxLprime] and DbBudgetError when `max_bytes` would be exceeded.
CanonDb build_canon_db(int lprime, std::size_t max_bytes = std::size_t(2) << 30);

/// Binary database file, bit-exact across save/load:
///   magic "GFDB", version u16, lprime u16, entry count u64,
///   entries in seq_order (length u8, gate ids, 8 doubles of the canonical
///   matrix row-major re/im), FNV-1a 64 checksum of all preceding bytes.
/// All integers and doubles little-endian. save_db throws std::runtime_error
/// on I/O failure; load_db throws DbFormatError on malformed content.
void save_db(const CanonDb& db, const std::string& path);
CanonDb load_db(const std::string& path);

} // namespace ftsynth
