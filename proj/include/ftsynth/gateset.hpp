#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftsynth/unitary.hpp"

namespace ftsynth {

/// Index into the fixed 24-gate alphabet. 1..23 are the Clifford-part
/// elements, 24 is T. 0 denotes the identity and appears only in group-table
/// contexts, never inside a gate sequence.
using GateId = std::uint8_t;

inline constexpr GateId kIdentityId = 0;
inline constexpr GateId kTId = 24;
inline constexpr int kAlphabetSize = 24;
inline constexpr int kCliffordCount = 23;

/// Ordered gate sequence, stored in reading order: the product
/// M(seq[0]) · M(seq[1]) · ... · M(seq[n-1]), so the LAST element of the
/// list is applied first (standard operator notation).
using GateSeq = std::vector<GateId>;

inline bool is_clifford(GateId g) { return g >= 1 && g <= kCliffordCount; }

/// Matrix of gate g (0 = I). The Clifford-part elements are fixed products
/// of H, X, Z, S, S†:
///   G1=H    G2=X    G3=Z    G4=S    G5=S†   G6=XH   G7=ZH   G8=SH
///   G9=S†H  G10=ZX  G11=SX  G12=S†X G13=HS  G14=HS† G15=ZXH G16=SXH
///   G17=S†XH G18=HSH G19=HS†H G20=HSX G21=HS†X G22=S†HS G23=SHS† G24=T
/// "HS" composes as H·S (apply S first). Throws on an index above 24.
const Unitary2& gate_matrix(GateId g);

/// Multiplication table of the Clifford part {I, G1..G23}, which is closed
/// under multiplication modulo global phase. Built once, immutable after.
class GroupTable {
  public:
    /// Resolves every product Gi·Gj (i,j in 0..23) to the unique element at
    /// distance < kUniquenessEps, and each inverse. Throws std::logic_error
    /// if a product matches no element or more than one (a gate-matrix bug).
    static GroupTable build();

    GateId product(GateId i, GateId j) const { return product_[i][j]; }
    GateId inverse(GateId i) const { return inverse_[i]; }

  private:
    GroupTable() = default;
    GateId product_[24][24] = {};
    GateId inverse_[24] = {};
};

/// Product of the sequence, rightmost element applied first:
/// evaluate([]) = I, evaluate(s) = M(s[0])·M(s[1])·...·M(s[n-1]).
Unitary2 evaluate(std::span<const GateId> seq);

inline int t_count(std::span<const GateId> seq) {
    int n = 0;
    for (GateId g : seq) {
        n += (g == kTId);
    }
    return n;
}

/// No two adjacent Clifford gates and no two adjacent T gates.
bool is_alternation_normal(std::span<const GateId> seq);

/// Collapses every run of adjacent Clifford gates to at most one gate via
/// the group table and merges adjacent T pairs into S (T·T = S), cascading
/// until the result is alternation-normal. Same operator modulo phase;
/// length never increases.
GateSeq reduce_clifford_run(std::span<const GateId> seq, const GroupTable& table);

/// Canonical token for a gate (H, X, Z, S, Sd, SH, HSd, ..., T).
std::string_view gate_token(GateId g);

/// Sequence as whitespace-separated tokens; the empty sequence prints as "I".
std::string format_seq(std::span<const GateId> seq);

/// Parses whitespace-separated tokens: the named tokens above, G1..G24, and
/// I (which contributes no gate). Throws std::invalid_argument naming the
/// offending token.
GateSeq parse_seq(std::string_view text);

/// Named sequences from the published tables: the shortest sequence beating
/// the identity as an approximation of R_128 (31 gates) and the shortest
/// one accurate enough for factoring-scale phase rotations (46 gates).
const GateSeq& fixture_u31();
const GateSeq& fixture_u46();

} // namespace ftsynth
