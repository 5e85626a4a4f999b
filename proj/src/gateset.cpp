#include "ftsynth/gateset.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ftsynth {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::array<Unitary2, 25> make_gate_table() {
    const Unitary2 I = Unitary2::identity();
    const Unitary2 H = Unitary2::unchecked(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
    const Unitary2 X = Unitary2::unchecked(0.0, 1.0, 1.0, 0.0);
    const Unitary2 Z = Unitary2::unchecked(1.0, 0.0, 0.0, -1.0);
    const Unitary2 S = Unitary2::unchecked(1.0, 0.0, 0.0, cplx(0.0, 1.0));
    const Unitary2 Sd = Unitary2::unchecked(1.0, 0.0, 0.0, cplx(0.0, -1.0));
    const Unitary2 T =
        Unitary2::unchecked(1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0));
    return {
        I,
        H,           // G1
        X,           // G2
        Z,           // G3
        S,           // G4
        Sd,          // G5
        X * H,       // G6
        Z * H,       // G7
        S * H,       // G8
        Sd * H,      // G9
        Z * X,       // G10
        S * X,       // G11
        Sd * X,      // G12
        H * S,       // G13
        H * Sd,      // G14
        Z * X * H,   // G15
        S * X * H,   // G16
        Sd * X * H,  // G17
        H * S * H,   // G18
        H * Sd * H,  // G19
        H * S * X,   // G20
        H * Sd * X,  // G21
        Sd * H * S,  // G22
        S * H * Sd,  // G23
        T,           // G24
    };
}

const std::array<Unitary2, 25>& gate_table() {
    static const std::array<Unitary2, 25> table = make_gate_table();
    return table;
}

constexpr std::string_view kGateTokens[25] = {
    "I",  "H",   "X",    "Z",   "S",    "Sd",  "XH",   "ZH",  "SH",
    "SdH", "ZX",  "SX",   "SdX", "HS",   "HSd", "ZXH",  "SXH", "SdXH",
    "HSH", "HSdH", "HSX", "HSdX", "SdHS", "SHSd", "T",
};

GateId token_to_gate(std::string_view token) {
    for (int g = 0; g <= kAlphabetSize; ++g) {
        if (token == kGateTokens[g]) {
            return static_cast<GateId>(g);
        }
    }
    if (token.size() >= 2 && token[0] == 'G') {
        int value = 0;
        for (char ch : token.substr(1)) {
            if (ch < '0' || ch > '9') {
                value = -1;
                break;
            }
            value = value * 10 + (ch - '0');
        }
        if (value >= 1 && value <= kAlphabetSize) {
            return static_cast<GateId>(value);
        }
    }
    throw std::invalid_argument("unknown gate token: " + std::string(token));
}

} // namespace

const Unitary2& gate_matrix(GateId g) {
    if (g > kAlphabetSize) {
        throw std::out_of_range("gate id out of range: " + std::to_string(int(g)));
    }
    return gate_table()[g];
}

GroupTable GroupTable::build() {
    GroupTable table;
    for (int i = 0; i <= kCliffordCount; ++i) {
        const Unitary2& gi = gate_matrix(static_cast<GateId>(i));
        for (int j = 0; j <= kCliffordCount; ++j) {
            Unitary2 prod = gi * gate_matrix(static_cast<GateId>(j));
            int match = -1;
            for (int k = 0; k <= kCliffordCount; ++k) {
                if (distance(prod, gate_matrix(static_cast<GateId>(k))) < kUniquenessEps) {
                    if (match >= 0) {
                        throw std::logic_error("group table: ambiguous product");
                    }
                    match = k;
                }
            }
            if (match < 0) {
                throw std::logic_error("group table: product escapes the group");
            }
            table.product_[i][j] = static_cast<GateId>(match);
        }
    }
    for (int i = 0; i <= kCliffordCount; ++i) {
        int inv = -1;
        for (int k = 0; k <= kCliffordCount; ++k) {
            if (table.product_[i][k] == kIdentityId) {
                if (inv >= 0) {
                    throw std::logic_error("group table: ambiguous inverse");
                }
                inv = k;
            }
        }
        if (inv < 0) {
            throw std::logic_error("group table: missing inverse");
        }
        table.inverse_[i] = static_cast<GateId>(inv);
    }
    return table;
}

Unitary2 evaluate(std::span<const GateId> seq) {
    Unitary2 acc = Unitary2::identity();
    for (GateId g : seq) {
        acc = acc * gate_matrix(g);
    }
    return acc;
}

bool is_alternation_normal(std::span<const GateId> seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == kIdentityId) {
            return false;
        }
        if (i + 1 < seq.size()) {
            const bool both_clifford = is_clifford(seq[i]) && is_clifford(seq[i + 1]);
            const bool both_t = seq[i] == kTId && seq[i + 1] == kTId;
            if (both_clifford || both_t) {
                return false;
            }
        }
    }
    return true;
}

GateSeq reduce_clifford_run(std::span<const GateId> seq, const GroupTable& table) {
    GateSeq out;
    out.reserve(seq.size());
    for (GateId g : seq) {
        out.push_back(g);
        for (;;) {
            if (!out.empty() && out.back() == kIdentityId) {
                out.pop_back();
                continue;
            }
            if (out.size() < 2) {
                break;
            }
            const GateId a = out[out.size() - 2];
            const GateId b = out.back();
            if (is_clifford(a) && is_clifford(b)) {
                out.pop_back();
                out.back() = table.product(a, b);
                continue;
            }
            if (a == kTId && b == kTId) {
                out.pop_back();
                out.back() = 4; // T·T = S
                continue;
            }
            break;
        }
    }
    return out;
}

std::string_view gate_token(GateId g) {
    if (g > kAlphabetSize) {
        throw std::out_of_range("gate id out of range: " + std::to_string(int(g)));
    }
    return kGateTokens[g];
}

std::string format_seq(std::span<const GateId> seq) {
    if (seq.empty()) {
        return "I";
    }
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += gate_token(seq[i]);
    }
    return out;
}

GateSeq parse_seq(std::string_view text) {
    GateSeq seq;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
        GateId g = token_to_gate(token);
        if (g != kIdentityId) {
            seq.push_back(g);
        }
    }
    return seq;
}

const GateSeq& fixture_u31() {
    static const GateSeq seq = parse_seq(
        "H T H T SH T SH T SH T H T H T SH T H T H T SH T H T H T H T SH T SdH");
    return seq;
}

const GateSeq& fixture_u46() {
    static const GateSeq seq = parse_seq(
        "H T H T H T SH T H T SH T SH T SH T H T SH T SH T H T H T SH T SH T H T "
        "SH T SH T SH T H T SH T H T HSd T");
    return seq;
}

} // namespace ftsynth
