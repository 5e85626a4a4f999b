#include "ftsynth/canondb.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace ftsynth {

bool seq_order_less(std::span<const GateId> a, std::span<const GateId> b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool seq_increment(GateSeq& seq) {
    for (std::size_t i = seq.size(); i-- > 0;) {
        if (seq[i] < kAlphabetSize) {
            ++seq[i];
            std::fill(seq.begin() + static_cast<std::ptrdiff_t>(i) + 1, seq.end(),
                      GateId{1});
            return true;
        }
    }
    return false;
}

namespace {

using PackedKey = std::pair<std::uint64_t, std::uint64_t>;

PackedKey pack_key(std::span<const GateId> seq) {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::uint64_t byte = seq[i];
        if (i < 8) {
            hi |= byte << (56 - 8 * i);
        } else {
            lo |= byte << (56 - 8 * (i - 8));
        }
    }
    return {hi, lo};
}

} // namespace

void CanonDb::check_length(std::size_t len) const {
    if (static_cast<int>(len) > lprime_) {
        throw std::out_of_range("canon db: sequence length " + std::to_string(len) +
                                " exceeds database lprime " + std::to_string(lprime_));
    }
}

std::uint64_t CanonDb::total_entries() const {
    std::uint64_t n = 0;
    for (const auto& v : by_length_) {
        n += v.size();
    }
    return n;
}

std::span<const CanonEntry> CanonDb::entries(int len) const {
    if (len < 0 || len > lprime_) {
        throw std::out_of_range("canon db: no entries of length " + std::to_string(len));
    }
    return by_length_[static_cast<std::size_t>(len)];
}

bool CanonDb::is_canonical(std::span<const GateId> seq) const {
    check_length(seq.size());
    const auto& keys = keys_[seq.size()];
    const PackedKey k = pack_key(seq);
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    return it != keys.end() && *it == k;
}

const GateSeq* CanonDb::canon_successor(std::span<const GateId> seq) const {
    check_length(seq.size());
    const auto& keys = keys_[seq.size()];
    auto it = std::upper_bound(keys.begin(), keys.end(), pack_key(seq));
    if (it == keys.end()) {
        return nullptr;
    }
    return &by_length_[seq.size()][static_cast<std::size_t>(it - keys.begin())].seq;
}

void CanonDb::rebuild_keys() {
    keys_.assign(by_length_.size(), {});
    for (std::size_t len = 0; len < by_length_.size(); ++len) {
        auto& keys = keys_[len];
        keys.reserve(by_length_[len].size());
        for (const CanonEntry& e : by_length_[len]) {
            PackedKey k = pack_key(e.seq);
            if (!keys.empty() && !(keys.back() < k)) {
                throw DbFormatError("canon db: entries out of order at length " +
                                    std::to_string(len));
            }
            keys.push_back(k);
        }
    }
}

CanonDb build_canon_db(int lprime, std::size_t max_bytes) {
    if (lprime < 0 || lprime > CanonDb::kMaxLprime) {
        throw std::invalid_argument("canon db: lprime must be in [0, " +
                                    std::to_string(CanonDb::kMaxLprime) + "]");
    }
    CanonDb db;
    db.lprime_ = lprime;
    db.by_length_.resize(static_cast<std::size_t>(lprime) + 1);

    // Operator index over everything inserted so far; values are
    // (length, index) into by_length_. Collisions are resolved by exact
    // distance, never by key equality.
    std::unordered_multimap<std::uint64_t, std::pair<int, std::uint32_t>> buckets;
    std::vector<std::uint64_t> probe;
    std::size_t bytes_used = 0;

    auto insert = [&](int len, CanonEntry e) {
        bytes_used += sizeof(CanonEntry) + e.seq.capacity() + sizeof(PackedKey) + 64;
        if (bytes_used > max_bytes) {
            throw DbBudgetError(len - 1,
                                "canon db build: memory budget exceeded at length " +
                                    std::to_string(len) + " (completed length " +
                                    std::to_string(len - 1) + ")");
        }
        auto& list = db.by_length_[static_cast<std::size_t>(len)];
        buckets.emplace(hash_key(e.canon),
                        std::make_pair(len, static_cast<std::uint32_t>(list.size())));
        list.push_back(std::move(e));
    };

    insert(0, CanonEntry{GateSeq{}, phase_canonicalize(Unitary2::identity()), 0});

    for (int len = 1; len <= lprime; ++len) {
        for (GateId g0 = 1; g0 <= kAlphabetSize; ++g0) {
            const Unitary2& head = gate_matrix(g0);
            const auto& parents = db.by_length_[static_cast<std::size_t>(len) - 1];
            for (const CanonEntry& parent : parents) {
                const Unitary2 m = head * parent.canon;
                hash_key_variants(m, probe);
                bool duplicate = false;
                for (std::uint64_t key : probe) {
                    auto [first, last] = buckets.equal_range(key);
                    for (auto it = first; it != last; ++it) {
                        const auto [elen, eidx] = it->second;
                        const CanonEntry& seen =
                            db.by_length_[static_cast<std::size_t>(elen)][eidx];
                        if (distance(m, seen.canon) < kUniquenessEps) {
                            duplicate = true;
                            break;
                        }
                    }
                    if (duplicate) {
                        break;
                    }
                }
                if (duplicate) {
                    continue;
                }
                GateSeq seq;
                seq.reserve(static_cast<std::size_t>(len));
                seq.push_back(g0);
                seq.insert(seq.end(), parent.seq.begin(), parent.seq.end());
                insert(len, CanonEntry{std::move(seq), phase_canonicalize(m),
                                       parent.t_count + (g0 == kTId ? 1 : 0)});
            }
        }
    }
    db.rebuild_keys();
    return db;
}

namespace {

constexpr unsigned char kMagic[4] = {'G', 'F', 'D', 'B'};
constexpr std::uint16_t kVersion = 1;

std::uint64_t fnv1a(const unsigned char* p, std::size_t n) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
}

void put_f64(std::vector<unsigned char>& out, double x) {
    put_u64(out, std::bit_cast<std::uint64_t>(x));
}

// Bounds-checked little-endian cursor over [p, p + n).
struct Reader {
    const unsigned char* p;
    std::size_t n;
    std::size_t off = 0;

    void need(std::size_t k) const {
        if (n - off < k) {
            throw DbFormatError("db load: truncated file");
        }
    }
    std::uint8_t u8() {
        need(1);
        return p[off++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(p[off] | (p[off + 1] << 8));
        off += 2;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(p[off + static_cast<std::size_t>(i)]) << (8 * i);
        }
        off += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

} // namespace

void save_db(const CanonDb& db, const std::string& path) {
    std::vector<unsigned char> buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    put_u16(buf, kVersion);
    put_u16(buf, static_cast<std::uint16_t>(db.lprime()));
    put_u64(buf, db.total_entries());
    for (int len = 0; len <= db.lprime(); ++len) {
        for (const CanonEntry& e : db.entries(len)) {
            buf.push_back(static_cast<unsigned char>(e.seq.size()));
            buf.insert(buf.end(), e.seq.begin(), e.seq.end());
            put_f64(buf, e.canon.a().real());
            put_f64(buf, e.canon.a().imag());
            put_f64(buf, e.canon.b().real());
            put_f64(buf, e.canon.b().imag());
            put_f64(buf, e.canon.c().real());
            put_f64(buf, e.canon.c().imag());
            put_f64(buf, e.canon.d().real());
            put_f64(buf, e.canon.d().imag());
        }
    }
    put_u64(buf, fnv1a(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw std::runtime_error("db save: cannot write " + path);
    }
}

CanonDb load_db(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("db load: cannot open " + path);
    }
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) {
        throw DbFormatError("db load: bad magic (not a GFDB file): " + path);
    }
    if (buf.size() < 4 + 2 + 2 + 8 + 8) {
        throw DbFormatError("db load: truncated file");
    }
    Reader r{buf.data(), buf.size() - 8, 4};
    const std::uint16_t version = r.u16();
    if (version != kVersion) {
        throw DbFormatError("db load: unsupported version " + std::to_string(version));
    }
    const std::uint64_t stored_sum =
        Reader{buf.data() + buf.size() - 8, 8}.u64();
    if (fnv1a(buf.data(), buf.size() - 8) != stored_sum) {
        throw DbFormatError("db load: checksum mismatch");
    }
    const int lprime = r.u16();
    if (lprime > CanonDb::kMaxLprime) {
        throw DbFormatError("db load: lprime " + std::to_string(lprime) +
                            " exceeds supported maximum");
    }
    const std::uint64_t count = r.u64();

    CanonDb db;
    db.lprime_ = lprime;
    db.by_length_.resize(static_cast<std::size_t>(lprime) + 1);
    int prev_len = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const int len = r.u8();
        if (len > lprime) {
            throw DbFormatError("db load: entry length above lprime");
        }
        if (len < prev_len) {
            throw DbFormatError("db load: entries out of order");
        }
        prev_len = len;
        GateSeq seq(static_cast<std::size_t>(len));
        int tc = 0;
        for (GateId& g : seq) {
            g = r.u8();
            if (g < 1 || g > kAlphabetSize) {
                throw DbFormatError("db load: invalid gate id");
            }
            tc += (g == kTId ? 1 : 0);
        }
        const double are = r.f64(), aim = r.f64(), bre = r.f64(), bim = r.f64();
        const double cre = r.f64(), cim = r.f64(), dre = r.f64(), dim = r.f64();
        db.by_length_[static_cast<std::size_t>(len)].push_back(
            CanonEntry{std::move(seq),
                       Unitary2::unchecked({are, aim}, {bre, bim}, {cre, cim}, {dre, dim}),
                       tc});
    }
    if (r.off != r.n) {
        throw DbFormatError("db load: trailing bytes after last entry");
    }
    db.rebuild_keys(); // also rejects out-of-order entries within a length
    return db;
}

} // namespace ftsynth
