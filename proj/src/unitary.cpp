#include "ftsynth/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftsynth {

double Unitary2::unitarity_defect() const {
    const Unitary2 p = dag() * (*this);
    double defect = 0.0;
    defect = std::max(defect, std::abs(p.a() - cplx(1.0)));
    defect = std::max(defect, std::abs(p.b()));
    defect = std::max(defect, std::abs(p.c()));
    defect = std::max(defect, std::abs(p.d() - cplx(1.0)));
    return defect;
}

Unitary2 Unitary2::from_entries(cplx a, cplx b, cplx c, cplx d, double tol) {
    Unitary2 u(a, b, c, d);
    if (u.unitarity_defect() > tol) {
        throw std::invalid_argument("Unitary2: entries are not unitary (U†U != I)");
    }
    const double det_mod = std::abs(a * d - b * c);
    if (std::abs(det_mod - 1.0) > 1e-9) {
        throw std::invalid_argument("Unitary2: |det| != 1");
    }
    return u;
}

Distance distance(const Unitary2& u, const Unitary2& v) {
    const double t = std::abs(trace_inner(u, v));
    const double ratio = std::clamp((2.0 - t) / 2.0, 0.0, 1.0);
    return std::sqrt(ratio);
}

bool triangle_check(const Unitary2& u, const Unitary2& v, const Unitary2& w) {
    return distance(u, w) <= distance(u, v) + distance(v, w) + 1e-12;
}

Unitary2 phase_canonicalize(const Unitary2& u) {
    const cplx entries[4] = {u.a(), u.b(), u.c(), u.d()};
    for (const cplx& e : entries) {
        if (std::abs(e) > 0.5) {
            const cplx phase = std::conj(e) / std::abs(e);
            return Unitary2::unchecked(phase * u.a(), phase * u.b(),
                                       phase * u.c(), phase * u.d());
        }
    }
    // Unreachable for a unitary input: max(|a|,|b|) >= 1/sqrt(2).
    throw std::logic_error("phase_canonicalize: no pivot entry with modulus > 0.5");
}

Unitary2 from_euler(double alpha, double beta, double theta) {
    const double ch = std::cos(theta / 2.0);
    const double sh = std::sin(theta / 2.0);
    return Unitary2::unchecked(ch * std::polar(1.0, (alpha + beta) / 2.0),
                               sh * std::polar(1.0, (alpha - beta) / 2.0),
                               -sh * std::polar(1.0, (-alpha + beta) / 2.0),
                               ch * std::polar(1.0, (-alpha - beta) / 2.0));
}

namespace {

constexpr int kFeatureCount = 10;

// Global-phase-invariant coordinates: multiplying u by e^{i phi} leaves every
// feature unchanged exactly, so duplicate operators differ here only by
// accumulated rounding, far below kHashEdge.
void invariant_features(const Unitary2& u, double f[kFeatureCount]) {
    const cplx ab = u.a() * std::conj(u.b());
    const cplx ac = u.a() * std::conj(u.c());
    const cplx ad = u.a() * std::conj(u.d());
    const cplx bc = u.b() * std::conj(u.c());
    f[0] = std::norm(u.a());
    f[1] = std::norm(u.b());
    f[2] = ab.real();
    f[3] = ab.imag();
    f[4] = ac.real();
    f[5] = ac.imag();
    f[6] = ad.real();
    f[7] = ad.imag();
    f[8] = bc.real();
    f[9] = bc.imag();
}

std::int64_t grid_cell(double x) {
    return static_cast<std::int64_t>(std::floor(x / kHashGrid));
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kHashSeed = 0x243F6A8885A308D3ull;

} // namespace

std::uint64_t hash_key(const Unitary2& u) {
    double f[kFeatureCount];
    invariant_features(u, f);
    std::uint64_t h = kHashSeed;
    for (double x : f) {
        h = mix64(h ^ static_cast<std::uint64_t>(grid_cell(x)));
    }
    return h;
}

void hash_key_variants(const Unitary2& u, std::vector<std::uint64_t>& out) {
    out.clear();
    double f[kFeatureCount];
    invariant_features(u, f);
    std::int64_t cells[kFeatureCount][2];
    int cell_count[kFeatureCount];
    for (int i = 0; i < kFeatureCount; ++i) {
        const std::int64_t c = grid_cell(f[i]);
        cells[i][0] = c;
        cell_count[i] = 1;
        const double lo = static_cast<double>(c) * kHashGrid;
        if (f[i] - lo < kHashEdge) {
            cells[i][1] = c - 1;
            cell_count[i] = 2;
        } else if (lo + kHashGrid - f[i] < kHashEdge) {
            cells[i][1] = c + 1;
            cell_count[i] = 2;
        }
    }
    // Depth-first over the per-feature cell choices; the first path taken
    // (all primary cells) reproduces hash_key(u).
    struct Walker {
        const std::int64_t (*cells)[2];
        const int* cell_count;
        std::vector<std::uint64_t>* out;
        void walk(int i, std::uint64_t h) const {
            if (i == kFeatureCount) {
                out->push_back(h);
                return;
            }
            for (int k = 0; k < cell_count[i]; ++k) {
                walk(i + 1, mix64(h ^ static_cast<std::uint64_t>(cells[i][k])));
            }
        }
    };
    Walker{cells, cell_count, &out}.walk(0, kHashSeed);
}

} // namespace ftsynth
