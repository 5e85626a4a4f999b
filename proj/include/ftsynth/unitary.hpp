#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ftsynth {

using cplx = std::complex<double>;

/// Operator distance in [0,1]; zero iff the operands agree up to a global phase.
using Distance = double;

/// Two unitaries are treated as the same operator when their distance is
/// below this. The metric square-roots a cancellation-prone quantity, so
/// equal operators computed along different multiplication orders can land
/// anywhere up to ~1e-7; distinct operators reachable at the sequence
/// lengths we store stay farther apart than 1e-3. 1e-6 sits well clear of
/// both.
inline constexpr double kUniquenessEps = 1e-6;

/// Grid width used by hash_key quantization.
inline constexpr double kHashGrid = 1e-6;

/// Features this close to a grid-cell edge also probe the adjacent cell.
inline constexpr double kHashEdge = 1e-8;

/// A single-qubit gate: a 2x2 complex matrix [[a,b],[c,d]], compared modulo
/// global phase everywhere in this library. Immutable after construction;
/// safe to share across threads.
class Unitary2 {
  public:
    /// Checked constructor: rejects matrices with U†U != I beyond `tol`
    /// entrywise or | |det|-1 | > 1e-9. Throws std::invalid_argument.
    static Unitary2 from_entries(cplx a, cplx b, cplx c, cplx d, double tol = 1e-12);

    /// Unchecked constructor for internal products of already-valid gates.
    /// Caller guarantees unitarity (up to accumulated rounding).
    static Unitary2 unchecked(cplx a, cplx b, cplx c, cplx d) {
        return Unitary2(a, b, c, d);
    }

    static Unitary2 identity() { return Unitary2(1.0, 0.0, 0.0, 1.0); }

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    cplx c() const { return c_; }
    cplx d() const { return d_; }

    Unitary2 dag() const {
        return Unitary2(std::conj(a_), std::conj(c_), std::conj(b_), std::conj(d_));
    }

    /// Matrix product; right factor applied first.
    friend Unitary2 operator*(const Unitary2& l, const Unitary2& r) {
        return Unitary2(l.a_ * r.a_ + l.b_ * r.c_, l.a_ * r.b_ + l.b_ * r.d_,
                        l.c_ * r.a_ + l.d_ * r.c_, l.c_ * r.b_ + l.d_ * r.d_);
    }

    /// Worst entrywise deviation of U†U from the identity.
    double unitarity_defect() const;

  private:
    Unitary2(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) {}

    cplx a_, b_, c_, d_;
};

/// tr(u† v), computed directly from entries without forming the product.
inline cplx trace_inner(const Unitary2& u, const Unitary2& v) {
    return std::conj(u.a()) * v.a() + std::conj(u.c()) * v.c() +
           std::conj(u.b()) * v.b() + std::conj(u.d()) * v.d();
}

/// Global-phase-invariant metric sqrt((2 - |tr(u†v)|)/2), clamped to [0,1].
Distance distance(const Unitary2& u, const Unitary2& v);

/// dist(u,w) <= dist(u,v) + dist(v,w) + 1e-12.
bool triangle_check(const Unitary2& u, const Unitary2& v, const Unitary2& w);

/// Removes the global phase: rescales so the first entry (row-major) with
/// modulus > 0.5 becomes real and positive. Every unitary 2x2 matrix has a
/// first-row entry with modulus >= 1/sqrt(2), so the pivot always exists;
/// the 0.5 threshold keeps the pivot choice away from near-zero entries.
Unitary2 phase_canonicalize(const Unitary2& u);

/// General single-qubit gate
///   [[ cos(t/2) e^{i(a+b)/2},  sin(t/2) e^{i(a-b)/2} ],
///    [ -sin(t/2) e^{i(-a+b)/2}, cos(t/2) e^{i(-a-b)/2} ]]
/// with the angles used as given (the matrix is 2pi-periodic in each angle
/// up to a global phase).
Unitary2 from_euler(double alpha, double beta, double theta);

/// Coarse bucket key over global-phase-invariant features (entry norms and
/// relative entry products), each quantized to a kHashGrid cell and mixed
/// into 64 bits. Operators within kUniquenessEps of each other land in the
/// same or an adjacent cell per feature, so lookups must probe the
/// hash_key_variants of the query and always confirm membership by an exact
/// distance test, never by key equality alone.
std::uint64_t hash_key(const Unitary2& u);

/// Clears `out`, then appends hash_key(u) plus the keys obtained by shifting
/// any feature within kHashEdge of a cell boundary to the adjacent cell.
void hash_key_variants(const Unitary2& u, std::vector<std::uint64_t>& out);

} // namespace ftsynth
