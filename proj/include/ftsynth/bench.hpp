#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ftsynth/canondb.hpp"
#include "ftsynth/search.hpp"
#include "ftsynth/unitary.hpp"

namespace ftsynth {

/// diag(1, e^{i phi}).
Unitary2 phase_gate(double phi);

/// diag(1, e^{i pi/2^d}), the rotation family of factoring circuits.
/// d must lie in [0, 60].
Unitary2 phase_gate_pow2(int d);

/// Target with Euler angles alpha, beta, theta drawn uniformly from
/// [0, 2pi). Stream-split so target `index` under a given seed is the same
/// no matter how many targets are drawn or in what order.
Unitary2 sample_random_target(std::uint64_t seed, std::uint64_t index);

struct FixtureCheck {
    std::string name;
    std::size_t length;
    int t_count;
    Distance dist;      // distance to diag(1, e^{i pi/128})
    Distance published; // the value reported for this sequence
    double rel_err;     // |dist - published| / published
};

/// Evaluates the two published approximations of the 128th phase gate
/// (31 and 46 gates) against their reported distances.
std::vector<FixtureCheck> verify_fixtures();

struct ScalingFit {
    double a = 0.0; // delta(l) ~ a * 10^(b l)
    double b = 0.0;
    int l_lo = 0; // inclusive range actually used
    int l_hi = 0;
    int sample_count = 0;
    double residual = 0.0;   // rms residual of log10(mean) around the fit
    bool truncated = false;  // range was cut before a zero/negative mean
};

/// Least-squares fit of log10(mean_by_l[l]) against l over [l_lo, l_hi].
/// A zero or negative mean inside the range truncates it just before that
/// point. Throws std::invalid_argument when the range is malformed or
/// fewer than two usable points remain.
ScalingFit fit_scaling_law(std::span<const double> mean_by_l, int l_lo, int l_hi);

struct ScalingResult {
    std::vector<std::vector<SearchResult>> profiles; // [target][length cap]
    std::vector<double> mean_by_l; // mean best distance at each length cap
    ScalingFit fit;
};

/// Draws `targets` random unitaries from `seed`, searches each one to lmax,
/// averages the per-length best distances over targets, and fits the
/// convergence law over [fit_lo, fit_hi].
ScalingResult scaling_experiment(std::uint64_t seed, int targets, int lmax,
                                 const CanonDb& db, int fit_lo, int fit_hi,
                                 const SearchOptions& opts = {});

/// %.17g rendering, used for every float that reaches a CSV so reruns are
/// byte-identical.
std::string fmt_g17(double x);

/// CSV with rows target,l,dist,t_count,seq. `config_echo` is written first,
/// verbatim; callers pass '#'-prefixed lines and keep timestamps out of it.
/// When `fit` is set a trailing '# fit {...}' JSON line is appended.
void write_profile_csv(std::ostream& out, const std::string& config_echo,
                       std::span<const std::string> target_labels,
                       std::span<const std::vector<SearchResult>> profiles,
                       const ScalingFit* fit);

} // namespace ftsynth
