#include "ftsynth/bench.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "ftsynth/gateset.hpp"
#include "ftsynth/rng.hpp"

namespace ftsynth {

Unitary2 phase_gate(double phi) {
    return Unitary2::unchecked(1.0, 0.0, 0.0, std::polar(1.0, phi));
}

Unitary2 phase_gate_pow2(int d) {
    if (d < 0 || d > 60) {
        throw std::invalid_argument("phase_gate_pow2: d must be in [0, 60]");
    }
    return phase_gate(std::ldexp(std::numbers::pi, -d));
}

Unitary2 sample_random_target(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 rng = SplitMix64::for_stream(seed, index);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double alpha = rng.next_double() * two_pi;
    const double beta = rng.next_double() * two_pi;
    const double theta = rng.next_double() * two_pi;
    return from_euler(alpha, beta, theta);
}

std::vector<FixtureCheck> verify_fixtures() {
    const Unitary2 r128 = phase_gate_pow2(7);
    std::vector<FixtureCheck> checks;
    const struct {
        const char* name;
        const GateSeq& seq;
        double published;
    } cases[] = {
        {"U31", fixture_u31(), 8.1e-3},
        {"U46", fixture_u46(), 7.5e-4},
    };
    for (const auto& c : cases) {
        const Distance d = distance(r128, evaluate(c.seq));
        checks.push_back(FixtureCheck{c.name, c.seq.size(), t_count(c.seq), d,
                                      c.published,
                                      std::abs(d - c.published) / c.published});
    }
    return checks;
}

ScalingFit fit_scaling_law(std::span<const double> mean_by_l, int l_lo, int l_hi) {
    if (l_lo < 0 || l_hi < l_lo || static_cast<std::size_t>(l_hi) >= mean_by_l.size()) {
        throw std::invalid_argument("fit_scaling_law: bad range");
    }
    ScalingFit fit;
    fit.l_lo = l_lo;
    fit.l_hi = l_hi;
    for (int l = l_lo; l <= l_hi; ++l) {
        if (!(mean_by_l[static_cast<std::size_t>(l)] > 0.0)) {
            fit.l_hi = l - 1;
            fit.truncated = true;
            break;
        }
    }
    const int n = fit.l_hi - fit.l_lo + 1;
    if (n < 2) {
        throw std::invalid_argument(
            "fit_scaling_law: fewer than two usable points in range");
    }
    double sx = 0.0, sy = 0.0;
    for (int l = fit.l_lo; l <= fit.l_hi; ++l) {
        sx += l;
        sy += std::log10(mean_by_l[static_cast<std::size_t>(l)]);
    }
    const double xbar = sx / n;
    const double ybar = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (int l = fit.l_lo; l <= fit.l_hi; ++l) {
        const double dx = l - xbar;
        const double dy = std::log10(mean_by_l[static_cast<std::size_t>(l)]) - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    fit.b = sxy / sxx;
    const double intercept = ybar - fit.b * xbar;
    fit.a = std::pow(10.0, intercept);
    double ss = 0.0;
    for (int l = fit.l_lo; l <= fit.l_hi; ++l) {
        const double y = std::log10(mean_by_l[static_cast<std::size_t>(l)]);
        const double r = y - (intercept + fit.b * l);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

ScalingResult scaling_experiment(std::uint64_t seed, int targets, int lmax,
                                 const CanonDb& db, int fit_lo, int fit_hi,
                                 const SearchOptions& opts) {
    if (targets < 1) {
        throw std::invalid_argument("scaling_experiment: need at least one target");
    }
    ScalingResult out;
    out.profiles.reserve(static_cast<std::size_t>(targets));
    out.mean_by_l.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
    for (int i = 0; i < targets; ++i) {
        const Unitary2 target = sample_random_target(seed, static_cast<std::uint64_t>(i));
        out.profiles.push_back(search_profile(target, lmax, db, opts));
        for (int l = 0; l <= lmax; ++l) {
            out.mean_by_l[static_cast<std::size_t>(l)] +=
                out.profiles.back()[static_cast<std::size_t>(l)].best_dist;
        }
    }
    for (double& m : out.mean_by_l) {
        m /= targets;
    }
    out.fit.sample_count = targets;
    ScalingFit fit = fit_scaling_law(out.mean_by_l, fit_lo, fit_hi);
    fit.sample_count = targets;
    out.fit = fit;
    return out;
}

std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_profile_csv(std::ostream& out, const std::string& config_echo,
                       std::span<const std::string> target_labels,
                       std::span<const std::vector<SearchResult>> profiles,
                       const ScalingFit* fit) {
    if (target_labels.size() != profiles.size()) {
        throw std::invalid_argument("write_profile_csv: labels/profiles size mismatch");
    }
    out << config_echo;
    out << "target,l,dist,t_count,seq\n";
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t l = 0; l < profiles[i].size(); ++l) {
            const SearchResult& r = profiles[i][l];
            out << target_labels[i] << ',' << l << ',' << fmt_g17(r.best_dist) << ','
                << r.t_count << ',' << format_seq(r.best_seq) << '\n';
        }
    }
    if (fit) {
        out << "# fit {\"a\":" << fmt_g17(fit->a) << ",\"b\":" << fmt_g17(fit->b)
            << ",\"l_lo\":" << fit->l_lo << ",\"l_hi\":" << fit->l_hi
            << ",\"samples\":" << fit->sample_count
            << ",\"residual\":" << fmt_g17(fit->residual)
            << ",\"truncated\":" << (fit->truncated ? "true" : "false") << "}\n";
    }
}

} // namespace ftsynth
