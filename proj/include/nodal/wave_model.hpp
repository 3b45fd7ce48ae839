#pragma once

// Finite sums of planar cosine waves
//
//     f(x) = sum_i a_i cos(k_i . x + theta_i)
//
// together with the global bounds every other module leans on:
// sup |f| <= sum |a_i| and sup |grad f| <= sum |a_i| |k_i|.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nodal/error.hpp"
#include "nodal/vec2.hpp"

namespace nodal {

/// Reduce an angle to [0, 2pi).
inline double reduce_phase(double theta)
{
    double r = std::fmod(theta, two_pi);
    if (r < 0.0)
        r += two_pi;
    if (r >= two_pi)
        r = 0.0;
    return r;
}

struct plane_wave_term {
    double amplitude{};
    vec2 wavevector{};
    double phase{};

    plane_wave_term() = default;

    plane_wave_term(double a, vec2 k, double theta)
        : amplitude(a), wavevector(k), phase(reduce_phase(theta))
    {
        if (!std::isfinite(a) || !is_finite(k) || !std::isfinite(theta))
            throw error(errc::invalid_argument, "plane wave term with non-finite field");
    }

    double value_at(vec2 x) const { return amplitude * std::cos(dot(wavevector, x) + phase); }
};

/// Immutable ordered collection of plane waves. Term order is part of the
/// identity: indices are shared with every criterion that reports on terms.
class wave_ensemble {
public:
    wave_ensemble() = default;

    explicit wave_ensemble(std::vector<plane_wave_term> terms) : terms_(std::move(terms))
    {
        for (const auto& t : terms_) {
            sup_bound_ += std::abs(t.amplitude);
            lipschitz_bound_ += std::abs(t.amplitude) * norm(t.wavevector);
        }
    }

    std::span<const plane_wave_term> terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const plane_wave_term& operator[](std::size_t i) const { return terms_[i]; }

    double sup_bound() const { return sup_bound_; }
    double lipschitz_bound() const { return lipschitz_bound_; }

    std::vector<vec2> wavevectors() const
    {
        std::vector<vec2> ks;
        ks.reserve(terms_.size());
        for (const auto& t : terms_)
            ks.push_back(t.wavevector);
        return ks;
    }

    std::vector<double> amplitudes() const
    {
        std::vector<double> as;
        as.reserve(terms_.size());
        for (const auto& t : terms_)
            as.push_back(t.amplitude);
        return as;
    }

    wave_ensemble with_term(const plane_wave_term& t) const
    {
        auto copy = terms_;
        copy.push_back(t);
        return wave_ensemble(std::move(copy));
    }

    /// All amplitudes multiplied by `s`.
    wave_ensemble scaled(double s) const
    {
        auto copy = terms_;
        for (auto& t : copy)
            t.amplitude *= s;
        return wave_ensemble(std::move(copy));
    }

private:
    std::vector<plane_wave_term> terms_;
    double sup_bound_ = 0.0;
    double lipschitz_bound_ = 0.0;
};

inline double evaluate(const wave_ensemble& e, vec2 x)
{
    double s = 0.0;
    for (const auto& t : e.terms())
        s += t.value_at(x);
    return s;
}

inline vec2 gradient(const wave_ensemble& e, vec2 x)
{
    vec2 g{};
    for (const auto& t : e.terms())
        g = g - (t.amplitude * std::sin(dot(t.wavevector, x) + t.phase)) * t.wavevector;
    return g;
}

/// y -> f(x0 + y), expressed by shifting every phase by k_i . x0.
inline wave_ensemble translate(const wave_ensemble& e, vec2 x0)
{
    std::vector<plane_wave_term> out;
    out.reserve(e.size());
    for (const auto& t : e.terms())
        out.emplace_back(t.amplitude, t.wavevector, t.phase + dot(t.wavevector, x0));
    return wave_ensemble(std::move(out));
}

// ---------------------------------------------------------------------------
// Spectral measure on the circle

struct direction_atom {
    vec2 direction{};
    double angle{};
    double mass{};
};

struct direction_measure {
    std::vector<direction_atom> atoms; // sorted by angle
    double total_mass = 0.0;

    std::size_t support_count() const
    {
        return static_cast<std::size_t>(std::count_if(
            atoms.begin(), atoms.end(), [](const direction_atom& a) { return a.mass > 0.0; }));
    }
};

constexpr double atom_merge_tolerance = 1e-9;

/// Symmetric atomic measure placing mass |a_i|^2 at +-k_i/|k_i|, normalized
/// by 2 sum |a_i|^2 so the total is one (unless every amplitude vanishes).
inline direction_measure spectral_measure(const wave_ensemble& e)
{
    std::vector<direction_atom> raw;
    raw.reserve(2 * e.size());
    double mass = 0.0;
    for (const auto& t : e.terms()) {
        const double len = norm(t.wavevector);
        if (len == 0.0)
            throw error(errc::zero_wavevector, "spectral measure needs nonzero wavevectors");
        const vec2 u = t.wavevector / len;
        const double m = t.amplitude * t.amplitude;
        raw.push_back({u, polar_angle(u), m});
        raw.push_back({-u, polar_angle(-u), m});
        mass += 2.0 * m;
    }
    std::sort(raw.begin(), raw.end(),
              [](const direction_atom& a, const direction_atom& b) { return a.angle < b.angle; });

    direction_measure out;
    for (const auto& a : raw) {
        if (!out.atoms.empty() && a.angle - out.atoms.back().angle <= atom_merge_tolerance)
            out.atoms.back().mass += a.mass;
        else
            out.atoms.push_back(a);
    }
    // angles just below 2pi coincide with angles just above 0
    if (out.atoms.size() > 1
        && out.atoms.front().angle + two_pi - out.atoms.back().angle <= atom_merge_tolerance) {
        out.atoms.front().mass += out.atoms.back().mass;
        out.atoms.pop_back();
    }
    if (mass > 0.0) {
        for (auto& a : out.atoms)
            a.mass /= mass;
    }
    for (const auto& a : out.atoms)
        out.total_mass += a.mass;
    return out;
}

// ---------------------------------------------------------------------------
// Sum-to-product collapse of an equal-amplitude pair

struct collapsed_pair {
    plane_wave_term term;
    /// sup over |y| <= R of |pair(y) - term(y)|.
    double error_bound{};
};

/// a cos(k_a.y + t_a) + a cos(k_b.y + t_b) ~ 2a cos((t_a - t_b)/2) cos(kbar.y + (t_a + t_b)/2)
/// with kbar = (k_a + k_b)/2. The remainder is bounded by a |k_a - k_b| R on |y| <= R.
inline collapsed_pair pair_collapse(const plane_wave_term& lhs, const plane_wave_term& rhs,
                                    double radius)
{
    if (std::abs(lhs.amplitude - rhs.amplitude) > 1e-12)
        throw error(errc::amplitude_mismatch, "pair_collapse requires equal amplitudes");
    if (!(radius >= 0.0))
        throw error(errc::invalid_argument, "pair_collapse radius must be >= 0");
    const double a = lhs.amplitude;
    const double half_diff = 0.5 * (lhs.phase - rhs.phase);
    collapsed_pair out{
        plane_wave_term(2.0 * a * std::cos(half_diff), 0.5 * (lhs.wavevector + rhs.wavevector),
                        0.5 * (lhs.phase + rhs.phase)),
        std::abs(a) * norm(lhs.wavevector - rhs.wavevector) * radius};
    return out;
}

} // namespace nodal
