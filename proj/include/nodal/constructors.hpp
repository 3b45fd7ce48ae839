#pragma once

// Ensembles with provable stable compact nodal domains.
//
// Three waves. For unit k1, k2, k3 write k3 = l k1 + m k2 with |l|, |m| <= 1
// (after relabeling). The period cell of a1 cos(k1.x) + a2 cos(k2.x) is
// bounded by the segments S1 = {k1.x = +-pi} and S2 = {k2.x = +-pi}; along
// them cos(k3.x) is close to cos(l pi) resp. cos(m pi) near the passages
// where the two-wave function almost vanishes. A third amplitude a3 of the
// right size and sign closes both passages, so the origin sits in a compact
// positive domain that survives every perturbation small against eps.
//
// Torus. If every wavevector lies on the integer circle |k|^2 = m, each term
// of phi_p(x) = sum a_i (cos(p k_i.x + t_i) + cos(p k^_i.x + t^_i)) is an
// eigenfunction of -Laplace with eigenvalue p^2 m on R^2 / (2 pi Z)^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodal/criteria.hpp"
#include "nodal/error.hpp"
#include "nodal/vec2.hpp"
#include "nodal/wave_model.hpp"

namespace nodal {

enum class lemma3_case { same_sign, opposite_sign };

inline const char* to_string(lemma3_case c)
{
    return c == lemma3_case::same_sign ? "SameSign" : "OppositeSign";
}

struct lemma3_window {
    double lambda_prime = 0.0;
    double mu_prime = 0.0;
    lemma3_case case_tag = lemma3_case::same_sign;
    double epsilon = 0.0;    // normalized gap (a1 - a2) / a1
    double a3_lo = 0.0;      // a3 / a1 must lie in (a3_lo, a3_hi)
    double a3_hi = 0.0;
    std::array<std::size_t, 3> vector_order{0, 1, 2}; // input index used as k1', k2', k3'
    std::array<vec2, 3> normalized{};                  // k1', k2', k3'

    double midpoint() const { return 0.5 * (a3_lo + a3_hi); }
    bool contains(double a3_over_a1) const { return a3_lo < a3_over_a1 && a3_over_a1 < a3_hi; }
};

inline constexpr double collinear_tolerance = 1e-12;

inline lemma3_window make_lemma3_window(vec2 k1, vec2 k2, vec2 k3, double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw error(errc::invalid_argument, "epsilon must be > 0");
    std::array<vec2, 3> k{k1, k2, k3};
    for (auto& v : k) {
        const double len = norm(v);
        if (!(len > 0.0) || !std::isfinite(len))
            throw error(errc::zero_wavevector, "lemma3_window needs nonzero finite vectors");
        v = v / len;
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (std::abs(cross(k[i], k[j])) <= collinear_tolerance)
                throw error(errc::collinear_vectors,
                            "k" + std::to_string(i + 1) + " and k" + std::to_string(j + 1) + " are collinear");

    // c0 k0 + c1 k1 + c2 k2 = 0
    const std::array<double, 3> c{cross(k[1], k[2]), cross(k[2], k[0]), cross(k[0], k[1])};
    std::size_t top = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (std::abs(c[i]) > std::abs(c[top]))
            top = i;
    std::array<std::size_t, 3> order{};
    std::size_t w = 0;
    for (std::size_t i = 0; i < 3; ++i)
        if (i != top)
            order[w++] = i;
    order[2] = top;

    lemma3_window out;
    out.epsilon = epsilon;
    double lp = -c[order[0]] / c[top];
    double mp = -c[order[1]] / c[top];
    if (std::abs(std::abs(lp) + std::abs(mp) - 1.0) <= 1e-12)
        throw error(errc::degenerate_case, "(|l'| - 1/2) = (1/2 - |m'|)");

    double cl = std::cos(lp * std::numbers::pi);
    double cm = std::cos(mp * std::numbers::pi);
    const bool same = (cl > 0.0 && cm > 0.0) || (cl < 0.0 && cm < 0.0);
    if (!same && std::abs(cl) > std::abs(cm)) {
        std::swap(order[0], order[1]);
        std::swap(lp, mp);
        std::swap(cl, cm);
    }
    out.lambda_prime = lp;
    out.mu_prime = mp;
    out.vector_order = order;
    for (std::size_t i = 0; i < 3; ++i)
        out.normalized[i] = k[order[i]];

    const double al = std::abs(cl), am = std::abs(cm);
    double lo, hi;
    if (same) {
        out.case_tag = lemma3_case::same_sign;
        // a3 cos(k3.x) must be negative at both passages
        const double s = cl > 0.0 ? -1.0 : 1.0;
        lo = s * 2.0 * epsilon / al;
        hi = s * (epsilon + 2.0 * epsilon / std::min(al, am));
    } else {
        out.case_tag = lemma3_case::opposite_sign;
        const double s = cm > 0.0 ? -1.0 : 1.0;
        lo = s * epsilon / (am / 3.0 + 2.0 * al / 3.0);
        hi = s * epsilon / (2.0 * am / 3.0 + al / 3.0);
    }
    out.a3_lo = std::min(lo, hi);
    out.a3_hi = std::max(lo, hi);
    return out;
}

/// a1 cos(k1'.x) + a2 cos(k2'.x) + a3 cos(k3'.x) with a2 = a1 (1 - eps) and
/// a3 = a1 * midpoint of the window, terms in normalized order.
inline wave_ensemble build_three_wave(vec2 k1, vec2 k2, vec2 k3, double epsilon, double a1)
{
    if (!(a1 > 0.0) || !std::isfinite(a1))
        throw error(errc::invalid_argument, "a1 must be > 0");
    const auto w = make_lemma3_window(k1, k2, k3, epsilon);
    return wave_ensemble({plane_wave_term(a1, w.normalized[0], 0.0),
                          plane_wave_term(a1 * (1.0 - epsilon), w.normalized[1], 0.0),
                          plane_wave_term(a1 * w.midpoint(), w.normalized[2], 0.0)});
}

/// Amplitude cap eps6 / (4N) for N extra waves appended to an ensemble with
/// an eps6-stable compact domain; +inf when there are no extras.
inline double pad_with_small_terms(const wave_ensemble& base, std::span<const vec2> extras, double eps6)
{
    (void)base;
    if (!(eps6 > 0.0))
        throw error(errc::invalid_argument, "stability margin must be > 0");
    if (extras.empty())
        return std::numeric_limits<double>::infinity();
    return eps6 / (4.0 * static_cast<double>(extras.size()));
}

// ---------------------------------------------------------------------------
// Lattice points on circles

using lattice_point = std::array<std::int64_t, 2>;

inline double lattice_angle(const lattice_point& p)
{
    return polar_angle({static_cast<double>(p[0]), static_cast<double>(p[1])});
}

inline void sort_by_angle(std::vector<lattice_point>& pts)
{
    std::sort(pts.begin(), pts.end(), [](const lattice_point& a, const lattice_point& b) {
        return lattice_angle(a) < lattice_angle(b);
    });
}

inline std::int64_t isqrt(std::int64_t m)
{
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m)));
    while (r * r > m)
        --r;
    while ((r + 1) * (r + 1) <= m)
        ++r;
    return r;
}

/// All (p, q) with p^2 + q^2 = m, sorted by angle.
inline std::vector<lattice_point> lattice_circle_points(std::int64_t m)
{
    if (m < 1)
        throw error(errc::invalid_argument, "m must be >= 1");
    const std::int64_t s = isqrt(m);
    std::vector<lattice_point> pts;
    for (std::int64_t p = -s; p <= s; ++p) {
        const std::int64_t rest = m - p * p;
        const std::int64_t q = isqrt(rest);
        if (q * q != rest)
            continue;
        pts.push_back({p, q});
        if (q != 0)
            pts.push_back({p, -q});
    }
    sort_by_angle(pts);
    return pts;
}

/// Every lattice point with squared norm in [1, m_max], grouped by norm.
class lattice_shells {
public:
    explicit lattice_shells(std::int64_t m_max) : offsets_(static_cast<std::size_t>(m_max) + 2, 0)
    {
        if (m_max < 1)
            throw error(errc::invalid_argument, "m_max must be >= 1");
        const std::int64_t s = isqrt(m_max);
        for (int pass = 0; pass < 2; ++pass) {
            if (pass == 1) {
                for (std::size_t i = 1; i < offsets_.size(); ++i)
                    offsets_[i] += offsets_[i - 1];
                points_.resize(offsets_.back());
                fill_ = std::vector<std::size_t>(offsets_.begin(), offsets_.end() - 1);
            }
            for (std::int64_t p = -s; p <= s; ++p) {
                for (std::int64_t q = -s; q <= s; ++q) {
                    const std::int64_t m = p * p + q * q;
                    if (m == 0 || m > m_max)
                        continue;
                    if (pass == 0)
                        ++offsets_[static_cast<std::size_t>(m) + 1];
                    else
                        points_[fill_[static_cast<std::size_t>(m)]++] = {p, q};
                }
            }
        }
        fill_.clear();
    }

    std::span<const lattice_point> shell(std::int64_t m) const
    {
        const auto b = offsets_[static_cast<std::size_t>(m)];
        const auto e = offsets_[static_cast<std::size_t>(m) + 1];
        return {points_.data() + b, e - b};
    }

    std::int64_t m_max() const { return static_cast<std::int64_t>(offsets_.size()) - 2; }

private:
    std::vector<std::size_t> offsets_;
    std::vector<lattice_point> points_;
    std::vector<std::size_t> fill_;
};

// ---------------------------------------------------------------------------
// Torus eigenfunctions

struct torus_mode {
    std::int64_t m = 0;
    std::vector<lattice_point> base_vectors; // k_i
    std::vector<lattice_point> hat_vectors;  // k^_i
    std::vector<double> amplitudes;
    std::vector<double> phases;
    std::vector<double> phases_hat;
    std::int64_t p = 1;
    double lambda_p = 0.0;

    /// Same mode at another scaling p.
    torus_mode at_scale(std::int64_t q) const
    {
        if (q < 1)
            throw error(errc::invalid_argument, "p must be >= 1");
        auto copy = *this;
        copy.p = q;
        copy.lambda_p = static_cast<double>(q) * std::sqrt(static_cast<double>(m));
        return copy;
    }

    wave_ensemble ensemble() const
    {
        std::vector<plane_wave_term> terms;
        const double s = static_cast<double>(p);
        for (std::size_t i = 0; i < base_vectors.size(); ++i) {
            const auto& k = base_vectors[i];
            const auto& kh = hat_vectors[i];
            terms.emplace_back(amplitudes[i], vec2{s * k[0], s * k[1]}, phases[i]);
            terms.emplace_back(amplitudes[i], vec2{s * kh[0], s * kh[1]}, phases_hat[i]);
        }
        return wave_ensemble(std::move(terms));
    }
};

inline torus_mode make_torus_mode(std::int64_t m, std::vector<lattice_point> base, std::vector<lattice_point> hat,
                                  std::vector<double> amplitudes, std::vector<double> phases,
                                  std::vector<double> phases_hat, std::int64_t p)
{
    const std::size_t n = base.size();
    if (hat.size() != n || amplitudes.size() != n || phases.size() != n || phases_hat.size() != n)
        throw error(errc::invalid_argument, "torus mode fields must have equal lengths");
    if (m < 1 || p < 1)
        throw error(errc::invalid_argument, "torus mode needs m >= 1 and p >= 1");
    for (const auto* list : {&base, &hat})
        for (const auto& k : *list)
            if (k[0] * k[0] + k[1] * k[1] != m)
                throw error(errc::invalid_argument, "wavevector off the circle |k|^2 = m");
    torus_mode t;
    t.m = m;
    t.base_vectors = std::move(base);
    t.hat_vectors = std::move(hat);
    t.amplitudes = std::move(amplitudes);
    t.phases = std::move(phases);
    t.phases_hat = std::move(phases_hat);
    return t.at_scale(p);
}

struct torus_search_step {
    std::int64_t m = 0;
    std::vector<int> relation; // empty when the family passed
};

struct torus_search_result {
    torus_mode mode;
    independence_verdict independence;
    std::vector<torus_search_step> trace; // circles rejected by a relation, then the accepted one
};

/// Smallest m <= m_max whose circle carries two lattice points within `eps`
/// radians of every target direction, with the 2n chosen vectors passing the
/// independence check at params.search_height.
inline torus_search_result torus_eigenfunction(std::span<const vec2> targets, double eps,
                                               std::span<const double> amplitudes,
                                               std::span<const double> phases,
                                               std::span<const double> phases_hat, std::int64_t p,
                                               std::int64_t m_max, const criterion_params& params)
{
    const std::size_t n = targets.size();
    if (n < 3)
        throw error(errc::invalid_argument, "need at least three target directions");
    if (amplitudes.size() != n || phases.size() != n || phases_hat.size() != n)
        throw error(errc::invalid_argument, "one amplitude and two phases per target");
    for (double a : amplitudes)
        if (a == 0.0)
            throw error(errc::invalid_argument, "amplitudes must be nonzero");
    if (!(eps > 0.0))
        throw error(errc::invalid_argument, "angular tolerance must be > 0");
    std::vector<double> angles;
    for (const auto& t : targets) {
        if (norm(t) == 0.0)
            throw error(errc::zero_wavevector, "target direction must be nonzero");
        angles.push_back(polar_angle(t));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = angular_distance(angles[i], angles[j]);
            if (d <= 1e-12 || std::abs(d - std::numbers::pi) <= 1e-12)
                throw error(errc::invalid_argument, "target directions must be distinct and non-antipodal");
        }

    const lattice_shells shells(m_max);
    torus_search_result out;
    std::vector<lattice_point> base(n), hat(n);
    std::vector<vec2> family(2 * n);
    for (std::int64_t m = 1; m <= m_max; ++m) {
        const auto shell = shells.shell(m);
        if (shell.size() < 2 * n)
            continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            // the two closest points to target i, ties by enumeration order
            std::size_t best[2] = {shell.size(), shell.size()};
            double dist[2] = {eps, eps};
            for (std::size_t j = 0; j < shell.size(); ++j) {
                const double d = angular_distance(lattice_angle(shell[j]), angles[i]);
                if (d < dist[0]) {
                    best[1] = best[0];
                    dist[1] = dist[0];
                    best[0] = j;
                    dist[0] = d;
                } else if (d < dist[1]) {
                    best[1] = j;
                    dist[1] = d;
                }
            }
            if (best[1] == shell.size()) {
                ok = false;
                break;
            }
            base[i] = shell[best[0]];
            hat[i] = shell[best[1]];
        }
        if (!ok)
            continue;
        for (std::size_t i = 0; i < n; ++i) {
            family[2 * i] = {static_cast<double>(base[i][0]), static_cast<double>(base[i][1])};
            family[2 * i + 1] = {static_cast<double>(hat[i][0]), static_cast<double>(hat[i][1])};
        }
        auto verdict = check_independence(family, params);
        if (!verdict.independent()) {
            out.trace.push_back({m, verdict.relation});
            continue;
        }
        out.trace.push_back({m, {}});
        out.independence = std::move(verdict);
        out.mode = make_torus_mode(m, base, hat, {amplitudes.begin(), amplitudes.end()},
                                   {phases.begin(), phases.end()}, {phases_hat.begin(), phases_hat.end()}, p);
        return out;
    }
    throw error(errc::no_circle_found, "no admissible circle with m <= " + std::to_string(m_max));
}

} // namespace nodal
