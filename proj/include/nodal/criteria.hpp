#pragma once

// Hypothesis checkers for the lower bound N_{f,eps}(r) >= c r^2 on sums of
// plane waves:
//
//   * (eps, T)-independence of the wavevectors, decided through its
//     Diophantine form: no integer vector p with |p|_inf <= H may satisfy
//     sum_i p_i (k_i . u) = 0 for the chosen direction u;
//   * eps-non-domination of the amplitudes inside each direction bucket
//     (some +-1 signing has |sum u_i a_i| <= eps);
//   * the pairing decomposition used to turn a near-balanced bipartition
//     into equal-amplitude pairs, one piece per index at most.
//
// All searches are exhaustive up to the requested height / size and their
// tie-breaking is fixed, so results are reproducible bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/error.hpp"
#include "nodal/vec2.hpp"
#include "nodal/wave_model.hpp"

namespace nodal {

struct criterion_params {
    double eps0 = 0.1;   // independence tolerance (torus mesh is eps0/2)
    double eps1 = 0.5;   // direction bucket diameter, radians
    double eps2 = 0.01;  // non-domination tolerance
    double eps3 = 0.01;  // stability margin used when counting
    int search_height = 50;
    double orbit_budget = 1000.0;
    int witness_candidates = 16;

    void validate() const
    {
        if (!(eps0 > 0) || !(eps1 > 0) || !(eps2 > 0) || !(eps3 > 0))
            throw error(errc::invalid_argument, "all tolerances must be > 0");
        if (search_height < 1)
            throw error(errc::invalid_argument, "search height must be >= 1");
        if (!(orbit_budget > 0))
            throw error(errc::invalid_argument, "orbit budget must be > 0");
        if (witness_candidates < 1)
            throw error(errc::invalid_argument, "need at least one witness candidate");
    }
};

// ---------------------------------------------------------------------------
// Integer enumeration helpers

namespace detail {

/// Upper bound on the size of one half of a meet-in-the-middle enumeration.
inline constexpr std::uint64_t max_half_enumeration = std::uint64_t{1} << 24;

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exp)
{
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > max_half_enumeration / base + 1)
            return max_half_enumeration + 1;
        r *= base;
    }
    return r;
}

/// Integer vector for mixed-radix index `idx`; the first coordinate varies fastest.
inline void decode_digits(std::uint64_t idx, int height, std::size_t count, int* out)
{
    const std::uint64_t radix = 2 * static_cast<std::uint64_t>(height) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = static_cast<int>(idx % radix) - height;
        idx /= radix;
    }
}

/// Sums sum_i p_i c_i over all p in [-H, H]^count, indexed as in decode_digits.
inline std::vector<double> half_sums(std::span<const double> coeffs, int height)
{
    std::vector<double> sums{0.0};
    for (double c : coeffs) {
        std::vector<double> next;
        next.reserve(sums.size() * (2 * height + 1));
        for (int q = -height; q <= height; ++q)
            for (double s : sums)
                next.push_back(s + q * c);
        sums = std::move(next);
    }
    return sums;
}

/// Index of the zero vector in the enumeration order of half_sums.
inline std::uint64_t zero_index(int height, std::size_t count)
{
    const std::uint64_t radix = 2 * static_cast<std::uint64_t>(height) + 1;
    std::uint64_t idx = 0, scale = 1;
    for (std::size_t i = 0; i < count; ++i) {
        idx += static_cast<std::uint64_t>(height) * scale;
        scale *= radix;
    }
    return idx;
}

inline void normalize_sign(std::vector<int>& p)
{
    for (int v : p) {
        if (v == 0)
            continue;
        if (v < 0)
            for (int& w : p)
                w = -w;
        return;
    }
}

/// Preference order among relations: smaller height, then smaller l1 norm,
/// then lexicographic.
inline bool relation_less(const std::vector<int>& a, const std::vector<int>& b)
{
    auto key = [](const std::vector<int>& p) {
        int mx = 0, l1 = 0;
        for (int v : p) {
            mx = std::max(mx, std::abs(v));
            l1 += std::abs(v);
        }
        return std::pair{mx, l1};
    };
    const auto ka = key(a), kb = key(b);
    if (ka != kb)
        return ka < kb;
    return a < b;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Independence

enum class independence_outcome { independent_up_to_height, relation_found };

constexpr double relation_tolerance = 1e-9;

struct independence_verdict {
    independence_outcome outcome = independence_outcome::independent_up_to_height;
    int height = 0;
    // independent case
    vec2 witness{};
    double witness_gap = 0.0; // min over enumerated p != 0 of |sum p_i k_i . u|
    std::optional<double> empirical_T;
    // relation case
    std::vector<int> relation;
    vec2 residual{};

    bool independent() const { return outcome == independence_outcome::independent_up_to_height; }
};

/// Smallest-height integer relation sum p_i k_i ~ 0 with |p|_inf <= height, if any.
inline std::optional<std::vector<int>> find_integer_relation(std::span<const vec2> ks, int height)
{
    const std::size_t n = ks.size();
    const std::size_t nl = n / 2;
    const std::size_t nr = n - nl;
    const std::uint64_t radix = 2 * static_cast<std::uint64_t>(height) + 1;
    if (detail::checked_power(radix, nr) > detail::max_half_enumeration)
        throw error(errc::search_too_large, "relation search exceeds enumeration budget; lower the height");

    std::vector<double> lx, ly, rx, ry;
    {
        std::vector<double> cx, cy;
        for (std::size_t i = 0; i < nl; ++i) {
            cx.push_back(ks[i].x);
            cy.push_back(ks[i].y);
        }
        lx = detail::half_sums(cx, height);
        ly = detail::half_sums(cy, height);
        cx.clear();
        cy.clear();
        for (std::size_t i = nl; i < n; ++i) {
            cx.push_back(ks[i].x);
            cy.push_back(ks[i].y);
        }
        rx = detail::half_sums(cx, height);
        ry = detail::half_sums(cy, height);
    }

    struct keyed {
        std::int64_t kx, ky;
        std::uint32_t idx;
    };
    const double cell = relation_tolerance;
    auto key_of = [cell](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
    std::vector<keyed> left(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i)
        left[i] = {key_of(lx[i]), key_of(ly[i]), static_cast<std::uint32_t>(i)};
    auto key_cmp = [](const keyed& a, const keyed& b) {
        return a.kx != b.kx ? a.kx < b.kx : (a.ky != b.ky ? a.ky < b.ky : a.idx < b.idx);
    };
    std::sort(left.begin(), left.end(), key_cmp);

    const std::uint64_t lzero = detail::zero_index(height, nl);
    const std::uint64_t rzero = detail::zero_index(height, nr);
    std::optional<std::vector<int>> best;
    std::vector<int> p(n);
    for (std::size_t j = 0; j < rx.size(); ++j) {
        const std::int64_t tx = key_of(-rx[j]), ty = key_of(-ry[j]);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const keyed probe{tx + dx, ty + dy, 0};
                auto it = std::lower_bound(left.begin(), left.end(), probe, key_cmp);
                for (; it != left.end() && it->kx == probe.kx && it->ky == probe.ky; ++it) {
                    if (it->idx == lzero && j == rzero)
                        continue;
                    if (std::hypot(lx[it->idx] + rx[j], ly[it->idx] + ry[j]) > relation_tolerance)
                        continue;
                    detail::decode_digits(it->idx, height, nl, p.data());
                    detail::decode_digits(j, height, nr, p.data() + nl);
                    auto cand = p;
                    detail::normalize_sign(cand);
                    if (!best || detail::relation_less(cand, *best))
                        best = cand;
                }
            }
        }
    }
    return best;
}

/// min over p != 0 with |p|_inf <= height of |sum p_i c_i|.
inline double min_linear_form(std::span<const double> c, int height)
{
    const std::size_t n = c.size();
    const std::size_t nl = n / 2;
    const std::size_t nr = n - nl;
    auto left = detail::half_sums(c.subspan(0, nl), height);
    auto right = detail::half_sums(c.subspan(nl), height);
    const std::uint64_t lzero = detail::zero_index(height, nl);
    const std::uint64_t rzero = detail::zero_index(height, nr);

    std::vector<std::uint32_t> order(left.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return left[a] < left[b]; });
    std::vector<double> sorted(left.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        sorted[i] = left[order[i]];

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < right.size(); ++j) {
        const double target = -right[j];
        const auto pos = static_cast<std::ptrdiff_t>(
            std::lower_bound(sorted.begin(), sorted.end(), target) - sorted.begin());
        // the zero/zero pair is skipped, so look two slots to each side
        for (std::ptrdiff_t q = pos - 2; q <= pos + 1; ++q) {
            if (q < 0 || q >= static_cast<std::ptrdiff_t>(sorted.size()))
                continue;
            if (order[q] == lzero && j == rzero)
                continue;
            best = std::min(best, std::abs(sorted[q] + right[j]));
        }
    }
    return best;
}

/// First time (max over a few starting points) at which the linear flow
/// theta + t*omega mod 1 has visited every cell of a grid of mesh `mesh` on
/// the n-torus, n <= 3. Empty if some start does not cover within `budget`.
inline std::optional<double> torus_covering_time(std::span<const double> omega, double mesh,
                                                 double budget)
{
    const std::size_t n = omega.size();
    if (n == 0 || n > 3)
        return std::nullopt;
    const std::size_t cells = static_cast<std::size_t>(std::ceil(1.0 / mesh));
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= cells;
    double speed = 0.0;
    for (double w : omega) {
        if (w == 0.0)
            return std::nullopt;
        speed = std::max(speed, std::abs(w));
    }
    const double dt = mesh / (4.0 * speed);
    if (budget / dt > 1e9)
        throw error(errc::search_too_large, "orbit budget too large for the covering simulation");

    double worst = 0.0;
    for (int start = 0; start < 4; ++start) {
        const double offset = 0.25 * start;
        std::vector<char> seen(total, 0);
        std::size_t visited = 0;
        bool covered = false;
        for (std::uint64_t step = 0;; ++step) {
            const double t = static_cast<double>(step) * dt;
            if (t > budget)
                break;
            std::size_t idx = 0, scale = 1;
            for (std::size_t i = 0; i < n; ++i) {
                double v = offset + t * omega[i];
                v -= std::floor(v);
                auto c = static_cast<std::size_t>(v * static_cast<double>(cells));
                if (c >= cells)
                    c = cells - 1;
                idx += c * scale;
                scale *= cells;
            }
            if (!seen[idx]) {
                seen[idx] = 1;
                if (++visited == total) {
                    worst = std::max(worst, t);
                    covered = true;
                    break;
                }
            }
        }
        if (!covered)
            return std::nullopt;
    }
    return worst;
}

inline independence_verdict check_independence(std::span<const vec2> ks, const criterion_params& params)
{
    params.validate();
    if (ks.empty())
        throw error(errc::empty_input, "independence check needs at least one wavevector");
    for (const auto& k : ks)
        if (norm(k) == 0.0)
            throw error(errc::zero_wavevector, "independence check got a zero wavevector");

    independence_verdict v;
    v.height = params.search_height;
    if (auto rel = find_integer_relation(ks, params.search_height)) {
        v.outcome = independence_outcome::relation_found;
        v.relation = *rel;
        for (std::size_t i = 0; i < ks.size(); ++i)
            v.residual = v.residual + static_cast<double>(v.relation[i]) * ks[i];
        return v;
    }

    // Witness direction: the candidate maximizing the smallest |v_p . u|.
    // Candidates cover the half circle at a golden-ratio offset so that no
    // rational-looking direction is ever tried.
    const int count = params.witness_candidates;
    const double offset = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<double> c(ks.size());
    v.witness_gap = -1.0;
    for (int j = 0; j < count; ++j) {
        const vec2 u = unit_from_angle(std::numbers::pi * (j + offset) / count);
        for (std::size_t i = 0; i < ks.size(); ++i)
            c[i] = dot(ks[i], u);
        const double gap = min_linear_form(c, params.search_height);
        if (gap > v.witness_gap) {
            v.witness_gap = gap;
            v.witness = u;
        }
    }
    if (ks.size() <= 3) {
        for (std::size_t i = 0; i < ks.size(); ++i)
            c[i] = dot(ks[i], v.witness);
        v.empirical_T = torus_covering_time(std::span<const double>(c).first(ks.size()),
                                            0.5 * params.eps0, params.orbit_budget);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Non-domination and balanced bipartition

struct domination_verdict {
    bool non_dominated = false;
    std::vector<int> signs;  // +1 / -1 per amplitude, first entry +1
    double residual = 0.0;   // |sum signs_i a_i|, summed in index order
};

inline constexpr std::size_t max_domination_terms = 40;

namespace detail {

inline double signed_sum(std::span<const double> a, const std::vector<int>& u)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += u[i] * a[i];
    return s;
}

/// +1 sorts before -1.
inline bool signs_less(const std::vector<int>& a, const std::vector<int>& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            return a[i] > b[i];
    return false;
}

} // namespace detail

/// Exact minimum of |sum u_i a_i| over u in {-1,+1}^n by meet in the middle.
inline domination_verdict check_non_domination(std::span<const double> a, double eps2)
{
    const std::size_t n = a.size();
    if (n == 0)
        throw error(errc::empty_input, "non-domination check needs at least one amplitude");
    if (n > max_domination_terms)
        throw error(errc::too_many_terms, "non-domination search is limited to 40 terms");
    for (double x : a)
        if (!std::isfinite(x))
            throw error(errc::invalid_argument, "non-finite amplitude");

    // u_0 = +1 is fixed: the problem is symmetric under a global flip.
    const std::size_t nl = (n + 1) / 2;
    const std::size_t nr = n - nl;
    const std::size_t free_left = nl - 1;
    std::vector<double> left(std::size_t{1} << free_left);
    for (std::size_t m = 0; m < left.size(); ++m) {
        double s = a[0];
        for (std::size_t i = 1; i < nl; ++i)
            s += ((m >> (i - 1)) & 1u) ? -a[i] : a[i];
        left[m] = s;
    }
    std::vector<double> right(std::size_t{1} << nr);
    for (std::size_t m = 0; m < right.size(); ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < nr; ++i)
            s += ((m >> i) & 1u) ? -a[nl + i] : a[nl + i];
        right[m] = s;
    }
    std::vector<std::uint32_t> order(left.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return left[x] != left[y] ? left[x] < left[y] : x < y;
    });
    std::vector<double> sorted(left.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        sorted[i] = left[order[i]];

    double best = std::numeric_limits<double>::infinity();
    for (double r : right) {
        const auto pos = std::lower_bound(sorted.begin(), sorted.end(), -r) - sorted.begin();
        for (auto q = pos - 1; q <= pos; ++q)
            if (q >= 0 && q < static_cast<std::ptrdiff_t>(sorted.size()))
                best = std::min(best, std::abs(sorted[q] + r));
    }

    // Half sums round differently from the in-order sum, so every pairing
    // within a small slack of the optimum is re-summed in index order.
    double scale = 0.0;
    for (double x : a)
        scale += std::abs(x);
    const double slack = 1e-9 * std::max(scale, 1e-300);
    constexpr std::size_t max_candidates = std::size_t{1} << 16;

    domination_verdict out;
    out.residual = std::numeric_limits<double>::infinity();
    std::vector<int> u(n);
    std::size_t examined = 0;
    for (std::size_t mr = 0; mr < right.size() && examined < max_candidates; ++mr) {
        const double r = right[mr];
        auto it = std::lower_bound(sorted.begin(), sorted.end(), -r - best - slack);
        for (; it != sorted.end() && *it <= -r + best + slack && examined < max_candidates; ++it) {
            const std::uint32_t ml = order[static_cast<std::size_t>(it - sorted.begin())];
            u[0] = 1;
            for (std::size_t i = 1; i < nl; ++i)
                u[i] = ((ml >> (i - 1)) & 1u) ? -1 : 1;
            for (std::size_t i = 0; i < nr; ++i)
                u[nl + i] = ((mr >> i) & 1u) ? -1 : 1;
            const double res = std::abs(detail::signed_sum(a, u));
            ++examined;
            if (res < out.residual || (res == out.residual && detail::signs_less(u, out.signs))) {
                out.residual = res;
                out.signs = u;
            }
        }
    }
    out.non_dominated = out.residual <= eps2;
    return out;
}

struct balanced_partition {
    std::vector<std::size_t> heavy;  // J
    std::vector<std::size_t> light;  // J'
    double residual = 0.0;           // sum_J a - sum_J' a >= 0
};

inline balanced_partition partition_balance(std::span<const double> a)
{
    for (double x : a)
        if (!(x > 0.0))
            throw error(errc::invalid_argument, "partition_balance needs positive amplitudes");
    const auto v = check_non_domination(a, 0.0);
    const bool plus_heavy = detail::signed_sum(a, v.signs) >= 0.0;
    balanced_partition out;
    for (std::size_t i = 0; i < a.size(); ++i)
        ((v.signs[i] > 0) == plus_heavy ? out.heavy : out.light).push_back(i);
    out.residual = v.residual;
    return out;
}

// ---------------------------------------------------------------------------
// Pairing decomposition

struct piece_ref {
    std::size_t index = 0; // amplitude index
    std::size_t piece = 0; // position in weights[index]
};

struct piece_pair {
    piece_ref heavy;  // piece on the J side
    piece_ref light;  // matched piece on the J' side
    double residual = 0.0; // t a (J side) - t' a' (J' side)
};

struct pairing_decomposition {
    std::vector<std::vector<double>> weights; // weights[i] = t_1^i, ..., t_{p_i}^i
    std::vector<piece_pair> pairs;            // the bijection, with residuals
    double bucket_residual = 0.0;             // sum_J a - sum_J' a

    std::size_t piece_count() const { return pairs.size(); }
};

/// Split both sides of sum_J a = sum_J' a + r into matched pieces.
///
/// Repeatedly takes the smallest remaining amplitude (lowest index on ties)
/// and matches it in full against a slice of the largest remaining amplitude
/// on the opposite side. Once one side is down to a single element, that
/// element is shared among the other side's leftovers proportionally, which
/// is where the whole residual r ends up.
inline pairing_decomposition decompose_pairing(std::span<const double> a,
                                               std::span<const std::size_t> heavy,
                                               std::span<const std::size_t> light)
{
    if (heavy.empty() || light.empty())
        throw error(errc::empty_side, "both sides of the bipartition must be nonempty");
    const std::size_t n = a.size();
    std::vector<int> side(n, 0);
    for (std::size_t i : heavy) {
        if (i >= n || side[i] != 0)
            throw error(errc::invalid_argument, "bipartition indices must be distinct and in range");
        side[i] = 1;
    }
    for (std::size_t i : light) {
        if (i >= n || side[i] != 0)
            throw error(errc::invalid_argument, "bipartition indices must be distinct and in range");
        side[i] = -1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (side[i] == 0)
            throw error(errc::invalid_argument, "bipartition must cover every index");
        if (!(a[i] > 0.0))
            throw error(errc::invalid_argument, "pairing decomposition needs positive amplitudes");
    }

    pairing_decomposition out;
    out.weights.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        out.bucket_residual += side[i] * a[i];

    std::vector<double> rem(a.begin(), a.end());
    std::vector<char> active(n, 1);
    auto members = [&](int s) {
        std::vector<std::size_t> m;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] && side[i] == s)
                m.push_back(i);
        return m;
    };
    auto add_piece = [&](std::size_t i, double amount) {
        out.weights[i].push_back(amount / a[i]);
        return piece_ref{i, out.weights[i].size() - 1};
    };
    auto add_pair = [&](piece_ref p, piece_ref q) {
        const piece_ref h = side[p.index] > 0 ? p : q;
        const piece_ref l = side[p.index] > 0 ? q : p;
        const double res = out.weights[h.index][h.piece] * a[h.index]
                           - out.weights[l.index][l.piece] * a[l.index];
        out.pairs.push_back({h, l, res});
    };

    for (;;) {
        const auto js = members(1);
        const auto jls = members(-1);
        if (js.size() == 1 || jls.size() == 1) {
            // one element shared proportionally among the other side
            const bool single_heavy = js.size() == 1;
            const std::size_t s = single_heavy ? js[0] : jls[0];
            const auto& others = single_heavy ? jls : js;
            double total = 0.0;
            for (std::size_t o : others)
                total += rem[o];
            for (std::size_t k = 0; k < others.size(); ++k) {
                const std::size_t o = others[k];
                const piece_ref po = add_piece(o, rem[o]);
                const piece_ref ps = add_piece(s, rem[s] * (rem[o] / total));
                add_pair(ps, po);
            }
            break;
        }

        std::size_t i0 = n;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] && (i0 == n || rem[i] < rem[i0]))
                i0 = i;
        const auto& opposite = side[i0] > 0 ? jls : js;
        std::size_t j0 = opposite.front();
        for (std::size_t j : opposite)
            if (rem[j] > rem[j0])
                j0 = j;

        const double amount = rem[i0];
        const piece_ref p0 = add_piece(i0, amount);
        const piece_ref q0 = add_piece(j0, amount);
        add_pair(p0, q0);
        active[i0] = 0;
        rem[i0] = 0.0;
        rem[j0] -= amount;
        if (rem[j0] <= 0.0) {
            rem[j0] = 0.0;
            active[j0] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Direction buckets

struct direction_bucket {
    double arc_begin = 0.0; // half-open [arc_begin, arc_end)
    double arc_end = 0.0;
    std::vector<std::size_t> members;
};

struct direction_partition {
    std::vector<direction_bucket> buckets;
    double arc_length = 0.0;

    std::size_t bucket_of(double angle) const
    {
        const auto l = static_cast<std::size_t>(std::floor(angle / arc_length));
        return std::min(l, buckets.size() - 1);
    }
};

/// ceil(2pi/eps1)+1 equal half-open arcs anchored at angle 0.
inline direction_partition partition_directions(std::span<const vec2> ks, double eps1)
{
    if (!(eps1 > 0.0) || !std::isfinite(eps1))
        throw error(errc::invalid_argument, "bucket diameter must be > 0");
    const double count = std::ceil(two_pi / eps1) + 1.0;
    if (count > 1e7)
        throw error(errc::invalid_argument, "bucket diameter too small");
    direction_partition out;
    const auto l = static_cast<std::size_t>(count);
    out.arc_length = two_pi / static_cast<double>(l);
    out.buckets.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        out.buckets[i].arc_begin = out.arc_length * static_cast<double>(i);
        out.buckets[i].arc_end = out.arc_length * static_cast<double>(i + 1);
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (norm(ks[i]) == 0.0)
            throw error(errc::zero_wavevector, "cannot bucket a zero wavevector");
        out.buckets[out.bucket_of(polar_angle(ks[i]))].members.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full hypothesis report

struct bucket_report {
    std::size_t bucket = 0;
    double arc_begin = 0.0;
    double arc_end = 0.0;
    std::vector<std::size_t> members;
    domination_verdict verdict;
};

struct hypothesis_report {
    std::size_t support_count = 0;
    bool support_ok = false;
    independence_verdict independence;
    std::vector<bucket_report> buckets; // nonempty buckets only
    bool domination_ok = false;
    bool passed = false;
    std::vector<std::string> failures;
};

inline constexpr std::size_t required_support = 6;

inline hypothesis_report theorem2_check(const wave_ensemble& e, const criterion_params& params)
{
    params.validate();
    hypothesis_report rep;
    rep.support_count = spectral_measure(e).support_count();
    rep.support_ok = rep.support_count >= required_support;
    if (!rep.support_ok)
        rep.failures.push_back("support " + std::to_string(rep.support_count) + " < "
                               + std::to_string(required_support));

    const auto ks = e.wavevectors();
    rep.independence = check_independence(ks, params);
    if (!rep.independence.independent()) {
        std::string rel;
        for (std::size_t i = 0; i < rep.independence.relation.size(); ++i)
            rel += (i ? "," : "") + std::to_string(rep.independence.relation[i]);
        rep.failures.push_back("integer relation (" + rel + ") at height <= "
                               + std::to_string(params.search_height));
    }

    const auto partition = partition_directions(ks, params.eps1);
    rep.domination_ok = true;
    for (std::size_t l = 0; l < partition.buckets.size(); ++l) {
        const auto& b = partition.buckets[l];
        if (b.members.empty())
            continue;
        std::vector<double> amps;
        for (std::size_t i : b.members)
            amps.push_back(std::abs(e[i].amplitude));
        bucket_report br{l, b.arc_begin, b.arc_end, b.members, check_non_domination(amps, params.eps2)};
        if (!br.verdict.non_dominated) {
            rep.domination_ok = false;
            rep.failures.push_back("bucket " + std::to_string(l) + " dominated (residual "
                                   + std::to_string(br.verdict.residual) + ")");
        }
        rep.buckets.push_back(std::move(br));
    }
    rep.passed = rep.support_ok && rep.independence.independent() && rep.domination_ok;
    return rep;
}

inline nlohmann::json to_json(const independence_verdict& v)
{
    nlohmann::json j;
    j["height"] = v.height;
    if (v.independent()) {
        j["outcome"] = "independent_up_to_height";
        j["witness"] = {v.witness.x, v.witness.y};
        j["witness_gap"] = v.witness_gap;
        j["empirical_T"] = v.empirical_T ? nlohmann::json(*v.empirical_T) : nlohmann::json(nullptr);
    } else {
        j["outcome"] = "relation_found";
        j["relation"] = v.relation;
        j["residual"] = {v.residual.x, v.residual.y};
    }
    return j;
}

inline nlohmann::json to_json(const domination_verdict& v)
{
    return {{"non_dominated", v.non_dominated}, {"signs", v.signs}, {"residual", v.residual}};
}

inline nlohmann::json to_json(const hypothesis_report& r)
{
    nlohmann::json buckets = nlohmann::json::array();
    for (const auto& b : r.buckets) {
        buckets.push_back({{"bucket", b.bucket},
                           {"arc", {b.arc_begin, b.arc_end}},
                           {"members", b.members},
                           {"verdict", to_json(b.verdict)}});
    }
    return {{"support_count", r.support_count},
            {"support_ok", r.support_ok},
            {"independence", to_json(r.independence)},
            {"buckets", buckets},
            {"domination_ok", r.domination_ok},
            {"passed", r.passed},
            {"failures", r.failures}};
}

} // namespace nodal
