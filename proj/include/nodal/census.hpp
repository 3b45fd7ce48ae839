#pragma once

// Nodal-domain counting on a square grid of cells.
//
// Cells are classified from the value at their center and the global
// Lipschitz bound L: with threshold T = eps + L h sqrt(2)/2, a cell whose
// center value exceeds T keeps f + g > 0 on the whole cell for every
// perturbation |g| <= eps (CertPos), symmetrically for CertNeg, and
// everything else is Uncertain.
//
// A positive candidate is a maximal 8-connected set of cells that are not
// CertNeg; it is certified when it contains a CertPos cell and lies inside
// the ball. By maximality every 8-neighbour outside it is CertNeg, and the
// closed CertNeg cells cover the boundary of the union of its cells. That
// ring stays negative under every admissible perturbation, so the positive
// domain through the CertPos cell is compact, eps-stable, and distinct from
// the domains of every other certified candidate. Negative candidates are
// symmetric.
//
// Candidates may contain Uncertain cells: f is Lipschitz, so between a
// CertPos and a CertNeg cell there is always an Uncertain layer, and a set
// made of CertPos cells only could never be ringed by CertNeg cells.
// 8-connected candidates (rather than 4-connected ones checked against an
// 8-ring) keep the count monotone in eps: raising eps only merges
// candidates, never splits a certified one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodal/error.hpp"
#include "nodal/union_find.hpp"
#include "nodal/vec2.hpp"
#include "nodal/wave_model.hpp"

namespace nodal {

inline constexpr double max_cells_per_axis = 2e4;

struct grid_spec {
    vec2 center{};
    double half_width = 0.0; // radius R of the ball B(center, R)
    double step = 0.0;

    void validate() const
    {
        if (!(step > 0.0) || !std::isfinite(step))
            throw error(errc::invalid_argument, "grid step must be > 0");
        if (!(half_width >= 0.0) || !std::isfinite(half_width) || !is_finite(center))
            throw error(errc::invalid_argument, "grid window must be finite");
        if (2.0 * half_width / step > max_cells_per_axis)
            throw error(errc::grid_too_large, "more than 2e4 cells per axis requested");
    }

    /// Cells on each side of the center cell (one ring beyond the ball).
    std::size_t half_cells() const { return static_cast<std::size_t>(std::ceil(half_width / step)) + 1; }
};

enum class cell_state : std::uint8_t { cert_neg = 0, uncertain_neg = 1, uncertain_pos = 2, cert_pos = 3 };

inline bool positive_center(cell_state s) { return s >= cell_state::uncertain_pos; }
inline bool certified(cell_state s) { return s == cell_state::cert_neg || s == cell_state::cert_pos; }

/// Per-cell sign verdicts, row-major (index iy * nx + ix).
struct sign_field {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double step = 0.0;
    vec2 anchor{};           // center of cell (anchor_ix, anchor_iy)
    std::ptrdiff_t anchor_ix = 0;
    std::ptrdiff_t anchor_iy = 0;
    double margin = 0.0;     // eps
    double threshold = 0.0;  // eps + L h sqrt(2)/2 + rounding slack
    std::vector<cell_state> cells;

    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    cell_state at(std::size_t ix, std::size_t iy) const { return cells[index(ix, iy)]; }

    /// Offset of a cell center from the anchor, exact in the cell counts.
    vec2 offset(std::size_t ix, std::size_t iy) const
    {
        return {static_cast<double>(static_cast<std::ptrdiff_t>(ix) - anchor_ix) * step,
                static_cast<double>(static_cast<std::ptrdiff_t>(iy) - anchor_iy) * step};
    }
    vec2 cell_center(std::size_t ix, std::size_t iy) const { return anchor + offset(ix, iy); }
    double cell_radius() const { return step * std::numbers::sqrt2 / 2.0; }

    /// Cell containing `p`, if inside the grid.
    std::optional<std::size_t> cell_of(vec2 p) const
    {
        const double fx = std::round((p.x - anchor.x) / step) + static_cast<double>(anchor_ix);
        const double fy = std::round((p.y - anchor.y) / step) + static_cast<double>(anchor_iy);
        if (fx < 0 || fy < 0 || fx >= static_cast<double>(nx) || fy >= static_cast<double>(ny))
            return std::nullopt;
        return index(static_cast<std::size_t>(fx), static_cast<std::size_t>(fy));
    }
};

// ---------------------------------------------------------------------------
// Sampling

/// Calls sink(iy, row) with f evaluated on the tensor grid xs x ys, using
/// cos(a + b) = cos a cos b - sin a sin b with per-axis tables.
template <class Sink>
void evaluate_grid(const wave_ensemble& e, std::span<const double> xs, std::span<const double> ys, Sink&& sink)
{
    const std::size_t nt = e.size();
    const std::size_t nx = xs.size();
    std::vector<double> cx(nt * nx), sx(nt * nx);
    for (std::size_t t = 0; t < nt; ++t) {
        const double kx = e[t].wavevector.x;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            cx[t * nx + ix] = std::cos(kx * xs[ix]);
            sx[t * nx + ix] = std::sin(kx * xs[ix]);
        }
    }
    std::vector<double> row(nx);
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t t = 0; t < nt; ++t) {
            const auto& term = e[t];
            const double b = term.wavevector.y * ys[iy] + term.phase;
            const double ca = term.amplitude * std::cos(b);
            const double sa = term.amplitude * std::sin(b);
            const double* c = &cx[t * nx];
            const double* s = &sx[t * nx];
            for (std::size_t ix = 0; ix < nx; ++ix)
                row[ix] += ca * c[ix] - sa * s[ix];
        }
        sink(iy, std::span<const double>(row));
    }
}

inline double certification_threshold(const wave_ensemble& e, double eps, double step)
{
    return eps + e.lipschitz_bound() * step * std::numbers::sqrt2 / 2.0 + 1e-9 * e.sup_bound();
}

inline sign_field sample_field(const wave_ensemble& e, const grid_spec& spec, double eps)
{
    spec.validate();
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw error(errc::invalid_argument, "margin must be >= 0");
    const std::size_t n = spec.half_cells();
    sign_field f;
    f.nx = f.ny = 2 * n + 1;
    f.step = spec.step;
    f.anchor = spec.center;
    f.anchor_ix = f.anchor_iy = static_cast<std::ptrdiff_t>(n);
    f.margin = eps;
    f.threshold = certification_threshold(e, eps, spec.step);
    f.cells.resize(f.nx * f.ny);

    std::vector<double> xs(f.nx), ys(f.ny);
    for (std::size_t i = 0; i < f.nx; ++i) {
        const double off = (static_cast<double>(i) - static_cast<double>(n)) * spec.step;
        xs[i] = spec.center.x + off;
        ys[i] = spec.center.y + off;
    }
    const double t = f.threshold;
    evaluate_grid(e, xs, ys, [&](std::size_t iy, std::span<const double> row) {
        cell_state* out = &f.cells[iy * f.nx];
        for (std::size_t ix = 0; ix < row.size(); ++ix) {
            const double v = row[ix];
            out[ix] = v > t ? cell_state::cert_pos
                    : v < -t ? cell_state::cert_neg
                    : v > 0.0 ? cell_state::uncertain_pos
                              : cell_state::uncertain_neg;
        }
    });
    return f;
}

// ---------------------------------------------------------------------------
// Components

struct cell_box {
    std::size_t ix0 = 0, iy0 = 0, ix1 = 0, iy1 = 0; // inclusive
};

struct nodal_component {
    int sign = 0;                      // +1 or -1
    std::size_t first_cell = 0;        // row-major index of the first cell
    std::size_t cell_count = 0;
    cell_box bbox;
    bool enclosed = false;
    std::vector<std::uint32_t> cells;  // sorted; filled for counted components
};

struct refinement_step {
    double step = 0.0;
    std::size_t plain = 0;
    std::size_t certified = 0;
};

struct nodal_census {
    std::size_t plain_count = 0;
    std::size_t certified_count = 0;
    std::vector<nodal_component> components; // certification candidates
    double margin = 0.0;
    double step = 0.0;
    sign_field field;
    std::vector<refinement_step> trace;

    /// Certified component whose cells contain `p`.
    std::optional<std::size_t> component_containing(vec2 p) const
    {
        const auto cell = field.cell_of(p);
        if (!cell)
            return std::nullopt;
        for (std::size_t c = 0; c < components.size(); ++c) {
            const auto& cs = components[c].cells;
            if (components[c].enclosed && std::binary_search(cs.begin(), cs.end(), *cell))
                return c;
        }
        return std::nullopt;
    }
};

namespace detail {

/// Cell center and all 8 neighbour centers lie in the closed ball, and the
/// neighbours exist in the grid.
struct interior_test {
    const sign_field& f;
    vec2 shift; // anchor - window center
    double radius;

    bool operator()(std::size_t ix, std::size_t iy) const
    {
        if (ix == 0 || iy == 0 || ix + 1 >= f.nx || iy + 1 >= f.ny)
            return false;
        const vec2 o = f.offset(ix, iy) + shift;
        const double fx = std::abs(o.x) + f.step, fy = std::abs(o.y) + f.step;
        return fx * fx + fy * fy <= radius * radius;
    }
};

struct component_stats {
    std::size_t first = 0, count = 0;
    cell_box box{};
    bool has_cert = false;
    bool ok = true;
};

inline void grow(component_stats& s, std::size_t i, std::size_t ix, std::size_t iy)
{
    if (s.count == 0) {
        s.first = i;
        s.box = {ix, iy, ix, iy};
    } else {
        s.box.ix0 = std::min(s.box.ix0, ix);
        s.box.ix1 = std::max(s.box.ix1, ix);
        s.box.iy1 = std::max(s.box.iy1, iy);
    }
    ++s.count;
}

inline std::vector<std::vector<std::uint32_t>> collect_cells(const labeling& lab,
                                                             const std::vector<char>& wanted)
{
    std::vector<std::vector<std::uint32_t>> cells(wanted.size());
    for (std::size_t i = 0; i < lab.labels.size(); ++i) {
        const auto l = lab.labels[i];
        if (l >= 0 && wanted[static_cast<std::size_t>(l)])
            cells[static_cast<std::size_t>(l)].push_back(static_cast<std::uint32_t>(i));
    }
    return cells;
}

} // namespace detail

struct plain_result {
    std::size_t count = 0;
    std::vector<nodal_component> components; // counted components only
};

/// Sign components (f > 0 versus f <= 0 at cell centers, margin ignored)
/// whose cells are all interior to B(window.center, window.half_width).
inline plain_result plain_count(const sign_field& f, const grid_spec& window)
{
    const detail::interior_test interior{f, f.anchor - window.center, window.half_width};
    const auto lab = label_components(f.nx, f.ny, [&](std::size_t i) { return positive_center(f.cells[i]) ? 1 : 0; });
    std::vector<detail::component_stats> stats(lab.count);
    for (std::size_t iy = 0; iy < f.ny; ++iy) {
        for (std::size_t ix = 0; ix < f.nx; ++ix) {
            const std::size_t i = f.index(ix, iy);
            auto& s = stats[static_cast<std::size_t>(lab.labels[i])];
            detail::grow(s, i, ix, iy);
            if (s.ok && !interior(ix, iy))
                s.ok = false;
        }
    }
    std::vector<char> wanted(lab.count);
    for (std::size_t c = 0; c < lab.count; ++c)
        wanted[c] = stats[c].ok;
    auto cells = detail::collect_cells(lab, wanted);

    plain_result out;
    for (std::size_t c = 0; c < lab.count; ++c) {
        if (!stats[c].ok)
            continue;
        nodal_component comp;
        comp.sign = positive_center(f.cells[stats[c].first]) ? 1 : -1;
        comp.first_cell = stats[c].first;
        comp.cell_count = stats[c].count;
        comp.bbox = stats[c].box;
        comp.enclosed = true;
        comp.cells = std::move(cells[c]);
        out.components.push_back(std::move(comp));
    }
    out.count = out.components.size();
    return out;
}

/// Certified components of both signs in the window, see the header comment.
inline std::vector<nodal_component> certified_components(const sign_field& f, const grid_spec& window)
{
    const detail::interior_test interior{f, f.anchor - window.center, window.half_width};
    std::vector<nodal_component> out;
    for (int sign : {+1, -1}) {
        const cell_state own = sign > 0 ? cell_state::cert_pos : cell_state::cert_neg;
        const cell_state opposite = sign > 0 ? cell_state::cert_neg : cell_state::cert_pos;
        const auto lab = label_components(
            f.nx, f.ny, [&](std::size_t i) { return f.cells[i] != opposite ? 1 : -1; }, adjacency::eight);
        std::vector<detail::component_stats> stats(lab.count);
        for (std::size_t iy = 0; iy < f.ny; ++iy) {
            for (std::size_t ix = 0; ix < f.nx; ++ix) {
                const std::size_t i = f.index(ix, iy);
                const auto l = lab.labels[i];
                if (l < 0)
                    continue;
                auto& s = stats[static_cast<std::size_t>(l)];
                detail::grow(s, i, ix, iy);
                if (f.cells[i] == own)
                    s.has_cert = true;
                if (s.ok && !interior(ix, iy))
                    s.ok = false;
            }
        }
        std::vector<char> wanted(lab.count);
        for (std::size_t c = 0; c < lab.count; ++c)
            wanted[c] = stats[c].ok && stats[c].has_cert;
        auto cells = detail::collect_cells(lab, wanted);
        for (std::size_t c = 0; c < lab.count; ++c) {
            if (!stats[c].has_cert)
                continue;
            nodal_component comp;
            comp.sign = sign;
            comp.first_cell = stats[c].first;
            comp.cell_count = stats[c].count;
            comp.bbox = stats[c].box;
            comp.enclosed = stats[c].ok;
            comp.cells = std::move(cells[c]);
            out.push_back(std::move(comp));
        }
    }
    std::sort(out.begin(), out.end(), [](const nodal_component& a, const nodal_component& b) {
        return a.first_cell != b.first_cell ? a.first_cell < b.first_cell : a.sign > b.sign;
    });
    return out;
}

inline nodal_census census_of(sign_field field, const grid_spec& window)
{
    nodal_census c;
    c.plain_count = plain_count(field, window).count;
    c.components = certified_components(field, window);
    c.certified_count = static_cast<std::size_t>(std::count_if(
        c.components.begin(), c.components.end(), [](const nodal_component& x) { return x.enclosed; }));
    c.margin = field.margin;
    c.step = field.step;
    c.field = std::move(field);
    c.trace.push_back({c.step, c.plain_count, c.certified_count});
    return c;
}

inline nodal_census certified_count(const wave_ensemble& e, const grid_spec& window, double eps)
{
    if (!(eps > 0.0))
        throw error(errc::invalid_argument, "certification margin must be > 0");
    return census_of(sample_field(e, window, eps), window);
}

/// Halve the step from h0 until two consecutive certified counts agree.
inline nodal_census refine_until_stable(const wave_ensemble& e, grid_spec window, double eps, double h0,
                                        double h_min)
{
    if (!(h0 > h_min) || !(h_min > 0.0))
        throw error(errc::invalid_argument, "refinement needs h0 > h_min > 0");
    window.step = h0;
    auto prev = certified_count(e, window, eps);
    if (eps >= e.sup_bound())
        return prev;
    std::vector<refinement_step> trace = prev.trace;
    for (;;) {
        window.step *= 0.5;
        if (window.step < h_min)
            throw error(errc::no_convergence, "certified count still changing at h = "
                                                  + std::to_string(2.0 * window.step));
        auto next = certified_count(e, window, eps);
        trace.push_back(next.trace.back());
        if (next.certified_count == prev.certified_count) {
            next.trace = std::move(trace);
            return next;
        }
        prev = std::move(next);
    }
}

// ---------------------------------------------------------------------------
// Periodic counting on the torus [0, period)^2

/// Sign components of f on an N x N grid of the torus with wrap-around
/// adjacency (cell centers at (i + 1/2) period / N).
inline std::size_t periodic_nodal_count(const wave_ensemble& e, std::size_t cells_per_axis,
                                        double period = two_pi)
{
    if (cells_per_axis < 2)
        throw error(errc::invalid_argument, "periodic grid needs at least 2 cells per axis");
    if (static_cast<double>(cells_per_axis) > max_cells_per_axis)
        throw error(errc::grid_too_large, "more than 2e4 cells per axis requested");
    const std::size_t n = cells_per_axis;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = (static_cast<double>(i) + 0.5) * period / static_cast<double>(n);
    std::vector<std::int8_t> sign(n * n);
    evaluate_grid(e, xs, xs, [&](std::size_t iy, std::span<const double> row) {
        for (std::size_t ix = 0; ix < n; ++ix)
            sign[iy * n + ix] = row[ix] > 0.0 ? 1 : 0;
    });
    return label_components(n, n, [&](std::size_t i) { return sign[i]; }, adjacency::four, true).count;
}

// ---------------------------------------------------------------------------
// Portable graymap output

inline constexpr unsigned char gray_cert_pos = 160;
inline constexpr unsigned char gray_cert_neg = 255;
inline constexpr unsigned char gray_uncertain = 0;

/// Binary P5 image, one pixel per cell, top row = largest y.
inline std::string render_pgm(const sign_field& f)
{
    std::string out = "P5 " + std::to_string(f.nx) + " " + std::to_string(f.ny) + " 255\n";
    const std::size_t header = out.size();
    out.resize(header + f.nx * f.ny);
    std::size_t k = header;
    for (std::size_t r = 0; r < f.ny; ++r) {
        const std::size_t iy = f.ny - 1 - r;
        for (std::size_t ix = 0; ix < f.nx; ++ix) {
            const auto s = f.at(ix, iy);
            out[k++] = static_cast<char>(s == cell_state::cert_pos   ? gray_cert_pos
                                         : s == cell_state::cert_neg ? gray_cert_neg
                                                                     : gray_uncertain);
        }
    }
    return out;
}

inline void render_sign_field(const sign_field& f, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error(errc::io_failure, "cannot write " + path.string());
    const auto bytes = render_pgm(f);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw error(errc::io_failure, "write failed for " + path.string());
}

} // namespace nodal
