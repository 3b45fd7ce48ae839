#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <queue>
#include <random>

#include "nodal/census.hpp"
#include "nodal/constructors.hpp"

using namespace nodal;
using std::numbers::pi;

namespace {

const wave_ensemble one_wave({plane_wave_term(1, {1, 0}, 0)});
const wave_ensemble checker({plane_wave_term(1, {1, 0}, 0), plane_wave_term(1, {0, 1}, 0)});
const wave_ensemble figure1({plane_wave_term(1, {1, 0}, 0), plane_wave_term(1.05, {0, 1}, 0)});

wave_ensemble diagonal_triangle()
{
    return build_three_wave({1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}, 0.01, 1.0);
}

// the triangle's domain around the origin only certifies once h <= 0.005
const grid_spec triangle_window{{0, 0}, 2 * pi, 0.005};

wave_ensemble random_ensemble(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> amp(0.2, 1.0), ang(0, two_pi), len(0.5, 2.0), ph(0, two_pi);
    std::vector<plane_wave_term> t;
    for (std::size_t i = 0; i < n; ++i)
        t.emplace_back(amp(rng), len(rng) * unit_from_angle(ang(rng)), ph(rng));
    return wave_ensemble(std::move(t));
}

errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no nodal::error thrown";
    return errc::invalid_argument;
}

/// Breadth-first flood fill of same-sign cells; a component counts when all
/// nine centers around each of its cells lie in the ball.
std::size_t flood_fill_count(const sign_field& f, vec2 center, double radius)
{
    const auto nx = static_cast<long>(f.nx), ny = static_cast<long>(f.ny);
    std::vector<char> seen(f.cells.size(), 0);
    auto inside = [&](long ix, long iy) {
        if (ix < 1 || iy < 1 || ix > nx - 2 || iy > ny - 2)
            return false;
        for (long dy = -1; dy <= 1; ++dy)
            for (long dx = -1; dx <= 1; ++dx)
                if (norm(f.cell_center(ix + dx, iy + dy) - center) > radius + 1e-12)
                    return false;
        return true;
    };
    std::size_t count = 0;
    for (long sy = 0; sy < ny; ++sy) {
        for (long sx = 0; sx < nx; ++sx) {
            if (seen[sy * nx + sx])
                continue;
            const bool pos = positive_center(f.at(sx, sy));
            bool ok = true;
            std::queue<std::pair<long, long>> q;
            q.push({sx, sy});
            seen[sy * nx + sx] = 1;
            while (!q.empty()) {
                const auto [x, y] = q.front();
                q.pop();
                ok = ok && inside(x, y);
                const long nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
                for (const auto& n : nb) {
                    if (n[0] < 0 || n[1] < 0 || n[0] >= nx || n[1] >= ny)
                        continue;
                    const long k = n[1] * nx + n[0];
                    if (seen[k] || positive_center(f.cells[k]) != pos)
                        continue;
                    seen[k] = 1;
                    q.push({n[0], n[1]});
                }
            }
            count += ok;
        }
    }
    return count;
}

std::size_t count_components(std::size_t nx, std::size_t ny, const std::vector<char>& mask)
{
    return label_components(nx, ny, [&](std::size_t i) { return mask[i] ? 1 : -1; }).count;
}

} // namespace

// ---------------------------------------------------------------------------
// Sampling

TEST(SampleField, DominantValueIsCertified)
{
    const auto f = sample_field(one_wave, grid_spec{{0, 0}, 1.0, 0.05}, 0.5);
    EXPECT_EQ(f.nx, 43u);
    EXPECT_EQ(f.at(21, 21), cell_state::cert_pos); // cos(0) = 1 > 0.5 + 0.035
    EXPECT_NEAR(f.threshold, 0.5 + 0.05 * std::sqrt(0.5), 1e-8);
    const auto far = sample_field(one_wave, grid_spec{{pi, 0}, 0.3, 0.05}, 0.5);
    EXPECT_EQ(far.at(far.nx / 2, far.ny / 2), cell_state::cert_neg);
}

TEST(SampleField, UnreachableMarginLeavesEverythingUncertain)
{
    const auto f = sample_field(checker, grid_spec{{0, 0}, 5.0, 0.1}, checker.sup_bound());
    for (auto s : f.cells)
        EXPECT_FALSE(certified(s));
}

TEST(SampleField, Errors)
{
    EXPECT_EQ(code_of([] { sample_field(one_wave, grid_spec{{0, 0}, 1e4, 0.5}, 0.1); }), errc::grid_too_large);
    EXPECT_EQ(code_of([] { sample_field(one_wave, grid_spec{{0, 0}, 1.0, 0.0}, 0.1); }), errc::invalid_argument);
    EXPECT_EQ(code_of([] { sample_field(one_wave, grid_spec{{0, 0}, 1.0, 0.1}, -1.0); }), errc::invalid_argument);
}

TEST(SampleField, SeparableEvaluationMatchesDirect)
{
    std::mt19937_64 rng(20);
    const auto e = random_ensemble(rng, 5);
    const grid_spec g{{1.5, -2.0}, 3.0, 0.1};
    const std::size_t n = g.half_cells();
    std::vector<double> xs(2 * n + 1), ys(2 * n + 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = g.center.x + (static_cast<double>(i) - static_cast<double>(n)) * g.step;
        ys[i] = g.center.y + (static_cast<double>(i) - static_cast<double>(n)) * g.step;
    }
    evaluate_grid(e, xs, ys, [&](std::size_t iy, std::span<const double> row) {
        for (std::size_t ix = 0; ix < row.size(); ++ix)
            ASSERT_NEAR(row[ix], evaluate(e, {xs[ix], ys[iy]}), 1e-12);
    });
}

TEST(SampleField, CertifiedCellsSurviveDenseSubsampling)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto e = random_ensemble(rng, 3 + trial);
        const double eps = 0.05 * (trial + 1);
        const auto f = sample_field(e, grid_spec{{0, 0}, 6.0, 0.07}, eps);
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < f.cells.size(); ++i) {
            if (f.cells[i] == cell_state::cert_pos)
                pos.push_back(i);
            if (f.cells[i] == cell_state::cert_neg)
                neg.push_back(i);
        }
        ASSERT_FALSE(pos.empty());
        ASSERT_FALSE(neg.empty());
        for (const auto* list : {&pos, &neg}) {
            std::uniform_int_distribution<std::size_t> pick(0, list->size() - 1);
            for (int c = 0; c < 100; ++c) {
                const std::size_t i = (*list)[pick(rng)];
                const vec2 center = f.cell_center(i % f.nx, i / f.nx);
                for (int k = 0; k < 100; ++k) {
                    const double v = evaluate(e, center + f.step * vec2{unit(rng), unit(rng)});
                    if (list == &pos) {
                        ASSERT_GT(v, eps);
                    } else {
                        ASSERT_LT(v, -eps);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Plain counting

TEST(PlainCount, SingleWaveHasNoCompactDomain)
{
    const grid_spec g{{0, 0}, 10.0, 0.05};
    EXPECT_EQ(plain_count(sample_field(one_wave, g, 0.0), g).count, 0u);
}

TEST(PlainCount, CheckerboardMatchesFloodFill)
{
    const grid_spec g{{0, 0}, 10.0, 0.02};
    const auto f = sample_field(checker, g, 0.0);
    const auto p = plain_count(f, g);
    EXPECT_EQ(p.count, flood_fill_count(f, g.center, g.half_width));
}

TEST(PlainCount, MatchesFloodFillOnRandomEnsembles)
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 8; ++trial) {
        const auto e = random_ensemble(rng, 2 + trial % 5);
        const grid_spec g{{0.3 * trial, -0.2 * trial}, 6.0 + trial, 0.05};
        const auto f = sample_field(e, g, 0.0);
        EXPECT_EQ(plain_count(f, g).count, flood_fill_count(f, g.center, g.half_width)) << "trial " << trial;
    }
}

TEST(PlainCount, UnequalAmplitudesHaveNoCompactDomain)
{
    const grid_spec g{{0, 0}, 10.0, 0.02};
    EXPECT_EQ(plain_count(sample_field(figure1, g, 0.0), g).count, 0u);
}

// ---------------------------------------------------------------------------
// Certified counting

TEST(CertifiedCount, SingleWave)
{
    for (double eps : {0.001, 0.1})
        EXPECT_EQ(certified_count(one_wave, grid_spec{{0, 0}, 10.0, 0.02}, eps).certified_count, 0u);
}

TEST(CertifiedCount, DegenerateSaddlesBreakEveryRing)
{
    const auto c = certified_count(checker, grid_spec{{0, 0}, 10.0, 0.01}, 0.05);
    EXPECT_EQ(c.certified_count, 0u);
}

TEST(CertifiedCount, TriangleEnsembleHasDomainAtOrigin)
{
    const auto c = certified_count(diagonal_triangle(), triangle_window, 0.001);
    EXPECT_GE(c.certified_count, 1u);
    const auto id = c.component_containing({0, 0});
    ASSERT_TRUE(id.has_value());
    EXPECT_EQ(c.components[*id].sign, 1);
    EXPECT_LE(c.certified_count, c.plain_count);
}

TEST(CertifiedCount, RingIsOppositeCertified)
{
    const auto c = certified_count(diagonal_triangle(), triangle_window, 0.001);
    const auto& f = c.field;
    for (const auto& comp : c.components) {
        if (!comp.enclosed)
            continue;
        const cell_state ring = comp.sign > 0 ? cell_state::cert_neg : cell_state::cert_pos;
        for (auto cell : comp.cells) {
            const std::size_t ix = cell % f.nx, iy = cell / f.nx;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::size_t q = f.index(ix + dx, iy + dy);
                    if (!std::binary_search(comp.cells.begin(), comp.cells.end(), q)) {
                        EXPECT_EQ(f.cells[q], ring);
                    }
                }
        }
    }
}

TEST(CertifiedCount, NeverExceedsPlainCount)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto e = random_ensemble(rng, 3 + trial % 4);
        const auto c = certified_count(e, grid_spec{{0, 0}, 12.0, 0.04}, 0.01 * (1 + trial));
        EXPECT_LE(c.certified_count, c.plain_count);
    }
}

TEST(CertifiedCount, MonotoneInMargin)
{
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 4; ++trial) {
        const auto e = random_ensemble(rng, 4);
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (double eps : {0.001, 0.01, 0.05, 0.1, 0.2, 0.4}) {
            const auto n = certified_count(e, grid_spec{{0, 0}, 12.0, 0.04}, eps).certified_count;
            EXPECT_LE(n, prev);
            prev = n;
        }
    }
}

TEST(CertifiedCount, MonotoneInWindow)
{
    std::mt19937_64 rng(25);
    const auto e = random_ensemble(rng, 4);
    const auto small = certified_count(e, grid_spec{{0, 0}, 8.0, 0.04}, 0.01);
    const auto large = certified_count(e, grid_spec{{0, 0}, 14.0, 0.04}, 0.01);
    EXPECT_LE(small.certified_count, large.certified_count);
    // same alignment: every certified component of the small window reappears
    const std::ptrdiff_t shift = large.field.anchor_ix - small.field.anchor_ix;
    for (const auto& comp : small.components) {
        if (!comp.enclosed)
            continue;
        const std::size_t ix = comp.first_cell % small.field.nx + shift;
        const std::size_t iy = comp.first_cell / small.field.nx + shift;
        const std::size_t cell = large.field.index(ix, iy);
        const auto match = std::find_if(large.components.begin(), large.components.end(),
                                        [&](const nodal_component& x) { return x.first_cell == cell && x.sign == comp.sign; });
        ASSERT_NE(match, large.components.end());
        EXPECT_TRUE(match->enclosed);
        EXPECT_EQ(match->cell_count, comp.cell_count);
    }
}

TEST(CertifiedCount, TranslationCovariance)
{
    const auto e = diagonal_triangle();
    const vec2 x0{0.64, -1.02};
    const auto a = certified_count(translate(e, x0), triangle_window, 0.001);
    const auto b = certified_count(e, grid_spec{x0, triangle_window.half_width, triangle_window.step}, 0.001);
    ASSERT_EQ(a.certified_count, b.certified_count);
    ASSERT_EQ(a.components.size(), b.components.size());
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        EXPECT_EQ(a.components[i].sign, b.components[i].sign);
        EXPECT_EQ(a.components[i].enclosed, b.components[i].enclosed);
        EXPECT_EQ(a.components[i].cells, b.components[i].cells);
    }
    EXPECT_TRUE(b.component_containing(x0).has_value());
}

TEST(CertifiedCount, RejectsNonPositiveMargin)
{
    EXPECT_EQ(code_of([] { certified_count(one_wave, grid_spec{{0, 0}, 1.0, 0.1}, 0.0); }), errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// Refinement

TEST(Refine, TriangleStabilizes)
{
    const auto c = refine_until_stable(diagonal_triangle(), grid_spec{{0, 0}, 2 * pi, 0.0}, 0.001, 0.01, 0.002);
    EXPECT_GE(c.certified_count, 1u);
    EXPECT_TRUE(c.component_containing({0, 0}).has_value());
    ASSERT_GE(c.trace.size(), 2u);
    EXPECT_EQ(c.trace[c.trace.size() - 1].certified, c.trace[c.trace.size() - 2].certified);
}

TEST(Refine, SingleWaveStabilizesAtOnce)
{
    const auto c = refine_until_stable(one_wave, grid_spec{{0, 0}, 5.0, 0.0}, 0.01, 0.1, 0.01);
    EXPECT_EQ(c.certified_count, 0u);
    EXPECT_EQ(c.trace.size(), 2u);
}

TEST(Refine, UnreachableMarginReturnsImmediately)
{
    const auto c = refine_until_stable(checker, grid_spec{{0, 0}, 5.0, 0.0}, 2.5, 0.1, 0.01);
    EXPECT_EQ(c.certified_count, 0u);
    EXPECT_EQ(c.trace.size(), 1u);
}

TEST(Refine, NoConvergenceWhenCountsKeepChanging)
{
    // shallow passages: uncertified at h = 0.0025, certified at 0.00125
    const auto e = build_three_wave({1, 0}, {0, 1}, {0.3, std::sqrt(0.91)}, 0.01, 1.0);
    EXPECT_EQ(code_of([&] { refine_until_stable(e, grid_spec{{0, 0}, pi + 0.5, 0.0}, 1e-4, 0.0025, 0.001); }),
              errc::no_convergence);
    EXPECT_EQ(code_of([] { refine_until_stable(one_wave, grid_spec{{0, 0}, 1.0, 0.0}, 0.01, 0.01, 0.02); }),
              errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// Periodic counting

TEST(Periodic, StripsWrapAround)
{
    // cos px + 1.05 cos py: p positive and p negative horizontal bands
    for (int p : {1, 2, 4}) {
        const wave_ensemble e({plane_wave_term(1, {double(p), 0}, 0), plane_wave_term(1.05, {0, double(p)}, 0)});
        EXPECT_EQ(periodic_nodal_count(e, 50 * p), 2u * p);
    }
    // the strips of a single wave wrap around: two domains on the torus
    EXPECT_EQ(periodic_nodal_count(one_wave, 50), 2u);
}

// ---------------------------------------------------------------------------
// Images

TEST(Render, TinyFieldAllPositive)
{
    sign_field f;
    f.nx = f.ny = 2;
    f.step = 1.0;
    f.cells.assign(4, cell_state::cert_pos);
    const auto bytes = render_pgm(f);
    EXPECT_EQ(bytes, std::string("P5 2 2 255\n") + std::string(4, char(160)));
}

TEST(Render, RowsRunTopDown)
{
    sign_field f;
    f.nx = 1;
    f.ny = 3;
    f.step = 1.0;
    f.cells = {cell_state::cert_neg, cell_state::uncertain_pos, cell_state::cert_pos};
    const auto bytes = render_pgm(f);
    EXPECT_EQ(bytes.substr(bytes.size() - 3), std::string({char(160), char(0), char(255)}));
}

TEST(Render, Figure1PassagesAreBlack)
{
    const auto f = sample_field(figure1, grid_spec{{0, 0}, 3 * pi, 0.02}, 0.06);
    std::vector<char> gray(f.cells.size()), white(f.cells.size()), not_white(f.cells.size()), not_gray(f.cells.size());
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
        gray[i] = f.cells[i] == cell_state::cert_pos;
        white[i] = f.cells[i] == cell_state::cert_neg;
        not_white[i] = !white[i];
        not_gray[i] = !gray[i];
    }
    const auto gray_parts = count_components(f.nx, f.ny, gray);
    const auto white_parts = count_components(f.nx, f.ny, white);
    EXPECT_GE(gray_parts, 6u);
    EXPECT_GE(white_parts, 6u);
    // the positive strips are joined through uncertain passages
    EXPECT_LT(count_components(f.nx, f.ny, not_white), gray_parts);
    EXPECT_LT(count_components(f.nx, f.ny, not_gray), white_parts);
    // passage at (pi, 0) where f = 0.05 is below the margin
    EXPECT_FALSE(certified(f.at(*f.cell_of({pi, 0}) % f.nx, *f.cell_of({pi, 0}) / f.nx)));

    const auto path = std::filesystem::temp_directory_path() / "nodal_figure1.pgm";
    render_sign_field(f, path);
    std::ifstream in(path, std::ios::binary);
    const std::string disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(disk, render_pgm(f));
    EXPECT_EQ(disk, render_pgm(sample_field(figure1, grid_spec{{0, 0}, 3 * pi, 0.02}, 0.06)));
    std::filesystem::remove(path);
    EXPECT_EQ(code_of([&] { render_sign_field(f, "/nonexistent/dir/x.pgm"); }), errc::io_failure);
}
