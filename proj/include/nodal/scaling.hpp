#pragma once

// Certified counts over growing balls and the fit N(r) = c r^2.

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nodal/census.hpp"
#include "nodal/criteria.hpp"
#include "nodal/error.hpp"
#include "nodal/wave_model.hpp"

namespace nodal {

struct scaling_row {
    double r = 0.0;
    std::size_t plain = 0;
    std::size_t certified = 0;
    double seconds = 0.0;
};

struct scaling_run {
    std::vector<scaling_row> rows;
    double eps = 0.0;
    double step = 0.0;
    double fitted_c = 0.0;
    double relative_residual = 0.0; // |N - c r^2| / |N|, 0 when all counts vanish
    std::vector<std::string> diagnostics;
};

struct scaling_options {
    vec2 center{};
    bool require_hypotheses = true;
    criterion_params params{};
};

/// Least squares through the origin of certified counts against r^2.
inline void fit_quadratic(scaling_run& run)
{
    double num = 0.0, den = 0.0, norm_n = 0.0;
    for (const auto& row : run.rows) {
        const double r2 = row.r * row.r;
        num += r2 * static_cast<double>(row.certified);
        den += r2 * r2;
        norm_n += static_cast<double>(row.certified) * static_cast<double>(row.certified);
    }
    run.fitted_c = den > 0.0 ? num / den : 0.0;
    double res = 0.0;
    for (const auto& row : run.rows) {
        const double d = static_cast<double>(row.certified) - run.fitted_c * row.r * row.r;
        res += d * d;
    }
    run.relative_residual = norm_n > 0.0 ? std::sqrt(res / norm_n) : 0.0;
}

inline scaling_run run_scaling(const wave_ensemble& e, const std::vector<double>& radii, double eps, double step,
                               const scaling_options& opt = {})
{
    if (radii.empty())
        throw error(errc::empty_input, "scaling needs at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0))
            throw error(errc::invalid_argument, "radii must be > 0");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw error(errc::invalid_argument, "radii must be strictly increasing");
    }
    scaling_run run;
    run.eps = eps;
    run.step = step;
    if (opt.require_hypotheses) {
        const auto rep = theorem2_check(e, opt.params);
        if (!rep.passed) {
            std::string why;
            for (const auto& f : rep.failures)
                why += (why.empty() ? "" : "; ") + f;
            throw error(errc::hypotheses_failed, why);
        }
    }
    if (eps >= e.sup_bound())
        run.diagnostics.push_back("margin " + std::to_string(eps) + " >= sup bound "
                                  + std::to_string(e.sup_bound()) + ": no cell can be certified");
    for (double r : radii) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto c = certified_count(e, grid_spec{opt.center, r, step}, eps);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        run.rows.push_back({r, c.plain_count, c.certified_count, dt.count()});
    }
    fit_quadratic(run);
    return run;
}

// ---------------------------------------------------------------------------
// CSV: r,plain,certified,seconds

inline constexpr const char* scaling_csv_header = "r,plain,certified,seconds";

inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::string scaling_csv(const scaling_run& run, bool omit_timing = false)
{
    std::string out = std::string(scaling_csv_header) + "\n";
    for (const auto& row : run.rows) {
        out += format_double(row.r) + "," + std::to_string(row.plain) + "," + std::to_string(row.certified) + ","
               + format_double(omit_timing ? 0.0 : row.seconds) + "\n";
    }
    return out;
}

inline std::vector<scaling_row> parse_scaling_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != scaling_csv_header)
        throw error(errc::parse_error, "scaling CSV must start with '" + std::string(scaling_csv_header) + "'");
    std::vector<scaling_row> rows;
    auto number = [](const std::string& field, auto& out) {
        const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
        if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
            throw error(errc::parse_error, "bad CSV field '" + field + "'");
    };
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 4)
            throw error(errc::parse_error, "CSV row needs 4 fields: " + line);
        scaling_row row;
        number(f[0], row.r);
        number(f[1], row.plain);
        number(f[2], row.certified);
        number(f[3], row.seconds);
        rows.push_back(row);
    }
    return rows;
}

inline void write_scaling_csv(const scaling_run& run, const std::filesystem::path& path, bool omit_timing = false)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error(errc::io_failure, "cannot write " + path.string());
    out << scaling_csv(run, omit_timing);
    if (!out)
        throw error(errc::io_failure, "write failed for " + path.string());
}

} // namespace nodal
