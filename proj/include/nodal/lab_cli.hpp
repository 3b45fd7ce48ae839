#pragma once

// nodal_lab command line: subcommand parsing and dispatch. Kept in a header
// so the tests can drive it with argv vectors and string streams.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nodal/census.hpp"
#include "nodal/constructors.hpp"
#include "nodal/criteria.hpp"
#include "nodal/ensemble_io.hpp"
#include "nodal/error.hpp"
#include "nodal/scaling.hpp"
#include "nodal/wave_model.hpp"

namespace nodal::cli {

enum exit_code : int { ok = 0, domain_failure = 1, usage = 2 };

inline constexpr double default_eps = 0.01;
inline constexpr int default_height = 50;
inline constexpr int default_torus_height = 8;

/// min(0.05, eps / (4 L)).
inline double auto_step(const wave_ensemble& e, double eps)
{
    const double l = e.lipschitz_bound();
    return l > 0.0 ? std::min(0.05, eps / (4.0 * l)) : 0.05;
}

namespace detail {

inline nlohmann::json census_json(const nodal_census& c)
{
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& comp : c.components) {
        if (!comp.enclosed)
            continue;
        const vec2 lo = c.field.cell_center(comp.bbox.ix0, comp.bbox.iy0);
        const vec2 hi = c.field.cell_center(comp.bbox.ix1, comp.bbox.iy1);
        comps.push_back({{"sign", comp.sign}, {"cells", comp.cell_count}, {"bbox", {lo.x, lo.y, hi.x, hi.y}}});
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& s : c.trace)
        trace.push_back({{"step", s.step}, {"plain", s.plain}, {"certified", s.certified}});
    return {{"plain_count", c.plain_count},
            {"certified_count", c.certified_count},
            {"margin", c.margin},
            {"step", c.step},
            {"components", comps},
            {"refinement", trace}};
}

inline std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
            throw CLI::ValidationError("list", "bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace detail

/// Runs the CLI and returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Nodal domains of sums of plane waves", "nodal_lab"};
    app.require_subcommand(1);

    std::string ensemble_path;
    double eps = default_eps;
    double step = 0.0;
    double radius = 10.0;
    double center_x = 0.0, center_y = 0.0;
    criterion_params params;
    params.search_height = default_height;

    auto add_ensemble = [&](CLI::App* sub) {
        sub->add_option("--ensemble", ensemble_path, "ensemble JSON file")->required();
    };
    auto add_window = [&](CLI::App* sub) {
        sub->add_option("--eps", eps, "stability margin")->capture_default_str();
        sub->add_option("--step", step, "grid step (0 = min(0.05, eps/(4L)))")->capture_default_str();
        sub->add_option("--radius", radius, "window radius R")->capture_default_str();
        sub->add_option("--cx", center_x, "window center x")->capture_default_str();
        sub->add_option("--cy", center_y, "window center y")->capture_default_str();
    };
    auto add_tolerances = [&](CLI::App* sub) {
        sub->add_option("--eps0", params.eps0, "independence tolerance")->capture_default_str();
        sub->add_option("--eps1", params.eps1, "direction bucket diameter (radians)")->capture_default_str();
        sub->add_option("--eps2", params.eps2, "non-domination tolerance")->capture_default_str();
        sub->add_option("--eps3", params.eps3, "counting margin")->capture_default_str();
        sub->add_option("--height", params.search_height, "integer relation search height")->capture_default_str();
        sub->add_option("--orbit-budget", params.orbit_budget, "time horizon T for the covering check")
            ->capture_default_str();
    };

    auto* eval = app.add_subcommand("eval", "evaluate f and grad f at a point");
    add_ensemble(eval);
    double px = 0.0, py = 0.0;
    eval->add_option("--x", px)->capture_default_str();
    eval->add_option("--y", py)->capture_default_str();

    auto* census = app.add_subcommand("census", "plain and certified nodal domain counts");
    add_ensemble(census);
    add_window(census);
    double refine_min = 0.0;
    census->add_option("--refine", refine_min, "halve the step down to this value until the count is stable");

    auto* render = app.add_subcommand("render", "write the sign field as a P5 graymap");
    add_ensemble(render);
    add_window(render);
    std::string image_path;
    render->add_option("--output,-o", image_path, "output .pgm path")->required();

    auto* check = app.add_subcommand("check", "report on the lower-bound hypotheses");
    add_ensemble(check);
    add_tolerances(check);

    auto* indep = app.add_subcommand("independence", "integer relation search and witness direction");
    add_ensemble(indep);
    add_tolerances(indep);

    auto* dom = app.add_subcommand("domination", "minimal signed sum of the amplitudes");
    std::string amplitude_list;
    auto* dom_ens = dom->add_option("--ensemble", ensemble_path, "ensemble JSON file");
    dom->add_option("--amplitudes", amplitude_list, "comma separated amplitudes")->excludes(dom_ens);
    dom->add_option("--eps2", params.eps2, "non-domination tolerance")->capture_default_str();

    auto* lemma3 = app.add_subcommand("lemma3", "three-wave ensemble with a stable domain at the origin");
    std::vector<double> k1{1.0, 0.0}, k2{0.0, 1.0}, k3{std::sqrt(0.5), std::sqrt(0.5)};
    double lemma_eps = 0.01, a1 = 1.0;
    lemma3->add_option("--k1", k1)->expected(2)->capture_default_str();
    lemma3->add_option("--k2", k2)->expected(2)->capture_default_str();
    lemma3->add_option("--k3", k3)->expected(2)->capture_default_str();
    lemma3->add_option("--epsilon", lemma_eps, "gap (a1 - a2) / a1")->capture_default_str();
    lemma3->add_option("--a1", a1)->capture_default_str();

    auto* torus = app.add_subcommand("torus", "eigenfunction of the flat torus near target directions");
    std::string target_list = "10,40,75", torus_amps = "1,1,1", torus_phases = "0,0,0", torus_phases_hat = "0,0,0";
    double tolerance = 0.2;
    std::int64_t scale = 1, m_max = 1000000;
    int torus_height = default_torus_height;
    torus->add_option("--targets", target_list, "target angles in degrees")->capture_default_str();
    torus->add_option("--tolerance", tolerance, "angular tolerance (radians)")->capture_default_str();
    torus->add_option("--amplitudes", torus_amps)->capture_default_str();
    torus->add_option("--phases", torus_phases)->capture_default_str();
    torus->add_option("--phases-hat", torus_phases_hat)->capture_default_str();
    torus->add_option("--p", scale, "scaling p")->capture_default_str();
    torus->add_option("--m-max", m_max, "largest squared norm searched")->capture_default_str();
    torus->add_option("--height", torus_height, "relation search height")->capture_default_str();

    auto* scaling = app.add_subcommand("scaling", "certified counts over growing radii");
    add_ensemble(scaling);
    add_tolerances(scaling);
    std::string radii_list = "20,40,80", csv_path;
    bool omit_timing = false, unchecked = false;
    scaling->add_option("--radii", radii_list, "comma separated radii")->capture_default_str();
    scaling->add_option("--eps", eps, "stability margin")->capture_default_str();
    scaling->add_option("--step", step, "grid step (0 = min(0.05, eps/(4L)))")->capture_default_str();
    scaling->add_option("--output,-o", csv_path, "CSV path (default: stdout)");
    scaling->add_flag("--omit-timing", omit_timing, "write 0 in the seconds column");
    scaling->add_flag("--unchecked", unchecked, "continue when the hypotheses fail");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return usage;
    }

    try {
        if (*eval) {
            const auto e = load_ensemble(ensemble_path);
            const vec2 x{px, py};
            const vec2 g = gradient(e, x);
            out << nlohmann::json{{"value", evaluate(e, x)}, {"gradient", {g.x, g.y}}}.dump() << "\n";
        } else if (*census || *render) {
            const auto e = load_ensemble(ensemble_path);
            const double h = step > 0.0 ? step : auto_step(e, eps);
            const grid_spec window{{center_x, center_y}, radius, h};
            if (*census) {
                const auto c = refine_min > 0.0 ? refine_until_stable(e, window, eps, h, refine_min)
                                                : certified_count(e, window, eps);
                out << detail::census_json(c).dump(2) << "\n";
            } else {
                render_sign_field(sample_field(e, window, eps), image_path);
            }
        } else if (*check) {
            const auto rep = theorem2_check(load_ensemble(ensemble_path), params);
            out << to_json(rep).dump(2) << "\n";
            for (const auto& f : rep.failures)
                err << f << "\n";
            return rep.passed ? ok : domain_failure;
        } else if (*indep) {
            const auto e = load_ensemble(ensemble_path);
            out << to_json(check_independence(e.wavevectors(), params)).dump(2) << "\n";
        } else if (*dom) {
            std::vector<double> amps;
            if (!amplitude_list.empty()) {
                amps = detail::parse_list(amplitude_list);
            } else if (!ensemble_path.empty()) {
                for (double a : load_ensemble(ensemble_path).amplitudes())
                    amps.push_back(std::abs(a));
            } else {
                err << "error: domination needs --amplitudes or --ensemble\n" << dom->help();
                return usage;
            }
            out << to_json(check_non_domination(amps, params.eps2)).dump(2) << "\n";
        } else if (*lemma3) {
            const auto w = make_lemma3_window({k1[0], k1[1]}, {k2[0], k2[1]}, {k3[0], k3[1]}, lemma_eps);
            const auto e = build_three_wave({k1[0], k1[1]}, {k2[0], k2[1]}, {k3[0], k3[1]}, lemma_eps, a1);
            err << "lambda' = " << w.lambda_prime << "\nmu' = " << w.mu_prime << "\ncase = " << to_string(w.case_tag)
                << "\na3/a1 window = (" << w.a3_lo << ", " << w.a3_hi << ")\norder = " << w.vector_order[0] << ","
                << w.vector_order[1] << "," << w.vector_order[2] << "\n";
            out << to_json(e).dump(2) << "\n";
        } else if (*torus) {
            std::vector<vec2> targets;
            for (double deg : detail::parse_list(target_list))
                targets.push_back(unit_from_angle(deg * std::numbers::pi / 180.0));
            criterion_params tp = params;
            tp.search_height = torus_height;
            const auto amps = detail::parse_list(torus_amps);
            const auto ph = detail::parse_list(torus_phases);
            const auto phh = detail::parse_list(torus_phases_hat);
            const auto res = torus_eigenfunction(targets, tolerance, amps, ph, phh, scale, m_max, tp);
            for (const auto& s : res.trace) {
                err << "m = " << s.m;
                if (s.relation.empty()) {
                    err << " accepted\n";
                    continue;
                }
                err << " relation (";
                for (std::size_t i = 0; i < s.relation.size(); ++i)
                    err << (i ? "," : "") << s.relation[i];
                err << ")\n";
            }
            err << "lambda_p = " << res.mode.lambda_p << "\n";
            out << to_json(res.mode.ensemble()).dump(2) << "\n";
        } else if (*scaling) {
            const auto e = load_ensemble(ensemble_path);
            const double h = step > 0.0 ? step : auto_step(e, eps);
            scaling_options opt;
            opt.params = params;
            opt.require_hypotheses = !unchecked;
            if (unchecked) {
                const auto rep = theorem2_check(e, params);
                for (const auto& f : rep.failures)
                    err << "warning: " << f << "\n";
            }
            const auto run = run_scaling(e, detail::parse_list(radii_list), eps, h, opt);
            for (const auto& d : run.diagnostics)
                err << d << "\n";
            err << "fitted_c = " << run.fitted_c << "\nrelative_residual = " << run.relative_residual << "\n";
            if (csv_path.empty())
                out << scaling_csv(run, omit_timing);
            else
                write_scaling_csv(run, csv_path, omit_timing);
        }
    } catch (const nodal::error& e) {
        err << e.what() << "\n";
        return domain_failure;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
    return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace nodal::cli
