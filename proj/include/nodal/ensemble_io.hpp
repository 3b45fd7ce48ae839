#pragma once

// JSON ensemble documents:
//
//     {"terms": [{"a": 1.0, "kx": 1.0, "ky": 0.0, "theta": 0.0}, ...]}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nodal/error.hpp"
#include "nodal/wave_model.hpp"

namespace nodal {

inline nlohmann::json to_json(const wave_ensemble& e)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms()) {
        terms.push_back({{"a", t.amplitude},
                         {"kx", t.wavevector.x},
                         {"ky", t.wavevector.y},
                         {"theta", t.phase}});
    }
    return {{"terms", terms}};
}

inline wave_ensemble ensemble_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("terms") || !doc["terms"].is_array())
        throw error(errc::parse_error, "ensemble document needs a top-level 'terms' list");
    std::vector<plane_wave_term> terms;
    for (const auto& item : doc["terms"]) {
        auto number = [&](const char* key) {
            if (!item.contains(key) || !item[key].is_number())
                throw error(errc::parse_error, std::string("term is missing numeric field '") + key + "'");
            return item[key].get<double>();
        };
        terms.emplace_back(number("a"), vec2{number("kx"), number("ky")}, number("theta"));
    }
    return wave_ensemble(std::move(terms));
}

inline wave_ensemble parse_ensemble(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw error(errc::parse_error, ex.what());
    }
    return ensemble_from_json(doc);
}

inline wave_ensemble load_ensemble(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw error(errc::io_failure, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ensemble(buf.str());
}

inline void save_ensemble(const wave_ensemble& e, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw error(errc::io_failure, "cannot write " + path.string());
    out << to_json(e).dump(2) << '\n';
    if (!out)
        throw error(errc::io_failure, "write failed for " + path.string());
}

} // namespace nodal
