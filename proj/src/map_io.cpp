#include "henon/map_io.hpp"

#include <stdexcept>

namespace henon {

Complex parse_complex(const nlohmann::json& v)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("expected a number or a [re, im] pair, got " + v.dump());
}

nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

HenonMap parse_map(const nlohmann::json& spec)
{
    if (!spec.is_object() || !spec.contains("factors") || !spec["factors"].is_array())
        throw std::invalid_argument("map specification needs a \"factors\" array");
    std::vector<HenonFactor> factors;
    for (const auto& item : spec["factors"]) {
        if (!item.is_object() || !item.contains("p") || !item.contains("a"))
            throw std::invalid_argument("each factor needs \"p\" and \"a\"");
        if (!item["p"].is_array()) throw std::invalid_argument("\"p\" must be a coefficient array");
        HenonFactor h;
        for (const auto& c : item["p"]) h.p.push_back(parse_complex(c));
        h.a = parse_complex(item["a"]);
        factors.push_back(std::move(h));
    }
    return HenonMap(std::move(factors));
}

nlohmann::json to_json(const HenonMap& f)
{
    auto factors = nlohmann::json::array();
    for (const auto& h : f.factors()) {
        auto p = nlohmann::json::array();
        for (auto c : h.p) p.push_back(complex_json(c));
        factors.push_back({{"p", p}, {"a", complex_json(h.a)}});
    }
    return {{"factors", factors}};
}

} // namespace henon
