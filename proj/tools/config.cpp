#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "henon/map_io.hpp"

namespace henon::cli {

namespace {

using nlohmann::json;
using Path = std::vector<std::string>;

std::string dotted(const Path& p)
{
    std::string s;
    for (const auto& k : p) s += (s.empty() ? "" : ".") + k;
    return s;
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const Path& p, const std::string& what) const
    {
        const int line = locate_key(text_, p);
        std::string msg = dotted(p) + ": " + what;
        if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
        throw ConfigError(msg, line);
    }

    void only(const json& obj, const Path& p, std::initializer_list<const char*> keys) const
    {
        if (!obj.is_object()) fail(p, "expected an object");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items()) {
            Path q = p;
            q.push_back(k);
            if (!allowed.count(k)) fail(q, "unknown key");
        }
    }

    void integer(const json& obj, Path p, const char* key, int& out, int lo) const
    {
        if (!obj.contains(key)) return;
        p.push_back(key);
        const json& v = obj[key];
        if (!v.is_number_integer()) fail(p, "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > 1'000'000) fail(p, "must be in [" + std::to_string(lo) + ", 1000000]");
        out = static_cast<int>(x);
    }

    void positive(const json& obj, Path p, const char* key, double& out) const
    {
        if (!obj.contains(key)) return;
        p.push_back(key);
        const json& v = obj[key];
        if (!v.is_number()) fail(p, "expected a number");
        const double x = v.get<double>();
        if (!(x > 0.0) || !std::isfinite(x)) fail(p, "must be positive and finite");
        out = x;
    }

private:
    const std::string& text_;
};

} // namespace

int locate_key(const std::string& text, const Path& path)
{
    if (path.empty()) return 0;
    Path stack;       // keys of the enclosing objects
    std::vector<char> brackets;
    std::string pending; // last key read at the current level
    int line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
        } else if (ch == '"') {
            std::string s;
            std::size_t j = i + 1;
            for (; j < text.size() && text[j] != '"'; ++j) {
                if (text[j] == '\\' && j + 1 < text.size()) ++j;
                s += text[j];
            }
            std::size_t k = j + 1;
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k])) && text[k] != '\n') ++k;
            if (k < text.size() && text[k] == ':' && !brackets.empty() && brackets.back() == '{') {
                pending = s;
                if (stack.size() + 1 == path.size() && std::equal(stack.begin(), stack.end(), path.begin()) &&
                    s == path.back())
                    return line;
            }
            i = j;
        } else if (ch == '{' || ch == '[') {
            if (ch == '{' && !brackets.empty() && brackets.back() == '{') stack.push_back(pending);
            else if (ch == '{' && !brackets.empty()) stack.push_back("[]");
            brackets.push_back(ch);
        } else if (ch == '}' || ch == ']') {
            if (!brackets.empty()) {
                if (brackets.back() == '{' && brackets.size() > 1) stack.pop_back();
                brackets.pop_back();
            }
        }
    }
    return 0;
}

RunConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line
        int line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")", line);
    }
    Reader rd(text);
    rd.only(doc, {}, {"schema", "map", "budgets", "tolerances", "radii", "green", "tangency", "output", "seed", "jobs"});

    RunConfig cfg;
    if (doc.contains("schema") && doc["schema"] != "henon-qh.config/1")
        rd.fail({"schema"}, "unsupported schema, expected \"henon-qh.config/1\"");
    if (!doc.contains("map")) throw ConfigError("missing required key \"map\"", 0);
    try {
        cfg.map = parse_map(doc["map"]);
    } catch (const std::invalid_argument& e) {
        rd.fail({"map"}, e.what());
    }
    cfg.map_spec = to_json(cfg.map);

    if (doc.contains("budgets")) {
        const json& b = doc["budgets"];
        const Path p{"budgets"};
        rd.only(b, p, {"n_max", "N_max", "T", "grid", "samples", "green_iter", "escape_max", "seeds"});
        rd.integer(b, p, "n_max", cfg.budgets.n_max, 1);
        rd.integer(b, p, "N_max", cfg.budgets.N_max, 1);
        rd.integer(b, p, "T", cfg.budgets.T, 2);
        rd.integer(b, p, "grid", cfg.budgets.grid, 1);
        rd.integer(b, p, "samples", cfg.budgets.samples, 1);
        rd.integer(b, p, "green_iter", cfg.budgets.green_iter, 1);
        rd.integer(b, p, "escape_max", cfg.budgets.escape_max, 1);
        rd.integer(b, p, "seeds", cfg.budgets.seeds, 1);
    }
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        const Path p{"tolerances"};
        rd.only(t, p, {"series_tol", "norm_tol", "angle_tol", "tau_threshold", "residual_tol"});
        rd.positive(t, p, "series_tol", cfg.tol.series_tol);
        rd.positive(t, p, "norm_tol", cfg.tol.norm_tol);
        rd.positive(t, p, "angle_tol", cfg.tol.angle_tol);
        rd.positive(t, p, "tau_threshold", cfg.tol.tau_threshold);
        rd.positive(t, p, "residual_tol", cfg.tol.residual_tol);
    }
    if (doc.contains("radii")) {
        const json& r = doc["radii"];
        const Path p{"radii"};
        rd.only(r, p, {"r", "r0", "r_grid", "ru", "rs", "tau_radius"});
        rd.positive(r, p, "r", cfg.radii.r);
        rd.positive(r, p, "r0", cfg.radii.r0);
        rd.positive(r, p, "ru", cfg.radii.ru);
        rd.positive(r, p, "rs", cfg.radii.rs);
        rd.positive(r, p, "tau_radius", cfg.radii.tau_radius);
        if (r.contains("r_grid")) {
            const json& g = r["r_grid"];
            if (!g.is_array() || g.empty()) rd.fail({"radii", "r_grid"}, "expected a nonempty array of radii");
            cfg.radii.r_grid.clear();
            for (const auto& v : g) {
                if (!v.is_number() || !(v.get<double>() > 0.0)) rd.fail({"radii", "r_grid"}, "radii must be positive");
                cfg.radii.r_grid.push_back(v.get<double>());
            }
            for (std::size_t i = 1; i < cfg.radii.r_grid.size(); ++i)
                if (cfg.radii.r_grid[i] <= cfg.radii.r_grid[i - 1])
                    rd.fail({"radii", "r_grid"}, "radii must be increasing");
        }
        if (cfg.radii.r > cfg.radii.r0) rd.fail({"radii", "r"}, "must not exceed radii.r0");
    }
    if (doc.contains("green")) {
        const json& g = doc["green"];
        const Path p{"green"};
        rd.only(g, p, {"box", "n"});
        rd.positive(g, p, "box", cfg.green.box);
        rd.integer(g, p, "n", cfg.green.n, 1);
    }
    if (doc.contains("tangency")) {
        const json& t = doc["tangency"];
        const Path p{"tangency"};
        rd.only(t, p, {"k", "n_max", "member", "kick"});
        rd.integer(t, p, "k", cfg.tangency.k, 1);
        rd.integer(t, p, "n_max", cfg.tangency.n_max, 3);
        rd.integer(t, p, "member", cfg.tangency.member, 0);
        rd.positive(t, p, "kick", cfg.tangency.kick);
        if (cfg.tangency.k > 8) rd.fail({"tangency", "k"}, "must be at most 8");
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string() || doc["output"].get<std::string>().empty())
            rd.fail({"output"}, "expected a nonempty path string");
        cfg.output = doc["output"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) rd.fail({"seed"}, "expected a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    rd.integer(doc, {}, "jobs", cfg.jobs, 1);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string(), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace henon::cli
