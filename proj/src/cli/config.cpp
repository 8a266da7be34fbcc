#include "fdplens/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "fdplens/input.hpp"

namespace fdplens {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Strips a trailing '#' comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

nlohmann::json toml_scalar(std::string_view v, std::size_t line) {
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
    std::string digits;
    for (char ch : v) {
        if (ch != '_') digits.push_back(ch);
    }
    const bool integral = digits.find_first_of(".eE") == std::string::npos && !digits.empty();
    if (integral) {
        try {
            std::size_t used = 0;
            if (digits.front() == '-') {
                const long long value = std::stoll(digits, &used);
                if (used == digits.size()) return value;
            } else {
                const unsigned long long value = std::stoull(digits, &used);
                if (used == digits.size()) return value;
            }
        } catch (const std::exception&) {
        }
    }
    double x = 0.0;
    if (parse_number(digits, x)) return x;
    throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + std::string(v) + "'");
}

double number_field(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t count_field(const nlohmann::json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw ConfigError("'" + key + "' must be a nonnegative integer");
}

} // namespace

nlohmann::json parse_flat_toml(std::string_view text) {
    nlohmann::json doc = nlohmann::json::object();
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') throw ConfigError("line " + std::to_string(line_no) + ": tables are not supported");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (doc.contains(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

        if (value.front() == '[') {
            if (value.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
            nlohmann::json arr = nlohmann::json::array();
            std::string_view body = value.substr(1, value.size() - 2);
            std::size_t start = 0;
            while (start <= body.size()) {
                const auto comma = body.find(',', start);
                const auto item =
                    trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
                if (!item.empty()) arr.push_back(toml_scalar(item, line_no));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            doc[key] = std::move(arr);
        } else {
            if (value.front() == '{') {
                throw ConfigError("line " + std::to_string(line_no) + ": inline tables are not supported");
            }
            doc[key] = toml_scalar(value, line_no);
        }
    }
    return doc;
}

SimulationSpec simulation_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be an object");
    static const std::set<std::string> known = {"gamma", "mu",          "m",          "reps",     "seed",
                                                "alpha", "q",           "gamma_subset", "mu_subset", "m_grid",
                                                "mu_grid", "subset_fraction"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    SimulationSpec spec;
    auto& mix = spec.mixture;
    if (doc.contains("gamma")) mix.gamma = number_field(doc["gamma"], "gamma");
    if (doc.contains("mu")) mix.mu = number_field(doc["mu"], "mu");
    if (doc.contains("m")) mix.m = count_field(doc["m"], "m");
    if (doc.contains("reps")) mix.reps = count_field(doc["reps"], "reps");
    if (doc.contains("seed")) mix.seed = count_field(doc["seed"], "seed");
    if (doc.contains("alpha")) mix.alpha = number_field(doc["alpha"], "alpha");
    if (doc.contains("q")) mix.q = number_field(doc["q"], "q");
    if (doc.contains("gamma_subset")) mix.gamma_subset = number_field(doc["gamma_subset"], "gamma_subset");
    if (doc.contains("mu_subset")) mix.mu_subset = number_field(doc["mu_subset"], "mu_subset");
    if (doc.contains("subset_fraction")) spec.subset_fraction = number_field(doc["subset_fraction"], "subset_fraction");

    if (doc.contains("m_grid")) {
        if (!doc["m_grid"].is_array() || doc["m_grid"].empty()) throw ConfigError("'m_grid' must be a nonempty array");
        for (const auto& v : doc["m_grid"]) {
            const auto m = count_field(v, "m_grid");
            if (m == 0) throw ConfigError("'m_grid' entries must be positive");
            spec.m_grid.push_back(m);
        }
    } else {
        spec.m_grid = {mix.m};
    }
    if (doc.contains("mu_grid")) {
        if (!doc["mu_grid"].is_array() || doc["mu_grid"].empty()) throw ConfigError("'mu_grid' must be a nonempty array");
        for (const auto& v : doc["mu_grid"]) spec.mu_grid.push_back(number_field(v, "mu_grid"));
    } else {
        spec.mu_grid = {mix.mu};
    }

    try {
        mix.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
        }
        return simulation_spec_from_json(doc);
    }
    return simulation_spec_from_json(parse_flat_toml(text));
}

} // namespace fdplens
