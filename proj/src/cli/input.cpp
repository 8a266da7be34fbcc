#include "fdplens/input.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace fdplens {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

} // namespace

bool parse_number(std::string_view field, double& out) {
    field = trim(unquote(trim(field)));
    if (field.empty()) return false;
    // from_chars rejects a leading '+', which some exporters write.
    if (field.front() == '+') field.remove_prefix(1);
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out, std::chars_format::general);
    if (ec != std::errc() || ptr != end) return false;
    // Reject inf/nan spellings; only finite decimals are p-values.
    return std::isfinite(out);
}

PValueStudy parse_table(std::string_view text) {
    std::vector<std::string> ids;
    std::vector<double> p;
    std::unordered_map<std::string, std::size_t> first_seen;

    char delim = 0;
    bool first_data_line = true;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (delim == 0) delim = line.find('\t') != std::string_view::npos ? '\t' : ',';

        const auto fields = split(line, delim);
        double value = 0.0;
        const bool numeric = fields.size() >= 2 && parse_number(fields[1], value);
        if (first_data_line) {
            first_data_line = false;
            if (!numeric) continue;  // header
        }
        if (fields.size() < 2) throw ParseError(line_no, "expected two columns (id, p)");
        if (!numeric) throw ParseError(line_no, "p-value '" + std::string(fields[1]) + "' is not a decimal number");
        if (value < 0.0 || value > 1.0) throw ParseError(line_no, "p-value outside [0, 1]");

        std::string id(unquote(fields[0]));
        if (id.empty()) throw ParseError(line_no, "empty hypothesis id");
        const auto [it, fresh] = first_seen.emplace(id, line_no);
        if (!fresh) {
            throw ParseError(line_no, "duplicate id '" + id + "' (first seen on line " + std::to_string(it->second) + ")");
        }
        ids.push_back(std::move(id));
        p.push_back(value);
    }
    if (p.empty()) throw ParseError(0, "no p-values found");
    return PValueStudy(std::move(ids), std::move(p));
}

PValueStudy read_table_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str());
}

} // namespace fdplens
