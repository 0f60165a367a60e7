#include "dilacoh/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dilacoh {

std::string format_float(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_curve_csv(const std::string& path, const std::string& command,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& trailing_comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << "# dilacoh-v1 " << command << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_float(row[i]);
        out << "\n";
    }
    for (const auto& line : trailing_comments) out << "# " << line << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_curve_json(const std::string& path, const std::string& command,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    nlohmann::json doc;
    doc["schema"] = "dilacoh-v1";
    doc["command"] = command;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i)
            obj[columns[i]] = row[i];
        arr.push_back(obj);
    }
    doc["rows"] = arr;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line, section;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError("config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw IoError("config line with empty key: " + line);
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

}  // namespace dilacoh
