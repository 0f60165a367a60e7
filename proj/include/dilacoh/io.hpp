#pragma once

#include <map>
#include <string>
#include <vector>

#include "dilacoh/model_core.hpp"

namespace dilacoh {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// 17 significant digits, C locale, no trailing spaces; the fixed format that
// makes repeated runs byte-identical.
std::string format_float(double x);

// "# dilacoh-v1 <command>" version header, then the column header row.
void write_curve_csv(const std::string& path, const std::string& command,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& trailing_comments = {});

void write_curve_json(const std::string& path, const std::string& command,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

// Flat key=value config file with [section] headers; keys are returned as
// "section.key" ("" section for keys before any header). '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace dilacoh
