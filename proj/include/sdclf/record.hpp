#pragma once

// Structured text records: one `key=value` per line, `#` starts a comment.
// All floats rendered with %.12g so records are byte-stable.

#include "sdclf/polynomial.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace sdclf {

class Record {
public:
    explicit Record(std::string title) : title_(std::move(title)) {}

    Record& set(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
        return *this;
    }
    Record& set(const std::string& key, double value) {
        return set(key, detail::format_double(value));
    }
    Record& set(const std::string& key, int value) { return set(key, std::to_string(value)); }
    Record& set(const std::string& key, bool value) {
        return set(key, std::string(value ? "true" : "false"));
    }
    Record& set(const std::string& key, const Vec& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += detail::format_double(v[i]);
        }
        return set(key, s);
    }

    std::string str() const {
        std::string out = "# " + title_ + "\n";
        for (const auto& [k, v] : lines_) out += k + "=" + v + "\n";
        return out;
    }

private:
    std::string title_;
    std::vector<std::pair<std::string, std::string>> lines_;
};

/// Parse a record body back into a key -> value map (comments skipped).
inline std::map<std::string, std::string> parse_record(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

}  // namespace sdclf
