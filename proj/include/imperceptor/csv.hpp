#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "imperceptor/errors.hpp"

namespace imperceptor {

// Shortest round-trip decimal form; infinities serialize as "inf"/"-inf".
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("bad numeric field: '" + s + "'");
    }
    return v;
}

inline int parse_int(const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("bad integer field: '" + s + "'");
    }
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

// Reads all non-empty lines; lines starting with '#' go to `comments` if given.
inline std::vector<std::string> read_lines(const std::filesystem::path& path,
                                           std::vector<std::string>* comments = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (comments) comments->push_back(line);
            continue;
        }
        lines.push_back(line);
    }
    return lines;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
    }

    void raw_line(const std::string& line) { out_ << line << "\n"; }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, write_field(fields)), ...);
        out_ << "\n";
    }

private:
    void write_field(const std::string& s) { out_ << s; }
    void write_field(const char* s) { out_ << s; }
    void write_field(int v) { out_ << v; }
    void write_field(std::uint64_t v) { out_ << v; }
    void write_field(double v) { out_ << format_double(v); }

    std::ofstream out_;
};

}  // namespace imperceptor
