#include "latetail/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "latetail/errors.hpp"

namespace latetail {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != header.size()) throw Error("csv: row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::footer_value(const std::string& key) const {
    for (const auto& [k, v] : footer)
        if (k == key) return v;
    return "";
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error("csv: no column '" + name + "'");
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + quote(header[i]);
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const double* d = std::get_if<double>(&row[i]))
                out += format_real(*d);
            else
                out += quote(std::get<std::string>(row[i]));
        }
        out += '\n';
    }
    for (const auto& [k, v] : footer) out += "# " + k + ": " + v + "\n";
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + path + "'");
    f << to_string();
    if (!f) throw Error("write failed for '" + path + "'");
}

CsvTable CsvTable::parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto colon = line.find(':');
            std::string key = line.substr(1, colon == std::string::npos ? std::string::npos : colon - 1);
            std::string val = colon == std::string::npos ? "" : line.substr(colon + 1);
            auto strip = [](std::string s) {
                s.erase(0, s.find_first_not_of(' '));
                s.erase(s.find_last_not_of(' ') + 1);
                return s;
            };
            t.footer.emplace_back(strip(key), strip(val));
            continue;
        }
        auto cells = split_row(line);
        if (!have_header) {
            t.header = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) throw Error("csv: ragged row '" + line + "'");
        std::vector<CsvCell> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            if (!c.empty() && end && *end == '\0')
                row.emplace_back(v);
            else
                row.emplace_back(c);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error("csv: no header line");
    return t;
}

CsvTable CsvTable::read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace latetail
