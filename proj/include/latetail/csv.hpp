#pragma once

// CSV artifacts: one header line, numeric or text cells, numbers written
// with %.17g, LF line endings, trailing `# key: value` footer lines.

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace latetail {

using CsvCell = std::variant<double, std::string>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;
    std::vector<std::pair<std::string, std::string>> footer;  // written in order

    void add_row(std::vector<CsvCell> row);
    void note(const std::string& key, const std::string& value) { footer.emplace_back(key, value); }
    std::string footer_value(const std::string& key) const;  // "" if absent
    std::size_t column(const std::string& name) const;       // throws if absent

    std::string to_string() const;
    void write(const std::string& path) const;

    static CsvTable parse(const std::string& text);
    static CsvTable read(const std::string& path);
};

std::string format_real(double v);

}  // namespace latetail
