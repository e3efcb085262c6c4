#include "luxp/csv.hpp"

#include "luxp/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace luxp {

namespace {

CsvRow split(const std::string& line) {
    CsvRow fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

std::vector<CsvRow> read_csv(const std::filesystem::path& path, const CsvRow& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail_validation(path.string() + ": empty file, expected header " + csv_line(header));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (split(line) != header)
        fail_validation(path.string() + ": header '" + line + "' does not match '" + csv_line(header) + "'");

    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != header.size())
            fail_validation(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    if (in.bad()) fail_io("error while reading " + path.string());
    return rows;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    auto first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    auto res = std::from_chars(first, text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        fail_validation("not a number: '" + std::string(text) + "'");
    return value;
}

std::string csv_line(const CsvRow& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].find_first_of(",\n\r") != std::string::npos)
            fail_validation("CSV field contains a separator: '" + fields[i] + "'");
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

} // namespace luxp
