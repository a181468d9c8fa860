#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fate::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; -1 if absent.
    int column(const std::string& name) const;
};

// RFC-4180-style parsing: quoted fields, doubled quotes, CR/LF tolerated.
Table read_file(const std::string& path);
Table read_stream(std::istream& in);

std::string escape_field(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);  // throws ParseError
bool is_na(const std::string& s);           // "", "?", "NA", "N/A", "nan"

}  // namespace fate::csv
