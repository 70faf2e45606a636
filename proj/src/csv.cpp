#include "gofperm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace gofperm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one logical record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no,
                                      const std::string& source) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            if (!trim(cell).empty()) {
                throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line_no) +
                                                       ": stray quote in field " +
                                                       std::to_string(cells.size() + 1));
            }
            cell.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.push_back(was_quoted ? cell : trim(cell));
            cell.clear();
            was_quoted = false;
        } else {
            cell += c;
        }
    }
    if (quoted) {
        throw Error(ErrorKind::ParseError,
                    source + ": line " + std::to_string(line_no) + ": unterminated quoted field");
    }
    cells.push_back(was_quoted ? cell : trim(cell));
    return cells;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == ".";
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable table;
    table.source = source;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split_record(line, line_no, source);
        if (!have_header) {
            std::set<std::string> seen;
            for (const auto& h : cells) {
                if (h.empty()) {
                    throw Error(ErrorKind::ParseError, source + ": header has an empty column name");
                }
                if (!seen.insert(h).second) {
                    throw Error(ErrorKind::ParseError, source + ": duplicate column '" + h + "'");
                }
            }
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(table.header.size()) + " fields, found " +
                                                   std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw Error(ErrorKind::ParseError, source + ": file is empty");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return read_csv(in, path);
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    throw Error(ErrorKind::UnknownColumn, source + ": no column named '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& cell = rows[r][j];
        // Data rows are numbered from 1, the header is row 0.
        const std::string where = source + ": row " + std::to_string(r + 1) + ", column '" + name + "'";
        if (is_missing(cell)) throw Error(ErrorKind::MissingValue, where + ": missing value");
        double v = 0.0;
        const char* begin = cell.data();
        const char* end = begin + cell.size();
        if (*begin == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
            throw Error(ErrorKind::ParseError, where + ": '" + cell + "' is not a finite number");
        }
        out.push_back(v);
    }
    return out;
}

Dataset dataset_from_table(const CsvTable& table, const std::string& response,
                           const std::vector<std::string>& covariates) {
    std::set<std::string> distinct{response};
    for (const auto& c : covariates) {
        if (!distinct.insert(c).second) {
            throw Error(ErrorKind::InvalidArgument, "column '" + c + "' selected more than once");
        }
    }
    const std::vector<double> yv = table.numeric_column(response);
    const auto n = static_cast<Eigen::Index>(yv.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(covariates.size() + 1));
    x.col(0).setOnes();
    std::vector<std::string> names{"(Intercept)"};
    for (std::size_t j = 0; j < covariates.size(); ++j) {
        const std::vector<double> col = table.numeric_column(covariates[j]);
        for (Eigen::Index i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(j + 1)) = col[static_cast<std::size_t>(i)];
        names.push_back(covariates[j]);
    }
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), n);
    return Dataset(std::move(y), std::move(x), std::move(names));
}

Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& covariates) {
    return dataset_from_table(read_csv_file(path), response, covariates);
}

std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << "replicate_id,key,cum\n";
    for (const auto& r : rows) out << r.replicate_id << ',' << format_17(r.key) << ',' << format_17(r.cum) << '\n';
}

}  // namespace gofperm
