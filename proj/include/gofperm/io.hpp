#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gofperm/engine.hpp"
#include "gofperm/linreg.hpp"

namespace gofperm {

/// Raw CSV contents; cells are kept as text until a column is selected.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// @throws Error(UnknownColumn)
    [[nodiscard]] std::size_t column_index(const std::string& name) const;
    /// @throws Error(UnknownColumn, MissingValue, ParseError)
    [[nodiscard]] std::vector<double> numeric_column(const std::string& name) const;
};

/// RFC 4180 style: comma separated, optional double quotes, header row required.
/// @throws Error(ParseError) with the offending line number.
[[nodiscard]] CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] CsvTable read_csv_file(const std::string& path);

/// Builds a Dataset with a prepended intercept column; row order is preserved.
[[nodiscard]] Dataset dataset_from_table(const CsvTable& table, const std::string& response,
                                         const std::vector<std::string>& covariates);

[[nodiscard]] Dataset load_csv(const std::string& path, const std::string& response,
                               const std::vector<std::string>& covariates);

/// Shortest decimal that round-trips.
[[nodiscard]] std::string format_shortest(double v);
/// Fixed 17 significant digits.
[[nodiscard]] std::string format_17(double v);

/// Columns replicate_id,key,cum.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

/// Names of the datasets compiled into the library ("steam").
[[nodiscard]] std::vector<std::string> bundled_dataset_names();
/// CSV text of a bundled dataset. @throws Error(InvalidArgument) for unknown names.
[[nodiscard]] std::string_view bundled_dataset(const std::string& name);

}  // namespace gofperm
