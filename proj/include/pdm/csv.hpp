#pragma once

// CSV encoding of the dataset records. Headers use the dataset field names,
// booleans are 0/1 and datetimes are `YYYY-MM-DD HH:MM:SS`.

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/schema.hpp"

namespace pdm {

/// Unrecoverable parse failure with file/line/column context.
class StructuralError : public std::runtime_error {
public:
    StructuralError(std::string file, std::size_t line, std::string column, const std::string& what);

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    const std::string& column() const { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::string column_;
};

std::string format_double(double v);

template <typename Record>
struct CsvTraits;

#define PDM_DECLARE_CSV_TRAITS(Record)                                        \
    template <>                                                              \
    struct CsvTraits<Record> {                                               \
        static std::span<const std::string_view> columns();                  \
        static void write(std::string& out, const Record& r);                \
        static Record parse(std::span<const std::string_view> fields,        \
                            std::string_view file, std::size_t line);        \
    }

PDM_DECLARE_CSV_TRAITS(TelemetryRecord);
PDM_DECLARE_CSV_TRAITS(ErrorRecord);
PDM_DECLARE_CSV_TRAITS(MaintenanceRecord);
PDM_DECLARE_CSV_TRAITS(FailureRecord);
PDM_DECLARE_CSV_TRAITS(MachineDescriptor);
PDM_DECLARE_CSV_TRAITS(MachineStateRow);

#undef PDM_DECLARE_CSV_TRAITS

std::string csv_header(std::span<const std::string_view> columns);

template <typename Record>
std::string to_csv_row(const Record& r) {
    std::string out;
    CsvTraits<Record>::write(out, r);
    return out;
}

template <typename Record>
void write_csv(std::ostream& os, std::span<const Record> records);

/// Reads a headed CSV. Columns are matched by name, so their order may
/// differ from the canonical one; missing or unknown columns are structural
/// errors.
template <typename Record>
std::vector<Record> read_csv(std::istream& is, std::string_view file);

}  // namespace pdm
