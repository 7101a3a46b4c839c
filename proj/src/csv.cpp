#include "pdm/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>

namespace pdm {

StructuralError::StructuralError(std::string file, std::size_t line, std::string column,
                                 const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) +
                         (column.empty() ? std::string() : " column '" + column + "'") + ": " +
                         what),
      file_(std::move(file)),
      line_(line),
      column_(std::move(column)) {}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_header(std::span<const std::string_view> columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    return out;
}

namespace {

// Field parsing helpers. Each receives the canonical column index so errors
// can name the column.
class FieldParser {
public:
    FieldParser(std::span<const std::string_view> fields, std::span<const std::string_view> columns,
                std::string_view file, std::size_t line)
        : fields_(fields), columns_(columns), file_(file), line_(line) {}

    [[noreturn]] void fail(std::size_t col, const std::string& what) const {
        throw StructuralError(std::string(file_), line_, std::string(columns_[col]), what);
    }

    std::int64_t integer(std::size_t col) const {
        const auto f = fields_[col];
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
            fail(col, "expected integer, got '" + std::string(f) + "'");
        return v;
    }

    double real(std::size_t col) const {
        const auto f = fields_[col];
        double v = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
            fail(col, "expected number, got '" + std::string(f) + "'");
        return v;
    }

    bool flag(std::size_t col) const {
        const auto f = fields_[col];
        if (f == "0") return false;
        if (f == "1") return true;
        fail(col, "expected 0 or 1, got '" + std::string(f) + "'");
    }

    Timestamp datetime(std::size_t col) const {
        const auto raw = parse_datetime(fields_[col]);
        if (!raw) fail(col, "malformed datetime '" + std::string(fields_[col]) + "'");
        return round_to_hour(*raw);
    }

    template <std::size_t N>
    std::array<bool, N> flags(std::size_t first) const {
        std::array<bool, N> out{};
        for (std::size_t k = 0; k < N; ++k) out[k] = flag(first + k);
        return out;
    }

private:
    std::span<const std::string_view> fields_;
    std::span<const std::string_view> columns_;
    std::string_view file_;
    std::size_t line_;
};

void put(std::string& out, std::string_view s) {
    if (!out.empty()) out += ',';
    out += s;
}
void put(std::string& out, bool b) { put(out, std::string_view(b ? "1" : "0")); }
void put(std::string& out, std::int64_t v) { put(out, std::to_string(v)); }
void put(std::string& out, double v) { put(out, format_double(v)); }
void put(std::string& out, Timestamp t) { put(out, t.to_string()); }
template <std::size_t N>
void put(std::string& out, const std::array<bool, N>& flags) {
    for (bool b : flags) put(out, b);
}

constexpr std::array<std::string_view, 6> kTelemetryColumns = {
    "machine_id", "datetime", "volt", "rotate", "pressure", "vibration"};
constexpr std::array<std::string_view, 7> kErrorColumns = {
    "machine_id", "datetime", "error_1", "error_2", "error_3", "error_4", "error_5"};
constexpr std::array<std::string_view, 10> kMaintenanceColumns = {
    "machine_id",  "datetime",    "comp_1",      "comp_2",      "comp_3",
    "comp_4",      "comp_1_fail", "comp_2_fail", "comp_3_fail", "comp_4_fail"};
constexpr std::array<std::string_view, 6> kFailureColumns = {
    "machine_id", "datetime", "comp_1", "comp_2", "comp_3", "comp_4"};
constexpr std::array<std::string_view, 6> kMachineColumns = {
    "machine_id", "age", "model_1", "model_2", "model_3", "model_4"};
constexpr std::array<std::string_view, 26> kStreamColumns = {
    "machine_id",  "datetime",    "error_1",     "error_2",     "error_3",   "error_4",
    "error_5",     "comp_1",      "comp_2",      "comp_3",      "comp_4",    "comp_1_fail",
    "comp_2_fail", "comp_3_fail", "comp_4_fail", "volt",        "rotate",    "pressure",
    "vibration",   "age",         "model_1",     "model_2",     "model_3",   "model_4",
    "day_of_week", "label"};

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

// --- Telemetry -------------------------------------------------------------

std::span<const std::string_view> CsvTraits<TelemetryRecord>::columns() { return kTelemetryColumns; }

void CsvTraits<TelemetryRecord>::write(std::string& out, const TelemetryRecord& r) {
    put(out, r.machine_id.value);
    put(out, r.datetime);
    put(out, r.volt);
    put(out, r.rotate);
    put(out, r.pressure);
    put(out, r.vibration);
}

TelemetryRecord CsvTraits<TelemetryRecord>::parse(std::span<const std::string_view> fields,
                                                  std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    return {MachineId{p.integer(0)}, p.datetime(1), p.real(2), p.real(3), p.real(4), p.real(5)};
}

// --- Errors ----------------------------------------------------------------

std::span<const std::string_view> CsvTraits<ErrorRecord>::columns() { return kErrorColumns; }

void CsvTraits<ErrorRecord>::write(std::string& out, const ErrorRecord& r) {
    put(out, r.machine_id.value);
    put(out, r.datetime);
    put(out, r.error);
}

ErrorRecord CsvTraits<ErrorRecord>::parse(std::span<const std::string_view> fields,
                                          std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    return {MachineId{p.integer(0)}, p.datetime(1), p.flags<kNumErrors>(2)};
}

// --- Maintenance -----------------------------------------------------------

std::span<const std::string_view> CsvTraits<MaintenanceRecord>::columns() {
    return kMaintenanceColumns;
}

void CsvTraits<MaintenanceRecord>::write(std::string& out, const MaintenanceRecord& r) {
    put(out, r.machine_id.value);
    put(out, r.datetime);
    put(out, r.comp);
    put(out, r.comp_fail);
}

MaintenanceRecord CsvTraits<MaintenanceRecord>::parse(std::span<const std::string_view> fields,
                                                      std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    return {MachineId{p.integer(0)}, p.datetime(1), p.flags<kNumComponents>(2),
            p.flags<kNumComponents>(6)};
}

// --- Failures --------------------------------------------------------------

std::span<const std::string_view> CsvTraits<FailureRecord>::columns() { return kFailureColumns; }

void CsvTraits<FailureRecord>::write(std::string& out, const FailureRecord& r) {
    put(out, r.machine_id.value);
    put(out, r.datetime);
    put(out, r.comp);
}

FailureRecord CsvTraits<FailureRecord>::parse(std::span<const std::string_view> fields,
                                              std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    return {MachineId{p.integer(0)}, p.datetime(1), p.flags<kNumComponents>(2)};
}

// --- Machines --------------------------------------------------------------

std::span<const std::string_view> CsvTraits<MachineDescriptor>::columns() { return kMachineColumns; }

void CsvTraits<MachineDescriptor>::write(std::string& out, const MachineDescriptor& r) {
    put(out, r.machine_id.value);
    put(out, r.age);
    put(out, r.model);
}

MachineDescriptor CsvTraits<MachineDescriptor>::parse(std::span<const std::string_view> fields,
                                                      std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    return {MachineId{p.integer(0)}, p.integer(1), p.flags<kNumModels>(2)};
}

// --- Assembled stream ------------------------------------------------------

std::span<const std::string_view> CsvTraits<MachineStateRow>::columns() { return kStreamColumns; }

void CsvTraits<MachineStateRow>::write(std::string& out, const MachineStateRow& r) {
    put(out, r.machine_id.value);
    put(out, r.datetime);
    put(out, r.error);
    put(out, r.comp);
    put(out, r.comp_fail);
    put(out, r.volt);
    put(out, r.rotate);
    put(out, r.pressure);
    put(out, r.vibration);
    put(out, r.age);
    put(out, r.model);
    put(out, weekday_name(r.day_of_week));
    put(out, r.label);
}

MachineStateRow CsvTraits<MachineStateRow>::parse(std::span<const std::string_view> fields,
                                                  std::string_view file, std::size_t line) {
    const FieldParser p(fields, columns(), file, line);
    MachineStateRow r;
    r.machine_id = MachineId{p.integer(0)};
    r.datetime = p.datetime(1);
    r.error = p.flags<kNumErrors>(2);
    r.comp = p.flags<kNumComponents>(7);
    r.comp_fail = p.flags<kNumComponents>(11);
    r.volt = p.real(15);
    r.rotate = p.real(16);
    r.pressure = p.real(17);
    r.vibration = p.real(18);
    r.age = p.integer(19);
    r.model = p.flags<kNumModels>(20);
    const auto dow = parse_weekday(fields[24]);
    if (!dow) p.fail(24, "unknown weekday '" + std::string(fields[24]) + "'");
    r.day_of_week = *dow;
    r.label = p.flag(25);
    return r;
}

// ---------------------------------------------------------------------------

template <typename Record>
void write_csv(std::ostream& os, std::span<const Record> records) {
    os << csv_header(CsvTraits<Record>::columns()) << '\n';
    std::string line;
    for (const auto& r : records) {
        line.clear();
        CsvTraits<Record>::write(line, r);
        os << line << '\n';
    }
}

template <typename Record>
std::vector<Record> read_csv(std::istream& is, std::string_view file) {
    const auto columns = CsvTraits<Record>::columns();
    const std::string file_name(file);

    std::string line;
    if (!std::getline(is, line)) throw StructuralError(file_name, 1, "", "missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // field position in the file for each canonical column
    const auto header = split(line);
    std::vector<std::size_t> position(columns.size(), header.size());
    for (std::size_t h = 0; h < header.size(); ++h) {
        std::size_t c = 0;
        while (c < columns.size() && columns[c] != header[h]) ++c;
        if (c == columns.size())
            throw StructuralError(file_name, 1, std::string(header[h]), "unexpected column");
        if (position[c] != header.size())
            throw StructuralError(file_name, 1, std::string(header[h]), "duplicate column");
        position[c] = h;
    }
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (position[c] == header.size())
            throw StructuralError(file_name, 1, std::string(columns[c]), "missing column");

    std::vector<Record> out;
    std::vector<std::string_view> ordered(columns.size());
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw StructuralError(file_name, line_no, "",
                                  "expected " + std::to_string(header.size()) + " fields, got " +
                                      std::to_string(fields.size()));
        for (std::size_t c = 0; c < columns.size(); ++c) ordered[c] = fields[position[c]];
        out.push_back(CsvTraits<Record>::parse(ordered, file, line_no));
    }
    return out;
}

#define PDM_INSTANTIATE_CSV(Record)                                                    \
    template void write_csv<Record>(std::ostream&, std::span<const Record>);          \
    template std::vector<Record> read_csv<Record>(std::istream&, std::string_view)

PDM_INSTANTIATE_CSV(TelemetryRecord);
PDM_INSTANTIATE_CSV(ErrorRecord);
PDM_INSTANTIATE_CSV(MaintenanceRecord);
PDM_INSTANTIATE_CSV(FailureRecord);
PDM_INSTANTIATE_CSV(MachineDescriptor);
PDM_INSTANTIATE_CSV(MachineStateRow);

}  // namespace pdm
