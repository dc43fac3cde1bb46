#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace henon::cli {

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const nlohmann::json& j, std::string& out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += inner + nlohmann::json(it.key()).dump() + ": ";
            emit(it.value(), out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // short arrays of scalars stay on one line
        bool flat = j.size() <= 8;
        for (const auto& v : j) flat = flat && !v.is_structured();
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += inner;
            emit(v, out, indent + 1);
        }
        out += flat ? "]" : "\n" + pad + "]";
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? fmt(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace

std::string dump_json(const nlohmann::json& j)
{
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

void ensure_directory(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << dump_json(j);
    if (!out) throw IoError("write failed: " + path.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), columns_(columns.size())
{
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "# schema=" << schema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::cell(const std::string& s)
{
    if (filled_ == columns_) throw std::logic_error("too many cells in a row of " + path_.string());
    out_ << (filled_ ? "," : "") << s;
    ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v)
{
    cell(fmt(v));
    return *this;
}
CsvWriter& CsvWriter::operator<<(int v)
{
    cell(std::to_string(v));
    return *this;
}
CsvWriter& CsvWriter::operator<<(long v)
{
    cell(std::to_string(v));
    return *this;
}
CsvWriter& CsvWriter::operator<<(std::size_t v)
{
    cell(std::to_string(v));
    return *this;
}
CsvWriter& CsvWriter::operator<<(bool v)
{
    cell(v ? "1" : "0");
    return *this;
}
CsvWriter& CsvWriter::operator<<(const std::string& v)
{
    cell(v);
    return *this;
}
CsvWriter& CsvWriter::operator<<(std::complex<double> v)
{
    cell(fmt(v.real()));
    cell(fmt(v.imag()));
    return *this;
}

void CsvWriter::end_row()
{
    if (filled_ != columns_) throw std::logic_error("short row in " + path_.string());
    out_ << "\n";
    filled_ = 0;
}

void CsvWriter::close()
{
    out_.close();
    if (!out_) throw IoError("write failed: " + path_.string());
}

} // namespace henon::cli
