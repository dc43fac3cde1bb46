#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace henon::cli {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// %.17g; nan / inf / -inf for non-finite values.
std::string fmt(double v);

// JSON with every float at 17 significant digits (non-finite values become null),
// two-space indentation and sorted keys.
std::string dump_json(const nlohmann::json& j);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// CSV file whose first line is "# schema=<name>", then the column header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& columns);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(int v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(std::size_t v);
    CsvWriter& operator<<(bool v);
    CsvWriter& operator<<(const std::string& v);
    CsvWriter& operator<<(std::complex<double> v); // two columns: re, im
    void end_row();
    void close();

private:
    void cell(const std::string& s);

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t filled_ = 0;
};

void ensure_directory(const std::filesystem::path& dir);

} // namespace henon::cli
