#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtphase {

inline constexpr int kCsvSchemaVersion = 1;

/// %.17g: round-trips every finite double exactly.
std::string format_double(double x);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// In-memory CSV table with a fixed header. Cells are written verbatim, so
/// callers format numbers through format_double.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Single writer for one run: writes output files into a directory and records
/// their checksums, then emits `manifest.txt` (key=value, sorted output entries).
class RunWriter {
public:
    explicit RunWriter(std::filesystem::path directory);

    void write(const std::string& name, const std::string& content);
    void add_manifest_entry(std::string key, std::string value);

    /// The timestamp is the only field that differs between identical runs.
    void write_manifest(const std::string& subcommand, const std::string& config_text, std::uint64_t seed);

    const std::filesystem::path& directory() const { return dir_; }
    const std::vector<std::pair<std::string, std::string>>& checksums() const { return checksums_; }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> checksums_;
    std::vector<std::pair<std::string, std::string>> extra_;
};

}  // namespace mtphase
