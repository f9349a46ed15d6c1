#include "mtphase/output.hpp"

#include "mtphase/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace mtphase {

std::string format_double(double x) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw Error(ErrorCode::Io, "CSV row has " + std::to_string(row.size()) + " cells, header has " +
                                       std::to_string(header_.size()));
    }
    rows_.push_back(std::move(row));
}

namespace {

std::string quoted(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string q = "\"";
    for (char ch : cell) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += quoted(cells[i]);
    }
    out += '\n';
}

}  // namespace

std::string CsvTable::str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) append_line(out, r);
    return out;
}

RunWriter::RunWriter(std::filesystem::path directory) : dir_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
}

void RunWriter::write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    checksums_.emplace_back(name, sha256_hex(content));
}

void RunWriter::add_manifest_entry(std::string key, std::string value) { extra_.emplace_back(std::move(key), std::move(value)); }

void RunWriter::write_manifest(const std::string& subcommand, const std::string& config_text, std::uint64_t seed) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

    std::string m;
    m += "manifest_version=1\n";
    m += "tool=mtphase\n";
    m += "tool_version=" MTPHASE_VERSION "\n";
    m += "csv_schema_version=" + std::to_string(kCsvSchemaVersion) + "\n";
    m += "subcommand=" + subcommand + "\n";
    m += "config_sha256=" + sha256_hex(config_text) + "\n";
    m += "seed=" + std::to_string(seed) + "\n";
    m += "timestamp=" + std::string(stamp) + "\n";
    for (const auto& [k, v] : extra_) m += k + "=" + v + "\n";
    auto sorted = checksums_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [name, sum] : sorted) m += "output." + name + ".sha256=" + sum + "\n";

    const auto path = dir_ / "manifest.txt";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << m;
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace mtphase
