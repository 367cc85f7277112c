#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace asmx::csv {

/// 12 significant digits, scientific notation, locale independent ("%.11e").
std::string format_number(double value);

/// Accumulates rows in memory; `write` emits them with '\n' line endings.
class Table {
public:
    explicit Table(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);

    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes `contents` byte for byte (binary mode). Throws std::runtime_error.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace asmx::csv
