#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace subchan {

// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class T>
    requires std::is_integral_v<T>
std::string format_number(T v) {
    return std::to_string(v);
}

class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header) : os_(os) {
        row_strings(std::vector<std::string>(header.begin(), header.end()));
    }
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) { row_strings(header); }

    template <class... Ts>
    void row(const Ts&... values) {
        std::vector<std::string> cells{cell(values)...};
        row_strings(cells);
    }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class T>
    static std::string cell(const T& v) { return format_number(v); }

    std::ostream& os_;
};

}  // namespace subchan
