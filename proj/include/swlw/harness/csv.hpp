#pragma once

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include "swlw/errors.hpp"

namespace swlw::harness {

/// 17 significant digits, '.' as decimal separator regardless of locale.
inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_number(long x) { return std::to_string(x); }
inline std::string format_number(int x) { return std::to_string(x); }

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::out | std::ios::trunc) {
        if (!out_) throw InputError("cannot open " + path + " for writing");
    }

    void header(std::initializer_list<std::string_view> columns) { write_row(columns); }

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << field(fields), first = false), ...);
        out_ << '\n';
    }

    /// Trailing "# ..." line, e.g. a failure status after partial output.
    void comment(std::string_view text) { out_ << "# " << text << '\n'; }

    void flush() { out_.flush(); }
    const std::string& path() const { return path_; }

private:
    void write_row(std::initializer_list<std::string_view> columns) {
        bool first = true;
        for (auto c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }

    static std::string field(double x) { return format_number(x); }
    static std::string field(int x) { return format_number(x); }
    static std::string field(long x) { return format_number(x); }
    static std::string field(std::size_t x) { return std::to_string(x); }
    static std::string field(bool x) { return x ? "1" : "0"; }
    static std::string field(const std::string& s) { return s; }
    static std::string field(const char* s) { return s; }

    std::string path_;
    std::ofstream out_;
};

}  // namespace swlw::harness
