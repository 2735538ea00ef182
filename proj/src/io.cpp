#include "lindblad_modes/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>

#include "lindblad_modes/errors.hpp"

namespace lindblad {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ObservableTable& table) {
    std::string text = "t";
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (table.is_complex[c])
            text += "," + table.names[c] + "_re," + table.names[c] + "_im";
        else
            text += "," + table.names[c];
    }
    text += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        text += format_double(table.times[r]);
        for (std::size_t c = 0; c < table.names.size(); ++c) {
            const Complex v = table.rows[r][c];
            text += ',' + format_double(v.real());
            if (table.is_complex[c]) text += ',' + format_double(v.imag());
        }
        text += '\n';
    }
    out << text;
}

void write_state_dump(std::ostream& out, const EvolutionResult& result) {
    std::string text;
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        if (k > 0) text += '\n';
        const std::string t = format_double(result.times[k]);
        const Matrix& m = result.states[k].matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                text += t + ' ' + std::to_string(i) + ' ' + std::to_string(j) + ' ' + format_double(m(i, j).real()) +
                        ' ' + format_double(m(i, j).imag()) + '\n';
    }
    out << text;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
    f << text;
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

} // namespace lindblad
