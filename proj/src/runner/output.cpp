#include "runner/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace igchaos::runner {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != columns.size())
        throw DomainError("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(columns);
    for (const auto& r : rows)
        line(r);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("failed writing " + path.string());
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
    constexpr double W = 800, H = 600, left = 80, right = 20, top = 50, bottom = 60;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 >= x0)) {
        x0 = 0;
        x1 = 1;
    }
    if (!(y1 >= y0)) {
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    o << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    o << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
      << escape(title) << "</text>\n";
    o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        o << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(px(xv))
          << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 20)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(xv)
          << "</text>\n";
        o << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(left)
          << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(yv) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(x_label)
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"14\" transform=\"rotate(-90 18 " << num(top + ph / 2) << ")\">" << escape(y_label)
      << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            if (!first)
                o << ' ';
            o << num(px(s.x[i])) << ',' << num(py(s.y[i]));
            first = false;
        }
        o << "\"/>\n";
        o << "<text x=\"" << num(left + 10) << "\" y=\"" << num(top + 18 + 16 * k) << "\" fill=\"" << color
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace igchaos::runner
