#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uqkit::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", x);
  return buffer;
}

std::string tick_label(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", x);
  return buffer;
}

struct Frame {
  double x_min, x_max, y_min, y_max;
  double px(double x) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return kLeft + (x - x_min) / span * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return kHeight - kBottom - (y - y_min) / span * (kHeight - kTop - kBottom);
  }
};

void header(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& svg, const Frame& f, const std::string& x_label,
          const std::string& y_label, bool x_ticks) {
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << kTop << "\" x2=\"" << x0 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(y) + 4)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    if (x_ticks) {
      const double x = f.x_min + (f.x_max - f.x_min) * i / 5.0;
      svg << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(y0 + 16)
          << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    }
  }
  svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << num((kTop + y0) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num((kTop + y0) / 2) << ")\">" << escape(y_label) << "</text>\n";
}

void save(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
  Frame f{INFINITY, -INFINITY, 0.0, -INFINITY};
  for (const auto& s : series) {
    for (double x : s.x) {
      f.x_min = std::min(f.x_min, x);
      f.x_max = std::max(f.x_max, x);
    }
    for (double y : s.y) f.y_max = std::max(f.y_max, y);
  }
  if (!std::isfinite(f.x_min)) f = {0.0, 1.0, 0.0, 1.0};
  if (!(f.y_max > 0.0)) f.y_max = 1.0;
  f.y_max *= 1.1;

  std::ostringstream svg;
  header(svg, title);
  axes(svg, f, x_label, y_label, true);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
      svg << (j ? " " : "") << num(f.px(s.x[j])) << "," << num(f.py(s.y[j]));
    }
    svg << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
      svg << "<circle cx=\"" << num(f.px(s.x[j])) << "\" cy=\"" << num(f.py(s.y[j]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16.0 * static_cast<double>(i);
    svg << "<rect x=\"" << num(kWidth - kRight + 12) << "\" y=\"" << num(ly) << "\" width=\"12\" height=\"3\" fill=\""
        << color << "\"/>\n<text x=\"" << num(kWidth - kRight + 30) << "\" y=\"" << num(ly + 5) << "\">"
        << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  save(path, svg.str());
}

void write_bar_chart(const std::string& path, const std::string& title, const std::string& y_label,
                     const std::vector<Bar>& bars, double reference_line) {
  Frame f{0.0, static_cast<double>(std::max<std::size_t>(bars.size(), 1)), 0.0, 0.0};
  for (const auto& b : bars) f.y_max = std::max(f.y_max, b.value);
  f.y_max = std::max(f.y_max, reference_line);
  if (!(f.y_max > 0.0)) f.y_max = 1.0;
  f.y_max *= 1.1;

  std::ostringstream svg;
  header(svg, title);
  axes(svg, f, "", y_label, false);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double left = f.px(static_cast<double>(i) + 0.15);
    const double right = f.px(static_cast<double>(i) + 0.85);
    const double top = f.py(bars[i].value);
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
        << "\" height=\"" << num(f.py(0.0) - top) << "\" fill=\"" << kPalette[i % std::size(kPalette)]
        << "\"/>\n";
    const double cx = (left + right) / 2;
    svg << "<text x=\"" << num(cx) << "\" y=\"" << num(f.py(0.0) + 14)
        << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-30 " << num(cx) << " "
        << num(f.py(0.0) + 14) << ")\">" << escape(bars[i].label) << "</text>\n";
  }
  if (reference_line >= 0.0) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.py(reference_line)) << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << num(f.py(reference_line))
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg << "</svg>\n";
  save(path, svg.str());
}

}  // namespace uqkit::cli
