#pragma once

#include <string>
#include <vector>

namespace uqkit::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Bar {
  std::string label;
  double value = 0.0;
};

/// Minimal self-contained SVG charts for --plot. Throw std::runtime_error
/// when the file cannot be written.
void write_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

void write_bar_chart(const std::string& path, const std::string& title, const std::string& y_label,
                     const std::vector<Bar>& bars, double reference_line = -1.0);

}  // namespace uqkit::cli
