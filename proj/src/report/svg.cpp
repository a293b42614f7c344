#include "lungrisk/report/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lungrisk::report {
namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string rgb(int r, int g, int b) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// -1 -> blue, 0 -> white, +1 -> red.
std::string diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const auto mix = [](double from, double to, double t) {
    return static_cast<int>(std::lround(from + (to - from) * t));
  };
  if (v >= 0) return rgb(255, mix(255, 40, v), mix(255, 40, v));
  return rgb(mix(255, 40, -v), mix(255, 90, -v), 255);
}

constexpr std::array<std::string_view, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                        "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::array<std::string_view, 6> kShade = {"#dbe9f6", "#f8d9d9", "#dcf0dc",
                                                      "#e9e0f2", "#ffe8d1", "#eadcd7"};

std::string_view palette(int cls) {
  return kPalette[static_cast<std::size_t>(std::max(cls - 1, 0)) % kPalette.size()];
}

std::string header(int width, int height) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  return o.str();
}

}  // namespace

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0000") s.erase(0, 1);
  return s;
}

std::string heatmap_svg(const stats::CorrelationMatrix& cm, std::string_view title) {
  const int n = static_cast<int>(cm.labels.size());
  const int cell = 34;
  const int left = 190;
  const int top = 200;
  const int width = left + n * cell + 20;
  const int height = top + n * cell + 20;
  std::ostringstream o;
  o << header(width, height);
  o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << escape_xml(title) << "</text>\n";
  for (int i = 0; i < n; ++i) {
    const auto& label = escape_xml(cm.labels[static_cast<std::size_t>(i)]);
    o << "<text x=\"" << left - 6 << "\" y=\"" << top + i * cell + cell / 2 + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
    const int cx = left + i * cell + cell / 2;
    o << "<text transform=\"translate(" << cx + 4 << ',' << top - 6
      << ") rotate(-60)\" font-size=\"11\">" << label << "</text>\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = cm.M(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const int x = left + j * cell;
      const int y = top + i * cell;
      o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"" << diverging(v) << "\" stroke=\"#ffffff\"/>\n";
      o << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 3
        << "\" text-anchor=\"middle\" font-size=\"9\" fill=\"" << (std::fabs(v) > 0.6 ? "#ffffff" : "#000000")
        << "\">" << fixed(v, 2) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart_svg(const std::vector<std::string>& labels, const std::vector<double>& values,
                          std::string_view title, std::string_view value_axis) {
  const int n = static_cast<int>(labels.size());
  const int bar = 22;
  const int left = 200;
  const int plot_width = 420;
  const int top = 50;
  const int width = left + plot_width + 90;
  const int height = top + n * bar + 50;
  double max_value = 0.0;
  for (double v : values) max_value = std::max(max_value, v);
  if (max_value <= 0.0) max_value = 1.0;

  std::ostringstream o;
  o << header(width, height);
  o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << escape_xml(title) << "</text>\n";
  for (int i = 0; i < n; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    const int y = top + i * bar;
    const int w = static_cast<int>(std::lround(std::max(0.0, v) / max_value * plot_width));
    o << "<text x=\"" << left - 6 << "\" y=\"" << y + bar / 2 + 4
      << "\" text-anchor=\"end\" font-size=\"12\">" << escape_xml(labels[static_cast<std::size_t>(i)])
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << y + 3 << "\" width=\"" << w << "\" height=\""
      << bar - 6 << "\" fill=\"#1f77b4\"/>\n";
    o << "<text x=\"" << left + w + 4 << "\" y=\"" << y + bar / 2 + 4 << "\" font-size=\"11\">"
      << fixed(v, 4) << "</text>\n";
  }
  o << "<text x=\"" << left + plot_width / 2 << "\" y=\"" << height - 14
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape_xml(value_axis) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string scatter_svg(const Matrix& points, const std::vector<int>& classes, std::string_view title,
                        std::string_view x_label, std::string_view y_label,
                        const ml::SvmModel* boundary) {
  const int width = 560;
  const int height = 520;
  const int left = 60, right = 20, top = 40, bottom = 50;
  const int pw = width - left - right;
  const int ph = height - top - bottom;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (points.rows() > 0) {
    xmin = xmax = points(0, 0);
    ymin = ymax = points(0, 1);
    for (std::size_t i = 0; i < points.rows(); ++i) {
      xmin = std::min(xmin, points(i, 0));
      xmax = std::max(xmax, points(i, 0));
      ymin = std::min(ymin, points(i, 1));
      ymax = std::max(ymax, points(i, 1));
    }
  }
  const double xpad = std::max(1e-9, (xmax - xmin) * 0.05);
  const double ypad = std::max(1e-9, (ymax - ymin) * 0.05);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << header(width, height);
  o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << escape_xml(title) << "</text>\n";
  if (boundary) {
    const int grid = 60;
    const double cw = static_cast<double>(pw) / grid;
    const double ch = static_cast<double>(ph) / grid;
    for (int gy = 0; gy < grid; ++gy) {
      for (int gx = 0; gx < grid; ++gx) {
        const double x = xmin + (gx + 0.5) / grid * (xmax - xmin);
        const double y = ymax - (gy + 0.5) / grid * (ymax - ymin);
        const std::array<double, 2> p{x, y};
        const int cls = boundary->predict(p);
        o << "<rect x=\"" << fixed(left + gx * cw, 2) << "\" y=\"" << fixed(top + gy * ch, 2)
          << "\" width=\"" << fixed(cw + 0.05, 2) << "\" height=\"" << fixed(ch + 0.05, 2)
          << "\" fill=\"" << kShade[static_cast<std::size_t>(std::max(cls - 1, 0)) % kShade.size()]
          << "\"/>\n";
      }
    }
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (std::size_t i = 0; i < points.rows(); ++i) {
    o << "<circle cx=\"" << fixed(sx(points(i, 0)), 2) << "\" cy=\"" << fixed(sy(points(i, 1)), 2)
      << "\" r=\"2.5\" fill=\"" << palette(i < classes.size() ? classes[i] : 1)
      << "\" fill-opacity=\"0.75\"/>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 14
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape_xml(x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\" "
       "font-size=\"12\">"
    << escape_xml(y_label) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace lungrisk::report
