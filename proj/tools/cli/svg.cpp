#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucontract/io.hpp"

namespace ucontract::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

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

std::string fixed(double v) {
  // Two decimals are plenty for pixel coordinates.
  const double r = std::round(v * 100.0) / 100.0;
  return format_double(r == 0.0 ? 0.0 : r);
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymax)) ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" +
                    fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<title>" + escape(title) + "</title>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(kLeft) + "\" y=\"24\" font-size=\"15\">" + escape(title) + "</text>\n";
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) + "\" height=\"" +
         fixed(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    out += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
           format_double(std::round(xv * 1000.0) / 1000.0) + "</text>\n";
    out += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(yv) + 4) + "\" text-anchor=\"end\">" +
           format_double(std::round(yv * 1000.0) / 1000.0) + "</text>\n";
    out += "<line x1=\"" + fixed(kLeft) + "\" x2=\"" + fixed(kLeft + pw) + "\" y1=\"" + fixed(py(yv)) + "\" y2=\"" +
           fixed(py(yv)) + "\" stroke=\"#eee\"/>\n";
  }
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 16) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + fixed(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string colour = kPalette[k % std::size(kPalette)];
    out += "<g data-series=\"" + escape(s.label) + "\">\n<polyline fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\"" + (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"";
    const std::size_t m = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < m; ++i) out += (i ? " " : "") + fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
    out += "\"/>\n";
    for (std::size_t i = 0; i < m; ++i) {
      out += "<circle cx=\"" + fixed(px(s.x[i])) + "\" cy=\"" + fixed(py(s.y[i])) + "\" r=\"2\" fill=\"" + colour +
             "\" data-x=\"" + format_double(s.x[i]) + "\" data-y=\"" + format_double(s.y[i]) + "\"/>\n";
    }
    out += "</g>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + fixed(kWidth - kRight + 12) + "\" x2=\"" + fixed(kWidth - kRight + 36) + "\" y1=\"" +
           fixed(ly - 4) + "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    out += "<text x=\"" + fixed(kWidth - kRight + 42) + "\" y=\"" + fixed(ly) + "\">" + escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ucontract::cli
