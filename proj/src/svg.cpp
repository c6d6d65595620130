#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include <fmt/format.h>

#include "qphase/errors.hpp"
#include "qphase/experiments.hpp"
#include "qphase/instance_io.hpp"

namespace qphase {

namespace {

constexpr double kBoxWidth = 22.0;
constexpr double kBoxGap = 6.0;
constexpr double kGroupGap = 24.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kPlotHeight = 300.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += ch;
    }
  }
  return out;
}

const char* color(Method method) {
  switch (method) {
  case Method::Lmc:
    return "#1f77b4";
  case Method::Mala:
    return "#ff7f0e";
  case Method::TwfBaseline:
    return "#2ca02c";
  }
  return "#777777";
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

// Maps mre values to pixel rows; log10 when everything is positive.
struct YAxis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double pixel(double v) const {
    const double t = (transform(v) - lo) / (hi - lo);
    return kTop + kPlotHeight * (1.0 - t);
  }
};

YAxis make_axis(const std::vector<FiveNumber>& summary) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& f : summary) {
    if (f.n == 0)
      continue;
    lo = std::min(lo, f.min);
    hi = std::max(hi, f.max);
  }
  YAxis axis;
  if (!std::isfinite(lo)) {
    return axis;
  }
  axis.log = lo > 0.0;
  if (axis.log) {
    axis.lo = std::floor(std::log10(lo));
    axis.hi = std::ceil(std::log10(hi));
    if (axis.hi <= axis.lo)
      axis.hi = axis.lo + 1.0;
  } else {
    axis.lo = std::min(0.0, lo);
    axis.hi = hi > axis.lo ? hi : axis.lo + 1.0;
  }
  return axis;
}

} // namespace

std::string render_boxplots(const std::vector<FiveNumber>& summary, const std::string& x_label) {
  if (summary.empty())
    throw DomainError("render_boxplots: empty summary");

  std::vector<double> levels;
  std::vector<Method> methods;
  for (const auto& f : summary) {
    if (std::find(levels.begin(), levels.end(), f.level) == levels.end())
      levels.push_back(f.level);
    if (std::find(methods.begin(), methods.end(), f.method) == methods.end())
      methods.push_back(f.method);
  }
  std::sort(levels.begin(), levels.end());

  const double group_width =
      static_cast<double>(methods.size()) * (kBoxWidth + kBoxGap) - kBoxGap;
  const double plot_width =
      static_cast<double>(levels.size()) * (group_width + kGroupGap) + kGroupGap;
  const double width = kLeft + plot_width + kRight;
  const double height = kTop + kPlotHeight + kBottom;
  const YAxis axis = make_axis(summary);

  std::string svg;
  svg += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      num(width), num(height), num(width), num(height));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                     num(width), num(height));

  // axes
  const double x0 = kLeft;
  const double y0 = kTop + kPlotHeight;
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                     num(x0), num(kTop), num(y0));
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
                     num(x0), num(y0), num(x0 + plot_width));

  // y ticks: decades on a log axis, five even steps otherwise
  const int n_ticks = axis.log ? static_cast<int>(axis.hi - axis.lo) : 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double t = axis.lo + (axis.hi - axis.lo) * i / n_ticks;
    const double value = axis.log ? std::pow(10.0, t) : t;
    const double y = axis.pixel(value);
    const std::string label = axis.log ? fmt::format("1e{}", static_cast<int>(std::lround(t)))
                                       : fmt::format("{:.3g}", value);
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
                       num(x0 - 4), num(y), num(x0), num(y));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(x0 - 6),
                       num(y + 4), escape(label));
  }
  svg += fmt::format("<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" "
                     "text-anchor=\"middle\">mre{}</text>\n",
                     num(kTop + kPlotHeight / 2), num(kTop + kPlotHeight / 2),
                     axis.log ? " (log scale)" : "");
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     num(x0 + plot_width / 2), num(height - 12), escape(x_label));

  for (std::size_t g = 0; g < levels.size(); ++g) {
    const double gx = x0 + kGroupGap + static_cast<double>(g) * (group_width + kGroupGap);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       num(gx + group_width / 2), num(y0 + 16), escape(format_real(levels[g])));
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto it = std::find_if(summary.begin(), summary.end(), [&](const FiveNumber& f) {
        return f.level == levels[g] && f.method == methods[k];
      });
      if (it == summary.end() || it->n == 0)
        continue;
      const double bx = gx + static_cast<double>(k) * (kBoxWidth + kBoxGap);
      const double cx = bx + kBoxWidth / 2;
      const char* c = color(methods[k]);
      svg += fmt::format("<g class=\"box\" data-level=\"{}\" data-method=\"{}\">\n",
                         escape(format_real(levels[g])), to_string(methods[k]));
      svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"/>\n",
                         num(cx), num(axis.pixel(it->max)), num(axis.pixel(it->min)), c);
      const double top = axis.pixel(it->q75);
      const double bottom = axis.pixel(it->q25);
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
                         "fill-opacity=\"0.35\" stroke=\"{}\"/>\n",
                         num(bx), num(top), num(kBoxWidth), num(std::max(bottom - top, 0.5)), c,
                         c);
      svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
                         "stroke-width=\"2\"/>\n",
                         num(bx), num(axis.pixel(it->median)), num(bx + kBoxWidth),
                         num(axis.pixel(it->median)), c);
      svg += "</g>\n";
    }
  }

  // legend
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const double ly = kTop + 10 + 18 * static_cast<double>(k);
    const double lx = x0 + plot_width + 20;
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
                       num(lx), num(ly - 10), color(methods[k]));
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(lx + 18), num(ly),
                       to_string(methods[k]));
  }
  svg += "</svg>\n";
  return svg;
}

void render_boxplots(const std::vector<FiveNumber>& summary, const std::string& x_label,
                     const std::filesystem::path& out_path) {
  const std::string svg = render_boxplots(summary, x_label);
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + out_path.string() + "' for writing");
  out << svg;
  out.flush();
  if (!out)
    throw IoError("failed writing '" + out_path.string() + "'");
}

} // namespace qphase
