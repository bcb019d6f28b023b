// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kinetic/harness.hpp"

namespace kin {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#ff7f0e", "#9467bd", "#8c564b"};

struct AxisTicks {
  std::vector<double> values;  // in data space
};

AxisTicks linear_ticks(double lo, double hi) {
  AxisTicks t;
  const double span = hi - lo;
  if (!(span > 0.0)) {
    t.values = {lo};
    return t;
  }
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double s : {1.0, 2.0, 5.0, 10.0})
    if (mag * s >= raw) {
      step = mag * s;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    t.values.push_back(v);
  return t;
}

AxisTicks log_ticks(double lo, double hi) {
  AxisTicks t;
  for (int e = int(std::floor(std::log10(lo))); e <= int(std::ceil(std::log10(hi)));
       ++e)
    t.values.push_back(std::pow(10.0, e));
  return t;
}

}  // namespace

void write_svg_plot(const PlotSpec& plot, const std::string& path) {
  if (plot.series.empty()) throw ContractError("plot: no series");
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : plot.series) {
    if (s.xs.size() != s.ys.size() || s.xs.empty())
      throw ContractError("plot: series '" + s.name + "' malformed");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      const double x = s.xs[i], y = s.ys[i];
      if ((plot.log_x && !(x > 0.0)) || (plot.log_y && !(y > 0.0)))
        throw ContractError("plot: nonpositive value on a log axis");
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min = plot.log_y ? y_min * 0.5 : y_min - 0.5;
    y_max = plot.log_y ? y_max * 2.0 : y_max + 0.5;
  }

  const double w = 640, h = 440;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  auto sx = [&](double x) {
    const double u = plot.log_x
                         ? (std::log10(x) - std::log10(x_min)) /
                               (std::log10(x_max) - std::log10(x_min))
                         : (x - x_min) / (x_max - x_min);
    return ml + u * (w - ml - mr);
  };
  auto sy = [&](double y) {
    const double u = plot.log_y
                         ? (std::log10(y) - std::log10(y_min)) /
                               (std::log10(y_max) - std::log10(y_min))
                         : (y - y_min) / (y_max - y_min);
    return h - mb - u * (h - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << plot.title
      << "</text>\n";

  const AxisTicks xt =
      plot.log_x ? log_ticks(x_min, x_max) : linear_ticks(x_min, x_max);
  const AxisTicks yt =
      plot.log_y ? log_ticks(y_min, y_max) : linear_ticks(y_min, y_max);
  for (double v : xt.values) {
    if (v < x_min * (plot.log_x ? 0.999 : 1.0) - (plot.log_x ? 0 : 1e-9) ||
        v > x_max * (plot.log_x ? 1.001 : 1.0) + (plot.log_x ? 0 : 1e-9))
      continue;
    const double px = sx(v);
    svg << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px
        << "\" y2=\"" << h - mb << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  for (double v : yt.values) {
    if (v < y_min * (plot.log_y ? 0.999 : 1.0) - (plot.log_y ? 0 : 1e-9) ||
        v > y_max * (plot.log_y ? 1.001 : 1.0) + (plot.log_y ? 0 : 1e-9))
      continue;
    const double py = sy(v);
    svg << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << w - mr
        << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
      << "\" height=\"" << h - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << plot.x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << (mt + h - mb) / 2 << ")\">" << plot.y_label << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    const char* color = kPalette[s % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ser.xs.size(); ++i)
      svg << sx(ser.xs[i]) << "," << sy(ser.ys[i]) << " ";
    svg << "\"/>\n";
    for (std::size_t i = 0; i < ser.xs.size(); ++i)
      svg << "<circle cx=\"" << sx(ser.xs[i]) << "\" cy=\"" << sy(ser.ys[i])
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 16 * double(s)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\""
        << color << "\">" << ser.name << "</text>\n";
  }
  svg << "</svg>\n";

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw RuntimeError("cannot open for writing: " + tmp);
    os << svg.str();
    if (!os) throw RuntimeError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw RuntimeError("cannot move into place: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw ContractError("csv: empty header");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw RuntimeError("cannot open for writing: " + tmp);
    for (std::size_t i = 0; i < header.size(); ++i)
      os << (i ? "," : "") << header[i];
    os << "\n";
    char buf[32];
    for (const auto& row : rows) {
      if (row.size() != header.size())
        throw ContractError("csv: row width does not match header");
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        os << (i ? "," : "") << buf;
      }
      os << "\n";
    }
    if (!os) throw RuntimeError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw RuntimeError("cannot move into place: " + path);
}

}  // namespace kin
