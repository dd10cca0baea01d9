/*
 Copyright 2026 The tpfc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "tpfc/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tpfc
{

  namespace
  {
    constexpr double kWidth = 640.0, kHeight = 480.0;
    constexpr double kLeft = 70.0, kRight = 160.0, kTop = 40.0, kBottom = 50.0;

    const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                              "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    // Locale-independent shortest-ish formatting.
    std::string fmt(double v)
    {
      if (v == 0.0)
        v = 0.0; // normalize -0
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
      if (ec != std::errc())
        throw std::runtime_error("emit_plot: number formatting failed");
      return std::string(buf, ptr);
    }

    std::string escape(const std::string &text)
    {
      std::string out;
      for (char c : text)
      {
        switch (c)
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
      }
      return out;
    }

    double nice_step(double span)
    {
      if (!(span > 0.0))
        return 1.0;
      const double raw = span / 5.0;
      const double mag = std::pow(10.0, std::floor(std::log10(raw)));
      const double frac = raw / mag;
      double nice = 10.0;
      if (frac <= 1.0)
        nice = 1.0;
      else if (frac <= 2.0)
        nice = 2.0;
      else if (frac <= 5.0)
        nice = 5.0;
      return nice * mag;
    }
  } // namespace

  void emit_plot(const std::string &path, const std::string &title,
                 const std::string &xlabel, const std::string &ylabel,
                 const std::vector<Series> &series, PlotKind kind)
  {
    if (series.empty())
      throw std::invalid_argument("emit_plot: no series given");
    for (const auto &s : series)
    {
      if (s.x.empty() || s.x.size() != s.y.size())
        throw std::invalid_argument("emit_plot: series '" + s.label + "' is empty or ragged");
    }

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto &s : series)
      for (size_t i = 0; i < s.x.size(); ++i)
      {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    if (kind == PlotKind::Bars)
      ymin = std::min(ymin, 0.0);
    if (xmax == xmin)
    {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymax == ymin)
    {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x)
    { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y)
    { return kTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("emit_plot: cannot open " + path);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(kWidth) << ' '
        << fmt(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";

    // Axes with ticks and grid.
    const double xstep = nice_step(xmax - xmin), ystep = nice_step(ymax - ymin);
    for (double tx = std::ceil(xmin / xstep) * xstep; tx <= xmax + 1e-12; tx += xstep)
    {
      out << "<line x1=\"" << fmt(px(tx)) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(px(tx))
          << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"#e0e0e0\"/>\n";
      out << "<text x=\"" << fmt(px(tx)) << "\" y=\"" << fmt(kTop + plot_h + 18)
          << "\" text-anchor=\"middle\">" << fmt(tx) << "</text>\n";
    }
    for (double ty = std::ceil(ymin / ystep) * ystep; ty <= ymax + 1e-12; ty += ystep)
    {
      out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(ty)) << "\" x2=\""
          << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(py(ty)) << "\" stroke=\"#e0e0e0\"/>\n";
      out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(ty) + 4)
          << "\" text-anchor=\"end\">" << fmt(ty) << "</text>\n";
    }
    out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 10)
        << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fmt(kTop + plot_h / 2)
        << ")\">" << escape(ylabel) << "</text>\n";

    const size_t n_series = series.size();
    for (size_t s = 0; s < n_series; ++s)
    {
      const char *color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
      const auto &ser = series[s];
      if (kind == PlotKind::Line)
      {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < ser.x.size(); ++i)
          out << fmt(px(ser.x[i])) << ',' << fmt(py(ser.y[i])) << ' ';
        out << "\"/>\n";
        for (size_t i = 0; i < ser.x.size(); ++i)
          out << "<circle cx=\"" << fmt(px(ser.x[i])) << "\" cy=\"" << fmt(py(ser.y[i]))
              << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      else
      {
        // Grouped bars around each x position.
        double min_dx = (xmax - xmin);
        for (size_t i = 1; i < ser.x.size(); ++i)
          min_dx = std::min(min_dx, std::abs(ser.x[i] - ser.x[i - 1]));
        const double group_w = 0.8 * min_dx;
        const double bar_w = group_w / static_cast<double>(n_series);
        const double bar_w_px = bar_w / (xmax - xmin) * plot_w;
        for (size_t i = 0; i < ser.x.size(); ++i)
        {
          const double x_left = px(ser.x[i] - group_w / 2 + static_cast<double>(s) * bar_w);
          const double y_top = py(std::max(ser.y[i], 0.0));
          const double y_base = py(std::max(ymin, 0.0));
          out << "<rect x=\"" << fmt(x_left) << "\" y=\"" << fmt(y_top) << "\" width=\""
              << fmt(bar_w_px) << "\" height=\"" << fmt(std::abs(y_base - y_top))
              << "\" fill=\"" << color << "\"/>\n";
        }
      }
      // Legend entry.
      const double ly = kTop + 10 + 18 * static_cast<double>(s);
      out << "<line x1=\"" << fmt(kWidth - kRight + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
          << fmt(kWidth - kRight + 34) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
          << "\" stroke-width=\"3\"/>\n";
      out << "<text x=\"" << fmt(kWidth - kRight + 40) << "\" y=\"" << fmt(ly + 4) << "\">"
          << escape(ser.label) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out)
      throw std::runtime_error("emit_plot: write failed for " + path);
  }

} // namespace tpfc
