#pragma once

// Turnout histogram as a standalone SVG document. Output depends only on the
// bins: numbers go through std::to_chars, so locale never leaks in.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cauchy_forensics/election.hpp"
#include "cauchy_forensics/errors.hpp"

namespace cauchy_forensics::io {

struct SvgStyle {
  double width = 800.0;
  double height = 420.0;
  double margin_left = 60.0;
  double margin_right = 20.0;
  double margin_top = 30.0;
  double margin_bottom = 60.0;
  std::string bar_fill = "#4a7ab5";
  std::string overflow_fill = "#c0392b";
  std::string title = "Turnout distribution";
};

namespace detail {

inline std::string fmt(double v, int precision = 2) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  std::string s(buf, res.ptr);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s == "-0" ? "0" : s;
}

inline std::string xml_escape(const std::string& s) {
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

} // namespace detail

inline std::string render_histogram_svg(const std::vector<HistogramBin>& bins, const SvgStyle& style = {}) {
  using detail::fmt;
  std::size_t max_count = 1;
  for (const auto& b : bins) {
    max_count = std::max(max_count, b.count);
  }
  const double plot_w = style.width - style.margin_left - style.margin_right;
  const double plot_h = style.height - style.margin_top - style.margin_bottom;
  const double x0 = style.margin_left;
  const double y0 = style.margin_top + plot_h;  // baseline
  const double slot = bins.empty() ? plot_w : plot_w / static_cast<double>(bins.size());
  const double gap = std::min(2.0, slot * 0.1);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(style.width) << "\" height=\""
      << fmt(style.height) << "\" viewBox=\"0 0 " << fmt(style.width) << ' ' << fmt(style.height) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(style.width) << "\" height=\"" << fmt(style.height)
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(style.width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << detail::xml_escape(style.title) << "</text>\n";

  // Every k-th regular bin gets an x tick label so labels do not collide.
  const std::size_t label_every = std::max<std::size_t>(1, bins.size() / 20 + (bins.size() % 20 ? 1 : 0));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto& b = bins[i];
    const double h = plot_h * static_cast<double>(b.count) / static_cast<double>(max_count);
    const double x = x0 + slot * static_cast<double>(i);
    const std::string range = b.overflow ? ">100" : fmt(b.low) + "-" + fmt(b.high);
    svg << "<rect class=\"" << (b.overflow ? "bar overflow" : "bar") << "\" x=\"" << fmt(x + gap / 2)
        << "\" y=\"" << fmt(y0 - h) << "\" width=\"" << fmt(slot - gap) << "\" height=\"" << fmt(h)
        << "\" fill=\"" << (b.overflow ? style.overflow_fill : style.bar_fill) << "\""
        << (b.overflow ? " stroke=\"black\" stroke-dasharray=\"4 2\"" : "") << "><title>" << range
        << "%: " << b.count << "</title></rect>\n";
    if (b.overflow || i % label_every == 0) {
      svg << "<text x=\"" << fmt(x + slot / 2) << "\" y=\"" << fmt(y0 + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
          << (b.overflow ? std::string("&gt;100") : fmt(b.low)) << "</text>\n";
    }
  }

  svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0 + plot_w) << "\" y2=\""
      << fmt(y0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(style.margin_top) << "\" x2=\"" << fmt(x0) << "\" y2=\""
      << fmt(y0) << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y0) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"10\">0</text>\n";
  svg << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(style.margin_top + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << max_count << "</text>\n";
  svg << "<text x=\"" << fmt(x0 + plot_w / 2) << "\" y=\"" << fmt(style.height - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">turnout %</text>\n";
  svg << "<text x=\"15\" y=\"" << fmt(style.margin_top + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 "
      << fmt(style.margin_top + plot_h / 2) << ")\">count</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

inline void write_histogram_svg(const std::string& path, const std::vector<HistogramBin>& bins,
                                const SvgStyle& style = {}) {
  const auto doc = render_histogram_svg(bins, style);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << doc;
  if (!out) {
    throw DataError("write failed for '" + path + "'");
  }
}

} // namespace cauchy_forensics::io
