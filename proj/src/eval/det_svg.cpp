// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "biotrunc/eval.hpp"

namespace biotrunc::eval {

namespace {

constexpr double kWidth = 480, kHeight = 480, kMargin = 60;
constexpr double kMinRate = 1e-4;

double axis(double rate, double length) {
  const double lo = std::log10(kMinRate);
  const double v = std::log10(std::clamp(rate, kMinRate, 1.0));
  return (v - lo) / -lo * length;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string det_svg(const std::vector<std::pair<std::string, DetCurve>>& curves) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double w = kWidth - 2 * kMargin, h = kHeight - 2 * kMargin;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double r = kMinRate; r <= 1.0 + 1e-12; r *= 10) {
    const double x = kMargin + axis(r, w);
    const double y = kMargin + h - axis(r, h);
    char label[16];
    std::snprintf(label, sizeof label, "%g", r);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kMargin + h) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kMargin + w) + "\" y2=\"" + num(y) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kMargin + h + 16) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
    svg += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  svg += "<text x=\"" + num(kMargin + w / 2) + "\" y=\"" + num(kHeight - 16) + "\" text-anchor=\"middle\">FMR</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kMargin + h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kMargin + h / 2) + ")\">FNMR</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % (sizeof kColors / sizeof kColors[0])];
    std::string points;
    for (const auto& p : curves[c].second.points) {
      points += num(kMargin + axis(p.fmr, w)) + "," + num(kMargin + h - axis(p.fnmr, h)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    const double ly = kMargin + 16 + 14 * static_cast<double>(c);
    svg += "<text x=\"" + num(kMargin + w - 8) + "\" y=\"" + num(ly) + "\" text-anchor=\"end\" fill=\"" + color +
           "\">" + escape(curves[c].first) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace biotrunc::eval
