#pragma once

// Minimal SVG line/scatter plots written directly as text.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace lrsep::experiments {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  std::string color = "#1f77b4";
  bool line = true;
  bool markers = false;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
  std::vector<std::string> notes;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

inline std::vector<double> log_ticks(double lo, double hi) {
  // lo, hi are log10 values
  std::vector<double> t;
  if (hi - lo < 1.5) {
    for (double e = std::floor(lo * std::log2(10.0)); e <= std::ceil(hi * std::log2(10.0)); e += 1.0) {
      const double v = std::pow(2.0, e);
      if (std::log10(v) >= lo - 1e-12 && std::log10(v) <= hi + 1e-12) t.push_back(v);
    }
  } else {
    for (double e = std::ceil(lo); e <= std::floor(hi); e += 1.0) t.push_back(std::pow(10.0, e));
  }
  return t;
}

}  // namespace detail

inline std::string render_svg(const PlotSpec& spec) {
  constexpr double W = 640, H = 440, L = 80, R = 170, T = 40, B = 60;
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      if ((spec.logx && !(s.x[i] > 0)) || (spec.logy && !(s.y[i] > 0))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      const double ylo = spec.logy ? s.y[i] : s.y[i] - e;
      const double yhi = s.y[i] + e;
      y0 = std::min(y0, ty(ylo));
      y1 = std::max(y1, ty(yhi));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.03 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;

  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
  auto inside = [&](double x, double y) {
    return (!spec.logx || x > 0) && (!spec.logy || y > 0) && std::isfinite(x) && std::isfinite(y);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  const auto xt = spec.logx ? detail::log_ticks(x0, x1) : detail::linear_ticks(x0, x1);
  const auto yt = spec.logy ? detail::log_ticks(y0, y1) : detail::linear_ticks(y0, y1);
  for (double v : xt) {
    const double p = px(v);
    o << "<line x1=\"" << detail::num(p) << "\" y1=\"" << H - B << "\" x2=\"" << detail::num(p) << "\" y2=\""
      << H - B + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << detail::num(p) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << detail::tick_label(v) << "</text>\n";
  }
  for (double v : yt) {
    const double p = py(v);
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::num(p) << "\" x2=\"" << L << "\" y2=\"" << detail::num(p)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << L - 8 << "\" y=\"" << detail::num(p + 4) << "\" text-anchor=\"end\">" << detail::tick_label(v)
      << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
    << detail::escape(spec.xlabel) << "</text>\n";
  o << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (T + H - B) / 2 << ")\">" << detail::escape(spec.ylabel) << "</text>\n";

  double legend_y = T + 10;
  for (const auto& s : spec.series) {
    if (s.line) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!inside(s.x[i], s.y[i])) continue;
        o << detail::num(px(s.x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
      }
      o << "\"/>\n";
    }
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!inside(s.x[i], s.y[i])) continue;
        const double cx = px(s.x[i]), cy = py(s.y[i]);
        if (i < s.err.size() && s.err[i] > 0) {
          const double lo = spec.logy ? std::max(s.y[i] - s.err[i], s.y[i] * 1e-3) : s.y[i] - s.err[i];
          o << "<line x1=\"" << detail::num(cx) << "\" y1=\"" << detail::num(py(lo)) << "\" x2=\"" << detail::num(cx)
            << "\" y2=\"" << detail::num(py(s.y[i] + s.err[i])) << "\" stroke=\"" << s.color << "\"/>";
        }
        o << "<circle cx=\"" << detail::num(cx) << "\" cy=\"" << detail::num(cy) << "\" r=\"2.5\" fill=\"" << s.color
          << "\"/>\n";
      }
    }
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << legend_y << "\" x2=\"" << W - R + 30 << "\" y2=\"" << legend_y
      << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>";
    o << "<text x=\"" << W - R + 35 << "\" y=\"" << legend_y + 4 << "\">" << detail::escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  legend_y += 10;
  for (const auto& n : spec.notes) {
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << legend_y << "\" font-size=\"11\">" << detail::escape(n)
      << "</text>\n";
    legend_y += 16;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lrsep::experiments
