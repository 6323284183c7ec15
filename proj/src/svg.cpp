#include "landrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "landrl/text.hpp"

namespace landrl::svg {

namespace {

constexpr double kWidth = 900, kHeight = 480;
constexpr double kLeft = 70, kRight = 24, kTop = 24, kBottom = 50;

const char* kPalette[] = {"#1c7ed6", "#e8590c", "#2b8a3e",
                          "#9c36b5", "#e03131", "#0b7285"};

struct Range {
  double lo = 0.0, hi = 1.0;

  void widen(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (hi <= lo) hi = lo + 1.0;
  }
  double to_px(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

// 2-decimal pixel coordinates keep the files small and the bytes stable.
std::string px(double v) {
  return format_double(std::round(v * 100.0) / 100.0);
}

std::string tick_label(double v) {
  const double rounded = std::round(v * 1000.0) / 1000.0;
  return format_double(rounded == 0.0 ? 0.0 : rounded);  // avoid "-0"
}

void open_svg(std::ostringstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& out, const Range& xr, const Range& yr,
          const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  out << "<g stroke=\"#ced4da\" stroke-width=\"1\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fy = y0 + (y1 - y0) * i / 4.0;
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(fy) << "\" x2=\""
        << px(x1) << "\" y2=\"" << px(fy) << "\"/>\n";
  }
  out << "</g>\n<g fill=\"#495057\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << px(y0 + 18)
        << "\" text-anchor=\"middle\">"
        << tick_label(xr.lo + (xr.hi - xr.lo) * i / 4.0) << "</text>\n";
    out << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(fy + 4)
        << "\" text-anchor=\"end\">"
        << tick_label(yr.lo + (yr.hi - yr.lo) * i / 4.0) << "</text>\n";
  }
  out << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(kHeight - 12)
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << px((y0 + y1) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << px((y0 + y1) / 2) << ")\">" << y_label << "</text>\n</g>\n";
}

void polyline(std::ostringstream& out, const Range& xr, const Range& yr,
              std::span<const double> xs, std::span<const double> ys,
              const char* color, double width) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << width << "\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    if (!first) out << ' ';
    out << px(xr.to_px(xs[i], kLeft, kWidth - kRight)) << ','
        << px(yr.to_px(ys[i], kHeight - kBottom, kTop));
    first = false;
  }
  out << "\"/>\n";
}

std::string empty_chart(const std::string& note) {
  std::ostringstream out;
  open_svg(out);
  out << "<text x=\"" << px(kWidth / 2) << "\" y=\"" << px(kHeight / 2)
      << "\" text-anchor=\"middle\" fill=\"#868e96\">" << note
      << "</text>\n</svg>\n";
  return out.str();
}

}  // namespace

std::string render_training_svg(const TrainingCurve& curve) {
  if (curve.episode.empty()) return empty_chart("no episodes");

  Range xr{curve.episode.front(), curve.episode.front()};
  Range yr{0.0, 0.0};
  for (double v : curve.episode) xr.widen(v);
  for (double v : curve.reward) yr.widen(v);
  for (double v : curve.ma100) yr.widen(v);
  xr.finish();
  yr.finish();

  std::ostringstream out;
  open_svg(out);
  axes(out, xr, yr, "episode", "reward");
  polyline(out, xr, yr, curve.episode, curve.reward, "#ced4da", 1.0);
  polyline(out, xr, yr, curve.episode, curve.ma100, kPalette[0], 2.0);
  out << "<g fill=\"#495057\"><text x=\"" << px(kWidth - kRight - 8)
      << "\" y=\"" << px(kTop + 14) << "\" text-anchor=\"end\">"
      << "<tspan fill=\"" << kPalette[0]
      << "\">ma100</tspan>  <tspan fill=\"#adb5bd\">reward</tspan>"
      << "</text></g>\n</svg>\n";
  return out.str();
}

std::string render_sweep_svg(std::span<const SweepSeries> series,
                             const std::string& x_label,
                             const std::string& y_label) {
  bool any = false;
  Range xr{0.0, 0.0}, yr{0.0, 0.0};
  bool seeded = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!seeded) {
        xr = Range{s.x[i], s.x[i]};
        yr = Range{s.y[i], s.y[i]};
        seeded = true;
      }
      xr.widen(s.x[i]);
      yr.widen(s.y[i]);
      any = true;
    }
  if (!any) return empty_chart("no finite points");
  xr.finish();
  yr.finish();

  std::ostringstream out;
  open_svg(out);
  axes(out, xr, yr, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i)
    polyline(out, xr, yr, series[i].x, series[i].y,
             kPalette[i % std::size(kPalette)], 2.0);
  out << "<g>\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << "<text x=\"" << px(kWidth - kRight - 8) << "\" y=\""
        << px(kTop + 14 + 16 * static_cast<double>(i))
        << "\" text-anchor=\"end\" fill=\""
        << kPalette[i % std::size(kPalette)] << "\">" << series[i].label
        << "</text>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace landrl::svg
