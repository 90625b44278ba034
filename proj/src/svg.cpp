#include "kinklab/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kink {

namespace {
constexpr int kMargin = 52;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace

SvgFigure::SvgFigure(int width, int height, std::string title)
    : w_(width), h_(height), title_(std::move(title)) {}

void SvgFigure::set_range(double x0, double x1, double y0, double y1) {
  x0_ = x0;
  x1_ = x1;
  y0_ = y0;
  y1_ = y1;
  if (x1_ == x0_) x1_ = x0_ + 1;
  if (y1_ == y0_) y1_ = y0_ + 1;
}

double SvgFigure::px(double x) const {
  return kMargin + (x - x0_) / (x1_ - x0_) * (w_ - 2 * kMargin);
}

double SvgFigure::py(double y) const {
  return h_ - kMargin - (y - y0_) / (y1_ - y0_) * (h_ - 2 * kMargin);
}

void SvgFigure::polyline(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, double stroke, bool dashed) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
     << "\"";
  if (dashed) os << " stroke-dasharray=\"6 4\"";
  os << " points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) os << fmt(px(x[i])) << "," << fmt(py(y[i])) << " ";
  os << "\"/>";
  body_.push_back(os.str());
}

void SvgFigure::points(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, double radius) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::ostringstream os;
    os << "<circle cx=\"" << fmt(px(x[i])) << "\" cy=\"" << fmt(py(y[i])) << "\" r=\""
       << radius << "\" fill=\"" << color << "\"/>";
    body_.push_back(os.str());
  }
}

void SvgFigure::bars(const std::vector<double>& centers, const std::vector<double>& heights,
                     double bar_width, const std::string& color) {
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double xl = px(centers[i] - bar_width / 2), xr = px(centers[i] + bar_width / 2);
    const double yt = py(heights[i]), yb = py(0.0);
    std::ostringstream os;
    os << "<rect x=\"" << fmt(xl) << "\" y=\"" << fmt(yt) << "\" width=\"" << fmt(xr - xl)
       << "\" height=\"" << fmt(yb - yt) << "\" fill=\"" << color
       << "\" fill-opacity=\"0.6\"/>";
    body_.push_back(os.str());
  }
}

void SvgFigure::hline(double y, const std::string& color, bool dashed) {
  polyline({x0_, x1_}, {y, y}, color, 1.0, dashed);
}

void SvgFigure::annotate(double fx, double fy, const std::string& text) {
  std::ostringstream os;
  os << "<text x=\"" << fmt(kMargin + fx * (w_ - 2 * kMargin)) << "\" y=\""
     << fmt(kMargin + (1 - fy) * (h_ - 2 * kMargin)) << "\" font-size=\"12\">" << text
     << "</text>";
  body_.push_back(os.str());
}

std::string SvgFigure::str() const {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
     << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << title_ << "</text>\n";
  // axes box and tick labels
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << w_ - 2 * kMargin
     << "\" height=\"" << h_ - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0_ + (x1_ - x0_) * t / 4;
    const double yv = y0_ + (y1_ - y0_) * t / 4;
    os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << h_ - kMargin + 16
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << fmt(py(yv) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yv) << "</text>\n";
  }
  if (!xlabel_.empty())
    os << "<text x=\"" << w_ / 2 << "\" y=\"" << h_ - 8
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel_ << "</text>\n";
  if (!ylabel_.empty())
    os << "<text x=\"14\" y=\"" << h_ / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
       << h_ / 2 << ")\" text-anchor=\"middle\">" << ylabel_ << "</text>\n";
  for (const auto& b : body_) os << b << "\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace kink
