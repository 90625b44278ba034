#pragma once

#include <string>
#include <vector>

namespace kink {

// Minimal self-contained SVG plot: one axes box, polylines, point sets,
// bars and annotations. Output is deterministic text, diffable in VCS.
class SvgFigure {
 public:
  SvgFigure(int width, int height, std::string title);

  void set_range(double x0, double x1, double y0, double y1);
  void polyline(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, double stroke = 1.5, bool dashed = false);
  void points(const std::vector<double>& x, const std::vector<double>& y,
              const std::string& color, double radius = 2.5);
  void bars(const std::vector<double>& centers, const std::vector<double>& heights,
            double bar_width, const std::string& color);
  void hline(double y, const std::string& color, bool dashed = true);
  void annotate(double fx, double fy, const std::string& text);  // figure fractions
  void xlabel(const std::string& s) { xlabel_ = s; }
  void ylabel(const std::string& s) { ylabel_ = s; }

  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;
  int w_, h_;
  std::string title_, xlabel_, ylabel_;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  std::vector<std::string> body_;
};

}  // namespace kink
