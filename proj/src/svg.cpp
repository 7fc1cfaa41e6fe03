#include "kan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kan/common.hpp"

namespace kan {

namespace {

struct Axis {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;
  double map(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

void polyline(std::ostream& out, const Axis& ax, const Axis& ay, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* color, bool dashed) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) out << " stroke-dasharray=\"6 4\"";
  out << " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << ax.map(xs[i]) << ',' << ay.map(ys[i]) << ' ';
  out << "\"/>\n";
}

}  // namespace

void write_figure_svg(const std::string& path, const FigureData& fig) {
  require(fig.strategies.size() == fig.y_pred.size() && fig.strategies.size() == fig.knots.size(),
          "write_figure_svg: inconsistent strategy payload");
  const double width = 820.0, height = 300.0 + 90.0 * static_cast<double>(fig.strategies.size());

  double ylo = 0.0, yhi = 1.0;
  auto widen = [&](const std::vector<double>& v) {
    for (double y : v) {
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  };
  widen(fig.y_true);
  widen(fig.data_y);
  for (const auto& v : fig.y_pred) widen(v);
  const double pad = 0.05 * (yhi - ylo + 1e-12);

  Axis ax{-1.0, 1.0, 55.0, width - 20.0};
  if (!fig.grid_x.empty()) {
    ax.lo = *std::min_element(fig.grid_x.begin(), fig.grid_x.end());
    ax.hi = *std::max_element(fig.grid_x.begin(), fig.grid_x.end());
  }
  Axis ay{ylo - pad, yhi + pad, 270.0, 20.0};

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"55\" y=\"14\" font-family=\"sans-serif\" font-size=\"13\">" << fig.task
      << "</text>\n";

  // training scatter
  const std::size_t stride = std::max<std::size_t>(1, fig.data_x.size() / 400);
  for (std::size_t i = 0; i < fig.data_x.size(); i += stride)
    out << "<circle cx=\"" << ax.map(fig.data_x[i]) << "\" cy=\"" << ay.map(fig.data_y[i])
        << "\" r=\"1.4\" fill=\"#bbbbbb\"/>\n";

  polyline(out, ax, ay, fig.grid_x, fig.y_true, "#222222", false);
  static const char* colors[] = {"#cc3333", "#3355cc", "#33aa55"};
  for (std::size_t q = 0; q < fig.strategies.size(); ++q)
    polyline(out, ax, ay, fig.grid_x, fig.y_pred[q], colors[q % 3], true);

  // knot strips
  for (std::size_t q = 0; q < fig.strategies.size(); ++q) {
    const double top = 300.0 + 90.0 * static_cast<double>(q);
    out << "<text x=\"55\" y=\"" << top + 12.0
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colors[q % 3] << "\">"
        << fig.strategies[q] << " knots</text>\n";
    out << "<line x1=\"" << ax.px0 << "\" y1=\"" << top + 45.0 << "\" x2=\"" << ax.px1
        << "\" y2=\"" << top + 45.0 << "\" stroke=\"#888888\"/>\n";
    for (double t : fig.knots[q])
      out << "<line x1=\"" << ax.map(t) << "\" y1=\"" << top + 25.0 << "\" x2=\"" << ax.map(t)
          << "\" y2=\"" << top + 65.0 << "\" stroke=\"" << colors[q % 3]
          << "\" stroke-width=\"1.5\"/>\n";
  }
  out << "</svg>\n";

  std::ofstream file(path);
  require(file.good(), "write_figure_svg: cannot open " + path);
  file << out.str();
  require(file.good(), "write_figure_svg: write failed");
}

}  // namespace kan
