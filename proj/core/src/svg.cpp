#include "glplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace glplan {

namespace {

// Fixed-precision coordinates keep the output byte-stable.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct Viewport {
  double min_x, min_y, max_x, max_y;
  double scale;

  double px(double x) const { return (x - min_x) * scale; }
  // Flip y so the world's +y points up in the image.
  double py(double y) const { return (max_y - y) * scale; }
  double width() const { return (max_x - min_x) * scale; }
  double height() const { return (max_y - min_y) * scale; }
};

void polyline(std::ostringstream& out, const Viewport& vp, const std::vector<Point2>& pts,
              const std::string& stroke, double width, double opacity = 1.0) {
  out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width)
      << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"";
  if (opacity < 1.0) out << " stroke-opacity=\"" << fmt(opacity) << "\"";
  out << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out << ' ';
    out << fmt(vp.px(pts[i].x)) << ',' << fmt(vp.py(pts[i].y));
  }
  out << "\"/>\n";
}

void chain_polyline(std::ostringstream& out, const Viewport& vp, const ChainSpec& chain,
                    const Configuration& q, const std::string& color, double width,
                    double opacity = 1.0) {
  polyline(out, vp, forward_kinematics(chain, q).joint_points, color, width, opacity);
}

}  // namespace

std::string render_scenario_svg(const Scenario& scenario, const Path* path,
                                const std::vector<Configuration>* samples) {
  const double reach = scenario.chain.reach();
  double min_x = scenario.chain.base_x - reach;
  double max_x = scenario.chain.base_x + reach;
  double min_y = scenario.chain.base_y - reach;
  double max_y = scenario.chain.base_y + reach;
  for (const Circle& c : scenario.obstacles) {
    min_x = std::min(min_x, c.cx - c.r);
    max_x = std::max(max_x, c.cx + c.r);
    min_y = std::min(min_y, c.cy - c.r);
    max_y = std::max(max_y, c.cy + c.r);
  }
  const double margin = 0.05 * std::max(max_x - min_x, max_y - min_y);
  Viewport vp{min_x - margin, min_y - margin, max_x + margin, max_y + margin, 0.0};
  vp.scale = 800.0 / std::max(vp.max_x - vp.min_x, vp.max_y - vp.min_y);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(vp.width()) << "\" height=\""
      << fmt(vp.height()) << "\" viewBox=\"0 0 " << fmt(vp.width()) << ' ' << fmt(vp.height())
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const Circle& c : scenario.obstacles) {
    out << "<circle cx=\"" << fmt(vp.px(c.cx)) << "\" cy=\"" << fmt(vp.py(c.cy)) << "\" r=\""
        << fmt(c.r * vp.scale) << "\" fill=\"#b0b0b0\" stroke=\"#606060\" stroke-width=\"1\"/>\n";
  }

  if (samples) {
    for (const Configuration& q : *samples) {
      const Point2 ee = forward_kinematics(scenario.chain, q).end_effector();
      out << "<circle cx=\"" << fmt(vp.px(ee.x)) << "\" cy=\"" << fmt(vp.py(ee.y))
          << "\" r=\"2\" fill=\"#e36209\" fill-opacity=\"0.6\"/>\n";
    }
  }

  if (path) {
    // Sweep of intermediate configurations plus the end-effector trace.
    std::vector<Point2> trace;
    for (std::size_t i = 0; i + 1 < path->waypoints.size(); ++i) {
      const double dist = cspace_distance(path->waypoints[i], path->waypoints[i + 1],
                                          scenario.chain.joint_limits);
      const int steps = std::max(1, static_cast<int>(std::ceil(dist / 0.1)));
      for (int s = 0; s < steps; ++s) {
        const Configuration q = interpolate(path->waypoints[i], path->waypoints[i + 1],
                                            static_cast<double>(s) / steps,
                                            scenario.chain.joint_limits);
        chain_polyline(out, vp, scenario.chain, q, "#9be9a8", 1.0, 0.5);
        trace.push_back(forward_kinematics(scenario.chain, q).end_effector());
      }
    }
    trace.push_back(forward_kinematics(scenario.chain, path->waypoints.back()).end_effector());
    polyline(out, vp, trace, "#2da44e", 2.0);
  }

  chain_polyline(out, vp, scenario.chain, scenario.start, "#1f6feb", 3.0);
  chain_polyline(out, vp, scenario.chain, scenario.goal, "#d73a49", 3.0);

  const Point2 base = scenario.chain.base();
  out << "<circle cx=\"" << fmt(vp.px(base.x)) << "\" cy=\"" << fmt(vp.py(base.y))
      << "\" r=\"4\" fill=\"#24292f\"/>\n";
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& svg, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("write_svg: cannot write " + file);
  out << svg;
}

}  // namespace glplan
