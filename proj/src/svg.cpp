#include "causal_tradeoff/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace causal_tradeoff {

std::string svg_format(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 320.0;  // room for the legend block
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

struct Scale {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void open_svg(std::ostringstream& os) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& os, const Scale& s, const std::string& xlab,
          const std::string& ylab) {
  os << "<line x1=\"" << s.px(s.x0) << "\" y1=\"" << s.py(s.y0) << "\" x2=\"" << s.px(s.x1)
     << "\" y2=\"" << s.py(s.y0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << s.px(s.x0) << "\" y1=\"" << s.py(s.y0) << "\" x2=\"" << s.px(s.x0)
     << "\" y2=\"" << s.py(s.y1) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = s.x0 + (s.x1 - s.x0) * i / 4.0;
    const double y = s.y0 + (s.y1 - s.y0) * i / 4.0;
    os << "<text x=\"" << s.px(x) << "\" y=\"" << kHeight - kBottom + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">" << svg_format(x) << "</text>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << s.py(y) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">" << svg_format(y) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">" << xlab << "</text>\n";
  os << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (kTop + kHeight - kBottom) / 2 << ")\">" << ylab << "</text>\n";
}

void polyline(std::ostringstream& os, const Scale& s, const std::vector<CurvePoint>& pts,
              const std::string& color, const std::string& dash = "") {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\"";
  if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
  os << " stroke-width=\"1.6\" points=\"";
  for (const auto& p : pts) {
    if (p.gamma < s.y0 || p.gamma > s.y1) continue;
    os << s.px(std::clamp(p.ir, s.x0, s.x1)) << "," << s.py(p.gamma) << " ";
  }
  os << "\"/>\n";
}

const char* kMultiplierColors[] = {"#d62728", "#7f3fbf", "#1f77b4",
                                   "#2ca02c", "#ff7f0e", "#8c564b"};

}  // namespace

std::string sensitivity_svg(const SensitivityReport& report, const BranchReport& branch) {
  std::ostringstream os;
  open_svg(os);

  double gamma_max = branch.gamma_implied;
  for (const auto& line : branch.multiplier_lines) gamma_max = std::max(gamma_max, line[0].gamma);
  gamma_max = std::max(gamma_max * 1.25, 1e-6);
  double ir_max = branch.anchor_line.back().ir;
  const Scale s{0.0, ir_max, 0.0, gamma_max};

  axes(os, s, "inconsistency ratio", "confounding factor (gamma)");

  // Reference line at IR = 1.
  os << "<line x1=\"" << s.px(1.0) << "\" y1=\"" << s.py(s.y0) << "\" x2=\"" << s.px(1.0)
     << "\" y2=\"" << s.py(s.y1) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"2,3\"/>\n";

  polyline(os, s, branch.ir_curve, "#333333");
  for (std::size_t i = 0; i < branch.multiplier_lines.size(); ++i) {
    polyline(os, s, branch.multiplier_lines[i],
             kMultiplierColors[i % 6]);
  }
  polyline(os, s, branch.anchor_line, "black", "6,4");

  const auto& dec = report.decomposition;
  double ty = kTop + 8;
  const double tx = kWidth - kRight + 16;
  auto text = [&](const std::string& t) {
    os << "<text x=\"" << tx << "\" y=\"" << ty << "\" font-size=\"12\">" << t
       << "</text>\n";
    ty += 16;
  };
  text("kind: " + to_string(report.kind));
  if (report.kind == ScenarioKind::heterogeneity) {
    text("sign case: " + to_string(branch.sign_case));
  }
  text("Benchmarked " + report.violation_label + " Violation = " +
       svg_format(report.benchmarked_violation));
  text("gamma implied (anchor) = " + svg_format(branch.gamma_implied));
  if (report.kind == ScenarioKind::heterogeneity) {
    text("gamma benchmark = " + svg_format(dec.gamma1 * dec.gamma2));
  } else {
    text("gamma benchmark = " + svg_format(dec.gamma_b));
  }
  for (std::size_t i = 0; i < report.multipliers.size(); ++i) {
    text("M=" + svg_format(report.multipliers[i]) + ": IR = " +
         svg_format(branch.ir_per_multiplier[i]) + ", " + report.violation_label +
         " Required = " + svg_format(branch.required_violation_per_multiplier[i]));
  }
  if (report.true_ir) text("True IR = " + svg_format(*report.true_ir));

  os << "</svg>\n";
  return os.str();
}

std::string contour_svg(const ContourGrid& grid) {
  std::ostringstream os;
  open_svg(os);
  const auto sv = grid.strength.values();
  const auto vv = grid.violation.values();
  const Scale s{grid.strength.start, grid.strength.stop, grid.violation.start,
                grid.violation.stop};
  axes(os, s, grid.strength.name + " (instrument strength)",
       grid.violation.name + " (violation)");

  const double cw = (kWidth - kLeft - kRight) / std::max<std::size_t>(sv.size(), 1);
  const double ch = (kHeight - kTop - kBottom) / std::max<std::size_t>(vv.size(), 1);
  const char* colors[5] = {"#ffffff", "#ffffff", "#ffd27f", "#c7e9c0", "#9ecae1"};
  const char* names[5] = {"", "", "no adjustment", "adjust for z", "2sls"};
  for (std::size_t i = 0; i < sv.size(); ++i) {
    for (std::size_t j = 0; j < vv.size(); ++j) {
      const int w = grid.winner[i * vv.size() + j];
      if (w == 0) continue;
      os << "<rect x=\"" << s.px(sv[i]) - cw / 2 << "\" y=\"" << s.py(vv[j]) - ch / 2
         << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\"" << colors[w]
         << "\" stroke=\"none\"/>\n";
    }
  }
  double ty = kTop + 8;
  const double tx = kWidth - kRight + 16;
  auto text = [&](const std::string& t, const char* color) {
    os << "<text x=\"" << tx << "\" y=\"" << ty << "\" font-size=\"12\" fill=\"" << color
       << "\">" << t << "</text>\n";
    ty += 16;
  };
  text("least inconsistent estimator", "black");
  for (int w = 2; w <= 4; ++w) text(names[w], colors[w]);
  text("feasible cells: " + std::to_string(grid.feasible_cells), "black");
  os << "</svg>\n";
  return os.str();
}

}  // namespace causal_tradeoff
