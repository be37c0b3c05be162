#include "subshift/results.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "subshift/errors.hpp"

namespace subshift::cli {

using nlohmann::json;

nlohmann::json outcome_to_json(const stats::TestOutcome& outcome) {
  return json{
      {"method", outcome.method},       {"m", outcome.m},
      {"statistic", outcome.statistic}, {"p_value", outcome.p_value},
      {"reject", outcome.reject},       {"alpha", outcome.alpha},
      {"n_permutations", outcome.n_permutations}, {"seed", outcome.seed},
  };
}

void write_outcomes_jsonl(const std::filesystem::path& path,
                          const std::vector<LabeledResult>& blocks) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  for (const LabeledResult& block : blocks) {
    for (const harness::RunOutcome& ro : block.result.outcomes) {
      json line = outcome_to_json(ro.outcome);
      line["role"] = block.role;
      line["repetition"] = ro.repetition;
      f << line.dump() << '\n';
    }
  }
  if (!f) throw DataError("write failed: " + path.string());
}

nlohmann::json curve_to_json(const harness::PowerCurve& curve) {
  json points = json::array();
  for (const harness::PowerPoint& pt : curve.points) {
    points.push_back(json{
        {"method", harness::method_name(pt.method)},
        {"m", pt.m},
        {"rate", pt.rate},
        {"lo", pt.ci.lo},
        {"hi", pt.ci.hi},
        {"rejected", pt.rejected},
        {"repetitions", pt.repetitions},
    });
  }
  return points;
}

nlohmann::json summary_to_json(const std::vector<LabeledResult>& blocks, double alpha) {
  json curves = json::object();
  for (const LabeledResult& block : blocks) {
    curves[block.role] = curve_to_json(block.result.curve);
  }
  return json{{"alpha", alpha}, {"curves", curves}};
}

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<LabeledResult>& blocks, double alpha) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f << summary_to_json(blocks, alpha).dump(2) << '\n';
}

void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<LabeledResult>& blocks) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f << "role,method,m,rate,lo,hi,rejected,repetitions\n";
  for (const LabeledResult& block : blocks) {
    for (const harness::PowerPoint& pt : block.result.curve.points) {
      f << block.role << ',' << harness::method_name(pt.method) << ',' << pt.m << ',' << pt.rate
        << ',' << pt.ci.lo << ',' << pt.ci.hi << ',' << pt.rejected << ',' << pt.repetitions
        << '\n';
    }
  }
}

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

const char* method_color(harness::Method m) {
  switch (m) {
    case harness::Method::c2st: return "#1f77b4";
    case harness::Method::mmdd: return "#d62728";
    case harness::Method::muks: return "#2ca02c";
  }
  return "#777777";
}

std::vector<std::size_t> curve_sizes(const harness::PowerCurve& curve) {
  std::vector<std::size_t> sizes;
  for (const auto& pt : curve.points) {
    if (sizes.empty() || sizes.back() != pt.m) sizes.push_back(pt.m);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

std::vector<harness::Method> curve_methods(const harness::PowerCurve& curve) {
  std::vector<harness::Method> methods;
  for (const auto& pt : curve.points) {
    if (std::find(methods.begin(), methods.end(), pt.method) == methods.end()) {
      methods.push_back(pt.method);
    }
  }
  return methods;
}

double x_pos(std::size_t index, std::size_t count) {
  if (count <= 1) return kLeft + (kWidth - kLeft - kRight) / 2.0;
  return kLeft + (kWidth - kLeft - kRight) * double(index) / double(count - 1);
}

double y_pos(double rate) { return kTop + (kHeight - kTop - kBottom) * (1.0 - rate); }

void svg_header(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-family='sans-serif' "
      << "font-size='15'>" << title << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double rate = tick * 0.25;
    const double y = y_pos(rate);
    svg << "<line x1='" << kLeft << "' y1='" << y << "' x2='" << kWidth - kRight << "' y2='" << y
        << "' stroke='#dddddd'/>\n";
    svg << "<text x='" << kLeft - 8 << "' y='" << y + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << rate << "</text>\n";
  }
}

void svg_x_axis(std::ostringstream& svg, const std::vector<std::size_t>& sizes) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = x_pos(i, sizes.size());
    svg << "<text x='" << x << "' y='" << kHeight - kBottom + 18
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>" << sizes[i]
        << "</text>\n";
  }
  svg << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>sample size m</text>\n";
}

void svg_legend(std::ostringstream& svg, const std::vector<harness::Method>& methods) {
  double x = kLeft + 10;
  for (harness::Method m : methods) {
    svg << "<rect x='" << x << "' y='" << kTop + 4 << "' width='12' height='12' fill='"
        << method_color(m) << "'/>\n";
    svg << "<text x='" << x + 16 << "' y='" << kTop + 14
        << "' font-family='sans-serif' font-size='12'>" << harness::method_name(m) << "</text>\n";
    x += 80;
  }
}

}  // namespace

std::string render_curve_svg(const harness::PowerCurve& curve, const std::string& title) {
  const auto sizes = curve_sizes(curve);
  const auto methods = curve_methods(curve);
  std::ostringstream svg;
  svg_header(svg, title);
  svg_x_axis(svg, sizes);
  svg_legend(svg, methods);

  for (harness::Method m : methods) {
    // CI band
    std::ostringstream upper, lower;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& pt = curve.at(m, sizes[i]);
      upper << (i == 0 ? "" : " ") << x_pos(i, sizes.size()) << ',' << y_pos(pt.ci.hi);
    }
    for (std::size_t i = sizes.size(); i-- > 0;) {
      const auto& pt = curve.at(m, sizes[i]);
      lower << ' ' << x_pos(i, sizes.size()) << ',' << y_pos(pt.ci.lo);
    }
    svg << "<polygon points='" << upper.str() << lower.str() << "' fill='" << method_color(m)
        << "' opacity='0.15'/>\n";

    std::ostringstream line;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& pt = curve.at(m, sizes[i]);
      line << (i == 0 ? "" : " ") << x_pos(i, sizes.size()) << ',' << y_pos(pt.rate);
    }
    svg << "<polyline points='" << line.str() << "' fill='none' stroke='" << method_color(m)
        << "' stroke-width='2'/>\n";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& pt = curve.at(m, sizes[i]);
      svg << "<circle cx='" << x_pos(i, sizes.size()) << "' cy='" << y_pos(pt.rate)
          << "' r='3' fill='" << method_color(m) << "'/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_type1_svg(const harness::PowerCurve& curve, double alpha,
                             const std::string& title) {
  const auto sizes = curve_sizes(curve);
  const auto methods = curve_methods(curve);
  std::ostringstream svg;
  svg_header(svg, title);
  svg_x_axis(svg, sizes);
  svg_legend(svg, methods);

  const double slot = (kWidth - kLeft - kRight) / double(std::max<std::size_t>(1, sizes.size()));
  const double bar = std::min(18.0, slot / double(methods.size() + 1));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x_center = x_pos(i, sizes.size());
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto& pt = curve.at(methods[k], sizes[i]);
      const double x = x_center + (double(k) - double(methods.size() - 1) / 2.0) * bar;
      const double y = y_pos(pt.rate);
      svg << "<rect x='" << x - bar / 2 + 1 << "' y='" << y << "' width='" << bar - 2
          << "' height='" << y_pos(0.0) - y << "' fill='" << method_color(methods[k]) << "'/>\n";
      svg << "<line x1='" << x << "' y1='" << y_pos(pt.ci.lo) << "' x2='" << x << "' y2='"
          << y_pos(pt.ci.hi) << "' stroke='#333333'/>\n";
    }
  }
  svg << "<line x1='" << kLeft << "' y1='" << y_pos(alpha) << "' x2='" << kWidth - kRight
      << "' y2='" << y_pos(alpha) << "' stroke='#000000' stroke-dasharray='6,4'/>\n";
  svg << "<text x='" << kWidth - kRight - 4 << "' y='" << y_pos(alpha) - 5
      << "' text-anchor='end' font-family='sans-serif' font-size='11'>alpha</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace subshift::cli
