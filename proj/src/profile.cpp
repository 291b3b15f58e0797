#include "reluwalk/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "reluwalk/error.hpp"

namespace reluwalk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double ProfileCurve::rho(double tau) const noexcept {
  double r = 0.0;
  for (const auto& [t, value] : points) {
    if (t <= tau) r = value;
  }
  return r;
}

std::vector<ProfileCurve> performance_profile(const std::vector<ProblemResult>& results,
                                              double shift_rel) {
  if (results.empty()) throw InputError("performance_profile: no results");
  std::set<std::string> algorithms;
  std::map<std::string, std::map<std::string, double>> table;  // problem -> algorithm -> value
  for (const auto& r : results) {
    algorithms.insert(r.algorithm);
    auto& slot = table[r.problem];
    if (r.value && std::isfinite(*r.value)) {
      auto it = slot.find(r.algorithm);
      if (it == slot.end() || *r.value > it->second) slot[r.algorithm] = *r.value;
    }
  }

  std::map<std::string, std::vector<double>> ratios;
  for (const auto& a : algorithms) ratios[a];
  for (const auto& [problem, values] : table) {
    if (values.empty()) throw InputError("performance_profile: problem '" + problem + "' has no finite result");
    double best = -kInf;
    for (const auto& [a, v] : values) best = std::max(best, v);
    const double eta = std::max(shift_rel * std::abs(best), kMinProfileShift);
    double min_cost = kInf;
    for (const auto& [a, v] : values) min_cost = std::min(min_cost, best - v + eta);
    for (const auto& a : algorithms) {
      auto it = values.find(a);
      ratios[a].push_back(it == values.end() ? kInf : (best - it->second + eta) / min_cost);
    }
  }

  const double problems = static_cast<double>(table.size());
  std::vector<ProfileCurve> curves;
  for (auto& [a, rs] : ratios) {
    std::sort(rs.begin(), rs.end());
    ProfileCurve curve{a, {}};
    std::size_t at_one = 0;
    while (at_one < rs.size() && rs[at_one] <= 1.0) ++at_one;
    curve.points.emplace_back(1.0, static_cast<double>(at_one) / problems);
    for (std::size_t i = at_one; i < rs.size() && std::isfinite(rs[i]); ++i) {
      const double frac = static_cast<double>(i + 1) / problems;
      if (!curve.points.empty() && curve.points.back().first == rs[i]) {
        curve.points.back().second = frac;
      } else {
        curve.points.emplace_back(rs[i], frac);
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_profile_csv(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw InputError("write_profile_csv: no curves");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "algorithm,tau,rho\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& c : curves) {
    for (const auto& [tau, rho] : c.points) out << c.algorithm << ',' << tau << ',' << rho << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_profile_svg(const std::vector<ProfileCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw InputError("write_profile_svg: no curves");
  constexpr double kWidth = 720, kHeight = 440;
  constexpr double kLeft = 70, kRight = 170, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double max_tau = 10.0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) max_tau = std::max(max_tau, p.first);
  }
  const double decades = std::ceil(std::log10(max_tau * 1.05));
  auto sx = [&](double tau) { return kLeft + plot_w * std::log10(tau) / decades; };
  auto sy = [&](double rho) { return kTop + plot_h * (1.0 - rho); };
  const double x_end = sx(std::pow(10.0, decades));

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes and grid
  svg << "<g stroke=\"#000\" stroke-width=\"1\" fill=\"none\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << sy(0) << "\" x2=\"" << x_end << "\" y2=\"" << sy(0)
      << "\"/>\n<line x1=\"" << kLeft << "\" y1=\"" << sy(0) << "\" x2=\"" << kLeft << "\" y2=\""
      << sy(1) << "\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000\">\n";
  for (int d = 0; d <= static_cast<int>(decades); ++d) {
    const double x = sx(std::pow(10.0, d));
    svg << "<line x1=\"" << x << "\" y1=\"" << sy(0) << "\" x2=\"" << x << "\" y2=\"" << sy(1)
        << "\" stroke=\"#ddd\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\">1e" << d
        << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double rho = i / 5.0;
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << sy(rho) << "\" x2=\"" << x_end << "\" y2=\""
        << sy(rho) << "\" stroke=\"#eee\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(rho) + 4 << "\" text-anchor=\"end\">" << rho
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">performance ratio tau (log scale)</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">fraction of problems rho(tau)</text>\n";
  svg << "</g>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    const auto& pts = curves[c].points;
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    double prev_rho = pts.front().second;
    svg << sx(1.0) << ',' << sy(prev_rho);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      svg << ' ' << sx(pts[i].first) << ',' << sy(prev_rho) << ' ' << sx(pts[i].first) << ','
          << sy(pts[i].second);
      prev_rho = pts[i].second;
    }
    svg << ' ' << x_end << ',' << sy(prev_rho) << "\"/>\n";
    const double ly = kTop + 20.0 * static_cast<double>(c) + 10.0;
    svg << "<line x1=\"" << x_end + 15 << "\" y1=\"" << ly << "\" x2=\"" << x_end + 40 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << x_end + 46 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(curves[c].algorithm)
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg.str();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace reluwalk
