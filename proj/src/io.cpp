#include "aztec/io.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace aztec::io {

namespace {

using json = nlohmann::ordered_json;

json provenance_json(const Provenance& origin) {
  return json{{"generator_id", origin.generator_id},
              {"seed", origin.seed},
              {"config", origin.config}};
}

Provenance provenance_from(const json& j) {
  Provenance origin;
  origin.generator_id = j.at("generator_id").get<std::string>();
  origin.seed = j.at("seed").get<std::uint64_t>();
  origin.config = j.at("config").get<std::string>();
  return origin;
}

json parse_document(const std::string& text, const char* schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
    throw ParseError("missing schema tag");
  }
  if (auto got = j["schema"].get<std::string>(); got != schema) {
    throw ParseError("expected schema \"" + std::string(schema) + "\", found \"" + got + "\"");
  }
  return j;
}

std::string orientation_name(Orientation o) {
  return o == Orientation::kHorizontal ? "horizontal" : "vertical";
}

Orientation orientation_from(const std::string& name) {
  if (name == "horizontal") return Orientation::kHorizontal;
  if (name == "vertical") return Orientation::kVertical;
  throw ParseError("unknown orientation \"" + name + "\"");
}

// Compact numeric formatting for SVG coordinates.
std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Clockwise staircase boundary of the order-n diamond, as lattice points.
// Order 0 holds no squares; its outline is the degenerate four-point diamond.
std::vector<std::pair<long, long>> outline_points(unsigned order) {
  const long n = static_cast<long>(order);
  if (n == 0) return {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
  // Right boundary chain, top to bottom.
  std::vector<std::pair<long, long>> right{{1, n}};
  for (long k = 1; k < n; ++k) {
    right.emplace_back(k, n - k);
    right.emplace_back(k + 1, n - k);
  }
  right.emplace_back(n, -1);
  for (long j = 1; j < n; ++j) {
    right.emplace_back(n - j, -j);
    right.emplace_back(n - j, -j - 1);
  }
  std::vector<std::pair<long, long>> pts{{-1, n}};
  pts.insert(pts.end(), right.begin(), right.end());
  pts.emplace_back(-1, -n);
  for (size_t i = right.size() - 1; i >= 1; --i) {
    pts.emplace_back(-right[i - 1].first, right[i - 1].second);
  }
  return pts;
}

}  // namespace

TrajectoryFile record_trajectory(unsigned n, unsigned long T, std::uint64_t seed) {
  TrajectoryFile file;
  file.generator_id = CoinField::generator_id;
  file.seed = seed;
  file.n = n;
  file.T = T;
  file.frames = simulate(n, T, seed);
  return file;
}

std::string serialize(const DominoTiling& tiling, const Provenance& origin) {
  json dominoes = json::array();
  for (const Domino& d : tiling.dominoes) {
    dominoes.push_back(json{{"a", d.a},
                            {"b", d.b},
                            {"orientation", orientation_name(d.orientation)},
                            {"type", std::string(1, type_letter(classify(d, tiling.order)))}});
  }
  json j{{"schema", "tiling/1"},
         {"provenance", provenance_json(origin)},
         {"order", tiling.order},
         {"dominoes", std::move(dominoes)}};
  return j.dump(2);
}

std::string serialize(const TrajectoryFile& trajectory) {
  json frames = json::array();
  for (const InterlacedConfiguration& cfg : trajectory.frames) {
    frames.push_back(cfg.lines);
  }
  json j{{"schema", "trajectory/1"},
         {"generator_id", trajectory.generator_id},
         {"seed", trajectory.seed},
         {"n", trajectory.n},
         {"T", trajectory.T},
         {"frames", std::move(frames)}};
  return j.dump(2);
}

std::string serialize(const stats::StatReport& report, const Provenance& origin) {
  json j{{"schema", "report/1"},
         {"provenance", provenance_json(origin)},
         {"name", report.name},
         {"statistic", report.statistic},
         {"threshold", report.threshold},
         {"samples", report.samples},
         {"pass", report.pass},
         {"metadata", report.metadata}};
  return j.dump(2);
}

DominoTiling deserialize_tiling(const std::string& text) {
  const json j = parse_document(text, "tiling/1");
  DominoTiling tiling;
  try {
    tiling.order = j.at("order").get<unsigned>();
    for (const json& entry : j.at("dominoes")) {
      Domino d;
      d.a = entry.at("a").get<long>();
      d.b = entry.at("b").get<long>();
      d.orientation = orientation_from(entry.at("orientation").get<std::string>());
      if (!domino_in_diamond(d, tiling.order)) {
        throw ParseError("domino outside the order-" + std::to_string(tiling.order) + " diamond");
      }
      if (auto type = entry.at("type").get<std::string>();
          type != std::string(1, type_letter(classify(d, tiling.order)))) {
        throw ParseError("domino type \"" + type + "\" contradicts the checkerboard colouring");
      }
      tiling.dominoes.push_back(d);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tiling: ") + e.what());
  }
  std::sort(tiling.dominoes.begin(), tiling.dominoes.end());
  return tiling;
}

TrajectoryFile deserialize_trajectory(const std::string& text) {
  const json j = parse_document(text, "trajectory/1");
  TrajectoryFile file;
  try {
    file.generator_id = j.at("generator_id").get<std::string>();
    file.seed = j.at("seed").get<std::uint64_t>();
    file.n = j.at("n").get<unsigned>();
    file.T = j.at("T").get<unsigned long>();
    for (const json& frame : j.at("frames")) {
      InterlacedConfiguration cfg;
      cfg.lines = frame.get<Filling>();
      file.frames.push_back(std::move(cfg));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed trajectory: ") + e.what());
  }
  if (file.frames.size() != file.T + 1) {
    throw ParseError("frame count disagrees with T");
  }
  for (const InterlacedConfiguration& cfg : file.frames) {
    if (cfg.depth() != file.n || !cfg.valid()) {
      throw ParseError("frame violates the interlacing constraints");
    }
  }
  return file;
}

stats::StatReport deserialize_report(const std::string& text) {
  const json j = parse_document(text, "report/1");
  stats::StatReport report;
  try {
    report.name = j.at("name").get<std::string>();
    report.statistic = j.at("statistic").get<double>();
    report.threshold = j.at("threshold").get<double>();
    report.samples = j.at("samples").get<std::uint64_t>();
    report.pass = j.at("pass").get<bool>();
    report.metadata = j.at("metadata").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return report;
}

Provenance provenance_of(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    if (!j.is_object() || !j.contains("schema")) throw ParseError("missing schema tag");
    if (j["schema"] == "trajectory/1") {
      Provenance origin;
      origin.generator_id = j.at("generator_id").get<std::string>();
      origin.seed = j.at("seed").get<std::uint64_t>();
      origin.config = "n=" + std::to_string(j.at("n").get<unsigned>()) +
                      " T=" + std::to_string(j.at("T").get<unsigned long>());
      return origin;
    }
    return provenance_from(j.at("provenance"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed artifact: ") + e.what());
  }
}

std::string render_svg(const DominoTiling& tiling, const RenderOptions& options) {
  const double cell = options.cell;
  const double margin = 0.5 * cell;
  const long n = static_cast<long>(tiling.order);
  const double size = 2 * margin + (2 * n + 2) * cell;
  const auto px = [&](double x) { return margin + (x + n + 1) * cell; };
  const auto py = [&](double y) { return margin + (n + 1 - y) * cell; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size) << "\" height=\""
      << num(size) << "\" viewBox=\"0 0 " << num(size) << ' ' << num(size) << "\">\n";
  svg << "  <rect width=\"" << num(size) << "\" height=\"" << num(size) << "\" fill=\"white\"/>\n";
  for (const Domino& d : tiling.dominoes) {
    const bool horizontal = d.orientation == Orientation::kHorizontal;
    const DominoType type = classify(d, tiling.order);
    const bool shaded = type == DominoType::kSouth || type == DominoType::kEast;
    const double w = horizontal ? 2 * cell : cell;
    const double h = horizontal ? cell : 2 * cell;
    const double top = static_cast<double>(d.b) + (horizontal ? 1.0 : 2.0);
    svg << "  <rect x=\"" << num(px(d.a)) << "\" y=\"" << num(py(top)) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << (shaded ? "#9aa7b8" : "#f4f1e8")
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    if (options.particles && shaded) {
      const double cx = static_cast<double>(d.a) + (horizontal ? 1.0 : 0.5);
      const double cy = static_cast<double>(d.b) + (horizontal ? 0.5 : 1.0);
      svg << "  <circle cx=\"" << num(px(cx)) << "\" cy=\"" << num(py(cy)) << "\" r=\""
          << num(0.18 * cell) << "\" fill=\"#1a1a1a\"/>\n";
    }
  }
  const auto pts = outline_points(tiling.order);
  svg << "  <path d=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    svg << (i == 0 ? 'M' : 'L') << num(px(static_cast<double>(pts[i].first))) << ' '
        << num(py(static_cast<double>(pts[i].second)));
  }
  svg << "Z\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string render_ascii(const DominoTiling& tiling) {
  const long n = static_cast<long>(tiling.order);
  std::map<std::pair<long, long>, char> covered;
  for (const Domino& d : tiling.dominoes) {
    const char letter = type_letter(classify(d, tiling.order));
    covered[{d.a, d.b}] = letter;
    if (d.orientation == Orientation::kHorizontal) {
      covered[{d.a + 1, d.b}] = letter;
    } else {
      covered[{d.a, d.b + 1}] = letter;
    }
  }
  std::string out;
  for (long b = n - 1; b >= -n; --b) {
    std::string row;
    for (long a = -n; a < n; ++a) {
      if (!square_in_diamond(a, b, tiling.order)) {
        row += ' ';
      } else if (auto it = covered.find({a, b}); it != covered.end()) {
        row += it->second;
      } else {
        row += '.';
      }
    }
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += row;
    out += '\n';
  }
  return out;
}

}  // namespace aztec::io
