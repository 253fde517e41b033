#include "workbench/charts.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <sstream>

namespace wb {

using nlohmann::json;

namespace {

const char* const kColors[9] = {"#000000", "#8b4513", "#d62728", "#ff7f0e", "#d4b000",
                                "#2ca02c", "#1f77b4", "#7b3294", "#888888"};

struct Axes {
  int n = -1, s = -1, t = -1, color = -1;
};

Axes axes_for(const std::vector<std::string>& cols) {
  Axes a;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "n") a.n = static_cast<int>(i);
    if (cols[i] == "s") a.s = static_cast<int>(i);
    if (cols[i] == "t") a.t = static_cast<int>(i);
    if (cols[i] == "m") a.color = static_cast<int>(i);
  }
  if (a.s < 0) a.s = std::min<int>(1, static_cast<int>(cols.size()) - 1);
  if (a.n < 0 && a.t < 0) a.n = 0;
  if (a.color < 0)
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (static_cast<int>(i) != a.n && static_cast<int>(i) != a.s && static_cast<int>(i) != a.t) a.color = static_cast<int>(i);
  return a;
}

void place(ChartData& c, const Axes& a, const std::vector<int>& d, ChartGlyph g) {
  auto at = [&](int i) { return i >= 0 && i < static_cast<int>(d.size()) ? d[static_cast<std::size_t>(i)] : 0; };
  g.y = at(a.s);
  g.x = a.n >= 0 ? at(a.n) : at(a.t) - g.y;
  g.color = ((a.color >= 0 ? at(a.color) : 0) % 9 + 9) % 9;
  c.xmax = std::max(c.xmax, g.x);
  c.ymax = std::max(c.ymax, g.y);
  c.glyphs.push_back(std::move(g));
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

ChartData chart_from_report_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("run JSON: ") + e.what());
  }
  ChartData c;
  try {
    c.title = j.value("name", std::string());
    const Axes a = axes_for(j.value("columns", std::vector<std::string>{"n", "s"}));
    const json towers = j.value("towers", json::array());
    if (!towers.empty()) {
      for (const auto& t : towers) {
        const auto d = t.at("degree").get<std::vector<int>>();
        const int free = t.at("free").get<int>();
        if (free > 0) {
          ChartGlyph g;
          g.kind = ChartGlyph::FreeTower;
          g.count = free;
          place(c, a, d, g);
        }
        for (int len : t.at("truncated").get<std::vector<int>>()) {
          ChartGlyph g;
          g.kind = ChartGlyph::TruncatedTower;
          g.count = len;
          place(c, a, d, g);
        }
      }
    } else {
      for (const auto& cell : j.value("einf", json::array())) {
        const auto d = cell.at("degree").get<std::vector<int>>();
        const auto labels = cell.value("labels", std::vector<std::string>{});
        const int rank = cell.at("rank").get<int>();
        const auto torsion = cell.value("torsion", std::vector<std::string>{});
        if (rank > 0) {
          ChartGlyph g;
          g.kind = ChartGlyph::Free;
          g.count = rank;
          g.label = join(std::vector<std::string>(labels.begin(), labels.begin() + std::min<long>(rank, static_cast<long>(labels.size()))), ";");
          place(c, a, d, g);
        }
        for (std::size_t i = 0; i < torsion.size(); ++i) {
          ChartGlyph g;
          g.kind = ChartGlyph::Torsion;
          g.label = "Z/" + torsion[i];
          const std::size_t li = static_cast<std::size_t>(rank) + i;
          if (li < labels.size()) g.label += " " + labels[li];
          place(c, a, d, g);
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run JSON: ") + e.what());
  }
  std::stable_sort(c.glyphs.begin(), c.glyphs.end(),
                   [](const ChartGlyph& l, const ChartGlyph& r) { return std::tie(l.x, l.y) < std::tie(r.x, r.y); });
  return c;
}

ChartData chart_from_report(const RunReport& report) { return chart_from_report_json(report.json()); }

ChartData chart_from_ext(const ExtTable& table) {
  json j;
  j["name"] = table.name;
  j["columns"] = {"s", "t"};
  j["einf"] = json::array();
  for (const auto& c : table.cells) {
    std::vector<int> d{c.s};
    d.insert(d.end(), c.t.begin(), c.t.end());
    std::vector<std::string> tor;
    for (const auto& x : c.group.torsion) tor.push_back(x.get_str());
    j["einf"].push_back({{"degree", d}, {"rank", c.group.free_rank}, {"torsion", tor}, {"labels", c.group.labels}});
  }
  return chart_from_report_json(j.dump());
}

std::string render_svg(const ChartData& c) {
  const int cell = 28, margin = 40;
  const int w = margin * 2 + cell * (c.xmax + 1), h = margin * 2 + cell * (c.ymax + 1);
  auto px = [&](int x) { return margin + cell * x + cell / 2; };
  auto py = [&](int y) { return h - margin - cell * y - cell / 2; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!c.title.empty()) os << "<title>" << c.title << "</title>\n";
  os << "<g stroke=\"#000\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin / 2 << "\" y2=\"" << h - margin
     << "\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << margin << "\" y2=\"" << margin / 2 << "\"/>\n";
  os << "</g>\n<g font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">\n";
  for (int x = 0; x <= c.xmax; x += (c.xmax > 40 ? 4 : 2))
    os << "<text x=\"" << px(x) << "\" y=\"" << h - margin + 14 << "\">" << x << "</text>\n";
  for (int y = 0; y <= c.ymax; ++y) os << "<text x=\"" << margin - 12 << "\" y=\"" << py(y) + 3 << "\">" << y << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 6 << "\">n</text>\n";
  os << "<text x=\"10\" y=\"" << h / 2 << "\">s</text>\n</g>\n";
  std::map<std::pair<int, int>, int> slot;
  for (const auto& g : c.glyphs) {
    const int k = slot[{g.x, g.y}]++;
    const int cx = px(g.x) - cell / 3 + (k % 4) * 6, cy = py(g.y) - (k / 4) * 6;
    const char* col = kColors[g.color];
    os << "<g>";
    if (!g.label.empty()) os << "<title>" << g.label << "</title>";
    switch (g.kind) {
      case ChartGlyph::Free:
        os << "<rect x=\"" << cx - 3 << "\" y=\"" << cy - 3 << "\" width=\"6\" height=\"6\" fill=\"" << col << "\"/>";
        break;
      case ChartGlyph::Torsion:
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"2.5\" fill=\"" << col << "\"/>";
        break;
      case ChartGlyph::FreeTower:
        os << "<rect x=\"" << cx - 3 << "\" y=\"" << cy - 3 << "\" width=\"6\" height=\"6\" fill=\"none\" stroke=\"" << col
           << "\"/>";
        break;
      case ChartGlyph::TruncatedTower:
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"1.5\" fill=\"" << col << "\"/>";
        for (int i = 1; i <= g.count; ++i)
          os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << 1.5 + 2 * i << "\" fill=\"none\" stroke=\"" << col
             << "\" stroke-width=\"0.7\"/>";
        break;
    }
    if (g.count > 1 && g.kind != ChartGlyph::TruncatedTower)
      os << "<text x=\"" << cx + 4 << "\" y=\"" << cy - 4 << "\" font-size=\"7\" fill=\"" << col << "\">" << g.count
         << "</text>";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_text(const ChartData& c) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& g : c.glyphs) count[{g.x, g.y}] += (g.kind == ChartGlyph::Free || g.kind == ChartGlyph::FreeTower) ? g.count : 1;
  std::ostringstream os;
  if (!c.title.empty()) os << c.title << "\n";
  for (int y = c.ymax; y >= 0; --y) {
    os << (y < 10 ? " " : "") << y << " |";
    for (int x = 0; x <= c.xmax; ++x) {
      auto it = count.find({x, y});
      os << ' ' << (it == count.end() ? '.' : it->second > 9 ? '*' : static_cast<char>('0' + it->second));
    }
    os << "\n";
  }
  os << "   +";
  for (int x = 0; x <= c.xmax; ++x) os << "--";
  os << "\n    ";
  for (int x = 0; x <= c.xmax; ++x) os << ' ' << (x % 10);
  os << "\n";
  static const char* const kinds[] = {"free", "torsion", "free tower", "truncated tower"};
  for (const auto& g : c.glyphs) {
    os << "(" << g.x << "," << g.y << ") color " << g.color << " " << kinds[g.kind];
    if (g.kind == ChartGlyph::TruncatedTower)
      os << " length " << g.count;
    else if (g.count > 1)
      os << " x" << g.count;
    if (!g.label.empty()) os << " " << g.label;
    os << "\n";
  }
  return os.str();
}

}  // namespace wb
