#include "qbgk/boundary.hpp"

#include "qbgk/errors.hpp"
#include "qbgk/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace qbgk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double slab_value(const SlabExample& s, const Vec3& p) {
  const double g = std::exp(-0.5 * (p.y * p.y + p.z * p.z));
  if (p.x >= s.r1 && p.x <= s.r2) return s.C_L * g;
  if (p.x <= -s.r1 && p.x >= -s.r2) return s.C_R * g;
  return 0.0;
}

std::ptrdiff_t find_node(const std::vector<double>& nodes, double v) {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it != nodes.end() && *it == v) return it - nodes.begin();
  return -1;
}

void check_sorted_nodes(const std::vector<double>& nodes, const char* field) {
  if (nodes.empty()) throw ValidationError(field, "no nodes");
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) throw ValidationError(field, "nodes must be strictly ascending");
  }
}

}  // namespace

BoundaryData::BoundaryData(Source source) : source_(std::move(source)) { validate(); }

void BoundaryData::validate() const {
  std::visit(overloaded{
                 [](const SlabExample& s) {
                   if (!(s.C_L > 0.0)) throw ValidationError("C_L", "must be positive");
                   if (!(s.C_R > 0.0)) throw ValidationError("C_R", "must be positive");
                   if (!(s.r1 > 0.0)) throw ValidationError("r1", "must be positive");
                   if (!(s.r2 > s.r1)) throw ValidationError("r2", "must exceed r1");
                 },
                 [](const EquilibriumTrace& t) {
                   if (!is_regular(t.params.regime)) {
                     throw ValidationError("equilibrium", "trace needs a regular equilibrium");
                   }
                   if (!(t.params.a > 0.0)) throw ValidationError("a", "must be positive");
                   if (t.params.c < inverse_domain_start(t.params.stat)) {
                     throw ValidationError("c", "outside the invertible range for this statistics");
                   }
                 },
                 [](const GriddedBoundary& g) {
                   check_sorted_nodes(g.p1, "p1");
                   check_sorted_nodes(g.p23, "p23");
                   if (g.values.size() != g.p1.size() * g.p23.size() * g.p23.size()) {
                     throw ValidationError("values", "size does not match the node tensor grid");
                   }
                   for (double v : g.values) {
                     if (!std::isfinite(v)) throw ValidationError("values", "must be finite");
                   }
                 },
             },
             source_);
}

double BoundaryData::evaluate(const Vec3& p) const {
  if (p.x == 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const SlabExample& s) { return slab_value(s, p); },
                        [&](const EquilibriumTrace& t) { return qbgk::evaluate(t.params, p); },
                        [&](const GriddedBoundary& g) {
                          const auto i1 = find_node(g.p1, p.x);
                          const auto i2 = find_node(g.p23, p.y);
                          const auto i3 = find_node(g.p23, p.z);
                          if (i1 < 0 || i2 < 0 || i3 < 0) {
                            throw DomainError("gridded boundary evaluated off its nodes");
                          }
                          const std::size_t m = g.p23.size();
                          return g.values[(i1 * m + i2) * m + i3];
                        },
                    },
                    source_);
}

std::vector<double> BoundaryData::on_grid(const Grid& grid) const {
  if (const auto* g = std::get_if<GriddedBoundary>(&source_)) {
    if (g->p1 != grid.p1().nodes || g->p23 != grid.p23().nodes) {
      throw GridMismatchError("gridded boundary nodes differ from the solver grid");
    }
    return g->values;
  }
  std::vector<double> out(grid.p_count());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = evaluate(grid.momentum(p));
  return out;
}

std::vector<double> BoundaryData::p1_breakpoints() const {
  if (const auto* s = std::get_if<SlabExample>(&source_)) return {s->r1, s->r2};
  return {};
}

std::shared_ptr<const BoundaryData> slab_example_boundary(double C_L, double C_R, double r1, double r2) {
  return std::make_shared<const BoundaryData>(SlabExample{C_L, C_R, r1, r2});
}

GriddedBoundary sample_boundary(const BoundaryData& boundary, const Grid& grid) {
  return {grid.p1().nodes, grid.p23().nodes, boundary.on_grid(grid)};
}

GriddedBoundary load_gridded_boundary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("boundary.path", "cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, 1, "empty gridded boundary file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "p1,p2,p3,value") throw ParseError(1, 1, "expected header 'p1,p2,p3,value'");

  std::map<double, std::size_t> s1, s23;
  struct Row {
    double p1, p2, p3, v;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Row r{};
    std::istringstream ls(line);
    std::string cell;
    double* dst[4] = {&r.p1, &r.p2, &r.p3, &r.v};
    std::size_t column = 1;
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(ls, cell, ',')) throw ParseError(line_no, column, "expected 4 columns");
      try {
        std::size_t used = 0;
        *dst[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(line_no, column, "not a number: '" + cell + "'");
      }
      column += cell.size() + 1;
    }
    if (std::getline(ls, cell, ',')) throw ParseError(line_no, column, "too many columns");
    rows.push_back(r);
    s1[r.p1] = 0;
    s23[r.p2] = 0;
    s23[r.p3] = 0;
  }
  GriddedBoundary g;
  for (auto& [v, idx] : s1) {
    idx = g.p1.size();
    g.p1.push_back(v);
  }
  for (auto& [v, idx] : s23) {
    idx = g.p23.size();
    g.p23.push_back(v);
  }
  const std::size_t m = g.p23.size();
  if (rows.size() != g.p1.size() * m * m) {
    throw ValidationError("boundary.path", "rows do not form a complete p1 x p2 x p3 tensor grid");
  }
  g.values.assign(rows.size(), std::nan(""));
  for (const Row& r : rows) {
    g.values[(s1[r.p1] * m + s23[r.p2]) * m + s23[r.p3]] = r.v;
  }
  for (double v : g.values) {
    if (std::isnan(v)) throw ValidationError("boundary.path", "duplicate or missing node rows");
  }
  return g;
}

void save_gridded_boundary(const GriddedBoundary& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("boundary.path", "cannot write '" + path.string() + "'");
  out << "p1,p2,p3,value\n";
  const std::size_t m = data.p23.size();
  char buf[128];
  for (std::size_t i1 = 0; i1 < data.p1.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < m; ++i2) {
      for (std::size_t i3 = 0; i3 < m; ++i3) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", data.p1[i1], data.p23[i2],
                      data.p23[i3], data.values[(i1 * m + i2) * m + i3]);
        out << buf;
      }
    }
  }
}

}  // namespace qbgk
