#include "sbfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sbfem {

namespace {

std::uint64_t pack(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

std::string_view to_string(Subdomain s) { return s == Subdomain::Fluid ? "fluid" : "porous"; }

std::string_view to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::InteriorFluid: return "interior_fluid";
    case EdgeTag::InteriorPorous: return "interior_porous";
    case EdgeTag::GammaF: return "gamma_f";
    case EdgeTag::GammaPD: return "gamma_pd";
    case EdgeTag::GammaPN: return "gamma_pn";
    case EdgeTag::GammaFP: return "gamma_fp";
  }
  return "?";
}

EdgeTag edge_tag_from_string(std::string_view name) {
  if (name == "gamma_f") return EdgeTag::GammaF;
  if (name == "gamma_pd") return EdgeTag::GammaPD;
  if (name == "gamma_pn") return EdgeTag::GammaPN;
  if (name == "gamma_fp") return EdgeTag::GammaFP;
  if (name == "interior_fluid") return EdgeTag::InteriorFluid;
  if (name == "interior_porous") return EdgeTag::InteriorPorous;
  throw GeometryError("unknown edge tag '" + std::string(name) + "'");
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells,
           const std::map<EdgeKey, EdgeTag>& boundary_tags)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = n_vertices();
  for (int c = 0; c < n_cells(); ++c) {
    const auto& v = cells_[c].v;
    for (int i : v)
      if (i < 0 || i >= nv) throw GeometryError("cell " + std::to_string(c) + " has an invalid vertex");
    if (signed_area(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]) <= 0)
      throw GeometryError("cell " + std::to_string(c) + " is degenerate or clockwise");
  }
  build_edges(boundary_tags);
}

void Mesh::build_edges(const std::map<EdgeKey, EdgeTag>& boundary_tags) {
  edges_.clear();
  cell_edges_.assign(cells_.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(cells_.size() * 2);

  for (int c = 0; c < n_cells(); ++c) {
    const auto& v = cells_[c].v;
    for (int i = 0; i < 3; ++i) {
      const int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      auto [it, inserted] = index.try_emplace(pack(a, b), n_edges());
      if (inserted) {
        Edge e;
        e.v = {std::min(a, b), std::max(a, b)};
        e.cells = {c, -1};
        e.local = {i, -1};
        e.tag = EdgeTag::InteriorFluid;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.cells[1] >= 0)
          throw GeometryError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") has more than two incident cells");
        e.cells[1] = c;
        e.local[1] = i;
      }
      cell_edges_[c][i] = it->second;
    }
  }

  for (auto& e : edges_) {
    const auto tagged = boundary_tags.find(EdgeKey{e.v[0], e.v[1]});
    if (!e.is_boundary()) {
      const Subdomain s0 = cells_[e.cells[0]].subdomain, s1 = cells_[e.cells[1]].subdomain;
      if (s0 != s1) {
        e.tag = EdgeTag::GammaFP;
      } else {
        e.tag = s0 == Subdomain::Fluid ? EdgeTag::InteriorFluid : EdgeTag::InteriorPorous;
        if (tagged != boundary_tags.end() && tagged->second == EdgeTag::GammaFP)
          throw GeometryError("interface edge tagged between cells of one subdomain");
      }
      continue;
    }
    if (tagged == boundary_tags.end())
      throw GeometryError("boundary edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                          ") has no tag");
    const EdgeTag t = tagged->second;
    const Subdomain s = cells_[e.cells[0]].subdomain;
    if (t == EdgeTag::GammaFP) throw GeometryError("interface edge with a single incident cell");
    if (t == EdgeTag::InteriorFluid || t == EdgeTag::InteriorPorous)
      throw GeometryError("boundary edge tagged as interior");
    if ((t == EdgeTag::GammaF) != (s == Subdomain::Fluid))
      throw GeometryError("boundary tag " + std::string(to_string(t)) + " on a " +
                          std::string(to_string(s)) + " cell");
    e.tag = t;
  }

  // Gamma_p^D must stay away from the interface.
  std::unordered_set<int> interface_vertices;
  for (const auto& e : edges_)
    if (e.tag == EdgeTag::GammaFP) interface_vertices.insert({e.v[0], e.v[1]});
  for (const auto& e : edges_)
    if (e.tag == EdgeTag::GammaPD && (interface_vertices.count(e.v[0]) || interface_vertices.count(e.v[1])))
      throw GeometryError("Gamma_p^D edge touches the fluid/porous interface");

  edge_lookup_.clear();
  edge_lookup_.reserve(index.size());
  for (const auto& [key, e] : index) edge_lookup_.emplace_back(key, e);
  std::sort(edge_lookup_.begin(), edge_lookup_.end());
}

int Mesh::find_edge(int a, int b) const {
  const std::uint64_t key = pack(a, b);
  auto it = std::lower_bound(edge_lookup_.begin(), edge_lookup_.end(), std::make_pair(key, -1));
  if (it == edge_lookup_.end() || it->first != key) return -1;
  return it->second;
}

int Mesh::neighbor(int c, int local) const {
  const Edge& e = edges_[cell_edges_[c][local]];
  return e.cells[0] == c ? e.cells[1] : e.cells[0];
}

std::map<EdgeKey, EdgeTag> Mesh::boundary_tags() const {
  std::map<EdgeKey, EdgeTag> tags;
  for (const auto& e : edges_)
    if (e.is_boundary() || e.tag == EdgeTag::GammaFP) tags[{e.v[0], e.v[1]}] = e.tag;
  return tags;
}

double Mesh::h_max() const {
  double h = 0;
  for (int c = 0; c < n_cells(); ++c) h = std::max(h, cell_geometry(*this, c).h);
  return h;
}

double Mesh::tagged_length(EdgeTag tag) const {
  double len = 0;
  for (const auto& e : edges_)
    if (e.tag == tag) len += (vertices_[e.v[1]] - vertices_[e.v[0]]).norm();
  return len;
}

CellGeometry cell_geometry(const Vec2& a, const Vec2& b, const Vec2& c) {
  CellGeometry g;
  g.x = {a, b, c};
  g.area = signed_area(a, b, c);
  if (!(g.area > 0)) throw GeometryError("zero-area or clockwise cell");
  double perimeter = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 t = g.x[(i + 2) % 3] - g.x[(i + 1) % 3];
    const double len = t.norm();
    g.edge_length[i] = len;
    g.tangent[i] = t / len;
    g.normal[i] = Vec2(g.tangent[i].y(), -g.tangent[i].x());  // right of a ccw traversal
    g.grad_bary[i] = -g.normal[i] * len / (2.0 * g.area);
    perimeter += len;
  }
  g.h = std::max({g.edge_length[0], g.edge_length[1], g.edge_length[2]});
  g.rho = 4.0 * g.area / perimeter;
  return g;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  if (cell < 0 || cell >= mesh.n_cells()) throw DomainError("cell id out of range");
  const auto& v = mesh.cell(cell).v;
  return cell_geometry(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
}

double shape_regularity(const Mesh& mesh) {
  double sigma = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto g = cell_geometry(mesh, c);
    sigma = std::max(sigma, g.h / g.rho);
  }
  return sigma;
}

Mesh build_reference_geometry(const RectangleConfig& cfg) {
  if (!(cfg.x_max > cfg.x_min) || !(cfg.y_max > cfg.y_min))
    throw GeometryError("degenerate rectangle");
  if (!(cfg.y_interface > cfg.y_min && cfg.y_interface < cfg.y_max))
    throw GeometryError("interface must lie strictly inside the rectangle");
  if (cfg.nx < 1 || cfg.ny < 1) throw GeometryError("nx and ny must be at least 1");
  for (EdgeTag t : {cfg.porous_sides, cfg.porous_bottom})
    if (t != EdgeTag::GammaPD && t != EdgeTag::GammaPN)
      throw GeometryError("porous boundary must be gamma_pd or gamma_pn");

  const double height = cfg.y_max - cfg.y_min;
  const int ny_p = std::max(1, static_cast<int>(std::lround(cfg.ny * (cfg.y_interface - cfg.y_min) / height)));
  const int ny_f = std::max(1, static_cast<int>(std::lround(cfg.ny * (cfg.y_max - cfg.y_interface) / height)));
  const int rows = ny_p + ny_f;

  std::vector<double> ys(rows + 1);
  for (int j = 0; j <= ny_p; ++j) ys[j] = cfg.y_min + (cfg.y_interface - cfg.y_min) * j / ny_p;
  for (int j = 1; j <= ny_f; ++j) ys[ny_p + j] = cfg.y_interface + (cfg.y_max - cfg.y_interface) * j / ny_f;
  ys[ny_p] = cfg.y_interface;

  std::vector<Vec2> vertices;
  vertices.reserve((cfg.nx + 1) * (rows + 1));
  for (int j = 0; j <= rows; ++j)
    for (int i = 0; i <= cfg.nx; ++i)
      vertices.emplace_back(cfg.x_min + (cfg.x_max - cfg.x_min) * i / cfg.nx, ys[j]);
  auto id = [&](int i, int j) { return j * (cfg.nx + 1) + i; };

  std::vector<Cell> cells;
  cells.reserve(2 * cfg.nx * rows);
  for (int j = 0; j < rows; ++j) {
    const Subdomain s = j < ny_p ? Subdomain::Porous : Subdomain::Fluid;
    for (int i = 0; i < cfg.nx; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p01 = id(i, j + 1), p11 = id(i + 1, j + 1);
      // Right-angle vertex first: the diagonal is the refinement edge of both halves.
      cells.push_back({{p10, p11, p00}, s});
      cells.push_back({{p01, p00, p11}, s});
    }
  }

  std::map<EdgeKey, EdgeTag> tags;
  for (int i = 0; i < cfg.nx; ++i) {
    tags[make_edge_key(id(i, 0), id(i + 1, 0))] = cfg.porous_bottom;
    tags[make_edge_key(id(i, rows), id(i + 1, rows))] = EdgeTag::GammaF;
    tags[make_edge_key(id(i, ny_p), id(i + 1, ny_p))] = EdgeTag::GammaFP;
  }
  for (int j = 0; j < rows; ++j) {
    const EdgeTag t = j < ny_p ? cfg.porous_sides : EdgeTag::GammaF;
    tags[make_edge_key(id(0, j), id(0, j + 1))] = t;
    tags[make_edge_key(id(cfg.nx, j), id(cfg.nx, j + 1))] = t;
  }
  return Mesh(std::move(vertices), std::move(cells), tags);
}

RefineResult refine(const Mesh& mesh, std::span<const int> marked) {
  const int n_edges = mesh.n_edges();
  std::vector<char> marked_edge(n_edges, 0);
  std::deque<int> queue;

  auto mark = [&](int e) {
    if (!marked_edge[e]) {
      marked_edge[e] = 1;
      queue.push_back(e);
    }
  };
  for (int c : marked) {
    if (c < 0 || c >= mesh.n_cells()) throw DomainError("marked cell out of range");
    mark(mesh.cell_edges(c)[0]);
  }
  // Closure: any cell with a marked edge must also bisect its refinement edge.
  while (!queue.empty()) {
    const int e = queue.front();
    queue.pop_front();
    for (int c : mesh.edge(e).cells)
      if (c >= 0) mark(mesh.cell_edges(c)[0]);
  }

  std::unordered_set<std::uint64_t> to_split;
  for (int e = 0; e < n_edges; ++e)
    if (marked_edge[e]) to_split.insert(pack(mesh.edge(e).v[0], mesh.edge(e).v[1]));

  std::vector<Vec2> vertices = mesh.vertices();
  std::unordered_map<std::uint64_t, int> midpoint;
  std::map<EdgeKey, EdgeTag> tags = mesh.boundary_tags();

  struct Work {
    Cell cell;
    int origin;
  };
  std::vector<Work> current;
  current.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) current.push_back({mesh.cell(c), c});

  bool bisected = true;
  while (bisected) {
    bisected = false;
    std::vector<Work> next;
    next.reserve(current.size() * 2);
    for (const Work& w : current) {
      const auto [v0, v1, v2] = w.cell.v;
      const std::uint64_t key = pack(v1, v2);
      if (!to_split.count(key)) {
        next.push_back(w);
        continue;
      }
      bisected = true;
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(vertices.size()));
      if (inserted) {
        vertices.push_back(0.5 * (vertices[v1] + vertices[v2]));
        const auto tag = tags.find(make_edge_key(v1, v2));
        if (tag != tags.end()) {
          const EdgeTag t = tag->second;
          tags.erase(tag);
          tags[make_edge_key(v1, it->second)] = t;
          tags[make_edge_key(it->second, v2)] = t;
        }
      }
      const int m = it->second;
      next.push_back({{{m, v0, v1}, w.cell.subdomain}, w.origin});
      next.push_back({{{m, v2, v0}, w.cell.subdomain}, w.origin});
    }
    current = std::move(next);
  }

  RefineResult result;
  result.children.resize(mesh.n_cells());
  std::vector<Cell> cells;
  cells.reserve(current.size());
  for (int i = 0; i < static_cast<int>(current.size()); ++i) {
    cells.push_back(current[i].cell);
    result.children[current[i].origin].push_back(i);
  }
  result.mesh = Mesh(std::move(vertices), std::move(cells), tags);
  return result;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) all[c] = c;
  Mesh once = refine(mesh, all).mesh;
  all.resize(once.n_cells());
  for (int c = 0; c < once.n_cells(); ++c) all[c] = c;
  return refine(once, all).mesh;
}

ConformityAudit audit_conformity(const Mesh& mesh) {
  auto fail = [](std::string msg) { return ConformityAudit{false, std::move(msg)}; };
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& v = mesh.cell(c).v;
    if (signed_area(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2])) <= 0)
      return fail("cell " + std::to_string(c) + " has non-positive orientation");
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.is_boundary()) {
      if (edge.tag != EdgeTag::GammaF && edge.tag != EdgeTag::GammaPD && edge.tag != EdgeTag::GammaPN)
        return fail("edge " + std::to_string(e) + " has one cell but is not an external boundary edge");
    } else if (edge.tag == EdgeTag::GammaFP) {
      if (mesh.subdomain(edge.cells[0]) == mesh.subdomain(edge.cells[1]))
        return fail("interface edge " + std::to_string(e) + " does not separate the subdomains");
    }
  }
  // Hanging nodes: no vertex may sit in the interior of an edge. Bucket the
  // vertices on a uniform grid so the audit stays near-linear.
  Vec2 lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const auto& p : mesh.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.n_vertices()))));
  const Vec2 span = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
  auto bucket = [&](const Vec2& p, int axis) {
    return std::clamp(static_cast<int>((p[axis] - lo[axis]) / span[axis] * nb), 0, nb - 1);
  };
  std::vector<std::vector<int>> grid(nb * nb);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    grid[bucket(mesh.vertex(i), 1) * nb + bucket(mesh.vertex(i), 0)].push_back(i);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec2& a = mesh.vertex(mesh.edge(e).v[0]);
    const Vec2& b = mesh.vertex(mesh.edge(e).v[1]);
    const double len = (b - a).norm();
    const Vec2 emin = a.cwiseMin(b), emax = a.cwiseMax(b);
    for (int by = bucket(emin, 1); by <= bucket(emax, 1); ++by)
      for (int bx = bucket(emin, 0); bx <= bucket(emax, 0); ++bx)
        for (int v : grid[by * nb + bx]) {
          if (v == mesh.edge(e).v[0] || v == mesh.edge(e).v[1]) continue;
          const Vec2& p = mesh.vertex(v);
          const double s = (p - a).dot(b - a) / (len * len);
          const double dist = std::abs((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x()) / len;
          if (s > 1e-12 && s < 1 - 1e-12 && dist < 1e-12 * len)
            return fail("hanging vertex " + std::to_string(v) + " on edge " + std::to_string(e));
        }
  }
  return {};
}

}  // namespace sbfem
