#include "sbfem/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace sbfem {

namespace {

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) throw IoError("mesh file: expected '" + word + "', got '" + got + "'");
}

int read_count(std::istream& in, const std::string& section) {
  expect(in, section);
  long n = -1;
  if (!(in >> n) || n < 0) throw IoError("mesh file: bad count for " + section);
  return static_cast<int>(n);
}

Subdomain subdomain_from_string(const std::string& s) {
  if (s == "fluid" || s == "0") return Subdomain::Fluid;
  if (s == "porous" || s == "1") return Subdomain::Porous;
  throw IoError("mesh file: unknown subdomain '" + s + "'");
}

// Counterclockwise, longest edge opposite v[0].
std::array<int, 3> normalize_triangle(const std::vector<Vec2>& x, std::array<int, 3> v) {
  const Vec2 a = x[v[1]] - x[v[0]], b = x[v[2]] - x[v[0]];
  if (a.x() * b.y() - a.y() * b.x() < 0) std::swap(v[1], v[2]);
  int longest = 0;
  double best = -1;
  for (int i = 0; i < 3; ++i) {
    const double len = (x[v[(i + 2) % 3]] - x[v[(i + 1) % 3]]).squaredNorm();
    if (len > best) {
      best = len;
      longest = i;
    }
  }
  return {v[longest], v[(longest + 1) % 3], v[(longest + 2) % 3]};
}

}  // namespace

Mesh read_mesh_text(std::istream& in) {
  expect(in, "sbmesh");
  int version = 0;
  if (!(in >> version) || version != 1) throw IoError("mesh file: unsupported sbmesh version");

  const int nv = read_count(in, "vertices");
  std::vector<Vec2> vertices(nv);
  for (auto& p : vertices)
    if (!(in >> p.x() >> p.y())) throw IoError("mesh file: truncated vertex block");

  const int nc = read_count(in, "cells");
  std::vector<Cell> cells(nc);
  for (auto& c : cells) {
    std::string sub;
    if (!(in >> c.v[0] >> c.v[1] >> c.v[2] >> sub)) throw IoError("mesh file: truncated cell block");
    c.subdomain = subdomain_from_string(sub);
  }

  const int nb = read_count(in, "boundary_edges");
  std::map<EdgeKey, EdgeTag> tags;
  for (int i = 0; i < nb; ++i) {
    int a = 0, b = 0;
    std::string tag;
    if (!(in >> a >> b >> tag)) throw IoError("mesh file: truncated boundary edge block");
    tags[make_edge_key(a, b)] = edge_tag_from_string(tag);
  }
  return Mesh(std::move(vertices), std::move(cells), tags);
}

void write_mesh_text(std::ostream& out, const Mesh& mesh) {
  out << "sbmesh 1\n";
  out << "vertices " << mesh.n_vertices() << '\n' << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
  out << "cells " << mesh.n_cells() << '\n';
  for (const auto& c : mesh.cells())
    out << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << ' ' << to_string(c.subdomain) << '\n';
  const auto tags = mesh.boundary_tags();
  out << "boundary_edges " << tags.size() << '\n';
  for (const auto& [key, tag] : tags) out << key.first << ' ' << key.second << ' ' << to_string(tag) << '\n';
}

Mesh read_gmsh22(std::istream& in) {
  std::unordered_map<int, std::string> physical_names;
  std::unordered_map<long, int> node_index;
  std::vector<Vec2> vertices;
  std::vector<std::pair<std::array<long, 3>, int>> triangles;
  std::vector<std::pair<std::array<long, 2>, int>> lines;

  std::string section;
  while (in >> section) {
    if (section == "$MeshFormat") {
      std::string version;
      int file_type = 0, data_size = 0;
      in >> version >> file_type >> data_size;
      if (version.rfind("2.", 0) != 0 || file_type != 0) throw IoError("gmsh: only MSH 2.x ASCII is supported");
      expect(in, "$EndMeshFormat");
    } else if (section == "$PhysicalNames") {
      int n = 0;
      in >> n;
      for (int i = 0; i < n; ++i) {
        int dim = 0, tag = 0;
        std::string name;
        in >> dim >> tag >> std::quoted(name);
        physical_names[tag] = name;
      }
      expect(in, "$EndPhysicalNames");
    } else if (section == "$Nodes") {
      long n = 0;
      in >> n;
      for (long i = 0; i < n; ++i) {
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(in >> id >> x >> y >> z)) throw IoError("gmsh: truncated $Nodes");
        node_index[id] = static_cast<int>(vertices.size());
        vertices.emplace_back(x, y);
      }
      expect(in, "$EndNodes");
    } else if (section == "$Elements") {
      long n = 0;
      in >> n;
      for (long i = 0; i < n; ++i) {
        long id = 0;
        int type = 0, ntags = 0;
        if (!(in >> id >> type >> ntags)) throw IoError("gmsh: truncated $Elements");
        std::vector<int> etags(ntags);
        for (auto& t : etags) in >> t;
        const int physical = ntags > 0 ? etags[0] : -1;
        if (type == 1) {
          std::array<long, 2> nodes{};
          in >> nodes[0] >> nodes[1];
          lines.emplace_back(nodes, physical);
        } else if (type == 2) {
          std::array<long, 3> nodes{};
          in >> nodes[0] >> nodes[1] >> nodes[2];
          triangles.emplace_back(nodes, physical);
        } else if (type == 15) {
          long node = 0;
          in >> node;
        } else {
          throw IoError("gmsh: unsupported element type " + std::to_string(type));
        }
      }
      expect(in, "$EndElements");
    } else if (!section.empty() && section[0] == '$') {
      // Skip unknown sections.
      const std::string end = "$End" + section.substr(1);
      std::string word;
      while (in >> word && word != end) {
      }
    }
  }

  auto name_of = [&](int physical) -> std::string {
    const auto it = physical_names.find(physical);
    if (it == physical_names.end()) throw IoError("gmsh: physical group " + std::to_string(physical) + " has no name");
    return it->second;
  };
  auto node = [&](long id) {
    const auto it = node_index.find(id);
    if (it == node_index.end()) throw IoError("gmsh: element references unknown node " + std::to_string(id));
    return it->second;
  };

  std::vector<Cell> cells;
  for (const auto& [nodes, physical] : triangles) {
    const std::string name = name_of(physical);
    Subdomain s;
    if (name == "fluid") s = Subdomain::Fluid;
    else if (name == "porous") s = Subdomain::Porous;
    else throw IoError("gmsh: triangle in unknown physical group '" + name + "'");
    cells.push_back({normalize_triangle(vertices, {node(nodes[0]), node(nodes[1]), node(nodes[2])}), s});
  }
  std::map<EdgeKey, EdgeTag> tags;
  for (const auto& [nodes, physical] : lines)
    tags[make_edge_key(node(nodes[0]), node(nodes[1]))] = edge_tag_from_string(name_of(physical));
  return Mesh(std::move(vertices), std::move(cells), tags);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path);
  const bool gmsh = path.size() > 4 && path.substr(path.size() - 4) == ".msh";
  return gmsh ? read_gmsh22(in) : read_mesh_text(in);
}

}  // namespace sbfem
