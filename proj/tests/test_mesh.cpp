#include "doctest.h"
#include "oracle.hpp"

#include "sbfem/mesh_io.hpp"

#include <random>
#include <sstream>

using namespace sbfem;

namespace {

double shoelace(const Mesh& m, int c) {
  const auto& v = m.cell(c).v;
  const Vec2 a = m.vertex(v[0]), b = m.vertex(v[1]), d = m.vertex(v[2]);
  return 0.5 * ((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x());
}

double total_area(const Mesh& m, Subdomain s) {
  double a = 0;
  for (int c = 0; c < m.n_cells(); ++c)
    if (m.subdomain(c) == s) a += shoelace(m, c);
  return a;
}

const char* kGmsh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
6
1 1 "gamma_f"
1 2 "gamma_pn"
1 3 "gamma_pd"
1 4 "gamma_fp"
2 5 "fluid"
2 6 "porous"
$EndPhysicalNames
$Nodes
6
1 0 0 0
2 1 0 0
3 0 0.5 0
4 1 0.5 0
5 0 1 0
6 1 1 0
$EndNodes
$Elements
11
1 1 2 3 3 1 2
2 1 2 2 2 1 3
3 1 2 2 2 2 4
4 1 2 1 1 3 5
5 1 2 1 1 4 6
6 1 2 1 1 5 6
7 1 2 4 4 3 4
8 2 2 6 6 1 2 4
9 2 2 6 6 1 3 4
10 2 2 5 5 3 4 6
11 2 2 5 5 3 6 5
$EndElements
)";

}  // namespace

TEST_CASE("reference geometry") {
  RectangleConfig rc;
  rc.nx = 3;
  rc.ny = 4;
  const Mesh m = build_reference_geometry(rc);
  CHECK(m.n_cells() == 2 * 3 * 4);
  CHECK(m.n_vertices() == 4 * 5);
  CHECK(total_area(m, Subdomain::Fluid) == doctest::Approx(0.5));
  CHECK(total_area(m, Subdomain::Porous) == doctest::Approx(0.5));
  CHECK(m.tagged_length(EdgeTag::GammaFP) == doctest::Approx(1));
  CHECK(m.tagged_length(EdgeTag::GammaF) == doctest::Approx(2));
  CHECK(m.tagged_length(EdgeTag::GammaPN) == doctest::Approx(1));
  CHECK(m.tagged_length(EdgeTag::GammaPD) == doctest::Approx(1));
  CHECK(audit_conformity(m).ok);
  for (int c = 0; c < m.n_cells(); ++c) {
    CHECK(shoelace(m, c) > 0);
    const double yc = cell_geometry(m, c).centroid().y();
    CHECK((yc > 0.5) == (m.subdomain(c) == Subdomain::Fluid));
  }
  // Euler: V - E + F = 1 for a simply connected triangulation.
  CHECK(m.n_vertices() - m.n_edges() + m.n_cells() == 1);

  rc.nx = 0;
  CHECK_THROWS_AS(build_reference_geometry(rc), GeometryError);
  rc.nx = 3;
  rc.y_interface = 1.5;
  CHECK_THROWS_AS(build_reference_geometry(rc), GeometryError);
}

TEST_CASE("cell geometry") {
  const auto g = cell_geometry(Vec2(0, 0), Vec2(2, 0), Vec2(0, 1));
  CHECK(g.area == doctest::Approx(1));
  CHECK(g.h == doctest::Approx(std::sqrt(5.0)));
  // Outward normals point away from the opposite vertex.
  for (int i = 0; i < 3; ++i) {
    CHECK(g.normal[i].norm() == doctest::Approx(1));
    CHECK(g.normal[i].dot(g.x[i] - g.x[(i + 1) % 3]) < 0);
  }
  // Gradients of barycentrics sum to zero and reproduce x.
  Mat2 sum = Mat2::Zero();
  for (int i = 0; i < 3; ++i) sum += g.x[i] * g.grad_bary[i].transpose();
  CHECK((sum - Mat2::Identity()).norm() < 1e-14);
  CHECK_THROWS_AS(cell_geometry(Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)), GeometryError);
}

TEST_CASE("newest-vertex bisection keeps the mesh conforming") {
  RectangleConfig rc;
  rc.nx = 4;
  rc.ny = 4;
  Mesh m = build_reference_geometry(rc);
  const double sigma0 = shape_regularity(m);
  std::mt19937 rng(3);
  for (int round = 0; round < 8; ++round) {
    std::vector<int> marked;
    std::bernoulli_distribution pick(0.2);
    for (int c = 0; c < m.n_cells(); ++c)
      if (pick(rng)) marked.push_back(c);
    const auto r = refine(m, marked);
    CAPTURE(round);
    const auto audit = audit_conformity(r.mesh);
    CHECK_MESSAGE(audit.ok, audit.message);
    CHECK(r.mesh.n_cells() > m.n_cells() - (marked.empty() ? 1 : 0));
    for (int c : marked) CHECK(r.children[c].size() >= 2);
    for (int c = 0; c < m.n_cells(); ++c) {
      double a = 0;
      for (int k : r.children[c]) {
        a += shoelace(r.mesh, k);
        CHECK(r.mesh.subdomain(k) == m.subdomain(c));
      }
      CHECK(a == doctest::Approx(shoelace(m, c)).epsilon(1e-12));
    }
    CHECK(r.mesh.tagged_length(EdgeTag::GammaFP) == doctest::Approx(1));
    CHECK(r.mesh.tagged_length(EdgeTag::GammaF) == doctest::Approx(2));
    CHECK(shape_regularity(r.mesh) <= 2 * sigma0);
    m = r.mesh;
  }
  CHECK_THROWS_AS(refine(m, std::vector<int>{m.n_cells()}), DomainError);
}

TEST_CASE("uniform refinement halves h") {
  RectangleConfig rc;
  rc.nx = 2;
  rc.ny = 2;
  const Mesh m = build_reference_geometry(rc);
  const Mesh f = refine_uniform(m);
  CHECK(f.n_cells() == 4 * m.n_cells());
  CHECK(f.h_max() == doctest::Approx(m.h_max() / 2));
  CHECK(audit_conformity(f).ok);
  // Same as the structured mesh with doubled resolution, up to numbering.
  rc.nx = rc.ny = 4;
  const Mesh s = build_reference_geometry(rc);
  CHECK(f.n_vertices() == s.n_vertices());
  CHECK(f.n_edges() == s.n_edges());
}

TEST_CASE("sbmesh round trip") {
  Mesh m = oracle::jittered(3, 4, 2);
  m = refine(m, std::vector<int>{0, 5}).mesh;
  std::stringstream ss;
  write_mesh_text(ss, m);
  const Mesh r = read_mesh_text(ss);
  REQUIRE(r.n_vertices() == m.n_vertices());
  REQUIRE(r.n_cells() == m.n_cells());
  for (int v = 0; v < m.n_vertices(); ++v) CHECK(r.vertex(v) == m.vertex(v));
  for (int c = 0; c < m.n_cells(); ++c) {
    CHECK(r.cell(c).v == m.cell(c).v);
    CHECK(r.subdomain(c) == m.subdomain(c));
  }
  CHECK(r.boundary_tags() == m.boundary_tags());

  std::stringstream bad("sbmesh 1\nvertices 3\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh_text(bad), IoError);
  std::stringstream wrong("sbmesh 2\n");
  CHECK_THROWS_AS(read_mesh_text(wrong), IoError);
  CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.sbmesh"), IoError);
}

TEST_CASE("gmsh 2.2 reader") {
  std::stringstream in(kGmsh);
  const Mesh m = read_gmsh22(in);
  CHECK(m.n_vertices() == 6);
  CHECK(m.n_cells() == 4);
  CHECK(audit_conformity(m).ok);
  CHECK(total_area(m, Subdomain::Fluid) == doctest::Approx(0.5));
  CHECK(total_area(m, Subdomain::Porous) == doctest::Approx(0.5));
  CHECK(m.tagged_length(EdgeTag::GammaFP) == doctest::Approx(1));
  CHECK(m.tagged_length(EdgeTag::GammaPD) == doctest::Approx(1));
  for (int c = 0; c < m.n_cells(); ++c) CHECK(shoelace(m, c) > 0);
  // Local edge 0 is the longest edge.
  for (int c = 0; c < m.n_cells(); ++c) {
    const auto g = cell_geometry(m, c);
    CHECK(g.edge_length[0] == doctest::Approx(g.h));
  }

  std::string broken = kGmsh;
  broken.replace(broken.find("2 5 \"fluid\""), 11, "2 5 \"solid\"");
  std::stringstream b(broken);
  CHECK_THROWS_AS(read_gmsh22(b), IoError);
}

TEST_CASE("invalid meshes are rejected") {
  std::vector<Vec2> v{{0, 0}, {1, 0}, {0, 1}};
  std::map<EdgeKey, EdgeTag> tags{{make_edge_key(0, 1), EdgeTag::GammaPD},
                                  {make_edge_key(1, 2), EdgeTag::GammaPN},
                                  {make_edge_key(0, 2), EdgeTag::GammaPN}};
  CHECK_NOTHROW(Mesh(v, {{{0, 1, 2}, Subdomain::Porous}}, tags));
  CHECK_THROWS_AS(Mesh(v, {{{0, 2, 1}, Subdomain::Porous}}, tags), GeometryError);
  CHECK_THROWS_AS(Mesh(v, {{{0, 1, 3}, Subdomain::Porous}}, tags), GeometryError);
  tags.erase(make_edge_key(0, 2));
  CHECK_THROWS_AS(Mesh(v, {{{0, 1, 2}, Subdomain::Porous}}, tags), GeometryError);
  tags[make_edge_key(0, 2)] = EdgeTag::GammaF;
  CHECK_THROWS_AS(Mesh(v, {{{0, 1, 2}, Subdomain::Porous}}, tags), GeometryError);
}
