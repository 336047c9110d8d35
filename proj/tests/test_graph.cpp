#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "flatdimers/graph.hpp"

using namespace flatdimers;

static std::shared_ptr<const FlatSurface> torus() {
  return std::make_shared<FlatSurface>(FlatSurface::parse(unit_torus_spec()));
}
static std::shared_ptr<const FlatSurface> pillow() {
  return std::make_shared<FlatSurface>(FlatSurface::parse(pillow_g2_spec()));
}

TEST_CASE("hex torus N=1: one white, one black, three parallel edges") {
  auto g = build_torus_hex(1);
  CHECK(g.whites.size() == 1);
  CHECK(g.blacks.size() == 1);
  CHECK(g.edges.size() == 3);
  for (auto& e : g.edges) CHECK(std::abs(std::abs(e.kgeom) - 1.0) < 1e-12);
}

TEST_CASE("hex torus N=2: 8 vertices, 12 edges, 4 faces, Euler 0") {
  auto g = build_torus_hex(2);
  CHECK(g.verts.size() == 8);
  CHECK(g.edges.size() == 12);
  CHECK(g.faces.size() == 4);
  CHECK(int(g.verts.size()) - int(g.edges.size()) + int(g.faces.size()) == 0);
}

TEST_CASE("hex torus bipartite classes equal for several N") {
  for (int N : {1, 2, 3, 5}) {
    auto g = build_torus_hex(N);
    CHECK(g.whites.size() == g.blacks.size());
    CHECK(g.verts.size() == size_t(2 * N * N));
  }
}

TEST_CASE("unit torus square n=1: 4 vertices, 8 edges, 4 faces") {
  auto g = build_pillow_square(torus(), 1);
  CHECK(g.verts.size() == 4);
  CHECK(g.edges.size() == 8);
  CHECK(g.faces.size() == 4);
  CHECK(int(g.verts.size()) - int(g.edges.size()) + int(g.faces.size()) == 0);
  for (auto& f : g.faces) CHECK_FALSE(f.cone);
}

TEST_CASE("genus-2 pillow n=1: 32 vertices and exactly two octagon faces") {
  auto g = build_pillow_square(pillow(), 1);
  CHECK(g.verts.size() == 32);
  int octs = 0;
  for (auto& f : g.faces)
    if (f.cone) {
      ++octs;
      CHECK(f.verts.size() == 8);
    } else {
      CHECK(f.verts.size() == 4);
    }
  CHECK(octs == 2);
  // V - E + F = chi = -2
  CHECK(int(g.verts.size()) - int(g.edges.size()) + int(g.faces.size()) == -2);
}

TEST_CASE("genus-2 pillow n=2 has 128 vertices") {
  auto g = build_pillow_square(pillow(), 2);
  CHECK(g.verts.size() == 128);
}

TEST_CASE("face edge cycles are consistent") {
  for (auto g : {build_pillow_square(pillow(), 1), build_torus_hex(2)}) {
    for (const auto& f : g.faces) {
      size_t k = f.verts.size();
      REQUIRE(f.edges.size() == k);
      for (size_t i = 0; i < k; ++i) {
        const GEdge& e = g.edges[f.edges[i]];
        int a = f.verts[i], b = f.verts[(i + 1) % k];
        bool matches = (e.w == a && e.b == b) || (e.w == b && e.b == a);
        CHECK(matches);
      }
    }
  }
}

TEST_CASE("hex N=1 crossing vectors are (0,0),(0,-1),(1,0) up to sign") {
  auto g = build_torus_hex(1);
  auto basis = graph_basis(g);
  crossing_data(g, basis, CutSystem{});
  std::multiset<std::pair<long long, long long>> got;
  for (auto& e : g.edges) got.insert({std::abs(e.cross[0]), std::abs(e.cross[1])});
  std::multiset<std::pair<long long, long long>> want{{0, 0}, {0, 1}, {1, 0}};
  CHECK(got == want);
}

TEST_CASE("crossing-intersection duality on the pillow") {
  // the total signed crossing of cycle A_i's transversal edges with B_j
  // equals the intersection number delta_ij -- checked through the angle-flow
  // flux scaling instead: doubling n doubles every total crossing count
  auto g1 = build_pillow_square(pillow(), 1);
  auto g2 = build_pillow_square(pillow(), 2);
  auto basis = homology_basis(*g1.surf);
  auto cuts = cut_system(*g1.surf);
  crossing_data(g1, basis, cuts);
  crossing_data(g2, basis, cuts);
  for (int j = 0; j < 4; ++j) {
    long long t1 = 0, t2 = 0;
    for (auto& e : g1.edges) t1 += std::llabs(e.cross[j]);
    for (auto& e : g2.edges) t2 += std::llabs(e.cross[j]);
    CHECK(t2 == 2 * t1);
    CHECK(t1 > 0);
  }
}

TEST_CASE("edges not meeting a representative have zero crossing vector") {
  auto g = build_pillow_square(pillow(), 2);
  auto basis = homology_basis(*g.surf);
  auto cuts = cut_system(*g.surf);
  crossing_data(g, basis, cuts);
  int zero = 0;
  for (auto& e : g.edges) {
    bool z = e.cut_cross == 0;
    for (auto c : e.cross) z = z && c == 0;
    if (z) ++zero;
  }
  CHECK(zero > 0);
}

TEST_CASE("enumerate_matchings: hex N=1 has exactly 3") {
  auto g = build_torus_hex(1);
  int count = 0;
  bool complete = enumerate_matchings(g, 100, [&](const DimerCover& d) {
    CHECK(d.valid(g));
    ++count;
  });
  CHECK(complete);
  CHECK(count == 3);
}

TEST_CASE("enumeration matches the permanent oracle") {
  auto g = build_pillow_square(torus(), 1);
  int count = 0;
  enumerate_matchings(g, 100000, [&](const DimerCover&) { ++count; });
  CHECK(double(count) == doctest::Approx(matching_count_permanent(g)));

  auto g2 = build_torus_hex(2);
  int count2 = 0;
  enumerate_matchings(g2, 100000, [&](const DimerCover&) { ++count2; });
  CHECK(double(count2) == doctest::Approx(matching_count_permanent(g2)));

  auto g3 = build_pillow_square(pillow(), 1);
  int count3 = 0;
  enumerate_matchings(g3, 1000000, [&](const DimerCover&) { ++count3; });
  CHECK(double(count3) == doctest::Approx(matching_count_permanent(g3)));
  CHECK(count3 > 0);
}

TEST_CASE("graph with an isolated white vertex yields no matchings") {
  auto g = build_torus_hex(1);
  g.vedges[g.whites[0]].clear();  // isolate the white vertex
  int count = 0;
  enumerate_matchings(g, 10, [&](const DimerCover&) { ++count; });
  CHECK(count == 0);
  CHECK_THROWS_AS(first_matching(g), Error);
}

TEST_CASE("first_matching finds a valid cover") {
  for (auto g : {build_pillow_square(pillow(), 1), build_torus_hex(3)}) {
    auto d = first_matching(g);
    CHECK(d.valid(g));
  }
}

TEST_CASE("cap truncation is reported") {
  auto g = build_pillow_square(pillow(), 1);
  bool complete = enumerate_matchings(g, 2, [&](const DimerCover&) {});
  CHECK_FALSE(complete);
}
