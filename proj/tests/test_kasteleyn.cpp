#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatdimers/height.hpp"

using namespace flatdimers;

namespace {

DimerGraph hex_graph(int N) {
  auto g = build_torus_hex(N);
  crossing_data(g, graph_basis(g), CutSystem{});
  return g;
}

struct PillowModel {
  DimerGraph g;
  HomologyBasis basis;
  CutSystem cuts;
};

PillowModel pillow_graph(const std::string& spec, int n) {
  auto s = std::make_shared<FlatSurface>(FlatSurface::parse(spec));
  PillowModel m{build_pillow_square(s, n), homology_basis(*s), cut_system(*s)};
  crossing_data(m.g, m.basis, m.cuts);
  return m;
}

double brute_z(const DimerGraph& g) {
  double z = 0.0;
  enumerate_matchings(g, size_t(1e7), [&](const DimerCover& d) {
    double w = 1.0;
    for (int e : d.edge_of_white) w *= g.edges[e].weight;
    z += w;
  });
  return z;
}

}  // namespace

TEST_CASE("hex torus K passes checks for N=1..4 with the gauge form") {
  for (int N : {1, 2, 3, 4}) {
    auto g = hex_graph(N);
    auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(N));
    CHECK_FALSE(k.gauge_was_corrected());
  }
}

TEST_CASE("pillow K passes checks with alpha_G = 0") {
  auto m = pillow_graph(pillow_g2_spec(), 1);
  auto k = KasteleynMatrix::build(m.g, TwistVector::zero(2));
  CHECK_FALSE(k.gauge_was_corrected());
  auto t = pillow_graph(unit_torus_spec(), 1);
  auto kt = KasteleynMatrix::build(t.g, TwistVector::zero(1));
  CHECK_FALSE(kt.gauge_was_corrected());
}

TEST_CASE("zeroed cut signs break the Kasteleyn condition exactly at cones") {
  auto m = pillow_graph(pillow_g2_spec(), 1);
  DimerGraph broken = m.g;
  for (auto& e : broken.edges) e.cut_cross = 0;
  int bad = 0;
  for (size_t fi = 0; fi < m.g.faces.size(); ++fi) {
    const Face& f = m.g.faces[fi];
    cplx p(1.0, 0.0);
    for (size_t i = 0; i < f.verts.size(); ++i) {
      const GEdge& e = m.g.edges[f.edges[i]];
      cplx v = e.kgeom;  // no cut signs
      if (m.g.verts[f.verts[i]].white)
        p *= v;
      else
        p /= v;
    }
    int kk = int(f.verts.size() / 2);
    double want = (kk % 2 == 0) ? kPi : 0.0;
    if (std::abs(std::remainder(std::arg(p) - want, 2 * kPi)) > 1e-9) {
      ++bad;
      CHECK(f.cone);
    }
  }
  CHECK(bad == 2);
  CHECK_THROWS_AS(KasteleynMatrix::build(broken, TwistVector::zero(2)), Error);
}

TEST_CASE("twist by zero and by integers leaves K unchanged") {
  auto g = hex_graph(2);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(2));
  auto k0 = k.twisted(TwistVector::zero(1));
  TwistVector ints = TwistVector::zero(1);
  ints.a[0] = 3;
  ints.b[0] = -2;
  auto ki = k.twisted(ints);
  for (size_t e = 0; e < g.edges.size(); ++e) {
    CHECK(std::abs(k0.entry(int(e)) - k.entry(int(e))) < 1e-14);
    CHECK(std::abs(ki.entry(int(e)) - k.entry(int(e))) < 1e-12);
  }
}

TEST_CASE("hex N=1 twist holonomy along A equals exp(2 pi i a)") {
  auto g = hex_graph(1);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(1));
  TwistVector t = TwistVector::zero(1);
  t.a[0] = 0.5;
  auto kt = k.twisted(t);
  // the graph cycle e0 - e1 is homologous to A
  cplx u0 = kt.entry(0) / k.entry(0);
  cplx u1 = kt.entry(1) / k.entry(1);
  cplx hol = u0 / u1;
  CHECK(std::abs(hol - cplx(-1, 0)) < 1e-12);
}

TEST_CASE("1x1 determinant is the entry sum") {
  auto g = hex_graph(1);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(1));
  cplx expect = k.entry(0) + k.entry(1) + k.entry(2);
  CHECK(std::abs(k.det() - expect) < 1e-14);
  CHECK(std::abs(k.det() - std::polar(1.0, 2 * kPi / 3)) < 1e-12);
}

TEST_CASE("det is 1-periodic in the twist") {
  auto g = hex_graph(2);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(2));
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    TwistVector t = TwistVector::zero(1);
    t.a[0] = rng.uniform();
    t.b[0] = rng.uniform();
    TwistVector ts = t;
    ts.a[0] += 2;
    ts.b[0] -= 1;
    CHECK(std::abs(k.twisted(t).det() - k.twisted(ts).det()) < 1e-10);
  }
}

TEST_CASE("|det| invariant under twist negation with conjugate entries") {
  auto g = hex_graph(2);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(2));
  Rng rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    TwistVector t = TwistVector::zero(1);
    t.a[0] = rng.uniform();
    t.b[0] = rng.uniform();
    TwistVector mt = TwistVector::zero(1);
    mt.a[0] = -t.a[0];
    mt.b[0] = -t.b[0];
    CHECK(std::abs(std::abs(k.twisted(t).det()) -
                   std::abs(std::conj(k.twisted(mt).det()))) < 1e-10);
  }
}

TEST_CASE("winding q0 agrees with determinant calibration: unit torus") {
  auto m = pillow_graph(unit_torus_spec(), 1);
  auto k = KasteleynMatrix::build(m.g, TwistVector::zero(1));
  auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
  CHECK(q0.a2 == std::vector<int>{1});
  CHECK(q0.b2 == std::vector<int>{1});
  auto cal = calibrate_q0(k);
  CHECK(cal.q0.a2 == q0.a2);
  CHECK(cal.q0.b2 == q0.b2);
}

TEST_CASE("winding q0 agrees with determinant calibration: n=2 torus, hex, pillow") {
  {
    auto m = pillow_graph(unit_torus_spec(), 2);
    auto k = KasteleynMatrix::build(m.g, TwistVector::zero(1));
    auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
    auto cal = calibrate_q0(k);
    CHECK(cal.q0.a2 == q0.a2);
    CHECK(cal.q0.b2 == q0.b2);
  }
  {
    auto g = hex_graph(2);
    auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(2));
    auto basis = graph_basis(g);
    auto q0 = q0_characteristics(*g.surf, basis, CutSystem{});
    CHECK(q0.a2 == std::vector<int>{1});
    CHECK(q0.b2 == std::vector<int>{1});
    auto cal = calibrate_q0(k);
    CHECK(cal.q0.a2 == q0.a2);
    CHECK(cal.q0.b2 == q0.b2);
  }
  {
    auto m = pillow_graph(pillow_g2_spec(), 1);
    auto k = KasteleynMatrix::build(m.g, TwistVector::zero(2));
    auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
    auto cal = calibrate_q0(k);
    CHECK(cal.q0.a2 == q0.a2);
    CHECK(cal.q0.b2 == q0.b2);
  }
}

TEST_CASE("signed partition functions: hex N=1 combination equals 3") {
  auto g = hex_graph(1);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(1));
  auto basis = graph_basis(g);
  auto q0 = q0_characteristics(*g.surf, basis, CutSystem{});
  auto zt = signed_partition_functions(k, q0);
  CHECK(zt.z == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("signed partition functions match brute force on oracle graphs") {
  {
    auto m = pillow_graph(pillow_g2_spec(), 1);
    auto k = KasteleynMatrix::build(m.g, TwistVector::zero(2));
    auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
    auto zt = signed_partition_functions(k, q0);
    CHECK(zt.z == doctest::Approx(brute_z(m.g)).epsilon(1e-10));
  }
  for (int N : {2, 3}) {
    auto g = hex_graph(N);
    auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(N));
    auto basis = graph_basis(g);
    auto q0 = q0_characteristics(*g.surf, basis, CutSystem{});
    auto zt = signed_partition_functions(k, q0);
    CHECK(zt.z == doctest::Approx(brute_z(g)).epsilon(1e-10));
  }
  for (int n : {1, 2}) {
    auto m = pillow_graph(unit_torus_spec(), n);
    auto k = KasteleynMatrix::build(m.g, TwistVector::zero(1));
    auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
    auto zt = signed_partition_functions(k, q0);
    CHECK(zt.z == doctest::Approx(brute_z(m.g)).epsilon(1e-10));
  }
}

TEST_CASE("edge probabilities: hex N=1 gives 1/3 per edge") {
  auto g = hex_graph(1);
  auto k = KasteleynMatrix::build(g, TwistVector::hex_gauge_form(1));
  auto basis = graph_basis(g);
  auto q0 = q0_characteristics(*g.surf, basis, CutSystem{});
  auto p = edge_probabilities(k, q0);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("edge probabilities sum to one around each vertex") {
  auto m = pillow_graph(pillow_g2_spec(), 1);
  auto k = KasteleynMatrix::build(m.g, TwistVector::zero(2));
  auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
  auto p = edge_probabilities(k, q0);
  for (size_t v = 0; v < m.g.verts.size(); ++v) {
    double s = 0.0;
    for (int e : m.g.vedges[v]) s += p[e];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("bulk edge probability approaches 1/4 on the square torus") {
  auto m = pillow_graph(unit_torus_spec(), 8);  // 16x16 grid
  auto k = KasteleynMatrix::build(m.g, TwistVector::zero(1));
  auto q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
  auto p = edge_probabilities(k, q0);
  CHECK(std::abs(p[0] - 0.25) < 1e-2);
}
