#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatdimers/height.hpp"

using namespace flatdimers;

namespace {

struct Model {
  DimerGraph g;
  HomologyBasis basis;
  CutSystem cuts;
  QuadFormChar q0;
  TwistVector alpha_g;
};

Model make_pillow(const std::string& spec, int n) {
  auto s = std::make_shared<FlatSurface>(FlatSurface::parse(spec));
  Model m{build_pillow_square(s, n), homology_basis(*s), cut_system(*s), {}, {}};
  crossing_data(m.g, m.basis, m.cuts);
  m.q0 = q0_characteristics(*s, m.basis, m.cuts);
  m.alpha_g = TwistVector::zero(s->genus());
  return m;
}

Model make_hex(int N) {
  auto g = build_torus_hex(N);
  auto basis = graph_basis(g);
  crossing_data(g, basis, CutSystem{});
  Model m{std::move(g), basis, CutSystem{}, {}, TwistVector::hex_gauge_form(N)};
  m.q0 = q0_characteristics(*m.g.surf, m.basis, m.cuts);
  return m;
}

}  // namespace

TEST_CASE("dimer flow is an indicator with divergence +1/-1") {
  auto m = make_hex(2);
  auto d = first_matching(m.g);
  auto f = dimer_flow(m.g, d);
  for (double v : f.val) CHECK((v == 0.0 || v == 1.0));
  for (int w : m.g.whites) CHECK(divergence(m.g, f, w) == doctest::Approx(1.0));
  for (int b : m.g.blacks) CHECK(divergence(m.g, f, b) == doctest::Approx(-1.0));
  double total = 0;
  for (size_t v = 0; v < m.g.verts.size(); ++v) total += divergence(m.g, f, int(v));
  CHECK(total == doctest::Approx(0.0));
}

TEST_CASE("angle flow values and divergences") {
  auto mp = make_pillow(pillow_g2_spec(), 1);
  auto fa = angle_flow(mp.g);
  for (double v : fa.val) CHECK(v == doctest::Approx(0.25));
  for (int w : mp.g.whites) CHECK(divergence(mp.g, fa, w) == doctest::Approx(1.0));
  for (int b : mp.g.blacks) CHECK(divergence(mp.g, fa, b) == doctest::Approx(-1.0));

  auto mh = make_hex(3);
  auto fh = angle_flow(mh.g);
  for (double v : fh.val) CHECK(v == doctest::Approx(1.0 / 3));
  for (int w : mh.g.whites) CHECK(divergence(mh.g, fh, w) == doctest::Approx(1.0));
  for (int b : mh.g.blacks) CHECK(divergence(mh.g, fh, b) == doctest::Approx(-1.0));
}

TEST_CASE("height periods are integers for all covers (pillow n=1, hex N=3)") {
  auto mp = make_pillow(pillow_g2_spec(), 1);
  int covers = 0;
  enumerate_matchings(mp.g, size_t(1e6), [&](const DimerCover& d) {
    auto m = height_periods(mp.g, d, mp.alpha_g);  // throws if non-integer
    CHECK(m.size() == 4);
    ++covers;
  });
  CHECK(covers > 0);

  auto mh = make_hex(3);
  enumerate_matchings(mh.g, size_t(1e6), [&](const DimerCover& d) {
    auto m = height_periods(mh.g, d, mh.alpha_g);
    CHECK(m.size() == 2);
  });
}

TEST_CASE("face rotation does not change the period vector") {
  auto m = make_pillow(unit_torus_spec(), 2);
  auto d = first_matching(m.g);
  auto base = height_periods(m.g, d, m.alpha_g);
  // find an alternating quad face and rotate it
  std::vector<int> eof = d.edge_of_white;
  std::vector<int> windex(m.g.verts.size(), -1);
  for (size_t i = 0; i < m.g.whites.size(); ++i) windex[m.g.whites[i]] = int(i);
  bool rotated = false;
  for (const auto& f : m.g.faces) {
    if (f.verts.size() != 4 || rotated) continue;
    std::vector<int> in;
    for (int e : f.edges) {
      int wi = windex[m.g.edges[e].w];
      if (eof[wi] == e) in.push_back(e);
    }
    if (in.size() == 2) {
      for (int e : f.edges) {
        int wi = windex[m.g.edges[e].w];
        bool was = eof[wi] == e;
        if (!was) eof[wi] = e;
      }
      // the rotation: matched edges of the face flip to the complementary pair
      DimerCover d2;
      d2.edge_of_white = d.edge_of_white;
      for (int e : f.edges) {
        int wi = windex[m.g.edges[e].w];
        if (d.edge_of_white[wi] == e) continue;
        bool b_used_by_face = false;
        for (int e2 : f.edges)
          if (e2 != e && m.g.edges[e2].b == m.g.edges[e].b &&
              d.edge_of_white[windex[m.g.edges[e2].w]] == e2)
            b_used_by_face = true;
        (void)b_used_by_face;
        d2.edge_of_white[wi] = e;
      }
      if (d2.valid(m.g)) {
        auto rot = height_periods(m.g, d2, m.alpha_g);
        CHECK(rot == base);
        rotated = true;
      }
    }
  }
  CHECK(rotated);
}

TEST_CASE("quadratic identity q(u+v) - q(u) - q(v) = u.v mod 2") {
  auto m = make_pillow(pillow_g2_spec(), 1);
  int g2 = 4;
  for (unsigned u = 0; u < (1u << g2); ++u)
    for (unsigned v = 0; v < (1u << g2); ++v) {
      std::vector<long long> ua(2), ub(2), va(2), vb(2), sa(2), sb(2);
      for (int i = 0; i < 2; ++i) {
        ua[i] = (u >> i) & 1;
        ub[i] = (u >> (2 + i)) & 1;
        va[i] = (v >> i) & 1;
        vb[i] = (v >> (2 + i)) & 1;
        sa[i] = ua[i] + va[i];
        sb[i] = ub[i] + vb[i];
      }
      long long dot = 0;  // symplectic pairing u.v
      for (int i = 0; i < 2; ++i) dot += ua[i] * vb[i] + ub[i] * va[i];
      int lhs = (m.q0.q0(sa, sb) - m.q0.q0(ua, ub) - m.q0.q0(va, vb)) & 1;
      CHECK(lhs == int(dot & 1));
    }
}

TEST_CASE("q0 via characteristics equals winding formula on random cycles") {
  auto s = FlatSurface::parse(pillow_g2_spec());
  auto basis = homology_basis(s);
  auto cuts = cut_system(s);
  auto q0 = q0_characteristics(s, basis, cuts);
  Rng rng(101);
  int done = 0;
  for (int trial = 0; trial < 200 && done < 20; ++trial) {
    // random integer combination of basis cycles
    std::vector<long long> ca(2), cb(2);
    GridWalk acc;
    acc.mesh = 2;
    for (int i = 0; i < 2; ++i) {
      ca[i] = (long long)(rng.below(3)) - 1;
      cb[i] = (long long)(rng.below(3)) - 1;
      for (int r = 0; r < std::llabs(ca[i]); ++r)
        acc = concat(acc, ca[i] > 0 ? basis.cycles[i] : reversed(s, basis.cycles[i]));
      for (int r = 0; r < std::llabs(cb[i]); ++r)
        acc = concat(acc, cb[i] > 0 ? basis.cycles[2 + i]
                                    : reversed(s, basis.cycles[2 + i]));
    }
    if (acc.steps.empty()) continue;
    int via_walk = q0_of_walk(s, cuts, acc);
    // homology class of acc: m^A_i = acc.B_i ... but in period terms the class
    // with A-period ca orientation: the characteristic formula evaluates on
    // period vectors (m^A, m^B); the cycle sum ca_i A_i + cb_i B_i has
    // A_j-period = sum of intersections with A_j = cb_j (A_j . B_j sign) etc.
    // Evaluate both pairings and require one to match consistently.
    // the cycle sum_i ca_i A_i + cb_i B_i evaluates through the period form
    // as q0(m) with (m^A, m^B) = (cb, ca) (Poincare pairing, signs drop mod 2)
    int via_char = q0.q0(cb, ca);
    CHECK(via_walk == via_char);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("sector law at hex N=1: three sectors with probability 1/3") {
  auto m = make_hex(1);
  auto k = KasteleynMatrix::build(m.g, m.alpha_g);
  auto sect = sector_distribution(k, m.q0, 2);
  CHECK(sect.size() == 3);
  double total = 0.0;
  for (auto& [mv, p] : sect) {
    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-9));
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  // sectors agree with enumerated period vectors
  std::map<std::vector<long long>, double> expected;
  enumerate_matchings(m.g, 10, [&](const DimerCover& d) {
    expected[height_periods(m.g, d, m.alpha_g)] += 1.0 / 3;
  });
  CHECK(expected.size() == 3);
  for (auto& [mv, p] : expected) {
    REQUIRE(sect.count(mv));
    CHECK(sect.at(mv) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("sector law matches enumeration on the genus-2 pillow n=1") {
  auto m = make_pillow(pillow_g2_spec(), 1);
  auto k = KasteleynMatrix::build(m.g, m.alpha_g);
  auto zt = signed_partition_functions(k, m.q0);
  std::map<std::vector<long long>, double> expected;
  enumerate_matchings(m.g, size_t(1e6), [&](const DimerCover& d) {
    double w = 1.0;
    for (int e : d.edge_of_white) w *= m.g.edges[e].weight;
    expected[height_periods(m.g, d, m.alpha_g)] += w;
  });
  for (auto& [mv, w] : expected) expected[mv] = w / zt.z;
  auto sect = sector_distribution(k, m.q0, 5);
  REQUIRE(sect.size() == expected.size());
  for (auto& [mv, p] : expected)
    CHECK(sect.at(mv) == doctest::Approx(p).epsilon(1e-8));
}

TEST_CASE("period difference of two covers is the superposition class") {
  auto m = make_pillow(unit_torus_spec(), 2);
  std::vector<DimerCover> covers;
  enumerate_matchings(m.g, 50, [&](const DimerCover& d) { covers.push_back(d); });
  REQUIRE(covers.size() >= 2);
  // difference of period vectors must be an integer vector; spot-check a pair
  auto p1 = height_periods(m.g, covers[0], m.alpha_g);
  auto p2 = height_periods(m.g, covers[1], m.alpha_g);
  // superposition flow periods = p1 - p2 by linearity of the crossing sums
  Flow f1 = dimer_flow(m.g, covers[0]);
  Flow f2 = dimer_flow(m.g, covers[1]);
  for (size_t e = 0; e < f1.val.size(); ++e) f1.val[e] -= f2.val[e];
  auto ps = period_vector(m.g, f1, TwistVector::zero(1));
  for (size_t j = 0; j < ps.size(); ++j)
    CHECK(ps[j] == doctest::Approx(double(p1[j] - p2[j])).epsilon(1e-12));
}
