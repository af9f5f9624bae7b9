#include <gtest/gtest.h>

#include <set>

#include "semiform/form_io.hpp"
#include "semiform/isometry.hpp"
#include "semiform/random_forms.hpp"
#include "oracles.hpp"

using namespace semiform;

namespace {

Coeffs vec(const Semiring& s, std::initializer_list<const char*> xs) {
  Coeffs out;
  for (const auto* x : xs) out.push_back(s.parse(x));
  return out;
}

Form diag_q(const Semiring& s, std::initializer_list<const char*> xs) {
  return QuadraticScheme(s, vec(s, xs));
}

Form diag_b(const Semiring& s, std::initializer_list<const char*> xs) {
  return GramMatrix::diagonal(s, vec(s, xs));
}

// Equality as functions by evaluating on every vector (pairs of vectors for
// bilinear forms). Only for finite carriers.
bool same_by_evaluation(const Form& f1, const Form& f2) {
  const auto& s = form_semiring(f1);
  const auto vs = oracle::all_vectors(*s.carrier(), form_rank(f1));
  const auto m1 = coefficient_matrix(f1), m2 = coefficient_matrix(f2);
  for (const auto& x : vs) {
    if (is_quadratic(f1)) {
      if (oracle::quadratic_value(s, m1, x) != oracle::quadratic_value(s, m2, x)) return false;
      continue;
    }
    for (const auto& y : vs) {
      if (oracle::bilinear_value(s, m1, x, y) != oracle::bilinear_value(s, m2, x, y)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

// Block-diagonal form built from `pieces`, with a random base order.
Form random_block_sum(const Semiring& s, Rng& rng, std::size_t max_rank) {
  Form f = random_indecomposable_scheme(s, 1 + rng() % 2, rng);
  while (form_rank(f) < max_rank) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 3, max_rank - form_rank(f));
    f = orthogonal_sum(f, Form(random_scheme(s, n, rng)));
  }
  IsometryWitness shuffle{iota(form_rank(f)), Coeffs(form_rank(f), s.one())};
  std::shuffle(shuffle.perm.begin(), shuffle.perm.end(), rng);
  return apply_witness(shuffle, f);
}

}  // namespace

TEST(IsometrySearch, IdentityOnEqualForms) {
  Rng rng(101);
  for (const auto& s : {Semiring::boolean(), Semiring::natural(), Semiring::max_plus()}) {
    const Form f = random_scheme(s, 4, rng);
    const auto w = isometry_search(f, f);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(*w, IsometryWitness::identity(s, 4)) << s.name();
  }
}

TEST(IsometrySearch, MaxPlusDiagonalUnitsAreSolved) {
  const auto mp = Semiring::max_plus();
  const auto w = isometry_search(diag_q(mp, {"0", "1"}), diag_q(mp, {"2", "3"}));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->perm, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(w->units, vec(mp, {"1", "1"}));
  // Half-integral exponents are units too.
  const auto h = isometry_search(diag_q(mp, {"0"}), diag_q(mp, {"1"}));
  ASSERT_TRUE(h.has_value());
  EXPECT_EQ(h->units, vec(mp, {"1/2"}));
}

TEST(IsometrySearch, NaturalUnitsAreTrivial) {
  const auto n = Semiring::natural();
  EXPECT_FALSE(isometry_search(diag_q(n, {"1"}), diag_q(n, {"2"})).has_value());
  EXPECT_FALSE(isometry_search(diag_q(n, {"1"}), diag_q(n, {"1", "1"})).has_value());
  EXPECT_THROW(isometry_search(diag_q(n, {"1"}), diag_b(n, {"1"})), PreconditionError);
  const auto w = isometry_search(diag_q(n, {"1", "2"}), diag_q(n, {"2", "1"}));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(cycle_notation(w->perm), "(1 2)");
  EXPECT_THROW(isometry_search(diag_q(n, {"1"}), diag_q(n, {"1"}), UnitCandidates::of({})), PreconditionError);
}

TEST(SameForm, AbsorbedCrossTermsAreInvisible) {
  const auto b = Semiring::boolean();
  // y^2 + xy equals y^2 as a function over B.
  EXPECT_TRUE(same_form(QuadraticScheme(b, vec(b, {"0", "1"}), {{{0, 1}, b.one()}}), diag_q(b, {"0", "1"})));
  EXPECT_FALSE(same_form(QuadraticScheme(b, vec(b, {"0", "0"}), {{{0, 1}, b.one()}}), diag_q(b, {"0", "0"})));
  EXPECT_FALSE(same_form(diag_b(b, {"0", "1"}), GramMatrix(b, {vec(b, {"0", "1"}), vec(b, {"1", "1"})})));
  const auto w = isometry_search(QuadraticScheme(b, vec(b, {"1", "0"}), {{{0, 1}, b.one()}}),
                                 diag_q(b, {"0", "1"}));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(cycle_notation(w->perm), "(1 2)");
}

TEST(SameForm, MaxPlusAgreesWithGridEvaluation) {
  const auto s = Semiring::max_plus();
  const std::vector<const char*> values{"-inf", "-2", "0", "1/2", "1", "3"};
  const auto grid = oracle::tropical_grid();
  for (const auto* a : values) {
    for (const auto* c : values) {
      for (const auto* x : values) {
        for (const auto* y : values) {
          const QuadraticScheme q1(s, vec(s, {a, c}), {{{0, 1}, s.parse(x)}});
          const QuadraticScheme q2(s, vec(s, {a, c}), {{{0, 1}, s.parse(y)}});
          const auto ta = oracle::trop_of(s.parse(a)), tc = oracle::trop_of(s.parse(c));
          const auto tx = oracle::trop_of(s.parse(x)), ty = oracle::trop_of(s.parse(y));
          bool same = true;
          for (const auto& u : grid) {
            for (const auto& v : grid) {
              const auto base = oracle::tmax(oracle::tplus(ta, oracle::tplus(u, u)),
                                             oracle::tplus(tc, oracle::tplus(v, v)));
              if (oracle::tmax(base, oracle::tplus(tx, oracle::tplus(u, v))) !=
                  oracle::tmax(base, oracle::tplus(ty, oracle::tplus(u, v)))) {
                same = false;
              }
            }
          }
          EXPECT_EQ(same_form(q1, q2), same) << a << " " << c << " " << x << " " << y;
        }
      }
    }
  }
}

TEST(IsometrySearch, WitnessesAreSoundAndMapComponents) {
  Rng rng(103);
  for (const auto& s : {Semiring::boolean(), Semiring::natural(), Semiring::max_plus(),
                        Semiring::supertropical(), Semiring::finite("z5"), Semiring::finite("chain3")}) {
    const auto units = UnitCandidates::defaults(s);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 1 + t % 5;
      const Form f = t % 2 ? Form(random_scheme(s, n, rng, 0.4)) : Form(random_gram(s, n, rng, 0.4));
      const auto target = apply_witness(random_witness(s, n, rng, units), f);
      const auto w = isometry_search(f, target, units);
      ASSERT_TRUE(w.has_value()) << s.name() << " " << t;
      for (const auto& u : w->units) EXPECT_TRUE(s.is_unit(u));
      const auto image = apply_witness(*w, f);
      if (s.carrier() && n <= 3) EXPECT_TRUE(same_by_evaluation(image, target)) << s.name();
      EXPECT_TRUE(same_form(image, target)) << s.name();
      EXPECT_TRUE(maps_blocks(*w, decompose(f), decompose(target))) << s.name();
    }
  }
}

TEST(IsometrySearch, NegativeAnswersHoldUpUnderBruteForce) {
  // Over B the only unit is 1, so compare with a scan of all permutations
  // judged by evaluation on every vector.
  Rng rng(107);
  const auto b = Semiring::boolean();
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 4;
    const Form f1 = random_scheme(b, n, rng);
    const Form f2 = random_scheme(b, n, rng);
    bool brute = false;
    auto perm = iota(n);
    do {
      IsometryWitness w{perm, Coeffs(n, b.one())};
      if (same_by_evaluation(apply_witness(w, f1), f2)) brute = true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(isometry_search(f1, f2).has_value(), brute);
  }
}

TEST(Witnesses, ComposeInverseAndCycles) {
  Rng rng(109);
  const auto s = Semiring::max_plus();
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 6;
    const Form f = random_scheme(s, n, rng);
    const auto a = random_witness(s, n, rng, UnitCandidates::solver());
    const auto c = random_witness(s, n, rng, UnitCandidates::solver());
    EXPECT_EQ(apply_witness(compose(s, a, c), f), apply_witness(c, apply_witness(a, f)));
    EXPECT_EQ(apply_witness(inverse(s, a), apply_witness(a, f)), f);
    EXPECT_EQ(compose(s, a, inverse(s, a)), IsometryWitness::identity(s, n));
    EXPECT_EQ(parse_cycles(cycle_notation(a.perm), n), a.perm);
  }
  EXPECT_EQ(cycle_notation({0, 1, 2}), "()");
  EXPECT_EQ(cycle_notation({1, 2, 0, 3}), "(1 2 3)");
  EXPECT_THROW(parse_cycles("(1 1)", 2), ParseError);
  EXPECT_THROW(parse_cycles("(1 4)", 3), ParseError);
}

TEST(Multiplicities, Examples) {
  const auto n = Semiring::natural();
  const auto units = UnitCandidates::defaults(n);
  const auto m = multiplicities(diag_b(n, {"1", "1", "2"}), units);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(coefficient_matrix(m[0].representative), (Matrix{vec(n, {"1"})}));
  EXPECT_EQ(m[0].count(), 2u);
  EXPECT_EQ(coefficient_matrix(m[1].representative), (Matrix{vec(n, {"2"})}));
  EXPECT_EQ(m[1].count(), 1u);

  const auto z = multiplicities(Form(QuadraticScheme::zero(n, 3)), units);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z[0].count(), 3u);

  const QuadraticScheme piece(n, vec(n, {"1", "1"}), {{{0, 1}, n.one()}});
  const auto two = multiplicities(orthogonal_sum(Form(piece), Form(piece)), units);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].count(), 2u);
  EXPECT_EQ(std::get<QuadraticScheme>(two[0].representative), piece);
}

TEST(Multiplicities, RepresentativesArePairwiseNonIsometric) {
  Rng rng(113);
  const auto s = Semiring::boolean();
  for (int t = 0; t < 50; ++t) {
    const auto f = random_block_sum(s, rng, 6);
    const auto m = multiplicities(f, UnitCandidates::defaults(s));
    std::size_t total = 0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      total += m[a].count();
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        EXPECT_FALSE(isometry_search(m[a].representative, m[b].representative).has_value());
      }
    }
    EXPECT_EQ(total, decompose(f).size());
  }
}

TEST(IsometricByMultiplicity, Examples) {
  const auto n = Semiring::natural();
  const auto units = UnitCandidates::defaults(n);
  EXPECT_TRUE(isometric_by_multiplicity(diag_b(n, {"1", "2"}), diag_b(n, {"2", "1"}), units));
  EXPECT_FALSE(isometric_by_multiplicity(diag_b(n, {"1", "1"}), diag_b(n, {"1", "2"}), units));
}

TEST(IsometricByMultiplicity, AgreesWithWholeModuleSearch) {
  Rng rng(127);
  for (const auto& s : {Semiring::boolean(), Semiring::natural()}) {
    const auto units = UnitCandidates::defaults(s);
    for (int t = 0; t < 150; ++t) {
      const std::size_t n = 1 + t % 5;
      const Form f1 = random_scheme(s, n, rng, 0.3);
      Form f2 = t % 3 == 0 ? Form(random_scheme(s, n, rng, 0.3))
                           : apply_witness(random_witness(s, n, rng, units), f1);
      if (t % 3 == 1) {
        // Perturb one diagonal entry: usually breaks isometry.
        auto m = coefficient_matrix(f2);
        m[0][0] = s.add(m[0][0], s.one());
        f2 = form_from_coefficients(f2, m);
      }
      EXPECT_EQ(isometric_by_multiplicity(f1, f2, units), isometry_search(f1, f2, units).has_value())
          << s.name() << " " << t << " " << form_literal(f1) << " " << form_literal(f2);
      EXPECT_TRUE(isometric_by_multiplicity(f1, f1, units));
    }
  }
}

TEST(WittCancel, Example) {
  const auto n = Semiring::natural();
  const auto v = witt_cancel(diag_b(n, {"1", "2"}), diag_b(n, {"2", "1"}), {0}, {1},
                             UnitCandidates::defaults(n));
  EXPECT_TRUE(v.complements_isometric);
  EXPECT_EQ(v.w2, (IndexSet{1}));
  EXPECT_EQ(v.w2_2, (IndexSet{0}));
  ASSERT_EQ(v.ledger.size(), 2u);
  for (const auto& row : v.ledger) {
    EXPECT_EQ(row.in_v, row.in_w1 + row.in_w2);
    EXPECT_EQ(row.in_v2, row.in_w1_2 + row.in_w2_2);
  }
}

TEST(WittCancel, PreconditionsAreReportedDistinctly) {
  const auto n = Semiring::natural();
  const auto units = UnitCandidates::defaults(n);
  const QuadraticScheme piece(n, vec(n, {"1", "1"}), {{{0, 1}, n.one()}});
  const auto v = orthogonal_sum(Form(piece), diag_q(n, {"2"}));
  EXPECT_THROW(witt_cancel(v, v, {0}, {0}, units), PreconditionError);           // not a block union
  EXPECT_THROW(witt_cancel(v, diag_q(n, {"1", "1", "1"}), {2}, {2}, units), PreconditionError);  // V not isometric to V'
  EXPECT_THROW(witt_cancel(v, v, {2}, {0, 1}, units), PreconditionError);        // W1 not isometric to W1'
  EXPECT_TRUE(witt_cancel(v, v, {0, 1}, {0, 1}, units).complements_isometric);
}

TEST(WittCancel, RandomBlockSumsOverBoolean) {
  Rng rng(131);
  const auto s = Semiring::boolean();
  const auto units = UnitCandidates::defaults(s);
  for (int t = 0; t < 200; ++t) {
    const auto v = random_block_sum(s, rng, 2 + t % 5);
    const auto w = random_witness(s, form_rank(v), rng, units);
    const auto v2 = apply_witness(w, v);
    const auto blocks = decompose(v);
    IndexSet w1;
    for (const auto& b : blocks) {
      if (rng() % 2) w1.insert(w1.end(), b.begin(), b.end());
    }
    std::sort(w1.begin(), w1.end());
    IndexSet w1_2;
    for (auto i : w1) w1_2.push_back(w.perm[i]);
    std::sort(w1_2.begin(), w1_2.end());
    EXPECT_TRUE(witt_cancel(v, v2, w1, w1_2, units).complements_isometric);
  }
}

TEST(OrthogonalGroup, Examples) {
  const auto n = Semiring::natural();
  const auto units = UnitCandidates::defaults(n);
  const auto g = orthogonal_group(diag_b(n, {"1", "1"}), units);
  ASSERT_EQ(g.elements.size(), 2u);
  std::set<std::vector<std::size_t>> perms;
  for (const auto& w : g.elements) perms.insert(w.perm);
  EXPECT_EQ(perms, (std::set<std::vector<std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(orthogonal_group(diag_b(n, {"1", "2"}), units).elements.size(), 1u);
  const auto b = Semiring::boolean();
  const auto z = orthogonal_group(Form(QuadraticScheme::zero(b, 1)), UnitCandidates::defaults(b));
  ASSERT_EQ(z.elements.size(), 1u);
  EXPECT_EQ(z.elements[0], IsometryWitness::identity(b, 1));
  EXPECT_THROW(orthogonal_group(diag_b(n, {"1"}), UnitCandidates::solver()), PreconditionError);
  EXPECT_THROW(orthogonal_group(Form(QuadraticScheme::zero(b, 9)), UnitCandidates::defaults(b)),
               PreconditionError);
}

TEST(OrthogonalGroup, GroupAxiomsAndIsotypicalProduct) {
  Rng rng(137);
  for (const auto& s : {Semiring::boolean(), Semiring::finite("z3")}) {
    const auto units = UnitCandidates::defaults(s);
    for (int t = 0; t < 20; ++t) {
      const Form f = random_scheme(s, 1 + t % 4, rng, 0.4);
      const auto g = orthogonal_group(f, units);
      EXPECT_TRUE(g.preserves_isotypical);
      const std::set<std::pair<std::vector<std::size_t>, Coeffs>> members = [&] {
        std::set<std::pair<std::vector<std::size_t>, Coeffs>> out;
        for (const auto& w : g.elements) out.emplace(w.perm, w.units);
        return out;
      }();
      EXPECT_EQ(members.size(), g.elements.size());
      for (const auto& a : g.elements) {
        EXPECT_TRUE(same_form(apply_witness(a, f), f));
        const auto inv = inverse(s, a);
        EXPECT_TRUE(members.count({inv.perm, inv.units}));
        for (const auto& c : g.elements) {
          const auto ac = compose(s, a, c);
          EXPECT_TRUE(members.count({ac.perm, ac.units})) << s.name();
        }
      }
    }
  }
}
