#include <catch_amalgamated.hpp>

#include <random>

#include "ftl/acceptance.hpp"
#include "ftl/symbolic.hpp"

using namespace ftl;

TEST_CASE("alphabet groups partition the letters", "[symbolic]") {
  for (int n : {4, 6, 8, 10}) {
    Alphabet a(n);
    CHECK(a.size() == 5 * n - 6);
    CHECK(a.ring_size() == 4 * n - 4);
    // middle and bump groups both have n/2 - 1 letters
    CHECK(a.bump_first() - a.middle_first() == n / 2 - 1);
    CHECK(a.size() - a.bump_first() + 1 == n / 2 - 1);
    CHECK_FALSE(a.contains(0));
    CHECK_FALSE(a.contains(a.size() + 1));
  }
  CHECK_THROWS_AS(Alphabet(5), precondition_error);
  CHECK_THROWS_AS(Alphabet(2), precondition_error);
}

TEST_CASE("word text and index round trip", "[symbolic]") {
  Alphabet a(4);
  CHECK(word_str({}) == "e");
  CHECK(word_parse("e").empty());
  Word w{3, 14, 1, 7};
  CHECK(word_parse(word_str(w)) == w);
  for (size_t len : {1, 2, 3})
    for (uint64_t i = 0; i < 50; ++i) {
      uint64_t idx = (i * 7919) % static_cast<uint64_t>(ipow(a.size(), static_cast<int>(len)));
      CHECK(word_index(a, word_from_index(a, idx, len)) == idx);
    }
  // lexicographic order, base 14, letters 1..14
  CHECK(word_index(a, {1, 1}) == 0);
  CHECK(word_index(a, {2, 1}) == 14);
  CHECK(extends(w, prefix(w, 2)));
  CHECK_FALSE(extends(prefix(w, 2), w));
}

TEST_CASE("cylinder masses are uniform and additive", "[symbolic]") {
  Alphabet a(6);
  CHECK(cylinder_mass(a, size_t{2}) == Rational(1, 24 * 24));
  Word w{5, 2};
  Rational children(0);
  for (int l = 1; l <= a.size(); ++l) {
    Word c = w;
    c.push_back(l);
    children += cylinder_mass(a, c);
  }
  CHECK(children == cylinder_mass(a, w));
}

TEST_CASE("infinite words with a constant tail", "[symbolic]") {
  InfiniteWord w{{4, 5}, 9};
  CHECK(w.at(1) == 4);
  CHECK(w.at(7) == 9);
  CHECK(w.take(4) == Word{4, 5, 9, 9});
  InfiniteWord finite{{4, 5}, 0};
  CHECK_FALSE(finite.has(3));
  CHECK_THROWS(finite.at(3));
}

TEST_CASE("seeded choice is deterministic and balanced", "[symbolic][property]") {
  Alphabet a(4);
  ChoiceFunction e1 = ChoiceFunction::seeded(7), e2 = ChoiceFunction::seeded(7), e3 = ChoiceFunction::seeded(8);
  int ones = 0, differ = 0;
  const int total = 14 * 14 * 14;
  for (int i = 0; i < total; ++i) {
    Word w = word_from_index(a, static_cast<uint64_t>(i), 3);
    int v = e1(w);
    REQUIRE((v == 1 || v == 2));
    CHECK(v == e2(w));
    CHECK(v == prf_choice(7, w.data(), w.size()));
    ones += v == 1;
    differ += v != e3(w);
  }
  CHECK(ones > total * 2 / 5);
  CHECK(ones < total * 3 / 5);
  CHECK(differ > total / 3);
}

TEST_CASE("table and overlay precedence", "[symbolic]") {
  ChoiceFunction base = ChoiceFunction::constant(2);
  ChoiceFunction over = base.with_entries({{Word{3}, 1}});
  CHECK(over(Word{3}) == 1);
  CHECK(over(Word{4}) == 2);
  CHECK(over.base_eval(Word{3}.data(), 1) == 2);
  ChoiceFunction t = ChoiceFunction::table({{Word{}, 1}}, 2);
  CHECK(t(Word{}) == 1);
  CHECK(t(Word{1}) == 2);
  CHECK_THROWS_AS(ChoiceFunction::constant(3), precondition_error);
}

TEST_CASE("planted word count equals the geometric sum", "[symbolic]") {
  for (int n : {4, 6}) {
    Alphabet a(n);
    for (size_t big_n : {1, 2, 3})
      for (size_t k : {0, 1}) {
        uint64_t sum = 0, p = 1;
        for (size_t i = 0; i < 2 * big_n + k; ++i, p *= static_cast<uint64_t>(a.size())) sum += p;
        CHECK(planted_word_count(a, {big_n + 2, big_n, k}) == sum);
      }
  }
}

TEST_CASE("planting yields the occurrence conditions", "[symbolic]") {
  PlantSpec spec = acceptance_profile_spec();
  Alphabet a(spec.n);
  ChoiceFunction eta = plant_R1R2(a, 7, spec);
  for (const auto& occ : spec.occurrences) {
    R1R2Result r = check_R1R2(a, eta, spec.word, occ);
    CHECK(r.ok);
    // enumeration within the budget, rule certificate beyond it
    bool large = planted_word_count(a, occ) > 1'000'000;
    CHECK(r.structural == large);
    for (int v : {1, 2}) {
      ChoiceFunction plain = ChoiceFunction::constant(v);
      if (large)
        CHECK_THROWS_AS(check_R1R2(a, plain, spec.word, occ), budget_error);
      else
        CHECK_FALSE(check_R1R2(a, plain, spec.word, occ).ok);
    }
  }
  auto found = find_ell(a, eta, spec.word, spec.occurrences[0].big_n, spec.occurrences[0].k, 12);
  REQUIRE(found);
  CHECK(*found <= spec.occurrences[0].ell);
}

TEST_CASE("invalid plant specs are rejected", "[symbolic]") {
  PlantSpec spec = acceptance_profile_spec();
  Alphabet a(spec.n);
  PlantSpec short_ell = spec;
  short_ell.occurrences[0].ell = 1;  // ell must be at least N
  CHECK_THROWS_AS(validate_plant_spec(a, short_ell), precondition_error);
  PlantSpec bad_letter = spec;
  bad_letter.word.prefix[0] = 99;
  CHECK_THROWS_AS(validate_plant_spec(a, bad_letter), precondition_error);
}
