#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftl/rational.hpp"

namespace ftl {

// Letters 1..5n-6. Ring letters 1..4n-4, then the middle group, then the bump group.
class Alphabet {
 public:
  explicit Alphabet(int n);
  int n() const { return n_; }
  int size() const { return 5 * n_ - 6; }
  int ring_size() const { return 4 * n_ - 4; }
  int middle_first() const { return 4 * n_ - 3; }
  int bump_first() const { return 4 * n_ - 3 + (n_ / 2 - 1); }
  bool is_interior(int letter) const { return letter > ring_size(); }
  bool contains(int letter) const { return letter >= 1 && letter <= size(); }

 private:
  int n_;
};

using Word = std::vector<int>;

std::string word_str(const Word& w);  // letters joined by '.', "e" for the empty word
Word word_parse(const std::string& text);
Word prefix(const Word& w, size_t j);
bool extends(const Word& u, const Word& v);  // v is a prefix of u
// Index of w among words of its length in lexicographic order (base 5n-6).
uint64_t word_index(const Alphabet& a, const Word& w);
Word word_from_index(const Alphabet& a, uint64_t index, size_t length);

Rational cylinder_mass(const Alphabet& a, const Word& w);
Rational cylinder_mass(const Alphabet& a, size_t length);

// Finite prefix plus an optional constant tail letter for the remaining positions.
struct InfiniteWord {
  Word prefix;
  int tail = 0;  // 0: no tail, letters past the prefix are unknown

  bool has(size_t position) const;   // 1-based
  int at(size_t position) const;     // 1-based
  Word take(size_t length) const;    // w(length)
};

// (R1)/(R2) occurrence parameters.
struct Occurrence {
  size_t ell = 0;
  size_t big_n = 1;
  size_t k = 0;
};

struct PlantSpec {
  int n = 4;
  InfiniteWord word;
  std::vector<Occurrence> occurrences;
};

// Planted rule: value 1 on words extending `inner` with length in [ell, ell+k-1],
// value 2 on other words extending `outer` with length in [ell-N, ell+N+k-1].
struct PatchRule {
  Word outer;  // w(ell - N)
  Word inner;  // w(ell)
  Occurrence occ;
};

// Pure map from words to {1, 2}.
class ChoiceFunction {
 public:
  static ChoiceFunction constant(int value);
  static ChoiceFunction seeded(uint64_t seed);
  static ChoiceFunction table(std::map<Word, int> entries, int fallback);

  int operator()(const Word& w) const { return eval(w.data(), w.size()); }
  int eval(const int* letters, size_t length) const;

  // New overlay whose entries and rules take precedence over this function.
  ChoiceFunction with_entries(const std::map<Word, int>& entries) const;
  ChoiceFunction with_rules(const std::vector<PatchRule>& rules) const;

  const std::vector<PatchRule>& rules() const;
  std::string kind() const;
  std::optional<uint64_t> seed() const;
  std::optional<int> constant_value() const;
  const std::map<Word, int>& entries() const;
  // Value ignoring all overlays.
  int base_eval(const int* letters, size_t length) const;

 private:
  struct Impl;
  explicit ChoiceFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Keyed SipHash-2-4 of the canonical word encoding; low bit selects the model.
int prf_choice(uint64_t seed, const int* letters, size_t length);

ChoiceFunction sample_choice(const Alphabet& a, uint64_t seed);

struct R1R2Result {
  bool ok = false;
  std::optional<Word> witness;
  std::string reason;
  bool structural = false;  // certified from a matching patch rule
  uint64_t words_checked = 0;
};

// Size of the constrained word set for one occurrence: ((5n-6)^{2N+k}-1)/(5n-7).
uint64_t planted_word_count(const Alphabet& a, const Occurrence& occ);

R1R2Result check_R1R2(const Alphabet& a, const ChoiceFunction& eta, const InfiniteWord& w,
                      const Occurrence& occ, uint64_t budget = 1'000'000);
ChoiceFunction plant_R1R2(const Alphabet& a, uint64_t base_seed, const PlantSpec& spec);
void validate_plant_spec(const Alphabet& a, const PlantSpec& spec);
std::optional<size_t> find_ell(const Alphabet& a, const ChoiceFunction& eta, const InfiniteWord& w,
                               size_t big_n, size_t k, size_t ell_max,
                               uint64_t budget = 1'000'000);

}  // namespace ftl
