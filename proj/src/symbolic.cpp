#include "ftl/symbolic.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <sstream>

#include <sodium.h>

namespace ftl {

Alphabet::Alphabet(int n) : n_(n) {
  if (n < 4 || n % 2 != 0) throw precondition_error("alphabet requires an even n >= 4");
}

std::string word_str(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

Word word_parse(const std::string& text) {
  Word w;
  if (text.empty() || text == "e") return w;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '.')) {
    try {
      size_t pos = 0;
      int v = std::stoi(part, &pos);
      if (pos != part.size()) throw precondition_error("malformed word: " + text);
      w.push_back(v);
    } catch (const std::logic_error&) {
      throw precondition_error("malformed word: " + text);
    }
  }
  return w;
}

Word prefix(const Word& w, size_t j) {
  if (j > w.size()) throw precondition_error("prefix longer than word");
  return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
}

bool extends(const Word& u, const Word& v) {
  return v.size() <= u.size() && std::equal(v.begin(), v.end(), u.begin());
}

uint64_t word_index(const Alphabet& a, const Word& w) {
  uint64_t idx = 0;
  for (int l : w) {
    if (!a.contains(l)) throw precondition_error("letter out of range");
    idx = idx * static_cast<uint64_t>(a.size()) + static_cast<uint64_t>(l - 1);
  }
  return idx;
}

Word word_from_index(const Alphabet& a, uint64_t index, size_t length) {
  Word w(length);
  for (size_t i = length; i-- > 0;) {
    w[i] = static_cast<int>(index % static_cast<uint64_t>(a.size())) + 1;
    index /= static_cast<uint64_t>(a.size());
  }
  return w;
}

Rational cylinder_mass(const Alphabet& a, size_t length) {
  return Rational(1, ipow(a.size(), static_cast<int>(length)));
}

Rational cylinder_mass(const Alphabet& a, const Word& w) {
  for (int l : w)
    if (!a.contains(l)) throw precondition_error("letter out of range");
  return cylinder_mass(a, w.size());
}

bool InfiniteWord::has(size_t position) const {
  return position >= 1 && (position <= prefix.size() || tail != 0);
}

int InfiniteWord::at(size_t position) const {
  if (position >= 1 && position <= prefix.size()) return prefix[position - 1];
  if (position > prefix.size() && tail != 0) return tail;
  throw precondition_error("word position " + std::to_string(position) + " is not known");
}

Word InfiniteWord::take(size_t length) const {
  Word w;
  w.reserve(length);
  for (size_t i = 1; i <= length; ++i) w.push_back(at(i));
  return w;
}

int prf_choice(uint64_t seed, const int* letters, size_t length) {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw invariant_error("libsodium failed to initialize");
  });
  unsigned char key[crypto_shorthash_KEYBYTES] = {};
  for (int i = 0; i < 8; ++i) key[i] = static_cast<unsigned char>(seed >> (8 * i));
  std::memcpy(key + 8, "ftl.eta", 7);
  std::vector<unsigned char> msg(4 + 2 * length);
  auto len32 = static_cast<uint32_t>(length);
  for (int i = 0; i < 4; ++i) msg[static_cast<size_t>(i)] = static_cast<unsigned char>(len32 >> (8 * i));
  for (size_t i = 0; i < length; ++i) {
    auto l = static_cast<uint16_t>(letters[i]);
    msg[4 + 2 * i] = static_cast<unsigned char>(l & 0xff);
    msg[5 + 2 * i] = static_cast<unsigned char>(l >> 8);
  }
  unsigned char out[crypto_shorthash_BYTES];
  crypto_shorthash(out, msg.data(), msg.size(), key);
  return (out[0] & 1) + 1;
}

struct ChoiceFunction::Impl {
  enum class Kind { constant, seeded, table };
  Kind kind = Kind::constant;
  int constant = 2;
  uint64_t seed = 0;
  std::map<Word, int> table;
  int fallback = 2;
  std::map<Word, int> entries;   // overlay entries, highest precedence
  std::vector<PatchRule> rules;  // overlay rules, first match wins
};

ChoiceFunction::ChoiceFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ChoiceFunction ChoiceFunction::constant(int value) {
  if (value != 1 && value != 2) throw precondition_error("choice values are 1 or 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::constant;
  impl->constant = value;
  return ChoiceFunction(impl);
}

ChoiceFunction ChoiceFunction::seeded(uint64_t seed) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::seeded;
  impl->seed = seed;
  return ChoiceFunction(impl);
}

ChoiceFunction ChoiceFunction::table(std::map<Word, int> entries, int fallback) {
  if (fallback != 1 && fallback != 2) throw precondition_error("choice values are 1 or 2");
  for (const auto& [w, v] : entries)
    if (v != 1 && v != 2) throw precondition_error("choice values are 1 or 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::table;
  impl->table = std::move(entries);
  impl->fallback = fallback;
  return ChoiceFunction(impl);
}

ChoiceFunction ChoiceFunction::with_entries(const std::map<Word, int>& entries) const {
  auto impl = std::make_shared<Impl>(*impl_);
  for (const auto& [w, v] : entries) {
    if (v != 1 && v != 2) throw precondition_error("choice values are 1 or 2");
    impl->entries[w] = v;
  }
  return ChoiceFunction(impl);
}

ChoiceFunction ChoiceFunction::with_rules(const std::vector<PatchRule>& rules) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->rules.insert(impl->rules.end(), rules.begin(), rules.end());
  return ChoiceFunction(impl);
}

const std::vector<PatchRule>& ChoiceFunction::rules() const { return impl_->rules; }
const std::map<Word, int>& ChoiceFunction::entries() const { return impl_->entries; }

std::string ChoiceFunction::kind() const {
  std::string base;
  switch (impl_->kind) {
    case Impl::Kind::constant: base = "constant"; break;
    case Impl::Kind::seeded: base = "seeded"; break;
    case Impl::Kind::table: base = "table"; break;
  }
  if (!impl_->rules.empty() || !impl_->entries.empty()) return "planted(" + base + ")";
  return base;
}

std::optional<uint64_t> ChoiceFunction::seed() const {
  if (impl_->kind == Impl::Kind::seeded) return impl_->seed;
  return std::nullopt;
}

std::optional<int> ChoiceFunction::constant_value() const {
  if (impl_->kind == Impl::Kind::constant) return impl_->constant;
  return std::nullopt;
}

int ChoiceFunction::base_eval(const int* letters, size_t length) const {
  switch (impl_->kind) {
    case Impl::Kind::constant: return impl_->constant;
    case Impl::Kind::seeded: return prf_choice(impl_->seed, letters, length);
    case Impl::Kind::table: {
      auto it = impl_->table.find(Word(letters, letters + length));
      return it == impl_->table.end() ? impl_->fallback : it->second;
    }
  }
  return 2;
}

int ChoiceFunction::eval(const int* letters, size_t length) const {
  if (!impl_->entries.empty()) {
    auto it = impl_->entries.find(Word(letters, letters + length));
    if (it != impl_->entries.end()) return it->second;
  }
  for (const auto& r : impl_->rules) {
    const Occurrence& o = r.occ;
    if (length < o.ell - o.big_n || length > o.ell + o.big_n + o.k - 1) continue;
    if (!std::equal(r.outer.begin(), r.outer.end(), letters)) continue;
    if (o.k > 0 && length >= o.ell && length <= o.ell + o.k - 1 &&
        std::equal(r.inner.begin(), r.inner.end(), letters))
      return 1;
    return 2;
  }
  return base_eval(letters, length);
}

ChoiceFunction sample_choice(const Alphabet&, uint64_t seed) { return ChoiceFunction::seeded(seed); }

uint64_t planted_word_count(const Alphabet& a, const Occurrence& occ) {
  uint64_t total = 0;
  uint64_t layer = 1;
  for (size_t j = 0; j < 2 * occ.big_n + occ.k; ++j) {
    total += layer;
    layer *= static_cast<uint64_t>(a.size());
  }
  return total;
}

namespace {

void check_occurrence_shape(const Alphabet& a, const InfiniteWord& w, const Occurrence& occ) {
  if (occ.big_n < 1) throw precondition_error("occurrence requires N >= 1");
  if (occ.ell < occ.big_n) throw precondition_error("occurrence requires ell - N >= 0");
  size_t need = occ.ell + occ.big_n + occ.k;
  if (!w.has(need)) throw precondition_error("word prefix does not cover ell + N + k");
  for (size_t i = 1; i <= need; ++i)
    if (!a.contains(w.at(i))) throw precondition_error("word letter out of range");
}

// Expected value of a planted pattern on a word of the constrained set.
int expected_value(const Occurrence& occ, const Word& inner, const int* letters, size_t length) {
  if (occ.k > 0 && length >= occ.ell && length <= occ.ell + occ.k - 1 &&
      std::equal(inner.begin(), inner.end(), letters))
    return 1;
  return 2;
}

bool regions_may_meet(const PatchRule& r, const PatchRule& s) {
  size_t lo1 = r.occ.ell - r.occ.big_n, hi1 = r.occ.ell + r.occ.big_n + r.occ.k - 1;
  size_t lo2 = s.occ.ell - s.occ.big_n, hi2 = s.occ.ell + s.occ.big_n + s.occ.k - 1;
  if (hi1 < lo2 || hi2 < lo1) return false;
  return extends(r.outer, s.outer) || extends(s.outer, r.outer);
}

}  // namespace

R1R2Result check_R1R2(const Alphabet& a, const ChoiceFunction& eta, const InfiniteWord& w,
                      const Occurrence& occ, uint64_t budget) {
  check_occurrence_shape(a, w, occ);
  R1R2Result res;
  size_t pos = occ.ell - occ.big_n + 1;
  if (!a.is_interior(w.at(pos))) {
    res.reason = "letter " + std::to_string(pos) + " is a ring letter";
    return res;
  }
  Word outer = w.take(occ.ell - occ.big_n);
  Word inner = w.take(occ.ell);
  uint64_t count = planted_word_count(a, occ);
  if (count > budget) {
    const auto& rules = eta.rules();
    for (size_t i = 0; i < rules.size(); ++i) {
      const PatchRule& r = rules[i];
      bool same = r.outer == outer && r.inner == inner && r.occ.ell == occ.ell &&
                  r.occ.big_n == occ.big_n && r.occ.k == occ.k;
      if (!same) continue;
      bool shadowed = false;
      for (size_t j = 0; j < i; ++j) shadowed = shadowed || regions_may_meet(rules[j], r);
      for (const auto& [ew, ev] : eta.entries()) {
        if (extends(ew, outer) && ew.size() <= occ.ell + occ.big_n + occ.k - 1) shadowed = true;
      }
      if (shadowed) break;
      res.ok = true;
      res.structural = true;
      res.reason = "certified by matching patch rule";
      return res;
    }
    throw budget_error("check_R1R2: " + std::to_string(count) + " words exceed budget " +
                       std::to_string(budget));
  }
  // Depth-first enumeration of words extending outer up to length ell+N+k-1.
  size_t max_len = occ.ell + occ.big_n + occ.k - 1;
  Word u = outer;
  std::vector<int> next;
  auto visit = [&](auto&& self) -> bool {
    ++res.words_checked;
    int want = expected_value(occ, inner, u.data(), u.size());
    if (eta.eval(u.data(), u.size()) != want) {
      res.witness = u;
      res.reason = "word " + word_str(u) + " should map to " + std::to_string(want);
      return false;
    }
    if (u.size() == max_len) return true;
    for (int l = 1; l <= a.size(); ++l) {
      u.push_back(l);
      bool ok = self(self);
      u.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  res.ok = visit(visit);
  if (res.ok) res.reason = "all " + std::to_string(res.words_checked) + " words match";
  return res;
}

void validate_plant_spec(const Alphabet& a, const PlantSpec& spec) {
  if (spec.n != a.n()) throw precondition_error("plant spec base does not match alphabet");
  for (const auto& occ : spec.occurrences) {
    check_occurrence_shape(a, spec.word, occ);
    size_t pos = occ.ell - occ.big_n + 1;
    if (!a.is_interior(spec.word.at(pos)))
      throw precondition_error("plant spec: letter " + std::to_string(pos) + " must exceed 4n-4");
  }
  for (size_t i = 0; i < spec.occurrences.size(); ++i) {
    for (size_t j = i + 1; j < spec.occurrences.size(); ++j) {
      const auto& p = spec.occurrences[i];
      const auto& q = spec.occurrences[j];
      size_t lo1 = p.ell - p.big_n, hi1 = p.ell + p.big_n + p.k;
      size_t lo2 = q.ell - q.big_n, hi2 = q.ell + q.big_n + q.k;
      if (!(hi1 < lo2 || hi2 < lo1)) throw precondition_error("plant spec: occurrence windows overlap");
    }
  }
}

ChoiceFunction plant_R1R2(const Alphabet& a, uint64_t base_seed, const PlantSpec& spec) {
  validate_plant_spec(a, spec);
  std::vector<PatchRule> rules;
  for (const auto& occ : spec.occurrences)
    rules.push_back({spec.word.take(occ.ell - occ.big_n), spec.word.take(occ.ell), occ});
  return ChoiceFunction::seeded(base_seed).with_rules(rules);
}

std::optional<size_t> find_ell(const Alphabet& a, const ChoiceFunction& eta, const InfiniteWord& w,
                               size_t big_n, size_t k, size_t ell_max, uint64_t budget) {
  for (size_t ell = big_n; ell <= ell_max; ++ell) {
    if (check_R1R2(a, eta, w, Occurrence{ell, big_n, k}, budget).ok) return ell;
  }
  return std::nullopt;
}

}  // namespace ftl
