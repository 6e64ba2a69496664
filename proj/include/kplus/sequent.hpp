// Sequents Sigma ; Gamma => Delta with multiset arithmetic and annotations.

#ifndef KPLUS_SEQUENT_HPP
#define KPLUS_SEQUENT_HPP

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <sstream>

#include "formula.hpp"

namespace kplus {

// Finite multiset of formulas, stored as canonically ordered (formula, count)
// pairs so that equality, hashing and printing are deterministic.
class Multiset {
 public:
  Multiset() = default;
  Multiset(std::initializer_list<Formula> fs) {
    for (const auto& f : fs) add(f);
  }
  static Multiset of(const std::vector<Formula>& fs) {
    Multiset m;
    for (const auto& f : fs) m.add(f);
    return m;
  }

  void add(const Formula& f, int n = 1) {
    auto it = lower(f);
    if (it != items_.end() && it->first == f)
      it->second += n;
    else
      items_.insert(it, {f, n});
  }

  int count(const Formula& f) const {
    auto it = lower(f);
    return (it != items_.end() && it->first == f) ? it->second : 0;
  }
  bool contains(const Formula& f) const { return count(f) > 0; }

  // Removes one occurrence; false if absent.
  bool remove_one(const Formula& f) {
    auto it = lower(f);
    if (it == items_.end() || !(it->first == f)) return false;
    if (--it->second == 0) items_.erase(it);
    return true;
  }

  Multiset plus(const Multiset& o) const {
    Multiset r = *this;
    for (const auto& [f, n] : o.items_) r.add(f, n);
    return r;
  }
  Multiset plus(const Formula& f) const {
    Multiset r = *this;
    r.add(f);
    return r;
  }

  // Exact difference: nullopt unless o is contained in *this.
  std::optional<Multiset> minus(const Multiset& o) const {
    Multiset r = *this;
    for (const auto& [f, n] : o.items_)
      for (int i = 0; i < n; ++i)
        if (!r.remove_one(f)) return std::nullopt;
    return r;
  }
  std::optional<Multiset> minus(const Formula& f) const {
    Multiset r = *this;
    if (!r.remove_one(f)) return std::nullopt;
    return r;
  }

  // Truncated difference: drops what is not there.
  Multiset minus_sat(const Multiset& o) const {
    Multiset r;
    for (const auto& [f, n] : items_) {
      int keep = n - o.count(f);
      if (keep > 0) r.add(f, keep);
    }
    return r;
  }

  // Pointwise maximum (lattice union).
  Multiset max_union(const Multiset& o) const {
    Multiset r = o;
    for (const auto& [f, n] : items_) {
      int have = r.count(f);
      if (n > have) r.add(f, n - have);
    }
    return r;
  }

  Multiset deduped() const {
    Multiset r;
    for (const auto& [f, n] : items_) r.add(f, 1);
    return r;
  }
  bool duplicate_free() const {
    return std::all_of(items_.begin(), items_.end(),
                       [](const auto& p) { return p.second == 1; });
  }
  bool subset_of(const Multiset& o) const {
    return std::all_of(items_.begin(), items_.end(),
                       [&](const auto& p) { return o.count(p.first) >= p.second; });
  }

  Multiset mapped(Formula (*fn)(Formula)) const {
    Multiset r;
    for (const auto& [f, n] : items_) r.add(fn(f), n);
    return r;
  }

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& [f, n] : items_) s += static_cast<std::size_t>(n);
    return s;
  }
  bool empty() const { return items_.empty(); }

  std::vector<Formula> expanded() const {
    std::vector<Formula> out;
    for (const auto& [f, n] : items_)
      for (int i = 0; i < n; ++i) out.push_back(f);
    return out;
  }
  const std::vector<std::pair<Formula, int>>& entries() const { return items_; }

  bool operator==(const Multiset& o) const { return items_ == o.items_; }
  bool operator!=(const Multiset& o) const { return !(*this == o); }

  std::size_t hash() const {
    std::size_t h = 0x9d2c;
    for (const auto& [f, n] : items_) {
      h = hash_combine(h, f.hash());
      h = hash_combine(h, static_cast<std::size_t>(n));
    }
    return h;
  }

 private:
  std::vector<std::pair<Formula, int>>::iterator lower(const Formula& f) {
    return std::lower_bound(items_.begin(), items_.end(), f,
                            [](const auto& p, const Formula& g) { return p.first < g; });
  }
  std::vector<std::pair<Formula, int>>::const_iterator lower(const Formula& f) const {
    return std::lower_bound(items_.begin(), items_.end(), f,
                            [](const auto& p, const Formula& g) { return p.first < g; });
  }

  std::vector<std::pair<Formula, int>> items_;
};

inline Multiset boxed(const Multiset& m) {
  Multiset r;
  for (const auto& [f, n] : m.entries()) r.add(Formula::box(f), n);
  return r;
}
inline Multiset box_plussed(const Multiset& m) {
  Multiset r;
  for (const auto& [f, n] : m.entries()) r.add(Formula::box_plus(f), n);
  return r;
}

// Finite set of formulas (no duplicates), canonically ordered.
class FormulaSet {
 public:
  FormulaSet() = default;
  FormulaSet(std::initializer_list<Formula> fs) {
    for (const auto& f : fs) insert(f);
  }
  static FormulaSet of(const std::vector<Formula>& fs) {
    FormulaSet s;
    for (const auto& f : fs) s.insert(f);
    return s;
  }

  void insert(const Formula& f) {
    auto it = std::lower_bound(items_.begin(), items_.end(), f, FormulaLess{});
    if (it == items_.end() || !(*it == f)) items_.insert(it, f);
  }
  bool contains(const Formula& f) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), f, FormulaLess{});
    return it != items_.end() && *it == f;
  }
  bool subset_of(const FormulaSet& o) const {
    return std::all_of(items_.begin(), items_.end(),
                       [&](const Formula& f) { return o.contains(f); });
  }
  FormulaSet set_union(const FormulaSet& o) const {
    FormulaSet r = *this;
    for (const auto& f : o.items_) r.insert(f);
    return r;
  }
  FormulaSet set_minus(const FormulaSet& o) const {
    FormulaSet r;
    for (const auto& f : items_)
      if (!o.contains(f)) r.insert(f);
    return r;
  }
  Multiset as_multiset() const {
    Multiset m;
    for (const auto& f : items_) m.add(f);
    return m;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Formula>& items() const { return items_; }

  bool operator==(const FormulaSet& o) const { return items_ == o.items_; }
  bool operator!=(const FormulaSet& o) const { return !(*this == o); }

  std::size_t hash() const {
    std::size_t h = 0x51eb;
    for (const auto& f : items_) h = hash_combine(h, f.hash());
    return h;
  }

 private:
  std::vector<Formula> items_;
};

struct Sequent {
  FormulaSet sigma;
  Multiset gamma;
  Multiset delta;

  bool operator==(const Sequent& o) const {
    return sigma == o.sigma && gamma == o.gamma && delta == o.delta;
  }
  bool operator!=(const Sequent& o) const { return !(*this == o); }

  std::size_t hash() const {
    return hash_combine(hash_combine(sigma.hash(), gamma.hash()), delta.hash());
  }
};

// Annotation: a formula s or the auxiliary sign (printed "o").
class Annotation {
 public:
  Annotation() = default;  // circle
  static Annotation circle() { return Annotation(); }
  static Annotation of(Formula f) {
    Annotation a;
    a.s_ = std::move(f);
    return a;
  }

  bool is_circle() const { return !s_.has_value(); }
  const Formula& formula() const { return *s_; }

  bool operator==(const Annotation& o) const {
    if (is_circle() != o.is_circle()) return false;
    return is_circle() || *s_ == *o.s_;
  }
  bool operator!=(const Annotation& o) const { return !(*this == o); }
  bool operator<(const Annotation& o) const {
    if (is_circle() != o.is_circle()) return is_circle();
    return !is_circle() && *s_ < *o.s_;
  }

  std::size_t hash() const { return is_circle() ? 0xc111 : s_->hash(); }

 private:
  std::optional<Formula> s_;
};

inline std::string print_annotation(const Annotation& a) {
  return a.is_circle() ? "o" : print_formula(a.formula());
}

// A formula annotation s is only legal when [+]s occurs in the succedent.
struct AnnotatedSequent {
  AnnotatedSequent(Sequent s, Annotation a) : seq(std::move(s)), ann(std::move(a)) {
    if (!ann.is_circle() && !seq.delta.contains(Formula::box_plus(ann.formula())))
      throw std::invalid_argument("annotation " + print_annotation(ann) +
                                  " has no [+]-formula in the succedent");
  }
  Sequent seq;
  Annotation ann;

  bool operator==(const AnnotatedSequent& o) const {
    return seq == o.seq && ann == o.ann;
  }
  bool operator!=(const AnnotatedSequent& o) const { return !(*this == o); }
  std::size_t hash() const { return hash_combine(seq.hash(), ann.hash()); }
};

// All possible annotations of a sequent: circle plus every s with [+]s in Delta.
inline std::vector<Annotation> annotation_candidates(const Sequent& s) {
  std::vector<Annotation> out{Annotation::circle()};
  for (const auto& [f, n] : s.delta.entries())
    if (f.is(FormulaKind::BoxPlus)) out.push_back(Annotation::of(f.body()));
  return out;
}

inline std::string print_formula_list(const Multiset& m) {
  std::string s;
  bool first = true;
  for (const auto& f : m.expanded()) {
    if (!first) s += ", ";
    first = false;
    s += print_formula(f);
  }
  return s;
}

inline std::string print_sequent(const Sequent& s) {
  std::string out = "{ ";
  bool first = true;
  for (const auto& f : s.sigma.items()) {
    if (!first) out += ", ";
    first = false;
    out += print_formula(f);
  }
  if (!first) out += " ";
  out += "} ; ";
  out += print_formula_list(s.gamma);
  out += " => ";
  out += print_formula_list(s.delta);
  return out;
}

// Sequent syntax: "{" FormulaList? "}" ";" FormulaList? "=>" FormulaList?
inline Sequent parse_sequent(std::string_view text) {
  detail::FormulaParser p(text);
  p.expect("{");
  Sequent s;
  if (!p.try_consume("}")) {
    for (;;) {
      s.sigma.insert(p.parse());
      if (!p.try_consume(",")) break;
    }
    p.expect("}");
  }
  p.expect(";");
  if (!p.try_consume("=>")) {
    for (;;) {
      s.gamma.add(p.parse());
      if (!p.try_consume(",")) break;
    }
    p.expect("=>");
  }
  if (!p.at_end()) {
    for (;;) {
      s.delta.add(p.parse());
      if (!p.try_consume(",")) break;
    }
  }
  if (!p.at_end()) throw ParseError(p.pos(), {"end of input"});
  return s;
}

// Goal syntax used in proof files: "FormulaList? => FormulaList?" (Sigma ambient).
inline std::pair<Multiset, Multiset> parse_goal(std::string_view text) {
  detail::FormulaParser p(text);
  Multiset gamma, delta;
  if (!p.try_consume("=>")) {
    for (;;) {
      gamma.add(p.parse());
      if (!p.try_consume(",")) break;
    }
    p.expect("=>");
  }
  if (!p.at_end()) {
    for (;;) {
      delta.add(p.parse());
      if (!p.try_consume(",")) break;
    }
  }
  if (!p.at_end()) throw ParseError(p.pos(), {"end of input"});
  return {gamma, delta};
}

inline std::string print_goal(const Sequent& s) {
  return print_formula_list(s.gamma) + " => " + print_formula_list(s.delta);
}

}  // namespace kplus

#endif
