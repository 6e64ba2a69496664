// Modal formulas over ->, false, [] and [+], with parsing and printing.

#ifndef KPLUS_FORMULA_HPP
#define KPLUS_FORMULA_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kplus {

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

enum class FormulaKind : std::uint8_t { Bot, Var, Imp, Box, BoxPlus };

// Immutable formula handle. Derived connectives (not, and, or, top) expand
// to the primitive constructors immediately; the kernel only ever sees the
// five primitives.
class Formula {
 public:
  Formula() = default;

  static Formula bot() { return make(FormulaKind::Bot, "", {}, {}); }
  static Formula var(std::string name) {
    return make(FormulaKind::Var, std::move(name), {}, {});
  }
  static Formula imp(Formula a, Formula b) {
    return make(FormulaKind::Imp, "", std::move(a), std::move(b));
  }
  static Formula box(Formula a) {
    return make(FormulaKind::Box, "", std::move(a), {});
  }
  static Formula box_plus(Formula a) {
    return make(FormulaKind::BoxPlus, "", std::move(a), {});
  }

  // Abbreviations.
  static Formula neg(Formula a) { return imp(std::move(a), bot()); }
  static Formula top() { return neg(bot()); }
  static Formula land(Formula a, Formula b) {
    return neg(imp(std::move(a), neg(std::move(b))));
  }
  static Formula lor(Formula a, Formula b) {
    return imp(neg(std::move(a)), std::move(b));
  }

  bool is_null() const { return node_ == nullptr; }
  FormulaKind kind() const { return node_->kind; }
  const std::string& var_name() const { return node_->name; }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  Formula body() const { return Formula(node_->left); }
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_ ? node_->hash : 0; }

  bool is(FormulaKind k) const { return node_ && node_->kind == k; }

  friend int compare(const Formula& a, const Formula& b) { return cmp(a.node_, b.node_); }

  bool operator==(const Formula& o) const {
    if (node_ == o.node_) return true;
    if (!node_ || !o.node_) return false;
    if (node_->hash != o.node_->hash) return false;
    return cmp(node_, o.node_) == 0;
  }
  bool operator!=(const Formula& o) const { return !(*this == o); }
  bool operator<(const Formula& o) const { return cmp(node_, o.node_) < 0; }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    FormulaKind kind;
    std::string name;
    NodePtr left, right;
    std::size_t size = 1;
    std::size_t hash = 0;
  };

  explicit Formula(NodePtr n) : node_(std::move(n)) {}

  // Canonical order: false < variables (by name) < -> < [] < [+].
  static int rank(FormulaKind k) {
    switch (k) {
      case FormulaKind::Bot: return 0;
      case FormulaKind::Var: return 1;
      case FormulaKind::Imp: return 2;
      case FormulaKind::Box: return 3;
      case FormulaKind::BoxPlus: return 4;
    }
    return 5;
  }

  static int cmp(const NodePtr& a, const NodePtr& b) {
    if (a == b) return 0;
    if (!a) return -1;
    if (!b) return 1;
    int ra = rank(a->kind), rb = rank(b->kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a->kind) {
      case FormulaKind::Bot:
        return 0;
      case FormulaKind::Var: {
        int c = a->name.compare(b->name);
        return c < 0 ? -1 : c > 0 ? 1 : 0;
      }
      case FormulaKind::Imp: {
        int c = cmp(a->left, b->left);
        return c != 0 ? c : cmp(a->right, b->right);
      }
      case FormulaKind::Box:
      case FormulaKind::BoxPlus:
        return cmp(a->left, b->left);
    }
    return 0;
  }

  static Formula make(FormulaKind k, std::string name, Formula l, Formula r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->left = std::move(l.node_);
    n->right = std::move(r.node_);
    n->size = 1 + (n->left ? n->left->size : 0) + (n->right ? n->right->size : 0);
    std::size_t h = hash_combine(0x517cc1b7, static_cast<std::size_t>(k));
    h = hash_combine(h, std::hash<std::string>{}(n->name));
    h = hash_combine(h, n->left ? n->left->hash : 0);
    h = hash_combine(h, n->right ? n->right->hash : 0);
    n->hash = h;
    return Formula(std::move(n));
  }

  NodePtr node_;
};

struct FormulaLess {
  bool operator()(const Formula& a, const Formula& b) const { return a < b; }
};
struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

inline std::string print_formula(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Bot:
      return "false";
    case FormulaKind::Var:
      return f.var_name();
    case FormulaKind::Imp:
      return "(" + print_formula(f.left()) + " -> " + print_formula(f.right()) + ")";
    case FormulaKind::Box:
      return "[]" + print_formula(f.body());
    case FormulaKind::BoxPlus:
      return "[+]" + print_formula(f.body());
  }
  return "?";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected)
      : std::runtime_error(describe(offset, expected)),
        offset(offset),
        expected(std::move(expected)) {}
  std::size_t offset;
  std::vector<std::string> expected;

 private:
  static std::string describe(std::size_t off, const std::vector<std::string>& ex) {
    std::string s = "parse error at offset " + std::to_string(off) + ", expected ";
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (i) s += " | ";
      s += ex[i];
    }
    return s;
  }
};

namespace detail {

// Recursive-descent parser for the grammar
//   Formula := "false" | Ident | "(" Formula "->" Formula ")" | "[]" Formula | "[+]" Formula
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse_whole() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, {"end of input"});
    return f;
  }

  Formula parse() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError(pos_, {"'false'", "identifier", "'('", "'[]'", "'[+]'"});
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Formula l = parse();
      expect("->");
      Formula r = parse();
      expect(")");
      return Formula::imp(l, r);
    }
    if (c == '[') {
      if (text_.substr(pos_, 3) == "[+]") {
        pos_ += 3;
        return Formula::box_plus(parse());
      }
      if (text_.substr(pos_, 2) == "[]") {
        pos_ += 2;
        return Formula::box(parse());
      }
      throw ParseError(pos_, {"'[]'", "'[+]'"});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      if (id == "false") return Formula::bot();
      return Formula::var(std::move(id));
    }
    throw ParseError(pos_, {"'false'", "identifier", "'('", "'[]'", "'[+]'"});
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool try_consume(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!try_consume(tok)) throw ParseError(pos_, {"'" + std::string(tok) + "'"});
  }

  std::size_t pos() const { return pos_; }
  bool at_end() {
    skip_ws();
    return pos_ == text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) {
  return detail::FormulaParser(text).parse_whole();
}

// Smallest subformula-closed superset of fs.
inline std::set<Formula, FormulaLess> subformula_closure(
    const std::set<Formula, FormulaLess>& fs) {
  std::set<Formula, FormulaLess> out;
  std::vector<Formula> todo(fs.begin(), fs.end());
  while (!todo.empty()) {
    Formula f = todo.back();
    todo.pop_back();
    if (!out.insert(f).second) continue;
    switch (f.kind()) {
      case FormulaKind::Imp:
        todo.push_back(f.left());
        todo.push_back(f.right());
        break;
      case FormulaKind::Box:
      case FormulaKind::BoxPlus:
        todo.push_back(f.body());
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace kplus

#endif
