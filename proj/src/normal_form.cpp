#include "divtower/normal_form.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace divtower {

enum class NodeKind { Free, Fbc, Product, Amalgam, Hnn };

struct SubPath {
  enum Kind { Relabel, CyclicFree, CyclicStable };
  struct Comp {
    int factor = 0;
    std::vector<Code> map;  // edge fiber generator i -> signed primitive code
    bool stable = false;
  };
  std::vector<int> path;
  Kind kind = Relabel;
  std::size_t edge_rank = 0;
  bool edge_t = false;
  std::vector<Codes> images;  // primitive codes per edge generator, stable letter last
  std::vector<Comp> comps;
  int pivot = 0;
  std::unordered_map<std::size_t, Code> pivot_inverse;  // primitive id -> edge code
  std::size_t gen_id = 0;
  int gen_sign = 1;
};

struct Decomp {
  Elem c;
  Elem rep;
};

static bool edge_trivial(const Elem& c) { return c.word.empty() && c.exp == 0; }

static void put_int(std::string& out, std::int64_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

class Node {
 public:
  explicit Node(NodeKind k, std::size_t nprims, std::size_t cap)
      : kind(k), owner(nprims, -1), cap(cap) {}
  virtual ~Node() = default;

  virtual Elem identity() const = 0;
  virtual void lmul(Code c, Elem& g) const = 0;
  virtual void word(const Elem& g, Codes& out) const = 0;
  virtual bool trivial(const Elem& g) const = 0;
  virtual void encode(const Elem& g, std::string& out) const = 0;
  virtual Decomp decompose(const Elem& g, const SubPath& s, std::size_t depth) const = 0;
  // g <- w g
  virtual void lmul_word(const Codes& w, Elem& g) const {
    for (std::size_t i = w.size(); i-- > 0;) lmul(w[i], g);
  }

  bool owns(std::size_t id) const { return owner[id] >= 0; }

  Elem mul(const Elem& a, const Elem& b) const {
    Codes w;
    word(a, w);
    Elem r = b;
    lmul_word(w, r);
    return r;
  }

  Codes image_word(const SubPath& s, const Elem& c) const {
    Codes w;
    for (Code ec : c.word) {
      const Codes& img = s.images[index_of(ec)];
      if (ec > 0) {
        w.insert(w.end(), img.begin(), img.end());
      } else {
        Codes inv = invert_codes(img);
        w.insert(w.end(), inv.begin(), inv.end());
      }
    }
    if (c.exp != 0) {
      const Codes& img = s.images.at(s.edge_rank);
      Codes piece = c.exp > 0 ? img : invert_codes(img);
      for (std::int64_t k = 0; k < (c.exp > 0 ? c.exp : -c.exp); ++k)
        w.insert(w.end(), piece.begin(), piece.end());
    }
    return w;
  }

  Elem embed(const SubPath& s, const Elem& c) const {
    Codes w = image_word(s, c);
    Elem g = identity();
    lmul_word(w, g);
    return g;
  }

  NodeKind kind;
  std::vector<int> owner;  // per primitive id: owning child (containers) or 0 (leaves), else -1
  std::vector<const Node*> children;
  std::size_t cap;
};

static Decomp relabel_decompose(const Node& leaf, const Elem& g, const SubPath& s);

// Freely reduces w[from, to) and then prepends it to tail.
static void prepend_reduced(const Codes& w, std::size_t from, std::size_t to, Codes& tail,
                            std::size_t cap) {
  Codes head;
  head.reserve(to - from + tail.size());
  for (std::size_t i = from; i < to; ++i) append_reduced(head, {w[i]});
  append_reduced(head, tail);
  check_cap(head.size(), cap);
  tail = std::move(head);
}

class FreeNode : public Node {
 public:
  FreeNode(std::size_t nprims, std::size_t cap) : Node(NodeKind::Free, nprims, cap) {}
  Elem identity() const override { return {}; }
  void lmul(Code c, Elem& g) const override {
    if (!g.word.empty() && g.word.front() == -c) {
      g.word.erase(g.word.begin());
    } else {
      g.word.insert(g.word.begin(), c);
      check_cap(g.word.size(), cap);
    }
  }
  void lmul_word(const Codes& w, Elem& g) const override {
    prepend_reduced(w, 0, w.size(), g.word, cap);
  }
  void word(const Elem& g, Codes& out) const override {
    out.insert(out.end(), g.word.begin(), g.word.end());
  }
  bool trivial(const Elem& g) const override { return g.word.empty(); }
  void encode(const Elem& g, std::string& out) const override {
    out.push_back('F');
    put_int(out, static_cast<std::int64_t>(g.word.size()));
    out.append(reinterpret_cast<const char*>(g.word.data()), g.word.size() * sizeof(Code));
  }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t) const override {
    if (s.kind == SubPath::Relabel) return relabel_decompose(*this, g, s);
    Decomp d;
    std::size_t n = 0;
    const Code up = code_of(s.gen_id, 1);
    int dir = 0;
    while (n < g.word.size() && (g.word[n] == up || g.word[n] == -up)) {
      dir = sign_of(g.word[n]);
      ++n;
    }
    d.rep.word.assign(g.word.begin() + static_cast<std::ptrdiff_t>(n), g.word.end());
    // g = gen^(dir*n) * rep and the edge generator maps to gen^gen_sign.
    d.c.word.assign(n, code_of(0, dir * s.gen_sign));
    return d;
  }
};

class FbcNode : public Node {
 public:
  FbcNode(std::size_t nprims, std::size_t cap) : Node(NodeKind::Fbc, nprims, cap) {}
  std::size_t stable = 0;
  std::vector<Codes> forward;   // indexed by primitive id
  std::vector<Codes> backward;

  Codes conj(const Codes& w, std::int64_t n) const {
    Codes cur = w;
    const auto& table = n > 0 ? forward : backward;
    for (std::int64_t k = 0; k < (n > 0 ? n : -n); ++k) {
      Codes next;
      next.reserve(cur.size() * 2);
      for (Code c : cur) {
        const Codes& img = table[index_of(c)];
        append_reduced(next, c > 0 ? img : invert_codes(img));
        check_cap(next.size(), cap);
      }
      cur = std::move(next);
    }
    return cur;
  }

  Elem identity() const override { return {}; }
  void lmul(Code c, Elem& g) const override {
    if (index_of(c) == stable) {
      g.word = conj(g.word, sign_of(c));
      g.exp += sign_of(c);
    } else if (!g.word.empty() && g.word.front() == -c) {
      g.word.erase(g.word.begin());
    } else {
      g.word.insert(g.word.begin(), c);
      check_cap(g.word.size(), cap);
    }
  }
  void lmul_word(const Codes& w, Elem& g) const override {
    std::size_t end = w.size();
    while (end > 0) {
      if (index_of(w[end - 1]) == stable) {
        lmul(w[--end], g);
        continue;
      }
      std::size_t begin = end;
      while (begin > 0 && index_of(w[begin - 1]) != stable) --begin;
      prepend_reduced(w, begin, end, g.word, cap);
      end = begin;
    }
  }
  void word(const Elem& g, Codes& out) const override {
    out.insert(out.end(), g.word.begin(), g.word.end());
    Code t = code_of(stable, g.exp > 0 ? 1 : -1);
    for (std::int64_t k = 0; k < (g.exp > 0 ? g.exp : -g.exp); ++k) out.push_back(t);
  }
  bool trivial(const Elem& g) const override { return g.word.empty() && g.exp == 0; }
  void encode(const Elem& g, std::string& out) const override {
    out.push_back('T');
    put_int(out, g.exp);
    put_int(out, static_cast<std::int64_t>(g.word.size()));
    out.append(reinterpret_cast<const char*>(g.word.data()), g.word.size() * sizeof(Code));
  }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t) const override {
    return relabel_decompose(*this, g, s);
  }
};

class ProductNode : public Node {
 public:
  ProductNode(std::size_t nprims, std::size_t cap) : Node(NodeKind::Product, nprims, cap) {}
  Elem identity() const override {
    Elem g;
    for (const Node* c : children) g.kids.push_back(c->identity());
    return g;
  }
  void lmul(Code c, Elem& g) const override {
    int i = owner[index_of(c)];
    children[static_cast<std::size_t>(i)]->lmul(c, g.kids[static_cast<std::size_t>(i)]);
  }
  void lmul_word(const Codes& w, Elem& g) const override {
    std::vector<Codes> parts(children.size());
    for (Code c : w) parts[static_cast<std::size_t>(owner[index_of(c)])].push_back(c);
    for (std::size_t i = 0; i < children.size(); ++i)
      if (!parts[i].empty()) children[i]->lmul_word(parts[i], g.kids[i]);
  }
  void word(const Elem& g, Codes& out) const override {
    for (std::size_t i = 0; i < children.size(); ++i) children[i]->word(g.kids[i], out);
  }
  bool trivial(const Elem& g) const override {
    for (std::size_t i = 0; i < children.size(); ++i)
      if (!children[i]->trivial(g.kids[i])) return false;
    return true;
  }
  void encode(const Elem& g, std::string& out) const override {
    out.push_back('P');
    for (std::size_t i = 0; i < children.size(); ++i) children[i]->encode(g.kids[i], out);
  }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t depth) const override {
    if (depth == s.path.size()) return relabel_decompose(*this, g, s);
    auto i = static_cast<std::size_t>(s.path[depth]);
    Decomp d = children[i]->decompose(g.kids[i], s, depth + 1);
    Decomp out;
    out.c = std::move(d.c);
    out.rep = g;
    out.rep.kids[i] = std::move(d.rep);
    return out;
  }
};

class AmalgamNode : public Node {
 public:
  AmalgamNode(std::size_t nprims, std::size_t cap) : Node(NodeKind::Amalgam, nprims, cap) {}
  SubPath emb[2];

  Elem identity() const override {
    Elem g;
    g.kids.push_back(Elem{});
    return g;
  }
  void lmul(Code c, Elem& g) const override {
    const int side = owner[index_of(c)];
    const Node& X = *children[static_cast<std::size_t>(side)];
    Elem x = X.embed(emb[side], g.kids[0]);
    X.lmul(c, x);
    if (g.kids.size() > 1 && g.marks[0] == side) {
      x = X.mul(x, g.kids[1]);
      g.kids.erase(g.kids.begin() + 1);
      g.marks.erase(g.marks.begin());
    }
    Decomp d = X.decompose(x, emb[side], 0);
    g.kids[0] = std::move(d.c);
    if (!X.trivial(d.rep)) {
      g.kids.insert(g.kids.begin() + 1, std::move(d.rep));
      g.marks.insert(g.marks.begin(), static_cast<std::int8_t>(side));
    }
  }
  // One embed and decompose per syllable instead of per letter.
  void lmul_word(const Codes& w, Elem& g) const override {
    std::size_t end = w.size();
    while (end > 0) {
      const int side = owner[index_of(w[end - 1])];
      std::size_t begin = end - 1;
      while (begin > 0 && owner[index_of(w[begin - 1])] == side) --begin;
      const Node& X = *children[static_cast<std::size_t>(side)];
      Elem x = X.embed(emb[side], g.kids[0]);
      X.lmul_word(Codes(w.begin() + static_cast<std::ptrdiff_t>(begin),
                        w.begin() + static_cast<std::ptrdiff_t>(end)),
                  x);
      if (g.kids.size() > 1 && g.marks[0] == side) {
        x = X.mul(x, g.kids[1]);
        g.kids.erase(g.kids.begin() + 1);
        g.marks.erase(g.marks.begin());
      }
      Decomp d = X.decompose(x, emb[side], 0);
      g.kids[0] = std::move(d.c);
      if (!X.trivial(d.rep)) {
        g.kids.insert(g.kids.begin() + 1, std::move(d.rep));
        g.marks.insert(g.marks.begin(), static_cast<std::int8_t>(side));
      }
      end = begin;
    }
  }
  void word(const Elem& g, Codes& out) const override {
    Codes e = image_word(emb[0], g.kids[0]);
    out.insert(out.end(), e.begin(), e.end());
    for (std::size_t i = 1; i < g.kids.size(); ++i)
      children[static_cast<std::size_t>(g.marks[i - 1])]->word(g.kids[i], out);
  }
  bool trivial(const Elem& g) const override {
    return g.kids.size() == 1 && edge_trivial(g.kids[0]);
  }
  void encode(const Elem& g, std::string& out) const override {
    out.push_back('A');
    put_int(out, g.kids[0].exp);
    put_int(out, static_cast<std::int64_t>(g.kids[0].word.size()));
    out.append(reinterpret_cast<const char*>(g.kids[0].word.data()),
               g.kids[0].word.size() * sizeof(Code));
    put_int(out, static_cast<std::int64_t>(g.kids.size() - 1));
    for (std::size_t i = 1; i < g.kids.size(); ++i) {
      out.push_back(static_cast<char>(g.marks[i - 1]));
      children[static_cast<std::size_t>(g.marks[i - 1])]->encode(g.kids[i], out);
    }
  }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t depth) const override {
    if (depth == s.path.size()) throw std::logic_error("subgroup not inside a vertex group");
    const int v = s.path[depth];
    const Node& X = *children[static_cast<std::size_t>(v)];
    Elem block = X.embed(emb[v], g.kids[0]);
    std::size_t rest = 1;
    if (g.kids.size() > 1 && g.marks[0] == v) {
      block = X.mul(block, g.kids[1]);
      rest = 2;
    }
    Decomp d = X.decompose(block, s, depth + 1);
    Decomp d2 = X.decompose(d.rep, emb[v], 0);
    Decomp out;
    out.c = std::move(d.c);
    out.rep.kids.push_back(std::move(d2.c));
    if (!X.trivial(d2.rep)) {
      out.rep.kids.push_back(std::move(d2.rep));
      out.rep.marks.push_back(static_cast<std::int8_t>(v));
    }
    for (std::size_t i = rest; i < g.kids.size(); ++i) {
      out.rep.kids.push_back(g.kids[i]);
      out.rep.marks.push_back(g.marks[i - 1]);
    }
    return out;
  }
};

class HnnNode : public Node {
 public:
  HnnNode(std::size_t nprims, std::size_t cap) : Node(NodeKind::Hnn, nprims, cap) {}
  std::size_t stable = 0;
  SubPath emb[2];  // s^-1 emb[0](c) s = emb[1](c)

  const Node& base() const { return *children[0]; }

  Elem identity() const override {
    Elem g;
    g.kids.push_back(base().identity());
    return g;
  }
  void lmul(Code c, Elem& g) const override {
    if (index_of(c) != stable) {
      base().lmul(c, g.kids[0]);
      return;
    }
    const int eps = sign_of(c);
    const SubPath& sub = eps > 0 ? emb[1] : emb[0];
    const SubPath& other = eps > 0 ? emb[0] : emb[1];
    Decomp d = base().decompose(g.kids[0], sub, 0);
    if (base().trivial(d.rep) && !g.marks.empty() && g.marks[0] == -eps) {
      Elem h = base().embed(other, d.c);
      g.kids[0] = base().mul(h, g.kids[1]);
      g.kids.erase(g.kids.begin() + 1);
      g.marks.erase(g.marks.begin());
    } else {
      g.kids[0] = base().embed(other, d.c);
      g.kids.insert(g.kids.begin() + 1, std::move(d.rep));
      g.marks.insert(g.marks.begin(), static_cast<std::int8_t>(eps));
    }
  }
  void lmul_word(const Codes& w, Elem& g) const override {
    std::size_t end = w.size();
    while (end > 0) {
      if (index_of(w[end - 1]) == stable) {
        lmul(w[--end], g);
        continue;
      }
      std::size_t begin = end - 1;
      while (begin > 0 && index_of(w[begin - 1]) != stable) --begin;
      base().lmul_word(Codes(w.begin() + static_cast<std::ptrdiff_t>(begin),
                             w.begin() + static_cast<std::ptrdiff_t>(end)),
                       g.kids[0]);
      end = begin;
    }
  }
  void word(const Elem& g, Codes& out) const override {
    base().word(g.kids[0], out);
    for (std::size_t i = 1; i < g.kids.size(); ++i) {
      out.push_back(code_of(stable, g.marks[i - 1]));
      base().word(g.kids[i], out);
    }
  }
  bool trivial(const Elem& g) const override {
    return g.kids.size() == 1 && base().trivial(g.kids[0]);
  }
  void encode(const Elem& g, std::string& out) const override {
    out.push_back('H');
    base().encode(g.kids[0], out);
    put_int(out, static_cast<std::int64_t>(g.kids.size() - 1));
    for (std::size_t i = 1; i < g.kids.size(); ++i) {
      out.push_back(static_cast<char>(g.marks[i - 1]));
      base().encode(g.kids[i], out);
    }
  }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t depth) const override {
    if (depth < s.path.size()) {
      Decomp d = base().decompose(g.kids[0], s, depth + 1);
      Decomp out;
      out.c = std::move(d.c);
      out.rep = g;
      out.rep.kids[0] = std::move(d.rep);
      return out;
    }
    // Coset of the stable cyclic subgroup: the syllable count of s^n g is
    // V-shaped in n with a unique minimum, so walk downhill.
    Elem cur = g;
    std::int64_t n = 0;
    for (int dir : {1, -1}) {
      bool moved = false;
      while (true) {
        Elem next = cur;
        lmul(code_of(stable, dir), next);
        if (next.marks.size() < cur.marks.size()) {
          cur = std::move(next);
          n += dir;
          moved = true;
        } else {
          break;
        }
      }
      if (moved) break;
    }
    Decomp out;
    out.rep = std::move(cur);
    const std::int64_t e = -n * s.gen_sign;
    out.c.word.assign(static_cast<std::size_t>(e > 0 ? e : -e), code_of(0, e > 0 ? 1 : -1));
    return out;
  }
};

static Decomp relabel_decompose(const Node& leaf, const Elem& g, const SubPath& s) {
  const bool product = leaf.kind == NodeKind::Product;
  auto factor_node = [&](int f) -> const Node& {
    return product ? *leaf.children[static_cast<std::size_t>(f)] : leaf;
  };
  auto factor_elem = [&](const Elem& e, int f) -> const Elem& {
    return product ? e.kids[static_cast<std::size_t>(f)] : e;
  };
  const SubPath::Comp& pc = s.comps[static_cast<std::size_t>(s.pivot)];
  const Elem& pe = factor_elem(g, pc.factor);
  Decomp d;
  for (Code c : pe.word) {
    auto it = s.pivot_inverse.find(index_of(c));
    if (it == s.pivot_inverse.end()) throw std::logic_error("pivot letter outside relabeled image");
    d.c.word.push_back(c > 0 ? it->second : -it->second);
  }
  d.c.exp = s.edge_t ? pe.exp : 0;
  d.rep = g;
  for (const auto& comp : s.comps) {
    Codes u;
    for (Code ec : d.c.word) {
      Code img = comp.map[index_of(ec)];
      u.push_back(ec > 0 ? img : -img);
    }
    Elem& target = product ? d.rep.kids[static_cast<std::size_t>(comp.factor)] : d.rep;
    const Node& fn = factor_node(comp.factor);
    Codes w = invert_codes(u);
    append_reduced(w, target.word);
    if (fn.kind == NodeKind::Fbc) {
      const std::int64_t k = comp.stable ? d.c.exp : 0;
      target.word = static_cast<const FbcNode&>(fn).conj(w, -k);
      target.exp -= k;
    } else {
      target.word = std::move(w);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

struct Builder {
  const Alphabet& prims;
  std::size_t cap;
  std::vector<std::unique_ptr<Node>>& pool;

  Codes parse_prims(const std::string& text) const {
    Codes out;
    for (const auto& [name, power] : tokenize_word(text)) {
      auto idx = prims.find(name);
      if (!idx) throw std::invalid_argument("image names unknown generator " + name);
      for (std::int64_t k = 0; k < (power < 0 ? -power : power); ++k)
        out.push_back(code_of(*idx, power < 0 ? -1 : 1));
    }
    return out;
  }

  Node* build(const GroupSpec& s) {
    const std::size_t n = prims.size();
    Node* out = nullptr;
    switch (s.variant) {
      case Variant::Opaque:
        throw UnsupportedBase();
      case Variant::Free: {
        auto node = std::make_unique<FreeNode>(n, cap);
        for (const auto& g : s.gens) node->owner[prims.index(g)] = 0;
        out = node.get();
        pool.push_back(std::move(node));
        break;
      }
      case Variant::FreeByCyclic: {
        auto node = std::make_unique<FbcNode>(n, cap);
        node->forward.resize(n);
        node->backward.resize(n);
        for (std::size_t i = 0; i < s.gens.size(); ++i) {
          std::size_t id = prims.index(s.gens[i]);
          node->owner[id] = 0;
          node->forward[id] = parse_prims(s.monodromy.at(i));
          node->backward[id] = parse_prims(s.monodromy_inverse.at(i));
        }
        node->stable = prims.index(s.stable);
        node->owner[node->stable] = 0;
        out = node.get();
        pool.push_back(std::move(node));
        break;
      }
      case Variant::DirectProduct: {
        auto node = std::make_unique<ProductNode>(n, cap);
        for (std::size_t i = 0; i < s.children.size(); ++i) {
          Node* c = build(*s.children[i]);
          node->children.push_back(c);
          for (std::size_t id = 0; id < n; ++id)
            if (c->owns(id)) node->owner[id] = static_cast<int>(i);
        }
        out = node.get();
        pool.push_back(std::move(node));
        break;
      }
      case Variant::Amalgam: {
        auto node = std::make_unique<AmalgamNode>(n, cap);
        for (std::size_t i = 0; i < 2; ++i) {
          Node* c = build(*s.children[i]);
          node->children.push_back(c);
          for (std::size_t id = 0; id < n; ++id)
            if (c->owns(id)) node->owner[id] = static_cast<int>(i);
        }
        for (int i = 0; i < 2; ++i)
          node->emb[i] = compile(*node->children[static_cast<std::size_t>(i)], *s.edge,
                                 s.embeddings.at(static_cast<std::size_t>(i)));
        out = node.get();
        pool.push_back(std::move(node));
        break;
      }
      case Variant::HNN: {
        auto node = std::make_unique<HnnNode>(n, cap);
        Node* b = build(*s.children[0]);
        node->children.push_back(b);
        for (std::size_t id = 0; id < n; ++id)
          if (b->owns(id)) node->owner[id] = 0;
        node->stable = prims.index(s.stable);
        node->owner[node->stable] = 1;
        for (int i = 0; i < 2; ++i)
          node->emb[i] = compile(*b, *s.edge, s.embeddings.at(static_cast<std::size_t>(i)));
        out = node.get();
        pool.push_back(std::move(node));
        break;
      }
    }
    return out;
  }

  SubPath compile(const Node& start, const GroupSpec& edge, const EdgeEmbedding& emb) const {
    if (edge.variant != Variant::Free && edge.variant != Variant::FreeByCyclic)
      throw std::invalid_argument("edge group must be free or free-by-cyclic");
    SubPath s;
    s.edge_rank = edge.gens.size();
    s.edge_t = edge.variant == Variant::FreeByCyclic;
    if (emb.images.size() != s.edge_rank + (s.edge_t ? 1 : 0))
      throw std::invalid_argument("embedding needs one image per edge generator");
    std::vector<std::size_t> ids;
    for (const auto& text : emb.images) {
      s.images.push_back(parse_prims(text));
      if (s.images.back().empty()) throw std::invalid_argument("empty edge image");
      for (Code c : s.images.back()) ids.push_back(index_of(c));
    }
    auto owns_all = [&](const Node& nd) {
      return std::all_of(ids.begin(), ids.end(), [&](std::size_t id) { return nd.owns(id); });
    };
    const Node* cur = &start;
    while (true) {
      bool descended = false;
      if (cur->kind == NodeKind::Product || cur->kind == NodeKind::Amalgam ||
          cur->kind == NodeKind::Hnn) {
        for (std::size_t i = 0; i < cur->children.size(); ++i) {
          if (owns_all(*cur->children[i])) {
            s.path.push_back(static_cast<int>(i));
            cur = cur->children[i];
            descended = true;
            break;
          }
        }
      }
      if (!descended) break;
    }
    if (cur->kind == NodeKind::Amalgam)
      throw std::invalid_argument("edge image not inside a vertex group");
    if (cur->kind == NodeKind::Hnn) {
      const auto& h = static_cast<const HnnNode&>(*cur);
      if (s.images.size() != 1 || s.images[0].size() != 1 || index_of(s.images[0][0]) != h.stable)
        throw std::invalid_argument("only cyclic subgroups of the stable letter are supported");
      s.kind = SubPath::CyclicStable;
      s.gen_id = h.stable;
      s.gen_sign = sign_of(s.images[0][0]);
      return s;
    }
    if (emb.tag == OracleTag::CyclicExponent) {
      if (cur->kind != NodeKind::Free || s.images.size() != 1 || s.images[0].size() != 1)
        throw std::invalid_argument("cyclic-exponent oracle needs a single free generator");
      s.kind = SubPath::CyclicFree;
      s.gen_id = index_of(s.images[0][0]);
      s.gen_sign = sign_of(s.images[0][0]);
      return s;
    }
    s.kind = SubPath::Relabel;
    std::vector<const Node*> factors;
    if (cur->kind == NodeKind::Product) {
      factors = cur->children;
    } else {
      factors = {cur};
    }
    for (const Node* f : factors)
      if (f->kind != NodeKind::Free && f->kind != NodeKind::Fbc)
        throw std::invalid_argument("relabel oracle needs free or free-by-cyclic factors");
    auto factor_of = [&](std::size_t id) -> int {
      for (std::size_t i = 0; i < factors.size(); ++i)
        if (factors[i]->owns(id)) return static_cast<int>(i);
      throw std::invalid_argument("image letter outside the leaf");
    };
    std::map<int, SubPath::Comp> comps;
    for (std::size_t i = 0; i < s.edge_rank; ++i) {
      for (Code c : s.images[i]) {
        int f = factor_of(index_of(c));
        auto& comp = comps[f];
        comp.factor = f;
        comp.map.resize(s.edge_rank, 0);
        if (comp.map[i] != 0) throw std::invalid_argument("image is not a letter per factor");
        comp.map[i] = c;
      }
    }
    if (s.edge_t) {
      for (Code c : s.images[s.edge_rank]) {
        int f = factor_of(index_of(c));
        const Node* fn = factors[static_cast<std::size_t>(f)];
        if (fn->kind != NodeKind::Fbc || static_cast<const FbcNode*>(fn)->stable != index_of(c) ||
            c < 0 || !comps.count(f))
          throw std::invalid_argument("edge stable letter must map to factor stable letters");
        comps[f].stable = true;
      }
    }
    for (auto& [f, comp] : comps) {
      for (Code c : comp.map)
        if (c == 0) throw std::invalid_argument("relabel map is not defined on every generator");
      if (s.edge_t && !comp.stable) throw std::invalid_argument("stable letter missing in factor");
      std::vector<std::size_t> seen;
      for (Code c : comp.map) seen.push_back(index_of(c));
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument("relabel map is not injective");
      s.comps.push_back(comp);
    }
    // Monodromy compatibility on free-by-cyclic components.
    if (s.edge_t) {
      auto ealpha = make_alphabet(edge.gens);
      for (const auto& comp : s.comps) {
        const auto& fb = static_cast<const FbcNode&>(*factors[static_cast<std::size_t>(comp.factor)]);
        for (std::size_t i = 0; i < s.edge_rank; ++i) {
          Codes ew = parse_word(ealpha, edge.monodromy[i]).codes();
          Codes lhs;
          for (Code ec : ew) lhs.push_back(ec > 0 ? comp.map[index_of(ec)] : -comp.map[index_of(ec)]);
          reduce_codes(lhs);
          Codes rhs = fb.conj({comp.map[i]}, 1);
          if (lhs != rhs) throw std::invalid_argument("relabel map does not commute with monodromy");
        }
      }
    }
    if (s.comps.empty()) throw std::invalid_argument("empty embedding");
    switch (emb.tag) {
      case OracleTag::SkewDiagonalInProduct: {
        s.pivot = -1;
        for (std::size_t i = 0; i < s.comps.size(); ++i) {
          bool positive = std::all_of(s.comps[i].map.begin(), s.comps[i].map.end(),
                                      [](Code c) { return c > 0; });
          if (positive) {
            s.pivot = static_cast<int>(i);
            break;
          }
        }
        if (s.pivot < 0 || s.comps.size() != 2)
          throw std::invalid_argument("skew-diagonal oracle needs a positive component");
        break;
      }
      case OracleTag::DiagonalInProduct:
        if (s.comps.size() != 2) throw std::invalid_argument("diagonal oracle needs two components");
        s.pivot = static_cast<int>(s.comps.size()) - 1;
        break;
      case OracleTag::FiberOfFreeByCyclic:
      case OracleTag::FreeFactor:
        if (s.comps.size() != 1) throw std::invalid_argument("oracle needs a single component");
        s.pivot = 0;
        break;
      case OracleTag::CyclicExponent:
        break;
    }
    const auto& pc = s.comps[static_cast<std::size_t>(s.pivot)];
    for (std::size_t i = 0; i < s.edge_rank; ++i)
      s.pivot_inverse[index_of(pc.map[i])] = code_of(i, sign_of(pc.map[i]));
    return s;
  }
};

// ---------------------------------------------------------------------------

class PoolNode : public Node {
 public:
  PoolNode() : Node(NodeKind::Free, 0, 0) {}
  std::vector<std::unique_ptr<Node>> pool;
  const Node* top = nullptr;
  Elem identity() const override { return top->identity(); }
  void lmul(Code c, Elem& g) const override { top->lmul(c, g); }
  void lmul_word(const Codes& w, Elem& g) const override { top->lmul_word(w, g); }
  void word(const Elem& g, Codes& out) const override { top->word(g, out); }
  bool trivial(const Elem& g) const override { return top->trivial(g); }
  void encode(const Elem& g, std::string& out) const override { top->encode(g, out); }
  Decomp decompose(const Elem& g, const SubPath& s, std::size_t depth) const override {
    return top->decompose(g, s, depth);
  }
};

static bool has_opaque(const GroupSpec& s) {
  if (s.variant == Variant::Opaque) return true;
  for (const auto& c : s.children)
    if (has_opaque(*c)) return true;
  return false;
}

Solver::Solver(SpecPtr spec, std::size_t cap) : spec_(std::move(spec)), cap_(cap) {
  if (has_opaque(*spec_)) throw UnsupportedBase();
  auto gs = generating_set(*spec_);
  alphabet_ = gs.alphabet;
  primitives_ = make_alphabet(primitive_generators(*spec_));
  std::map<std::string, std::string> macro_text;
  for (const auto& m : gs.macros) macro_text[m.name] = m.expansion;
  for (const auto& name : alphabet_->names()) {
    if (auto id = primitives_->find(name)) {
      expansions_.push_back({code_of(*id, 1)});
    } else if (macro_text.count(name)) {
      expansions_.push_back(parse_word(primitives_, macro_text.at(name)).codes());
      if (expansions_.back().empty()) throw std::invalid_argument("empty macro expansion");
    } else {
      throw std::invalid_argument("generator without definition: " + name);
    }
  }
  auto holder = std::make_unique<PoolNode>();
  Builder b{*primitives_, cap_, holder->pool};
  holder->top = b.build(*spec_);
  holder->kind = holder->top->kind;
  root_ = std::move(holder);
}

Solver::~Solver() = default;

Codes Solver::expand(const Word& w) const {
  if (!same_alphabet(w.alphabet(), alphabet_)) throw AlphabetMismatch();
  Codes out;
  for (Code c : w.codes()) {
    const Codes& e = expansions_[index_of(c)];
    if (c > 0) {
      out.insert(out.end(), e.begin(), e.end());
    } else {
      Codes inv = invert_codes(e);
      out.insert(out.end(), inv.begin(), inv.end());
    }
  }
  return out;
}

Elem Solver::identity() const { return root_->identity(); }

void Solver::lmul(Code primitive, Elem& g) const { root_->lmul(primitive, g); }

void Solver::lmul_generator(Code generator, Elem& g) const {
  const Codes& e = expansions_[index_of(generator)];
  if (generator > 0) {
    for (std::size_t i = e.size(); i-- > 0;) root_->lmul(e[i], g);
  } else {
    for (Code c : e) root_->lmul(-c, g);
  }
}

Elem Solver::from_primitive(const Codes& w) const {
  Elem g = identity();
  root_->lmul_word(w, g);
  return g;
}

Elem Solver::mul(const Elem& a, const Elem& b) const { return root_->mul(a, b); }

Elem Solver::inverse(const Elem& a) const { return from_primitive(invert_codes(to_primitive_word(a))); }

Codes Solver::to_primitive_word(const Elem& g) const {
  Codes out;
  root_->word(g, out);
  reduce_codes(out);
  return out;
}

std::string Solver::encode(const Elem& g) const {
  std::string out;
  root_->encode(g, out);
  return out;
}

bool Solver::is_trivial(const Elem& g) const { return root_->trivial(g); }

NormalForm Solver::normalize(const Word& w) const {
  NormalForm nf;
  try {
    nf.elem = from_primitive(expand(w));
  } catch (const CapExceeded& e) {
    throw UnknownEquality(e.what());
  }
  nf.encoding = encode(nf.elem);
  nf.trivial = is_trivial(nf.elem);
  return nf;
}

Verdict Solver::identity_verdict(const Word& w) const {
  try {
    return normalize(w).trivial ? Verdict::Trivial : Verdict::Nontrivial;
  } catch (const UnknownEquality&) {
    return Verdict::Unknown;
  }
}

bool Solver::is_identity(const Word& w) const { return normalize(w).trivial; }

bool Solver::equal(const Word& u, const Word& v) const { return is_identity(concat(u, invert(v))); }

MembershipOracle Solver::oracle(const SpecPtr& edge, const EdgeEmbedding& emb) const {
  Builder b{*primitives_, cap_, const_cast<PoolNode&>(static_cast<const PoolNode&>(*root_)).pool};
  MembershipOracle o;
  o.tag_ = emb.tag;
  o.edge_alphabet_ = make_alphabet(edge_generators(*edge));
  o.path_ = std::make_shared<SubPath>(
      b.compile(*static_cast<const PoolNode&>(*root_).top, *edge, emb));
  return o;
}

std::pair<Word, Elem> Solver::decompose(const MembershipOracle& o, const Elem& g) const {
  Decomp d = root_->decompose(g, *o.path_, 0);
  Codes w = d.c.word;
  const SubPath& s = *o.path_;
  for (std::int64_t k = 0; k < (d.c.exp > 0 ? d.c.exp : -d.c.exp); ++k)
    w.push_back(code_of(s.edge_rank, d.c.exp > 0 ? 1 : -1));
  return {Word::from_codes(o.edge_alphabet(), std::move(w)), std::move(d.rep)};
}

std::optional<Word> Solver::membership(const MembershipOracle& o, const Word& g) const {
  NormalForm nf = normalize(g);
  try {
    auto [w, rep] = decompose(o, nf.elem);
    if (!is_trivial(rep)) return std::nullopt;
    return w;
  } catch (const CapExceeded& e) {
    throw UnknownEquality(e.what());
  }
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Trivial: return "trivial";
    case Verdict::Nontrivial: return "nontrivial";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

}  // namespace divtower
