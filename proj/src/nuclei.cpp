#include "modal/nuclei.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace modal::sem {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Posets

int FinitePoset::index_of(const std::string& name) const {
  for (int i = 0; i < n(); ++i)
    if (elements[i] == name) return i;
  return -1;
}

FinitePoset make_poset(std::vector<std::string> elements,
                       const std::vector<std::pair<int, int>>& covers) {
  FinitePoset p;
  p.elements = std::move(elements);
  int n = p.n();
  if (n > 64) throw ModelError("TooLarge", "posets are capped at 64 elements");
  {
    std::set<std::string> seen;
    for (const auto& e : p.elements)
      if (!seen.insert(e).second)
        throw ModelError("PosetInvalid", "duplicate element name '" + e + "'");
  }
  p.leq.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) p.leq[i][i] = true;
  for (const auto& [lo, hi] : covers) {
    if (lo < 0 || lo >= n || hi < 0 || hi >= n)
      throw ModelError("PosetInvalid", "cover endpoint out of range");
    p.leq[lo][hi] = true;
  }
  // Reflexive-transitive closure (Floyd-Warshall on the boolean matrix).
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (p.leq[i][k])
        for (int j = 0; j < n; ++j)
          if (p.leq[k][j]) p.leq[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && p.leq[i][j] && p.leq[j][i])
        throw ModelError("PosetInvalid", "antisymmetry fails: " + p.elements[i] +
                                             " and " + p.elements[j] +
                                             " are comparable both ways");
  return p;
}

FinitePoset parse_poset(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ModelError("PosetInvalid", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array())
    throw ModelError("PosetInvalid", "expected an object with an 'elements' array");
  std::vector<std::string> elements;
  for (const auto& e : doc["elements"]) {
    if (!e.is_string()) throw ModelError("PosetInvalid", "element names must be strings");
    elements.push_back(e.get<std::string>());
  }
  std::vector<std::pair<int, int>> covers;
  if (doc.contains("covers")) {
    if (!doc["covers"].is_array())
      throw ModelError("PosetInvalid", "'covers' must be an array of [lower, upper] pairs");
    for (const auto& c : doc["covers"]) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string())
        throw ModelError("PosetInvalid", "each cover must be a [lower, upper] pair of names");
      auto find = [&](const std::string& s) {
        for (int i = 0; i < static_cast<int>(elements.size()); ++i)
          if (elements[i] == s) return i;
        throw ModelError("PosetInvalid", "cover mentions unknown element '" + s + "'");
      };
      covers.emplace_back(find(c[0].get<std::string>()), find(c[1].get<std::string>()));
    }
  }
  return make_poset(std::move(elements), covers);
}

std::vector<FinitePoset> all_posets(int n) {
  if (n < 0 || n > 4)
    throw ModelError("TooLarge", "exhaustive poset generation is capped at 4 elements");
  static const char* kNames[] = {"a", "b", "c", "d"};
  std::vector<std::string> names(kNames, kNames + n);
  std::vector<FinitePoset> out;
  // Enumerate every strict relation on the off-diagonal pairs and keep the
  // reflexive extensions that are transitive and antisymmetric.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  for (std::uint64_t mask = 0; mask < (1ull << pairs.size()); ++mask) {
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) leq[i][i] = true;
    for (size_t b = 0; b < pairs.size(); ++b)
      if (mask >> b & 1) leq[pairs[b].first][pairs[b].second] = true;
    bool ok = true;
    for (int i = 0; ok && i < n; ++i)
      for (int j = 0; ok && j < n; ++j) {
        if (i != j && leq[i][j] && leq[j][i]) ok = false;
        for (int k = 0; ok && k < n; ++k)
          if (leq[i][j] && leq[j][k] && !leq[i][k]) ok = false;
      }
    if (!ok) continue;
    FinitePoset p;
    p.elements = names;
    p.leq = std::move(leq);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Down-sets

bool is_downset(const FinitePoset& p, DownSet s) {
  for (int i = 0; i < p.n(); ++i)
    if (s >> i & 1)
      for (int q = 0; q < p.n(); ++q)
        if (p.leq[q][i] && !(s >> q & 1)) return false;
  return true;
}

DownSet principal_downset(const FinitePoset& p, int elem) {
  DownSet s = 0;
  for (int q = 0; q < p.n(); ++q)
    if (p.leq[q][elem]) s |= 1ull << q;
  return s;
}

std::string downset_name(const FinitePoset& p, DownSet s) {
  std::vector<std::string> names;
  for (int i = 0; i < p.n(); ++i)
    if (s >> i & 1) names.push_back(p.elements[i]);
  std::sort(names.begin(), names.end());
  std::string out = "{";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",";
    out += names[i];
  }
  return out + "}";
}

DownSet parse_downset(const FinitePoset& p, const std::string& text) {
  std::string body = text;
  if (body.size() >= 2 && body.front() == '{' && body.back() == '}')
    body = body.substr(1, body.size() - 2);
  DownSet s = 0;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t comma = body.find(',', pos);
    std::string name = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    // Trim surrounding spaces.
    size_t b = name.find_first_not_of(" \t");
    size_t e = name.find_last_not_of(" \t");
    name = (b == std::string::npos) ? "" : name.substr(b, e - b + 1);
    if (!name.empty()) {
      int i = p.index_of(name);
      if (i < 0) throw ModelError("BadInput", "unknown poset element '" + name + "'");
      s |= 1ull << i;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (!is_downset(p, s))
    throw ModelError("BadInput", "'" + downset_name(p, s) + "' is not down-closed");
  return s;
}

// ---------------------------------------------------------------------------
// Frames

int Frame::index_of(DownSet s) const {
  auto it = std::lower_bound(carrier.begin(), carrier.end(), s);
  if (it == carrier.end() || *it != s) return -1;
  return static_cast<int>(it - carrier.begin());
}

bool Frame::adjunction_ok() const {
  int d = size();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        if (leq(meet(c, a), b) != leq(c, impl(a, b))) return false;
  return true;
}

Frame downset_frame(const FinitePoset& p) {
  if (p.n() > 16)
    throw ModelError("TooLarge",
                     "down-set enumeration is capped at 16 poset elements");
  Frame f;
  f.poset = p;
  for (DownSet s = 0; s < (1ull << p.n()); ++s)
    if (is_downset(p, s)) f.carrier.push_back(s);
  int d = f.size();
  if (d > 1024)
    throw ModelError("TooLarge", "frame carrier is capped at 1024 down-sets");
  f.bottom = 0;
  f.top = d - 1;
  f.meet_.assign(d, std::vector<int>(d, 0));
  f.join_.assign(d, std::vector<int>(d, 0));
  f.impl_.assign(d, std::vector<int>(d, 0));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      f.meet_[a][b] = f.index_of(f.carrier[a] & f.carrier[b]);
      f.join_[a][b] = f.index_of(f.carrier[a] | f.carrier[b]);
      // a ⇒ b: the union of every down-set whose meet with a lies below b.
      DownSet u = 0;
      for (int c = 0; c < d; ++c)
        if ((f.carrier[c] & f.carrier[a] & ~f.carrier[b]) == 0) u |= f.carrier[c];
      f.impl_[a][b] = f.index_of(u);
    }
  return f;
}

// ---------------------------------------------------------------------------
// Nuclei

bool is_nucleus(const Frame& f, const std::vector<int>& table, LawWitness* w) {
  int d = f.size();
  auto fail = [&](const std::string& law, int a, int b) {
    if (w) *w = LawWitness{law, a, b};
    return false;
  };
  if (static_cast<int>(table.size()) != d) return fail("table arity", -1, -1);
  for (int a = 0; a < d; ++a)
    if (table[a] < 0 || table[a] >= d) return fail("table range", a, -1);
  for (int a = 0; a < d; ++a)
    if (!f.leq(a, table[a])) return fail("inflationary", a, -1);
  for (int a = 0; a < d; ++a)
    if (table[table[a]] != table[a]) return fail("idempotent", a, -1);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (table[f.meet(a, b)] != f.meet(table[a], table[b]))
        return fail("meet", a, b);
  return true;
}

bool is_closure_operator(const Frame& f, const std::vector<int>& table) {
  int d = f.size();
  if (static_cast<int>(table.size()) != d) return false;
  for (int a = 0; a < d; ++a)
    if (table[a] < 0 || table[a] >= d || !f.leq(a, table[a]) ||
        table[table[a]] != table[a])
      return false;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (f.leq(a, b) && !f.leq(table[a], table[b])) return false;
  return true;
}

static Nucleus checked(const Frame& f, std::vector<int> table, const char* what) {
  LawWitness w;
  if (!is_nucleus(f, table, &w))
    throw std::logic_error(std::string(what) + " violated the '" + w.law +
                           "' nucleus law");
  return Nucleus{std::move(table)};
}

Nucleus mk_id(const Frame& f) {
  std::vector<int> t(f.size());
  for (int a = 0; a < f.size(); ++a) t[a] = a;
  return checked(f, std::move(t), "identity operator");
}

Nucleus mk_top(const Frame& f) {
  std::vector<int> t(f.size(), f.top);
  return checked(f, std::move(t), "constant-top operator");
}

Nucleus mk_open(const Frame& f, int u) {
  std::vector<int> t(f.size());
  for (int a = 0; a < f.size(); ++a) t[a] = f.impl(u, a);
  return checked(f, std::move(t), "open operator");
}

Nucleus mk_closed(const Frame& f, int u) {
  std::vector<int> t(f.size());
  for (int a = 0; a < f.size(); ++a) t[a] = f.join(u, a);
  return checked(f, std::move(t), "closed operator");
}

Nucleus mk_dneg(const Frame& f) {
  std::vector<int> t(f.size());
  for (int a = 0; a < f.size(); ++a) t[a] = f.neg(f.neg(a));
  return checked(f, std::move(t), "double-negation operator");
}

std::vector<Nucleus> enumerate_nuclei(const Frame& f) {
  int d = f.size();
  if (d > 64)
    throw ModelError("TooLarge", "nucleus enumeration is capped at 64 frame elements");
  if (d > 24)
    throw ModelError("TooLarge",
                     "nucleus enumeration searches 2^|carrier| fixed-point sets; "
                     "|carrier| = " + std::to_string(d) + " exceeds the exhaustive budget");
  std::vector<Nucleus> out;
  // A subset F of the carrier is the fixed-point set of a (unique) nucleus
  // exactly when it contains top, is closed under binary meets, and contains
  // a ⇒ f for every carrier element a and every f in F.  The nucleus sends a
  // to the least element of F above a.
  for (std::uint64_t F = 0; F < (1ull << d); ++F) {
    if (!(F >> f.top & 1)) continue;
    bool ok = true;
    for (int x = 0; ok && x < d; ++x) {
      if (!(F >> x & 1)) continue;
      for (int y = x; ok && y < d; ++y)
        if (F >> y & 1 && !(F >> f.meet(x, y) & 1)) ok = false;
      for (int a = 0; ok && a < d; ++a)
        if (!(F >> f.impl(a, x) & 1)) ok = false;
    }
    if (!ok) continue;
    std::vector<int> t(d);
    for (int a = 0; a < d; ++a) {
      int m = f.top;
      for (int x = 0; x < d; ++x)
        if (F >> x & 1 && f.leq(a, x)) m = f.meet(m, x);
      t[a] = m;
    }
    out.push_back(checked(f, std::move(t), "fixed-point-set reconstruction"));
  }
  std::sort(out.begin(), out.end(),
            [](const Nucleus& a, const Nucleus& b) { return a.table < b.table; });
  return out;
}

std::vector<Nucleus> enumerate_nuclei_oracle(const Frame& f) {
  int d = f.size();
  if (d == 0) return {};
  std::vector<Nucleus> out;
  std::vector<int> t(d, 0);
  while (true) {
    if (is_nucleus(f, t)) out.push_back(Nucleus{t});
    // Odometer increment over all d^d tables.
    int i = 0;
    while (i < d && ++t[i] == d) t[i++] = 0;
    if (i == d) break;
  }
  std::sort(out.begin(), out.end(),
            [](const Nucleus& a, const Nucleus& b) { return a.table < b.table; });
  return out;
}

std::vector<int> fixed_points(const Frame& f, const Nucleus& j) {
  std::vector<int> out;
  for (int a = 0; a < f.size(); ++a)
    if (j(a) == a) out.push_back(a);
  return out;
}

FixedAlgebra fixed_points_algebra(const Frame& f, const Nucleus& j) {
  FixedAlgebra alg;
  alg.carrier = fixed_points(f, j);
  int d = alg.size();
  std::vector<int> pos(f.size(), -1);
  for (int i = 0; i < d; ++i) pos[alg.carrier[i]] = i;
  alg.bottom = pos[j(f.bottom)];
  alg.top = pos[f.top];
  alg.meet_.assign(d, std::vector<int>(d, 0));
  alg.join_.assign(d, std::vector<int>(d, 0));
  alg.impl_.assign(d, std::vector<int>(d, 0));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      alg.meet_[a][b] = pos[f.meet(alg.carrier[a], alg.carrier[b])];
      alg.join_[a][b] = pos[j(f.join(alg.carrier[a], alg.carrier[b]))];
      alg.impl_[a][b] = pos[f.impl(alg.carrier[a], alg.carrier[b])];
      if (alg.meet_[a][b] < 0 || alg.join_[a][b] < 0 || alg.impl_[a][b] < 0)
        throw std::logic_error("fixed points are not closed under the inherited operations");
    }
  // The adjunction within the subalgebra, plus join being a least upper bound.
  alg.heyting_ok = true;
  auto sub_leq = [&](int a, int b) { return alg.meet_[a][b] == a; };
  for (int a = 0; a < d && alg.heyting_ok; ++a)
    for (int b = 0; b < d && alg.heyting_ok; ++b) {
      if (!sub_leq(a, alg.join_[a][b]) || !sub_leq(b, alg.join_[a][b]))
        alg.heyting_ok = false;
      for (int c = 0; c < d && alg.heyting_ok; ++c) {
        if (sub_leq(alg.meet_[c][a], b) != sub_leq(c, alg.impl_[a][b]))
          alg.heyting_ok = false;
        if (sub_leq(a, c) && sub_leq(b, c) && !sub_leq(alg.join_[a][b], c))
          alg.heyting_ok = false;
      }
    }
  return alg;
}

bool modality_leq(const Frame& f, const Nucleus& j, const Nucleus& k) {
  for (int a = 0; a < f.size(); ++a)
    if (j(a) == a && k(a) != a) return false;
  return true;
}

Nucleus modality_meet(const Frame& f, const Nucleus& j, const Nucleus& k) {
  int d = f.size();
  std::vector<int> t(d);
  for (int a = 0; a < d; ++a) {
    int x = a;
    for (int steps = 0;; ++steps) {
      int next = k(j(x));
      if (next == x) break;
      x = next;
      if (steps > d) throw std::logic_error("alternating closure failed to stabilize");
    }
    t[a] = x;
  }
  Nucleus m = checked(f, std::move(t), "modality meet");
  for (int a = 0; a < d; ++a)
    if ((m(a) == a) != (j(a) == a && k(a) == a))
      throw std::logic_error("modality meet fixed points are not the intersection");
  return m;
}

Nucleus modality_join(const Frame& f, const Nucleus& j, const Nucleus& k) {
  std::vector<int> t(f.size());
  for (int a = 0; a < f.size(); ++a) t[a] = f.meet(j(a), k(a));
  return checked(f, std::move(t), "modality join");
}

bool coframe_check(const Frame& f) {
  std::vector<Nucleus> all = enumerate_nuclei(f);
  int m = static_cast<int>(all.size());
  if (m > 20)
    throw ModelError("TooLarge", "coframe check searches 2^#nuclei subsets; got " +
                                     std::to_string(m) + " nuclei");
  Nucleus id = mk_id(f);
  for (const Nucleus& j : all) {
    for (std::uint64_t K = 0; K < (1ull << m); ++K) {
      Nucleus meetK = id;
      for (int i = 0; i < m; ++i)
        if (K >> i & 1) meetK = modality_meet(f, meetK, all[i]);
      Nucleus lhs = modality_join(f, j, meetK);
      Nucleus rhs = id;
      for (int i = 0; i < m; ++i)
        if (K >> i & 1) rhs = modality_meet(f, rhs, modality_join(f, j, all[i]));
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

bool fracture_taut(const Frame& f, int q) {
  if (q < 0 || q >= f.size()) throw ModelError("BadInput", "frame element out of range");
  for (int a = 0; a < f.size(); ++a)
    if (f.meet(f.join(q, a), f.impl(q, a)) != a) return false;
  return true;
}

}  // namespace modal::sem
