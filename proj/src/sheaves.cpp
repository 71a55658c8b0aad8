#include "modal/sheaves.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace modal::sem {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Poset helpers

bool same_poset(const FinitePoset& a, const FinitePoset& b) {
  return a.elements == b.elements && a.leq == b.leq;
}

static void require_same_poset(const FinitePoset& a, const FinitePoset& b,
                               const char* what) {
  if (!same_poset(a, b))
    throw ModelError("BadInput", std::string(what) + ": posets do not match");
}

// ---------------------------------------------------------------------------
// Presheaf construction and validation

Presheaf make_presheaf(const FinitePoset& poset,
                       std::vector<std::vector<std::string>> ids,
                       std::vector<std::vector<std::vector<int>>> res) {
  int n = poset.n();
  if (static_cast<int>(ids.size()) != n || static_cast<int>(res.size()) != n)
    throw ModelError("BadInput", "presheaf tables must cover every poset element");
  Presheaf X;
  X.poset = poset;
  X.ids = std::move(ids);
  X.res = std::move(res);
  for (int p = 0; p < n; ++p)
    if (static_cast<int>(X.res[p].size()) != n)
      throw ModelError("BadInput", "restriction table rows must cover every poset element");

  auto present = [&](int p, int q) {
    return static_cast<int>(X.res[p][q].size()) == X.stalk(p);
  };
  // Identity restrictions may be omitted.
  for (int p = 0; p < n; ++p)
    if (!present(p, p)) {
      X.res[p][p].resize(X.stalk(p));
      std::iota(X.res[p][p].begin(), X.res[p][p].end(), 0);
    }
  // Derive missing composites along already-present pairs until stable.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (!poset.leq[q][p] || present(p, q)) continue;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q || !poset.leq[q][r] || !poset.leq[r][p]) continue;
          if (!present(p, r) || !present(r, q)) continue;
          std::vector<int> t(X.stalk(p));
          for (int x = 0; x < X.stalk(p); ++x) t[x] = X.res[r][q][X.res[p][r][x]];
          X.res[p][q] = std::move(t);
          changed = true;
          break;
        }
      }
  }
  // Full validation: presence, ranges, identity, incomparable emptiness, and
  // composition coherence.
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!poset.leq[q][p]) {
        if (!X.res[p][q].empty())
          throw ModelError("BadInput", "restriction given for incomparable pair " +
                                           poset.elements[p] + " -> " + poset.elements[q]);
        continue;
      }
      if (!present(p, q))
        throw ModelError("BadInput", "missing restriction " + poset.elements[p] +
                                         " -> " + poset.elements[q] +
                                         " (not derivable from the given tables)");
      for (int x = 0; x < X.stalk(p); ++x)
        if (X.res[p][q][x] < 0 || X.res[p][q][x] >= X.stalk(q))
          throw ModelError("BadInput", "restriction value out of range at " +
                                           poset.elements[p] + " -> " + poset.elements[q]);
    }
  for (int p = 0; p < n; ++p)
    for (int x = 0; x < X.stalk(p); ++x)
      if (X.res[p][p][x] != x)
        throw ModelError("BadInput", "identity restriction is not the identity at " +
                                         poset.elements[p]);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        if (!poset.leq[q][p] || !poset.leq[r][q]) continue;
        for (int x = 0; x < X.stalk(p); ++x)
          if (X.res[q][r][X.res[p][q][x]] != X.res[p][r][x])
            throw ModelError("BadInput",
                             "restrictions do not compose along " + poset.elements[p] +
                                 " -> " + poset.elements[q] + " -> " + poset.elements[r]);
      }
  return X;
}

Presheaf parse_presheaf(const FinitePoset& poset, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ModelError("BadInput", std::string("malformed presheaf JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sets") || !doc["sets"].is_object())
    throw ModelError("BadInput", "expected an object with a 'sets' object");
  int n = poset.n();
  std::vector<std::vector<std::string>> ids(n);
  for (auto it = doc["sets"].begin(); it != doc["sets"].end(); ++it) {
    int p = poset.index_of(it.key());
    if (p < 0) throw ModelError("BadInput", "'sets' mentions unknown element '" + it.key() + "'");
    if (!it.value().is_array())
      throw ModelError("BadInput", "stalk at '" + it.key() + "' must be an array");
    for (const auto& v : it.value()) {
      if (!v.is_string())
        throw ModelError("BadInput", "stalk ids must be strings");
      ids[p].push_back(v.get<std::string>());
    }
  }
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  if (doc.contains("restrictions")) {
    if (!doc["restrictions"].is_object())
      throw ModelError("BadInput", "'restrictions' must be an object keyed by 'p>q'");
    for (auto it = doc["restrictions"].begin(); it != doc["restrictions"].end(); ++it) {
      const std::string& key = it.key();
      size_t gt = key.find('>');
      if (gt == std::string::npos)
        throw ModelError("BadInput", "restriction key '" + key + "' is not of the form 'p>q'");
      int p = poset.index_of(key.substr(0, gt));
      int q = poset.index_of(key.substr(gt + 1));
      if (p < 0 || q < 0)
        throw ModelError("BadInput", "restriction key '" + key + "' mentions unknown elements");
      if (!poset.leq[q][p])
        throw ModelError("BadInput", "restriction key '" + key + "' is not a comparable pair");
      std::vector<int> table(ids[p].size(), -1);
      for (auto m = it.value().begin(); m != it.value().end(); ++m) {
        auto find = [&](int pt, const std::string& id) {
          for (int i = 0; i < static_cast<int>(ids[pt].size()); ++i)
            if (ids[pt][i] == id) return i;
          throw ModelError("BadInput", "restriction '" + key + "' mentions unknown id '" + id + "'");
        };
        if (!m.value().is_string())
          throw ModelError("BadInput", "restriction values must be stalk ids");
        table[find(p, m.key())] = find(q, m.value().get<std::string>());
      }
      for (size_t i = 0; i < table.size(); ++i)
        if (table[i] < 0)
          throw ModelError("BadInput", "restriction '" + key + "' is missing id '" +
                                           ids[p][i] + "'");
      res[p][q] = std::move(table);
    }
  }
  return make_presheaf(poset, std::move(ids), std::move(res));
}

PresheafMap make_presheaf_map(const Presheaf& X, const Presheaf& Y,
                              std::vector<std::vector<int>> comp) {
  require_same_poset(X.poset, Y.poset, "presheaf map");
  int n = X.points();
  if (static_cast<int>(comp.size()) != n)
    throw ModelError("BadInput", "map components must cover every poset element");
  for (int p = 0; p < n; ++p) {
    if (static_cast<int>(comp[p].size()) != X.stalk(p))
      throw ModelError("BadInput", "map component has the wrong arity at " +
                                       X.poset.elements[p]);
    for (int x : comp[p])
      if (x < 0 || x >= Y.stalk(p))
        throw ModelError("BadInput", "map component out of range at " + X.poset.elements[p]);
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!X.poset.leq[q][p]) continue;
      for (int x = 0; x < X.stalk(p); ++x)
        if (Y.res[p][q][comp[p][x]] != comp[q][X.res[p][q][x]])
          throw ModelError("BadInput", "map is not natural along " + X.poset.elements[p] +
                                           " -> " + X.poset.elements[q]);
    }
  return PresheafMap{std::move(comp)};
}

PresheafMap identity_map(const Presheaf& X) {
  std::vector<std::vector<int>> comp(X.points());
  for (int p = 0; p < X.points(); ++p) {
    comp[p].resize(X.stalk(p));
    std::iota(comp[p].begin(), comp[p].end(), 0);
  }
  return PresheafMap{std::move(comp)};
}

PresheafMap compose(const Presheaf& X, const Presheaf& Y, const Presheaf& Z,
                    const PresheafMap& f, const PresheafMap& g) {
  std::vector<std::vector<int>> comp(X.points());
  for (int p = 0; p < X.points(); ++p) {
    comp[p].resize(X.stalk(p));
    for (int x = 0; x < X.stalk(p); ++x) comp[p][x] = g.comp[p][f.comp[p][x]];
  }
  return make_presheaf_map(X, Z, std::move(comp));
}

Presheaf subterminal_presheaf(const FinitePoset& poset, DownSet q) {
  if (!is_downset(poset, q))
    throw ModelError("BadInput", "subterminal must be a down-set");
  int n = poset.n();
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    if (q >> p & 1) ids[p] = {"*"};
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      if (poset.leq[r][p] && (q >> p & 1)) res[p][r] = {0};
  return make_presheaf(poset, std::move(ids), std::move(res));
}

Presheaf terminal_presheaf(const FinitePoset& poset) {
  return subterminal_presheaf(poset, (poset.n() == 64) ? ~0ull
                                                       : ((1ull << poset.n()) - 1));
}

// ---------------------------------------------------------------------------
// Isomorphism search

namespace {

bool iso_search(const Presheaf& X, const Presheaf& Y, int p,
                std::vector<std::vector<int>>& phi) {
  int n = X.points();
  if (p == n) return true;
  std::vector<int> perm(X.stalk(p));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    // Naturality against every previously assigned point, both directions.
    for (int q = 0; ok && q < p; ++q) {
      if (X.poset.leq[q][p])
        for (int x = 0; ok && x < X.stalk(p); ++x)
          if (phi[q][X.res[p][q][x]] != Y.res[p][q][perm[x]]) ok = false;
      if (X.poset.leq[p][q])
        for (int z = 0; ok && z < X.stalk(q); ++z)
          if (perm[X.res[q][p][z]] != Y.res[q][p][phi[q][z]]) ok = false;
    }
    if (!ok) continue;
    phi[p] = perm;
    if (iso_search(X, Y, p + 1, phi)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

std::vector<std::vector<int>> iso_witness(const Presheaf& X, const Presheaf& Y) {
  if (!same_poset(X.poset, Y.poset)) return {};
  for (int p = 0; p < X.points(); ++p) {
    if (X.stalk(p) != Y.stalk(p)) return {};
    if (X.stalk(p) > 6)
      throw ModelError("TooLarge", "isomorphism search is capped at 6-element stalks");
  }
  std::vector<std::vector<int>> phi(X.points());
  if (!iso_search(X, Y, 0, phi)) return {};
  for (int p = 0; p < X.points(); ++p)
    if (X.stalk(p) > 0 && phi[p].empty()) return {};  // unreachable guard
  return phi;
}

bool presheaf_iso(const Presheaf& X, const Presheaf& Y) {
  if (!same_poset(X.poset, Y.poset)) return false;
  for (int p = 0; p < X.points(); ++p)
    if (X.stalk(p) != Y.stalk(p)) return false;
  if (X.points() == 0) return true;
  std::vector<std::vector<int>> phi(X.points());
  for (int p = 0; p < X.points(); ++p)
    if (X.stalk(p) > 6)
      throw ModelError("TooLarge", "isomorphism search is capped at 6-element stalks");
  return iso_search(X, Y, 0, phi);
}

bool is_iso(const Presheaf& X, const Presheaf& Y, const PresheafMap& m) {
  for (int p = 0; p < X.points(); ++p) {
    if (X.stalk(p) != Y.stalk(p)) return false;
    std::vector<bool> hit(Y.stalk(p), false);
    for (int x = 0; x < X.stalk(p); ++x) {
      if (hit[m.comp[p][x]]) return false;
      hit[m.comp[p][x]] = true;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Matching families

namespace {

// A presheaf presented functionally, so the plus construction can stack on
// its own output without materializing intermediate presheaves.
struct View {
  const FinitePoset* poset;
  std::function<int(int)> stalk;
  std::function<int(int, int, int)> res;  // (p, x, q<=p) -> index at q
};

View view_of(const Presheaf& X) {
  return View{&X.poset, [&X](int p) { return X.stalk(p); },
              [&X](int p, int x, int q) { return X.restrict(p, x, q); }};
}

std::vector<int> maximal_elements(const FinitePoset& po, DownSet s) {
  std::vector<int> out;
  for (int q = 0; q < po.n(); ++q) {
    if (!(s >> q & 1)) continue;
    bool maximal = true;
    for (int r = 0; r < po.n(); ++r)
      if (r != q && (s >> r & 1) && po.leq[q][r]) maximal = false;
    if (maximal) out.push_back(q);
  }
  return out;
}

// Families over a down-set are determined by compatible choices on its
// maximal elements; lower values are forced by restriction.
std::vector<std::vector<int>> families_view(const View& v, DownSet s) {
  const FinitePoset& po = *v.poset;
  std::vector<int> maxs = maximal_elements(po, s);
  std::vector<std::vector<int>> out;
  std::vector<int> choice(maxs.size(), 0);
  while (true) {
    bool viable = true;
    for (size_t i = 0; viable && i < maxs.size(); ++i)
      if (v.stalk(maxs[i]) == 0) viable = false;
    if (maxs.empty()) viable = true;
    if (viable) {
      std::vector<int> fam(po.n(), -1);
      bool ok = true;
      for (int q = 0; ok && q < po.n(); ++q) {
        if (!(s >> q & 1)) continue;
        int val = -1;
        for (size_t i = 0; ok && i < maxs.size(); ++i) {
          if (!po.leq[q][maxs[i]]) continue;
          int w = v.res(maxs[i], choice[i], q);
          if (val == -1)
            val = w;
          else if (val != w)
            ok = false;
        }
        fam[q] = val;
      }
      if (ok) out.push_back(std::move(fam));
    } else {
      return out;  // some maximal stalk is empty: no families at all
    }
    // Odometer over the maximal choices.
    size_t i = 0;
    while (i < maxs.size() && ++choice[i] == v.stalk(maxs[i])) choice[i++] = 0;
    if (i == maxs.size()) break;
    if (maxs.empty()) break;
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> families_over(const Presheaf& X, DownSet s) {
  if (!is_downset(X.poset, s))
    throw ModelError("BadInput", "families are indexed by down-sets");
  return families_view(view_of(X), s);
}

// ---------------------------------------------------------------------------
// Sheaf condition

bool is_sheaf(const Frame& f, const Nucleus& j, const Presheaf& X) {
  require_same_poset(f.poset, X.poset, "sheaf check");
  int n = X.points();
  View v = view_of(X);
  for (int p = 0; p < n; ++p) {
    DownSet below = principal_downset(X.poset, p);
    for (int s = 0; s < f.size(); ++s) {
      DownSet S = f.carrier[s];
      if ((S & ~below) != 0) continue;              // not a sieve on p
      if (!(f.carrier[j(s)] >> p & 1)) continue;    // does not j-cover p
      std::vector<std::vector<int>> fams = families_view(v, S);
      std::map<std::vector<int>, int> index;
      for (int i = 0; i < static_cast<int>(fams.size()); ++i) index[fams[i]] = i;
      std::vector<bool> hit(fams.size(), false);
      if (static_cast<int>(fams.size()) != X.stalk(p)) return false;
      for (int x = 0; x < X.stalk(p); ++x) {
        std::vector<int> fam(n, -1);
        for (int q = 0; q < n; ++q)
          if (S >> q & 1) fam[q] = X.restrict(p, x, q);
        auto it = index.find(fam);
        if (it == index.end() || hit[it->second]) return false;
        hit[it->second] = true;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Plus construction

namespace {

struct Rep {
  DownSet sieve;
  std::vector<int> fam;
};

struct Layer {
  const Frame* frame;
  const Nucleus* j;
  View below;
  std::vector<std::vector<Rep>> reps;  // canonical class representatives per point
};

// Two covering pairs are identified when their agreement locus (a down-set,
// because families restrict coherently) is itself covering.
bool pairs_equivalent(const Layer& L, int p, DownSet s, const std::vector<int>& x,
                      DownSet t, const std::vector<int>& y) {
  DownSet agree = 0;
  int n = L.frame->poset.n();
  for (int q = 0; q < n; ++q)
    if ((s >> q & 1) && (t >> q & 1) && x[q] == y[q]) agree |= 1ull << q;
  int idx = L.frame->index_of(agree);
  if (idx < 0) throw std::logic_error("agreement locus of two families is not a down-set");
  return L.frame->carrier[(*L.j)(idx)] >> p & 1;
}

int class_of(const Layer& L, int p, DownSet s, const std::vector<int>& fam) {
  const auto& rs = L.reps[p];
  for (int i = 0; i < static_cast<int>(rs.size()); ++i)
    if (pairs_equivalent(L, p, s, fam, rs[i].sieve, rs[i].fam)) return i;
  throw std::logic_error("covering pair matches no canonical class");
}

Layer plus_once(const Frame& f, const Nucleus& j, View below) {
  Layer L{&f, &j, std::move(below), {}};
  int n = f.poset.n();
  L.reps.resize(n);
  for (int p = 0; p < n; ++p) {
    DownSet pd = principal_downset(f.poset, p);
    for (int s = 0; s < f.size(); ++s) {
      DownSet S = f.carrier[s];
      if ((S & ~pd) != 0) continue;
      if (!(f.carrier[j(s)] >> p & 1)) continue;
      for (std::vector<int>& fam : families_view(L.below, S)) {
        bool fresh = true;
        for (const Rep& r : L.reps[p])
          if (pairs_equivalent(L, p, S, fam, r.sieve, r.fam)) {
            fresh = false;
            break;
          }
        if (fresh) L.reps[p].push_back(Rep{S, std::move(fam)});
      }
    }
  }
  return L;
}

int restrict_class(const Layer& L, int p, int c, int q) {
  const Rep& r = L.reps[p][c];
  DownSet qd = principal_downset(L.frame->poset, q);
  DownSet S = r.sieve & qd;
  std::vector<int> fam(L.frame->poset.n(), -1);
  for (int t = 0; t < L.frame->poset.n(); ++t)
    if (S >> t & 1) fam[t] = r.fam[t];
  return class_of(L, q, S, fam);
}

View layer_view(const Layer& L) {
  return View{&L.frame->poset,
              [&L](int p) { return static_cast<int>(L.reps[p].size()); },
              [&L](int p, int c, int q) { return restrict_class(L, p, c, q); }};
}

int unit_class(const Layer& L, int p, int x) {
  DownSet pd = principal_downset(L.frame->poset, p);
  std::vector<int> fam(L.frame->poset.n(), -1);
  for (int q = 0; q < L.frame->poset.n(); ++q)
    if (pd >> q & 1) fam[q] = L.below.res(p, x, q);
  return class_of(L, p, pd, fam);
}

Presheaf materialize(const Layer& L) {
  int n = L.frame->poset.n();
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < static_cast<int>(L.reps[p].size()); ++c)
      ids[p].push_back("s" + std::to_string(c));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!L.frame->poset.leq[q][p]) continue;
      res[p][q].resize(L.reps[p].size());
      for (int c = 0; c < static_cast<int>(L.reps[p].size()); ++c)
        res[p][q][c] = restrict_class(L, p, c, q);
    }
  return make_presheaf(L.frame->poset, std::move(ids), std::move(res));
}

// Both plus layers for one presheaf, heap-allocated so the second layer's
// view of the first stays valid when the context is moved.
struct SheafCtx {
  std::unique_ptr<Layer> l1, l2;
};

SheafCtx make_ctx(const Frame& f, const Nucleus& j, const Presheaf& X) {
  SheafCtx c;
  c.l1 = std::make_unique<Layer>(plus_once(f, j, view_of(X)));
  c.l2 = std::make_unique<Layer>(plus_once(f, j, layer_view(*c.l1)));
  return c;
}

Sheafified ctx_result(const SheafCtx& c, const Presheaf& X) {
  Presheaf sheaf = materialize(*c.l2);
  std::vector<std::vector<int>> comp(X.points());
  for (int p = 0; p < X.points(); ++p) {
    comp[p].resize(X.stalk(p));
    for (int x = 0; x < X.stalk(p); ++x)
      comp[p][x] = unit_class(*c.l2, p, unit_class(*c.l1, p, x));
  }
  PresheafMap unit = make_presheaf_map(X, sheaf, std::move(comp));
  return Sheafified{std::move(sheaf), std::move(unit)};
}

// The induced map on sheafifications, computed on the class structure.
PresheafMap ctx_map(const SheafCtx& cx, const SheafCtx& cy, const Presheaf& WX,
                    const Presheaf& WY, const PresheafMap& m) {
  int n = WX.points();
  // First-layer action on classes: map the representative family pointwise.
  auto act1 = [&](int q, int c) {
    const Rep& r = cx.l1->reps[q][c];
    std::vector<int> fam(n, -1);
    for (int t = 0; t < n; ++t)
      if (r.sieve >> t & 1) fam[t] = m.comp[t][r.fam[t]];
    return class_of(*cy.l1, q, r.sieve, fam);
  };
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    comp[p].resize(cx.l2->reps[p].size());
    for (int c = 0; c < static_cast<int>(cx.l2->reps[p].size()); ++c) {
      const Rep& r = cx.l2->reps[p][c];
      std::vector<int> fam(n, -1);
      for (int t = 0; t < n; ++t)
        if (r.sieve >> t & 1) fam[t] = act1(t, r.fam[t]);
      comp[p][c] = class_of(*cy.l2, p, r.sieve, fam);
    }
  }
  return make_presheaf_map(WX, WY, std::move(comp));
}

}  // namespace

Sheafified sheafify(const Frame& f, const Nucleus& j, const Presheaf& X) {
  require_same_poset(f.poset, X.poset, "sheafify");
  return ctx_result(make_ctx(f, j, X), X);
}

PresheafMap sheafify_map(const Frame& f, const Nucleus& j, const Presheaf& X,
                         const Presheaf& Y, const PresheafMap& m,
                         const Sheafified& sx, const Sheafified& sy) {
  // Rebuild the (deterministic) class structure for source and target.
  SheafCtx cx = make_ctx(f, j, X);
  SheafCtx cy = make_ctx(f, j, Y);
  int n = X.points();
  for (int p = 0; p < n; ++p)
    if (static_cast<int>(cx.l2->reps[p].size()) != sx.sheaf.stalk(p) ||
        static_cast<int>(cy.l2->reps[p].size()) != sy.sheaf.stalk(p))
      throw std::logic_error("sheafification class structure failed to reproduce");
  return ctx_map(cx, cy, sx.sheaf, sy.sheaf, m);
}

// ---------------------------------------------------------------------------
// Open and closed modalities

OpenApplied apply_open(DownSet q, const Presheaf& X) {
  if (!is_downset(X.poset, q)) throw ModelError("BadInput", "open part needs a down-set");
  int n = X.points();
  View v = view_of(X);
  std::vector<std::vector<std::vector<int>>> fams(n);
  std::vector<std::map<std::vector<int>, int>> index(n);
  for (int p = 0; p < n; ++p) {
    fams[p] = families_view(v, q & principal_downset(X.poset, p));
    for (int i = 0; i < static_cast<int>(fams[p].size()); ++i) index[p][fams[p][i]] = i;
  }
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < static_cast<int>(fams[p].size()); ++i)
      ids[p].push_back("f" + std::to_string(i));
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) {
      if (!X.poset.leq[r][p]) continue;
      DownSet rd = q & principal_downset(X.poset, r);
      res[p][r].resize(fams[p].size());
      for (int i = 0; i < static_cast<int>(fams[p].size()); ++i) {
        std::vector<int> cut(n, -1);
        for (int t = 0; t < n; ++t)
          if (rd >> t & 1) cut[t] = fams[p][i][t];
        auto it = index[r].find(cut);
        if (it == index[r].end())
          throw std::logic_error("restricted family over the open part went missing");
        res[p][r][i] = it->second;
      }
    }
  Presheaf out = make_presheaf(X.poset, std::move(ids), std::move(res));
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    comp[p].resize(X.stalk(p));
    DownSet pd = q & principal_downset(X.poset, p);
    for (int x = 0; x < X.stalk(p); ++x) {
      std::vector<int> fam(n, -1);
      for (int t = 0; t < n; ++t)
        if (pd >> t & 1) fam[t] = X.restrict(p, x, t);
      comp[p][x] = index[p].at(fam);
    }
  }
  PresheafMap unit = make_presheaf_map(X, out, std::move(comp));
  return OpenApplied{std::move(out), std::move(unit)};
}

PresheafMap apply_open_map(DownSet q, const Presheaf& X, const Presheaf& Y,
                           const PresheafMap& m, const OpenApplied& ox,
                           const OpenApplied& oy) {
  int n = X.points();
  View vx = view_of(X), vy = view_of(Y);
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    DownSet pd = q & principal_downset(X.poset, p);
    std::vector<std::vector<int>> fx = families_view(vx, pd);
    std::vector<std::vector<int>> fy = families_view(vy, pd);
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < static_cast<int>(fy.size()); ++i) index[fy[i]] = i;
    if (static_cast<int>(fx.size()) != ox.result.stalk(p) ||
        static_cast<int>(fy.size()) != oy.result.stalk(p))
      throw std::logic_error("open-part families failed to reproduce");
    comp[p].resize(fx.size());
    for (int i = 0; i < static_cast<int>(fx.size()); ++i) {
      std::vector<int> mapped(n, -1);
      for (int t = 0; t < n; ++t)
        if (pd >> t & 1) mapped[t] = m.comp[t][fx[i][t]];
      comp[p][i] = index.at(mapped);
    }
  }
  return make_presheaf_map(ox.result, oy.result, std::move(comp));
}

ClosedApplied apply_closed(DownSet q, const Presheaf& X) {
  if (!is_downset(X.poset, q)) throw ModelError("BadInput", "closed part needs a down-set");
  int n = X.points();
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    ids[p] = (q >> p & 1) ? std::vector<std::string>{"*"} : X.ids[p];
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) {
      if (!X.poset.leq[r][p]) continue;
      int src = (q >> p & 1) ? 1 : X.stalk(p);
      res[p][r].resize(src);
      for (int x = 0; x < src; ++x)
        res[p][r][x] = (q >> r & 1) ? 0 : X.res[p][r][x];
      // r ∉ q forces p ∉ q (q is down-closed), so the else branch is sound.
    }
  Presheaf out = make_presheaf(X.poset, std::move(ids), std::move(res));
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    comp[p].resize(X.stalk(p));
    for (int x = 0; x < X.stalk(p); ++x) comp[p][x] = (q >> p & 1) ? 0 : x;
  }
  PresheafMap unit = make_presheaf_map(X, out, std::move(comp));
  return ClosedApplied{std::move(out), std::move(unit)};
}

PresheafMap apply_closed_map(DownSet q, const Presheaf& X, const Presheaf& Y,
                             const PresheafMap& m, const ClosedApplied& cx,
                             const ClosedApplied& cy) {
  int n = X.points();
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    if (q >> p & 1) {
      comp[p] = {0};
    } else {
      comp[p] = m.comp[p];
    }
  }
  return make_presheaf_map(cx.result, cy.result, std::move(comp));
}

Supported support(const Presheaf& X) {
  DownSet s = 0;
  for (int p = 0; p < X.points(); ++p)
    if (X.stalk(p) > 0) s |= 1ull << p;
  if (!is_downset(X.poset, s))
    throw std::logic_error("support of a presheaf must be down-closed");
  Presheaf sub = subterminal_presheaf(X.poset, s);
  std::vector<std::vector<int>> comp(X.points());
  for (int p = 0; p < X.points(); ++p) comp[p].assign(X.stalk(p), 0);
  PresheafMap unit = make_presheaf_map(X, sub, std::move(comp));
  return Supported{s, std::move(unit)};
}

// ---------------------------------------------------------------------------
// Pullbacks and lexness probes

Pullback pullback(const Cospan& s) {
  require_same_poset(s.B.poset, s.D.poset, "pullback");
  require_same_poset(s.C.poset, s.D.poset, "pullback");
  int n = s.D.points();
  std::vector<std::vector<std::pair<int, int>>> elems(n);
  std::vector<std::map<std::pair<int, int>, int>> index(n);
  for (int p = 0; p < n; ++p)
    for (int b = 0; b < s.B.stalk(p); ++b)
      for (int c = 0; c < s.C.stalk(p); ++c)
        if (s.f.comp[p][b] == s.g.comp[p][c]) {
          index[p][{b, c}] = static_cast<int>(elems[p].size());
          elems[p].push_back({b, c});
        }
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    for (auto& [b, c] : elems[p])
      ids[p].push_back("(" + s.B.ids[p][b] + "," + s.C.ids[p][c] + ")");
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) {
      if (!s.D.poset.leq[r][p]) continue;
      res[p][r].resize(elems[p].size());
      for (int i = 0; i < static_cast<int>(elems[p].size()); ++i) {
        auto [b, c] = elems[p][i];
        res[p][r][i] = index[r].at({s.B.res[p][r][b], s.C.res[p][r][c]});
      }
    }
  Presheaf P = make_presheaf(s.D.poset, std::move(ids), std::move(res));
  std::vector<std::vector<int>> tb(n), tc(n);
  for (int p = 0; p < n; ++p)
    for (auto& [b, c] : elems[p]) {
      tb[p].push_back(b);
      tc[p].push_back(c);
    }
  PresheafMap toB = make_presheaf_map(P, s.B, std::move(tb));
  PresheafMap toC = make_presheaf_map(P, s.C, std::move(tc));
  return Pullback{std::move(P), std::move(toB), std::move(toC)};
}

bool lex_probe_sheafify(const Frame& f, const Nucleus& j, const Cospan& s) {
  Pullback pb = pullback(s);
  SheafCtx cp = make_ctx(f, j, pb.P);
  SheafCtx cb = make_ctx(f, j, s.B);
  SheafCtx cc = make_ctx(f, j, s.C);
  SheafCtx cd = make_ctx(f, j, s.D);
  Sheafified sp = ctx_result(cp, pb.P);
  Sheafified sb = ctx_result(cb, s.B);
  Sheafified sc = ctx_result(cc, s.C);
  Sheafified sd = ctx_result(cd, s.D);
  PresheafMap sf = ctx_map(cb, cd, sb.sheaf, sd.sheaf, s.f);
  PresheafMap sg = ctx_map(cc, cd, sc.sheaf, sd.sheaf, s.g);
  Pullback pb2 = pullback(Cospan{sb.sheaf, sc.sheaf, sd.sheaf, sf, sg});
  // Canonical comparison: pair the sheafified projections.
  PresheafMap mb = ctx_map(cp, cb, sp.sheaf, sb.sheaf, pb.toB);
  PresheafMap mc = ctx_map(cp, cc, sp.sheaf, sc.sheaf, pb.toC);
  int n = s.D.points();
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) {
    comp[p].resize(sp.sheaf.stalk(p));
    // Locate (mb, mc) inside the pullback's pair list.
    std::map<std::string, int> index;
    for (int i = 0; i < pb2.P.stalk(p); ++i)
      index[pb2.P.ids[p][i]] = i;
    for (int x = 0; x < sp.sheaf.stalk(p); ++x) {
      std::string key = "(" + sb.sheaf.ids[p][mb.comp[p][x]] + "," +
                        sc.sheaf.ids[p][mc.comp[p][x]] + ")";
      auto it = index.find(key);
      if (it == index.end())
        throw std::logic_error("comparison map does not land in the pullback");
      comp[p][x] = it->second;
    }
  }
  PresheafMap cmp = make_presheaf_map(sp.sheaf, pb2.P, std::move(comp));
  return is_iso(sp.sheaf, pb2.P, cmp);
}

bool lex_probe_support(const Cospan& s) {
  Pullback pb = pullback(s);
  DownSet sp = support(pb.P).support;
  DownSet sb = support(s.B).support;
  DownSet sc = support(s.C).support;
  return sp == (sb & sc);
}

// ---------------------------------------------------------------------------
// Sub-sites

FinitePoset subposet(const FinitePoset& p, DownSet d, std::vector<int>* orig) {
  if (!is_downset(p, d)) throw ModelError("BadInput", "subposet needs a down-set");
  std::vector<int> pts;
  for (int i = 0; i < p.n(); ++i)
    if (d >> i & 1) pts.push_back(i);
  FinitePoset out;
  for (int i : pts) out.elements.push_back(p.elements[i]);
  int m = static_cast<int>(pts.size());
  out.leq.assign(m, std::vector<bool>(m, false));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) out.leq[i][k] = p.leq[pts[i]][pts[k]];
  if (orig) *orig = pts;
  return out;
}

Presheaf restrict_presheaf(const Presheaf& X, DownSet d) {
  std::vector<int> pts;
  FinitePoset sub = subposet(X.poset, d, &pts);
  int m = sub.n();
  std::vector<std::vector<std::string>> ids(m);
  std::vector<std::vector<std::vector<int>>> res(m, std::vector<std::vector<int>>(m));
  for (int i = 0; i < m; ++i) ids[i] = X.ids[pts[i]];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      if (sub.leq[k][i]) res[i][k] = X.res[pts[i]][pts[k]];
  return make_presheaf(sub, std::move(ids), std::move(res));
}

Nucleus restrict_nucleus(const Frame& f, const Nucleus& j, DownSet d,
                         const Frame& subframe) {
  std::vector<int> pts;
  (void)subposet(f.poset, d, &pts);
  auto to_parent = [&](DownSet s) {
    DownSet out = 0;
    for (size_t i = 0; i < pts.size(); ++i)
      if (s >> i & 1) out |= 1ull << pts[i];
    return out;
  };
  auto to_sub = [&](DownSet s) {
    DownSet out = 0;
    for (size_t i = 0; i < pts.size(); ++i)
      if (s >> pts[i] & 1) out |= 1ull << i;
    return out;
  };
  std::vector<int> table(subframe.size());
  for (int a = 0; a < subframe.size(); ++a) {
    int parent = f.index_of(to_parent(subframe.carrier[a]));
    if (parent < 0) throw std::logic_error("sub-site down-set is not a parent down-set");
    DownSet img = f.carrier[j(parent)] & d;
    int sub = subframe.index_of(to_sub(img));
    if (sub < 0) throw std::logic_error("restricted nucleus image is not a down-set");
    table[a] = sub;
  }
  LawWitness w;
  if (!is_nucleus(subframe, table, &w))
    throw std::logic_error("restricting a nucleus to a down-set broke the '" + w.law +
                           "' law");
  return Nucleus{std::move(table)};
}

// ---------------------------------------------------------------------------
// Factorization

namespace {

// The fiber of m over y ∈ Y(p), as a presheaf on the full subposet ↓p.
// fiber_elems returns, per sub-point, the X-stalk indices lying over the
// restriction of y.
Presheaf fiber_presheaf(const Presheaf& X, const Presheaf& Y, const PresheafMap& m,
                        int p, int y, DownSet pd, const std::vector<int>& pts,
                        std::vector<std::vector<int>>* fiber_elems) {
  FinitePoset sub = subposet(X.poset, pd, nullptr);
  int k = sub.n();
  std::vector<std::vector<int>> elems(k);
  std::vector<int> back(X.poset.n(), -1);
  for (int i = 0; i < k; ++i) back[pts[i]] = i;
  for (int i = 0; i < k; ++i) {
    int r = pts[i];
    int yr = Y.restrict(p, y, r);
    for (int x = 0; x < X.stalk(r); ++x)
      if (m.comp[r][x] == yr) elems[i].push_back(x);
  }
  std::vector<std::vector<std::string>> ids(k);
  std::vector<std::vector<std::vector<int>>> res(k, std::vector<std::vector<int>>(k));
  for (int i = 0; i < k; ++i)
    for (int x : elems[i]) ids[i].push_back(X.ids[pts[i]][x]);
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < k; ++t) {
      if (!sub.leq[t][i]) continue;
      res[i][t].resize(elems[i].size());
      for (size_t a = 0; a < elems[i].size(); ++a) {
        int target = X.res[pts[i]][pts[t]][elems[i][a]];
        auto it = std::find(elems[t].begin(), elems[t].end(), target);
        if (it == elems[t].end())
          throw std::logic_error("fiber is not closed under restriction");
        res[i][t][a] = static_cast<int>(it - elems[t].begin());
      }
    }
  if (fiber_elems) *fiber_elems = elems;
  return make_presheaf(sub, std::move(ids), std::move(res));
}

}  // namespace

Factorization factorize(const Frame& f, const Nucleus& j, const Presheaf& X,
                        const Presheaf& Y, const PresheafMap& m) {
  require_same_poset(f.poset, X.poset, "factorize");
  require_same_poset(f.poset, Y.poset, "factorize");
  int n = X.points();
  // Per point: the sub-site, its frame/nucleus, and per y the sheafified fiber.
  std::vector<DownSet> pd(n);
  std::vector<std::vector<int>> pts(n);
  std::vector<std::vector<Sheafified>> fibers(n);                    // [p][y]
  std::vector<std::vector<std::vector<std::vector<int>>>> elems(n);  // [p][y][subpoint]
  std::vector<int> self(n);  // index of p inside its own subposet
  for (int p = 0; p < n; ++p) {
    pd[p] = principal_downset(X.poset, p);
    FinitePoset sub = subposet(X.poset, pd[p], &pts[p]);
    Frame sf = downset_frame(sub);
    Nucleus sj = restrict_nucleus(f, j, pd[p], sf);
    self[p] = static_cast<int>(std::find(pts[p].begin(), pts[p].end(), p) - pts[p].begin());
    fibers[p].reserve(Y.stalk(p));
    elems[p].resize(Y.stalk(p));
    for (int y = 0; y < Y.stalk(p); ++y) {
      Presheaf fib = fiber_presheaf(X, Y, m, p, y, pd[p], pts[p], &elems[p][y]);
      fibers[p].push_back(sheafify(sf, sj, fib));
    }
  }
  // Z stalks: (y, class) pairs, y-major.
  std::vector<std::vector<std::pair<int, int>>> zelems(n);
  std::vector<std::vector<int>> offset(n);
  for (int p = 0; p < n; ++p) {
    offset[p].resize(Y.stalk(p) + 1, 0);
    for (int y = 0; y < Y.stalk(p); ++y) {
      offset[p][y] = static_cast<int>(zelems[p].size());
      int k = fibers[p][y].sheaf.stalk(self[p]);
      for (int c = 0; c < k; ++c) zelems[p].push_back({y, c});
    }
    offset[p][Y.stalk(p)] = static_cast<int>(zelems[p].size());
  }
  std::vector<std::vector<std::string>> ids(n);
  std::vector<std::vector<std::vector<int>>> res(n, std::vector<std::vector<int>>(n));
  for (int p = 0; p < n; ++p)
    for (auto& [y, c] : zelems[p])
      ids[p].push_back(Y.ids[p][y] + "." + std::to_string(c));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (!X.poset.leq[q][p]) continue;
      res[p][q].resize(zelems[p].size());
      int qinp = static_cast<int>(
          std::find(pts[p].begin(), pts[p].end(), q) - pts[p].begin());
      for (size_t i = 0; i < zelems[p].size(); ++i) {
        auto [y, c] = zelems[p][i];
        int yq = Y.restrict(p, y, q);
        // Restrict the class inside the ↓p computation, then identify the
        // result with the ↓q computation (same canonical enumeration).
        int cq = fibers[p][y].sheaf.restrict(self[p], c, qinp);
        if (cq >= fibers[q][yq].sheaf.stalk(self[q]))
          throw std::logic_error(
              "fiberwise sheafification disagreed between nested sub-sites");
        res[p][q][i] = offset[q][yq] + cq;
      }
    }
  Presheaf Z = make_presheaf(X.poset, std::move(ids), std::move(res));
  // pL: x ↦ (m(x), unit of the fiber sheafification at x).
  std::vector<std::vector<int>> lcomp(n);
  for (int p = 0; p < n; ++p) {
    lcomp[p].resize(X.stalk(p));
    for (int x = 0; x < X.stalk(p); ++x) {
      int y = m.comp[p][x];
      const auto& fe = elems[p][y][self[p]];
      int fx = static_cast<int>(std::find(fe.begin(), fe.end(), x) - fe.begin());
      lcomp[p][x] = offset[p][y] + fibers[p][y].unit.comp[self[p]][fx];
    }
  }
  PresheafMap pL = make_presheaf_map(X, Z, std::move(lcomp));
  std::vector<std::vector<int>> rcomp(n);
  for (int p = 0; p < n; ++p)
    for (auto& [y, c] : zelems[p]) rcomp[p].push_back(y);
  PresheafMap pR = make_presheaf_map(Z, Y, std::move(rcomp));
  for (int p = 0; p < n; ++p)
    for (int x = 0; x < X.stalk(p); ++x)
      if (pR.comp[p][pL.comp[p][x]] != m.comp[p][x])
        throw std::logic_error("factorization legs do not compose to the given map");
  return Factorization{std::move(Z), std::move(pL), std::move(pR)};
}

namespace {

// The fiber of a map g: W → V over v ∈ V(p), on the sub-site ↓p, together
// with is_sheaf / connectivity probes.
Presheaf map_fiber(const Presheaf& W, const Presheaf& V, const PresheafMap& g,
                   int p, int v) {
  DownSet pd = principal_downset(W.poset, p);
  std::vector<int> pts;
  FinitePoset sub = subposet(W.poset, pd, &pts);
  int k = sub.n();
  std::vector<std::vector<int>> elems(k);
  for (int i = 0; i < k; ++i) {
    int r = pts[i];
    int vr = V.restrict(p, v, r);
    for (int wv = 0; wv < W.stalk(r); ++wv)
      if (g.comp[r][wv] == vr) elems[i].push_back(wv);
  }
  std::vector<std::vector<std::string>> ids(k);
  std::vector<std::vector<std::vector<int>>> res(k, std::vector<std::vector<int>>(k));
  for (int i = 0; i < k; ++i)
    for (int wv : elems[i]) ids[i].push_back(W.ids[pts[i]][wv]);
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < k; ++t) {
      if (!sub.leq[t][i]) continue;
      res[i][t].resize(elems[i].size());
      for (size_t a = 0; a < elems[i].size(); ++a) {
        int target = W.res[pts[i]][pts[t]][elems[i][a]];
        auto it = std::find(elems[t].begin(), elems[t].end(), target);
        if (it == elems[t].end())
          throw std::logic_error("map fiber is not closed under restriction");
        res[i][t][a] = static_cast<int>(it - elems[t].begin());
      }
    }
  return make_presheaf(sub, std::move(ids), std::move(res));
}

}  // namespace

bool fibers_are_sheaves(const Frame& f, const Nucleus& j, const Presheaf& Z,
                        const Presheaf& Y, const PresheafMap& pR) {
  for (int p = 0; p < Y.points(); ++p) {
    DownSet pd = principal_downset(Y.poset, p);
    FinitePoset sub = subposet(Y.poset, pd, nullptr);
    Frame sf = downset_frame(sub);
    Nucleus sj = restrict_nucleus(f, j, pd, sf);
    for (int y = 0; y < Y.stalk(p); ++y)
      if (!is_sheaf(sf, sj, map_fiber(Z, Y, pR, p, y))) return false;
  }
  return true;
}

bool fibers_are_connected(const Frame& f, const Nucleus& j, const Presheaf& X,
                          const Presheaf& Z, const PresheafMap& pL) {
  for (int p = 0; p < Z.points(); ++p) {
    DownSet pd = principal_downset(Z.poset, p);
    FinitePoset sub = subposet(Z.poset, pd, nullptr);
    Frame sf = downset_frame(sub);
    Nucleus sj = restrict_nucleus(f, j, pd, sf);
    for (int z = 0; z < Z.stalk(p); ++z) {
      Sheafified s = sheafify(sf, sj, map_fiber(X, Z, pL, p, z));
      for (int q = 0; q < sub.n(); ++q)
        if (s.sheaf.stalk(q) != 1) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fracture and gluing

FractureReport fracture_check(DownSet q, const Presheaf& X) {
  FractureReport rep;
  rep.X = X;
  OpenApplied open = apply_open(q, X);
  ClosedApplied closed = apply_closed(q, X);
  ClosedApplied mixed = apply_closed(q, open.result);
  rep.openCorner = open.result;
  rep.closedCorner = closed.result;
  rep.mixedCorner = mixed.result;
  rep.toOpen = open.unit;
  rep.toClosed = closed.unit;
  rep.openToMixed = mixed.unit;
  rep.closedToMixed = apply_closed_map(q, X, open.result, open.unit, closed, mixed);
  rep.verdict = true;
  for (int p = 0; p < X.points() && rep.verdict; ++p) {
    // Pairs (o, c) that agree in the mixed corner.
    std::vector<std::pair<int, int>> pairs;
    for (int o = 0; o < rep.openCorner.stalk(p); ++o)
      for (int c = 0; c < rep.closedCorner.stalk(p); ++c)
        if (rep.openToMixed.comp[p][o] == rep.closedToMixed.comp[p][c])
          pairs.push_back({o, c});
    std::set<std::pair<int, int>> seen;
    bool ok = static_cast<int>(pairs.size()) == X.stalk(p);
    for (int x = 0; ok && x < X.stalk(p); ++x) {
      std::pair<int, int> im = {rep.toOpen.comp[p][x], rep.toClosed.comp[p][x]};
      if (!seen.insert(im).second) ok = false;
    }
    if (!ok) {
      rep.verdict = false;
      rep.witness_point = p;
      rep.witness = "at " + X.poset.elements[p] + ": |X| = " +
                    std::to_string(X.stalk(p)) + " but the pullback has " +
                    std::to_string(pairs.size()) + " elements";
    }
  }
  return rep;
}

Unglued unglue(DownSet q, const Presheaf& X) {
  OpenApplied open = apply_open(q, X);
  ClosedApplied closed = apply_closed(q, X);
  ClosedApplied closedOfOpen = apply_closed(q, open.result);
  PresheafMap g = apply_closed_map(q, X, open.result, open.unit, closed, closedOfOpen);
  return Unglued{open.result, closed.result, std::move(g)};
}

Presheaf glue(DownSet q, const Presheaf& B, const Presheaf& C, const PresheafMap& g) {
  require_same_poset(B.poset, C.poset, "glue");
  OpenApplied ob = apply_open(q, B);
  if (!is_iso(B, ob.result, ob.unit))
    throw ModelError("NotOpenModal", "the first gluing argument is not open-modal");
  for (int p = 0; p < C.points(); ++p)
    if ((q >> p & 1) && C.stalk(p) != 1)
      throw ModelError("NotClosedModal", "the second gluing argument is not closed-modal");
  ClosedApplied cb = apply_closed(q, B);
  PresheafMap gv = make_presheaf_map(C, cb.result, g.comp);  // re-validate
  Cospan cs{B, C, cb.result, cb.unit, gv};
  return pullback(cs).P;
}

// ---------------------------------------------------------------------------
// Exhaustive generators

std::vector<Presheaf> all_presheaves(const FinitePoset& p, int max_stalk) {
  int n = p.n();
  // Cover pairs (upper, lower).
  std::vector<std::pair<int, int>> covers;
  for (int hi = 0; hi < n; ++hi)
    for (int lo = 0; lo < n; ++lo) {
      if (lo == hi || !p.leq[lo][hi]) continue;
      bool direct = true;
      for (int mid = 0; mid < n; ++mid)
        if (mid != lo && mid != hi && p.leq[lo][mid] && p.leq[mid][hi]) direct = false;
      if (direct) covers.push_back({hi, lo});
    }
  // Counting pre-pass: bound the total number of candidates before
  // allocating anything, so the guard cannot be outrun by accumulation.
  {
    long long grand = 0;
    std::vector<int> sizes(n, 0);
    while (true) {
      long long total = 1;
      bool possible = true;
      for (auto [hi, lo] : covers) {
        if (sizes[hi] > 0 && sizes[lo] == 0) possible = false;
        for (int i = 0; i < sizes[hi] && total <= 400'000; ++i)
          total *= std::max(sizes[lo], 1);
      }
      if (possible) grand += total;
      if (grand > 400'000)
        throw ModelError("TooLarge", "presheaf enumeration exceeded its budget");
      int i = 0;
      while (i < n && ++sizes[i] > max_stalk) sizes[i++] = 0;
      if (i == n) break;
      if (n == 0) break;
    }
  }
  std::vector<Presheaf> out;
  std::vector<int> sizes(n, 0);
  while (true) {
    // All restriction choices on cover pairs for this size assignment.
    std::vector<long long> count(covers.size(), 1);
    long long total = 1;
    bool possible = true;
    for (size_t e = 0; e < covers.size(); ++e) {
      auto [hi, lo] = covers[e];
      if (sizes[hi] > 0 && sizes[lo] == 0) possible = false;
      long long c = 1;
      for (int i = 0; i < sizes[hi]; ++i) c *= std::max(sizes[lo], 1);
      count[e] = c;
      total *= c;
    }
    if (possible) {
      std::vector<int> pick(covers.size(), 0);
      for (long long it = 0; it < total; ++it) {
        std::vector<std::vector<std::string>> ids(n);
        for (int pt = 0; pt < n; ++pt)
          for (int i = 0; i < sizes[pt]; ++i)
            ids[pt].push_back(p.elements[pt] + std::to_string(i));
        std::vector<std::vector<std::vector<int>>> res(
            n, std::vector<std::vector<int>>(n));
        for (size_t e = 0; e < covers.size(); ++e) {
          auto [hi, lo] = covers[e];
          std::vector<int> table(sizes[hi]);
          long long code = pick[e];
          for (int i = 0; i < sizes[hi]; ++i) {
            table[i] = static_cast<int>(code % std::max(sizes[lo], 1));
            code /= std::max(sizes[lo], 1);
          }
          res[hi][lo] = std::move(table);
        }
        try {
          out.push_back(make_presheaf(p, std::move(ids), std::move(res)));
        } catch (const ModelError&) {
          // Inconsistent along multiple paths (possible on 4+ element posets).
        }
        size_t e = 0;
        while (e < covers.size() && ++pick[e] == count[e]) pick[e++] = 0;
        if (e == covers.size()) break;
        if (covers.empty()) break;
      }
    }
    int i = 0;
    while (i < n && ++sizes[i] > max_stalk) sizes[i++] = 0;
    if (i == n) break;
    if (n == 0) break;
  }
  return out;
}

namespace {

// Backtracking enumeration of natural transformations: assign components one
// stalk element at a time, rejecting naturality violations as soon as both
// endpoints of a constraint are assigned.
void maps_rec(const Presheaf& X, const Presheaf& Y, int p, int x,
              std::vector<std::vector<int>>& comp, std::vector<PresheafMap>& out,
              long long& nodes) {
  if (p == X.points()) {
    out.push_back(PresheafMap{comp});
    return;
  }
  if (x == X.stalk(p)) {
    maps_rec(X, Y, p + 1, 0, comp, out, nodes);
    return;
  }
  for (int y = 0; y < Y.stalk(p); ++y) {
    if (++nodes > 20'000'000)
      throw ModelError("TooLarge", "map enumeration exceeded its budget");
    bool ok = true;
    for (int q = 0; ok && q < p; ++q) {
      if (X.poset.leq[q][p] && Y.res[p][q][y] != comp[q][X.res[p][q][x]]) ok = false;
      if (X.poset.leq[p][q])
        for (int z = 0; ok && z < X.stalk(q); ++z)
          if (X.res[q][p][z] == x && Y.res[q][p][comp[q][z]] != y) ok = false;
    }
    if (!ok) continue;
    comp[p][x] = y;
    maps_rec(X, Y, p, x + 1, comp, out, nodes);
  }
}

}  // namespace

std::vector<PresheafMap> all_maps(const Presheaf& X, const Presheaf& Y) {
  if (!same_poset(X.poset, Y.poset)) return {};
  int n = X.points();
  for (int p = 0; p < n; ++p)
    if (X.stalk(p) > 0 && Y.stalk(p) == 0) return {};
  std::vector<std::vector<int>> comp(n);
  for (int p = 0; p < n; ++p) comp[p].assign(X.stalk(p), 0);
  std::vector<PresheafMap> out;
  long long nodes = 0;
  maps_rec(X, Y, 0, 0, comp, out, nodes);
  return out;
}

static bool poset_isomorphic(const FinitePoset& a, const FinitePoset& b) {
  if (a.n() != b.n()) return false;
  int n = a.n();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; ok && i < n; ++i)
      for (int k = 0; ok && k < n; ++k)
        if (a.leq[i][k] != b.leq[perm[i]][perm[k]]) ok = false;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return n == 0;
}

std::vector<FinitePoset> poset_iso_classes(int n) {
  std::vector<FinitePoset> out;
  for (const FinitePoset& p : all_posets(n)) {
    bool fresh = true;
    for (const FinitePoset& q : out)
      if (poset_isomorphic(p, q)) {
        fresh = false;
        break;
      }
    if (fresh) out.push_back(p);
  }
  return out;
}

}  // namespace modal::sem
