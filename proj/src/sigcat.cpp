#include "hwb/sigcat.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

namespace hwb {

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<int> kNoIndices;

}  // namespace

std::string FunSym::str() const {
  return name + ": " + join(arity, " ") + (arity.empty() ? "-> " : " -> ") + result;
}

std::string RelSym::str() const { return name + ": " + join(arity, " "); }

RawSignature& RawSignature::sort(const std::string& s, bool is_rigid) {
  full.sorts.push_back(s);
  if (is_rigid) rigid.sorts.push_back(s);
  return *this;
}

RawSignature& RawSignature::op(const std::string& name, std::vector<std::string> arity,
                               const std::string& result, bool is_rigid) {
  FunSym f{name, std::move(arity), result};
  full.functions.push_back(f);
  if (is_rigid) rigid.functions.push_back(f);
  return *this;
}

RawSignature& RawSignature::rel(const std::string& name, std::vector<std::string> arity, bool is_rigid) {
  RelSym r{name, std::move(arity)};
  full.relations.push_back(r);
  if (is_rigid) rigid.relations.push_back(r);
  return *this;
}

RawSignature& RawSignature::nominal(const std::string& k) {
  nominals.push_back(k);
  return *this;
}

RawSignature& RawSignature::modality(const std::string& name, int rank) {
  modalities.push_back({name, rank});
  return *this;
}

// ---------------------------------------------------------------------------
// HybridSignature

int HybridSignature::sort_index(const std::string& s) const {
  auto it = sort_ix_.find(s);
  return it == sort_ix_.end() ? -1 : it->second;
}
int HybridSignature::nominal_index(const std::string& k) const {
  auto it = nom_ix_.find(k);
  return it == nom_ix_.end() ? -1 : it->second;
}
int HybridSignature::modality_index(const std::string& m) const {
  auto it = mod_ix_.find(m);
  return it == mod_ix_.end() ? -1 : it->second;
}
int HybridSignature::fun_index(const FunSym& f) const {
  auto it = fun_ix_.find(f);
  return it == fun_ix_.end() ? -1 : it->second;
}
int HybridSignature::rel_index(const RelSym& r) const {
  auto it = rel_ix_.find(r);
  return it == rel_ix_.end() ? -1 : it->second;
}
const std::vector<int>& HybridSignature::funs_named(const std::string& name) const {
  auto it = funs_by_name_.find(name);
  return it == funs_by_name_.end() ? kNoIndices : it->second;
}
const std::vector<int>& HybridSignature::rels_named(const std::string& name) const {
  auto it = rels_by_name_.find(name);
  return it == rels_by_name_.end() ? kNoIndices : it->second;
}

bool HybridSignature::is_rigid_sort(const std::string& s) const {
  int i = sort_index(s);
  return i >= 0 && sort_rigid[i];
}

bool HybridSignature::is_extended_rigid(const std::string& s) const { return s == kNom || is_rigid_sort(s); }

FolSignature HybridSignature::rigid_part() const {
  FolSignature f;
  for (size_t i = 0; i < sorts.size(); ++i)
    if (sort_rigid[i]) f.sorts.insert(sorts[i]);
  for (size_t i = 0; i < funs.size(); ++i)
    if (fun_rigid[i]) f.functions.insert(funs[i]);
  for (size_t i = 0; i < rels.size(); ++i)
    if (rel_rigid[i]) f.relations.insert(rels[i]);
  return f;
}

FolSignature HybridSignature::full_part() const {
  FolSignature f;
  f.sorts.insert(sorts.begin(), sorts.end());
  f.functions.insert(funs.begin(), funs.end());
  f.relations.insert(rels.begin(), rels.end());
  return f;
}

SortClass HybridSignature::sort_class() const {
  SortClass c;
  for (size_t i = 0; i < sorts.size(); ++i) (sort_rigid[i] ? c.rigid_sorts : c.flexible_sorts).insert(sorts[i]);
  c.extended_rigid_sorts = c.rigid_sorts;
  c.extended_rigid_sorts.insert(kNom);
  return c;
}

RawSignature HybridSignature::raw() const {
  RawSignature r;
  r.nominals = nominals;
  r.modalities = modalities;
  for (size_t i = 0; i < sorts.size(); ++i) r.sort(sorts[i], sort_rigid[i]);
  for (size_t i = 0; i < funs.size(); ++i) r.op(funs[i].name, funs[i].arity, funs[i].result, fun_rigid[i]);
  for (size_t i = 0; i < rels.size(); ++i) r.rel(rels[i].name, rels[i].arity, rel_rigid[i]);
  return r;
}

std::string HybridSignature::canonical_text() const {
  std::ostringstream os;
  os << "nominals:" << join(nominals, ",") << "\n";
  os << "modalities:";
  for (const auto& m : modalities) os << m.name << "/" << m.rank << ",";
  os << "\nsorts:";
  for (size_t i = 0; i < sorts.size(); ++i) os << (sort_rigid[i] ? "!" : "") << sorts[i] << ",";
  os << "\nfuns:";
  for (size_t i = 0; i < funs.size(); ++i) os << (fun_rigid[i] ? "!" : "") << funs[i].str() << ",";
  os << "\nrels:";
  for (size_t i = 0; i < rels.size(); ++i) os << (rel_rigid[i] ? "!" : "") << rels[i].str() << ",";
  os << "\n";
  return os.str();
}

void HybridSignature::index() {
  sort_ix_.clear();
  nom_ix_.clear();
  mod_ix_.clear();
  fun_ix_.clear();
  rel_ix_.clear();
  funs_by_name_.clear();
  rels_by_name_.clear();
  for (size_t i = 0; i < sorts.size(); ++i) sort_ix_[sorts[i]] = static_cast<int>(i);
  for (size_t i = 0; i < nominals.size(); ++i) nom_ix_[nominals[i]] = static_cast<int>(i);
  for (size_t i = 0; i < modalities.size(); ++i) mod_ix_[modalities[i].name] = static_cast<int>(i);
  fun_arg_sorts.assign(funs.size(), {});
  fun_result_sort.assign(funs.size(), -1);
  for (size_t i = 0; i < funs.size(); ++i) {
    fun_ix_[funs[i]] = static_cast<int>(i);
    funs_by_name_[funs[i].name].push_back(static_cast<int>(i));
    for (const auto& a : funs[i].arity) fun_arg_sorts[i].push_back(sort_index(a));
    fun_result_sort[i] = sort_index(funs[i].result);
  }
  rel_arg_sorts.assign(rels.size(), {});
  for (size_t i = 0; i < rels.size(); ++i) {
    rel_ix_[rels[i]] = static_cast<int>(i);
    rels_by_name_[rels[i].name].push_back(static_cast<int>(i));
    for (const auto& a : rels[i].arity) rel_arg_sorts[i].push_back(sort_index(a));
  }
  fingerprint = fnv1a_hex(canonical_text());
}

SigPtr validate_signature(const RawSignature& raw) {
  std::vector<std::string> v;
  auto sig = std::make_shared<HybridSignature>();

  std::set<std::string> noms;
  for (const auto& k : raw.nominals)
    if (!noms.insert(k).second) v.push_back("duplicate nominal " + k);
  std::map<std::string, int> mods;
  for (const auto& m : raw.modalities) {
    if (m.rank != 1 && m.rank != 2) v.push_back("modality " + m.name + " has rank " + std::to_string(m.rank));
    if (!mods.emplace(m.name, m.rank).second) v.push_back("duplicate modality " + m.name);
  }

  std::set<std::string> sorts;
  for (const auto& s : raw.full.sorts) {
    if (s == kNom) v.push_back("sort name nom is reserved");
    if (!sorts.insert(s).second) v.push_back("duplicate sort " + s);
  }
  auto check_profile = [&](const std::string& what, const std::vector<std::string>& ar, const std::string* res,
                           const std::set<std::string>& universe, const char* reason) {
    for (const auto& a : ar)
      if (!universe.count(a)) v.push_back(what + ": " + reason + " " + a);
    if (res && !universe.count(*res)) v.push_back(what + ": " + reason + " " + *res);
  };
  std::set<FunSym> funs;
  for (const auto& f : raw.full.functions) {
    check_profile("op " + f.str(), f.arity, &f.result, sorts, "unknown sort");
    if (!funs.insert(f).second) v.push_back("duplicate profile op " + f.str());
  }
  std::set<RelSym> rels;
  for (const auto& r : raw.full.relations) {
    check_profile("rel " + r.str(), r.arity, nullptr, sorts, "unknown sort");
    if (!rels.insert(r).second) v.push_back("duplicate profile rel " + r.str());
  }

  std::set<std::string> rsorts;
  for (const auto& s : raw.rigid.sorts) {
    if (!sorts.count(s)) v.push_back("rigid sort " + s + " is not a sort");
    if (!rsorts.insert(s).second) v.push_back("duplicate rigid sort " + s);
  }
  std::set<FunSym> rfuns;
  for (const auto& f : raw.rigid.functions) {
    if (!funs.count(f)) v.push_back("rigid op " + f.str() + " is not an op");
    check_profile("rigid op " + f.str(), f.arity, &f.result, rsorts, "rigid profile uses non-rigid sort");
    if (!rfuns.insert(f).second) v.push_back("duplicate rigid op " + f.str());
  }
  std::set<RelSym> rrels;
  for (const auto& r : raw.rigid.relations) {
    if (!rels.count(r)) v.push_back("rigid rel " + r.str() + " is not a rel");
    check_profile("rigid rel " + r.str(), r.arity, nullptr, rsorts, "rigid profile uses non-rigid sort");
    if (!rrels.insert(r).second) v.push_back("duplicate rigid rel " + r.str());
  }
  if (!v.empty()) throw ValidationError(std::move(v));

  sig->nominals.assign(noms.begin(), noms.end());
  for (const auto& [n, r] : mods) sig->modalities.push_back({n, r});
  for (const auto& s : sorts) {
    sig->sorts.push_back(s);
    sig->sort_rigid.push_back(rsorts.count(s) > 0);
  }
  for (const auto& f : funs) {
    sig->funs.push_back(f);
    sig->fun_rigid.push_back(rfuns.count(f) > 0);
  }
  for (const auto& r : rels) {
    sig->rels.push_back(r);
    sig->rel_rigid.push_back(rrels.count(r) > 0);
  }
  sig->index();
  return sig;
}

// ---------------------------------------------------------------------------
// Morphisms

const std::string& SignatureMorphism::map_sort(const std::string& s) const {
  if (s == kNom) return kNom;
  int i = source->sort_index(s);
  if (i < 0) throw ResolveError("sort " + s + " not in source of " + name);
  return target->sorts[sort_map[i]];
}

FunSym SignatureMorphism::map_fun(const FunSym& f) const {
  int i = source->fun_index(f);
  if (i < 0) throw ResolveError("op " + f.str() + " not in source of " + name);
  return target->funs[fun_map[i]];
}

RelSym SignatureMorphism::map_rel(const RelSym& r) const {
  int i = source->rel_index(r);
  if (i < 0) throw ResolveError("rel " + r.str() + " not in source of " + name);
  return target->rels[rel_map[i]];
}

const std::string& SignatureMorphism::map_nominal(const std::string& k) const {
  int i = source->nominal_index(k);
  if (i < 0) throw ResolveError("nominal " + k + " not in source of " + name);
  return target->nominals[nom_map[i]];
}

const std::string& SignatureMorphism::map_modality(const std::string& m) const {
  int i = source->modality_index(m);
  if (i < 0) throw ResolveError("modality " + m + " not in source of " + name);
  return target->modalities[mod_map[i]].name;
}

bool SignatureMorphism::injective_on_sorts() const {
  std::set<int> seen(sort_map.begin(), sort_map.end());
  return seen.size() == sort_map.size();
}

RawMorphism SignatureMorphism::raw() const {
  RawMorphism r;
  for (size_t i = 0; i < sort_map.size(); ++i) r.sorts[source->sorts[i]] = target->sorts[sort_map[i]];
  for (size_t i = 0; i < fun_map.size(); ++i) r.functions.emplace_back(source->funs[i], target->funs[fun_map[i]].name);
  for (size_t i = 0; i < rel_map.size(); ++i) r.relations.emplace_back(source->rels[i], target->rels[rel_map[i]].name);
  for (size_t i = 0; i < nom_map.size(); ++i) r.nominals[source->nominals[i]] = target->nominals[nom_map[i]];
  for (size_t i = 0; i < mod_map.size(); ++i)
    r.modalities[source->modalities[i].name] = target->modalities[mod_map[i]].name;
  return r;
}

bool SignatureMorphism::operator==(const SignatureMorphism& o) const {
  return source->fingerprint == o.source->fingerprint && target->fingerprint == o.target->fingerprint &&
         sort_map == o.sort_map && fun_map == o.fun_map && rel_map == o.rel_map && nom_map == o.nom_map &&
         mod_map == o.mod_map;
}

SignatureMorphism validate_morphism(const SigPtr& source, const SigPtr& target, const RawMorphism& raw,
                                    const std::string& name) {
  std::vector<SymbolIssue> issues;
  SignatureMorphism m;
  m.name = name;
  m.source = source;
  m.target = target;
  m.sort_map.assign(source->sorts.size(), -1);
  m.fun_map.assign(source->funs.size(), -1);
  m.rel_map.assign(source->rels.size(), -1);
  m.nom_map.assign(source->nominals.size(), -1);
  m.mod_map.assign(source->modalities.size(), -1);

  for (const auto& [s, t] : raw.sorts) {
    int i = source->sort_index(s);
    int j = target->sort_index(t);
    if (i < 0) {
      issues.push_back({"sort " + s, "not a source sort"});
      continue;
    }
    if (j < 0) {
      issues.push_back({"sort " + s, "target sort " + t + " does not exist"});
      continue;
    }
    if (source->sort_rigid[i] && !target->sort_rigid[j])
      issues.push_back({"sort " + s, "rigid sort mapped to flexible sort " + t});
    m.sort_map[i] = j;
  }
  for (size_t i = 0; i < m.sort_map.size(); ++i)
    if (m.sort_map[i] < 0 && !raw.sorts.count(source->sorts[i]))
      issues.push_back({"sort " + source->sorts[i], "unmapped"});

  auto mapped = [&](const std::string& s) -> std::string {
    int i = source->sort_index(s);
    if (i < 0 || m.sort_map[i] < 0) return "?";
    return target->sorts[m.sort_map[i]];
  };

  for (const auto& [f, t] : raw.functions) {
    int i = source->fun_index(f);
    if (i < 0) {
      issues.push_back({"op " + f.str(), "not a source op"});
      continue;
    }
    FunSym g{t, {}, mapped(f.result)};
    for (const auto& a : f.arity) g.arity.push_back(mapped(a));
    int j = target->fun_index(g);
    if (j < 0) {
      int same_name = static_cast<int>(target->funs_named(t).size());
      issues.push_back({"op " + f.str(), same_name ? "profile mismatch: target has no " + g.str()
                                                   : "target op " + t + " does not exist"});
      continue;
    }
    if (source->fun_rigid[i] && !target->fun_rigid[j])
      issues.push_back({"op " + f.str(), "rigid op mapped to flexible op " + g.str()});
    m.fun_map[i] = j;
  }
  for (size_t i = 0; i < m.fun_map.size(); ++i) {
    bool listed = std::any_of(raw.functions.begin(), raw.functions.end(),
                              [&](const auto& e) { return e.first == source->funs[i]; });
    if (!listed) issues.push_back({"op " + source->funs[i].str(), "unmapped"});
  }

  for (const auto& [r, t] : raw.relations) {
    int i = source->rel_index(r);
    if (i < 0) {
      issues.push_back({"rel " + r.str(), "not a source rel"});
      continue;
    }
    RelSym g{t, {}};
    for (const auto& a : r.arity) g.arity.push_back(mapped(a));
    int j = target->rel_index(g);
    if (j < 0) {
      issues.push_back({"rel " + r.str(), target->rels_named(t).empty() ? "target rel " + t + " does not exist"
                                                                         : "profile mismatch: target has no " + g.str()});
      continue;
    }
    if (source->rel_rigid[i] && !target->rel_rigid[j])
      issues.push_back({"rel " + r.str(), "rigid rel mapped to flexible rel " + g.str()});
    m.rel_map[i] = j;
  }
  for (size_t i = 0; i < m.rel_map.size(); ++i) {
    bool listed = std::any_of(raw.relations.begin(), raw.relations.end(),
                              [&](const auto& e) { return e.first == source->rels[i]; });
    if (!listed) issues.push_back({"rel " + source->rels[i].str(), "unmapped"});
  }

  for (const auto& [k, t] : raw.nominals) {
    int i = source->nominal_index(k);
    int j = target->nominal_index(t);
    if (i < 0) issues.push_back({"nominal " + k, "not a source nominal"});
    else if (j < 0) issues.push_back({"nominal " + k, "target nominal " + t + " does not exist"});
    else m.nom_map[i] = j;
  }
  for (size_t i = 0; i < m.nom_map.size(); ++i)
    if (!raw.nominals.count(source->nominals[i])) issues.push_back({"nominal " + source->nominals[i], "unmapped"});

  for (const auto& [l, t] : raw.modalities) {
    int i = source->modality_index(l);
    int j = target->modality_index(t);
    if (i < 0) issues.push_back({"modality " + l, "not a source modality"});
    else if (j < 0) issues.push_back({"modality " + l, "target modality " + t + " does not exist"});
    else if (source->modalities[i].rank != target->modalities[j].rank)
      issues.push_back({"modality " + l, "rank mismatch with " + t});
    else m.mod_map[i] = j;
  }
  for (size_t i = 0; i < m.mod_map.size(); ++i)
    if (!raw.modalities.count(source->modalities[i].name))
      issues.push_back({"modality " + source->modalities[i].name, "unmapped"});

  if (!issues.empty()) throw MorphismError(std::move(issues));
  return m;
}

SignatureMorphism identity_morphism(const SigPtr& sig) { return inclusion_morphism(sig, sig); }

SignatureMorphism inclusion_morphism(const SigPtr& source, const SigPtr& target) {
  RawMorphism raw;
  for (const auto& s : source->sorts) raw.sorts[s] = s;
  for (const auto& f : source->funs) raw.functions.emplace_back(f, f.name);
  for (const auto& r : source->rels) raw.relations.emplace_back(r, r.name);
  for (const auto& k : source->nominals) raw.nominals[k] = k;
  for (const auto& l : source->modalities) raw.modalities[l.name] = l.name;
  return validate_morphism(source, target, raw, source == target ? "id" : "incl");
}

SignatureMorphism compose(const SignatureMorphism& first, const SignatureMorphism& second) {
  if (first.target->fingerprint != second.source->fingerprint)
    throw CompositionError("cannot compose " + first.name + " with " + second.name +
                           ": middle signatures differ");
  SignatureMorphism m;
  m.name = first.name + ";" + second.name;
  m.source = first.source;
  m.target = second.target;
  auto comp = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = b[a[i]];
    return out;
  };
  m.sort_map = comp(first.sort_map, second.sort_map);
  m.fun_map = comp(first.fun_map, second.fun_map);
  m.rel_map = comp(first.rel_map, second.rel_map);
  m.nom_map = comp(first.nom_map, second.nom_map);
  m.mod_map = comp(first.mod_map, second.mod_map);
  return m;
}

// ---------------------------------------------------------------------------
// Squares and pushouts

std::vector<std::string> SignatureSquare::commutation_failures() const {
  std::vector<std::string> out;
  const auto& src = *chi.source;
  for (size_t i = 0; i < src.sorts.size(); ++i)
    if (delta_a.sort_map[chi.sort_map[i]] != chi_b.sort_map[delta.sort_map[i]]) out.push_back("sort " + src.sorts[i]);
  for (size_t i = 0; i < src.funs.size(); ++i)
    if (delta_a.fun_map[chi.fun_map[i]] != chi_b.fun_map[delta.fun_map[i]]) out.push_back("op " + src.funs[i].str());
  for (size_t i = 0; i < src.rels.size(); ++i)
    if (delta_a.rel_map[chi.rel_map[i]] != chi_b.rel_map[delta.rel_map[i]]) out.push_back("rel " + src.rels[i].str());
  for (size_t i = 0; i < src.nominals.size(); ++i)
    if (delta_a.nom_map[chi.nom_map[i]] != chi_b.nom_map[delta.nom_map[i]]) out.push_back("nominal " + src.nominals[i]);
  for (size_t i = 0; i < src.modalities.size(); ++i)
    if (delta_a.mod_map[chi.mod_map[i]] != chi_b.mod_map[delta.mod_map[i]])
      out.push_back("modality " + src.modalities[i].name);
  return out;
}

SignatureSquare make_square(SignatureMorphism chi, SignatureMorphism delta, SignatureMorphism delta_a,
                            SignatureMorphism chi_b, const std::string& name) {
  std::vector<std::string> problems;
  if (chi.source->fingerprint != delta.source->fingerprint) problems.push_back("span legs have different sources");
  if (chi.target->fingerprint != delta_a.source->fingerprint) problems.push_back("delta_a does not start at Delta_a");
  if (delta.target->fingerprint != chi_b.source->fingerprint) problems.push_back("chi_b does not start at Delta_b");
  if (delta_a.target->fingerprint != chi_b.target->fingerprint) problems.push_back("cospan legs have different targets");
  if (!problems.empty()) throw ValidationError(problems);
  SignatureSquare sq{name, std::move(chi), std::move(delta), std::move(delta_a), std::move(chi_b)};
  auto fails = sq.commutation_failures();
  if (!fails.empty()) {
    for (auto& f : fails) f = "square does not commute on " + f;
    throw ValidationError(fails);
  }
  return sq;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Nodes are laid out as apex | side a | side b. Each class of the quotient
// that touches a or b becomes one symbol of the pushout.
struct Quotient {
  size_t n0, na, nb;
  UnionFind uf;
  Quotient(size_t apex, size_t a, size_t b) : n0(apex), na(a), nb(b), uf(apex + a + b) {}
  int apex(size_t i) const { return static_cast<int>(i); }
  int a(size_t i) const { return static_cast<int>(n0 + i); }
  int b(size_t i) const { return static_cast<int>(n0 + na + i); }
  int side(int node) const { return node < static_cast<int>(n0) ? 0 : node < static_cast<int>(n0 + na) ? 1 : 2; }
};

// Class ids in order of first a/b member; each class gets the least (side, name) key.
struct Classes {
  std::vector<int> of_node;  // node -> class id (-1 for apex-only, impossible here)
  std::vector<std::vector<int>> members;
};

Classes collect(Quotient& q) {
  Classes c;
  size_t total = q.n0 + q.na + q.nb;
  c.of_node.assign(total, -1);
  std::map<int, int> root_to_class;
  for (size_t node = q.n0; node < total; ++node) {
    int r = q.uf.find(static_cast<int>(node));
    auto [it, fresh] = root_to_class.emplace(r, static_cast<int>(c.members.size()));
    if (fresh) c.members.emplace_back();
    c.of_node[node] = it->second;
    c.members[it->second].push_back(static_cast<int>(node));
  }
  for (size_t node = 0; node < q.n0; ++node) {
    int r = q.uf.find(static_cast<int>(node));
    auto it = root_to_class.find(r);
    if (it != root_to_class.end()) {
      c.of_node[node] = it->second;
      c.members[it->second].push_back(static_cast<int>(node));
    }
  }
  return c;
}

template <class NameOf>
std::vector<std::string> representative_names(const Quotient& q, const Classes& c, NameOf name_of) {
  std::vector<std::string> out;
  for (const auto& mem : c.members) {
    std::pair<int, std::string> best{99, ""};
    for (int node : mem) {
      std::pair<int, std::string> key{q.side(node), name_of(node)};
      if (key < best) best = key;
    }
    out.push_back(best.second);
  }
  return out;
}

// Appends primes until the (name, discriminator) key is unused.
std::string fresh_prime(std::string name, const std::string& disc, std::set<std::pair<std::string, std::string>>& used) {
  while (used.count({name, disc})) name += "'";
  used.insert({name, disc});
  return name;
}

}  // namespace

SignatureSquare pushout(const SignatureMorphism& chi, const SignatureMorphism& delta) {
  if (chi.source->fingerprint != delta.source->fingerprint)
    throw PreconditionFailed("pushout: span legs have different sources");
  const auto& D = *chi.source;
  const auto& A = *chi.target;
  const auto& B = *delta.target;

  // Sorts.
  Quotient qs(D.sorts.size(), A.sorts.size(), B.sorts.size());
  for (size_t i = 0; i < D.sorts.size(); ++i) {
    qs.uf.unite(qs.apex(i), qs.a(chi.sort_map[i]));
    qs.uf.unite(qs.apex(i), qs.b(delta.sort_map[i]));
  }
  Classes cs = collect(qs);
  auto sort_name = [&](int node) -> std::string {
    int s = qs.side(node);
    if (s == 0) return D.sorts[node];
    if (s == 1) return A.sorts[node - qs.n0];
    return B.sorts[node - qs.n0 - qs.na];
  };
  auto sort_rigid = [&](int node) {
    int s = qs.side(node);
    if (s == 1) return static_cast<bool>(A.sort_rigid[node - qs.n0]);
    if (s == 2) return static_cast<bool>(B.sort_rigid[node - qs.n0 - qs.na]);
    return false;
  };
  std::vector<std::string> snames = representative_names(qs, cs, sort_name);
  {
    std::vector<int> order(snames.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return snames[x] < snames[y]; });
    std::set<std::pair<std::string, std::string>> used;
    for (int c : order) snames[c] = fresh_prime(snames[c], "", used);
  }
  std::vector<bool> srigid(cs.members.size(), false);
  for (size_t c = 0; c < cs.members.size(); ++c)
    for (int node : cs.members[c]) srigid[c] = srigid[c] || sort_rigid(node);
  auto a_sort = [&](const std::string& s) { return snames[cs.of_node[qs.a(A.sort_index(s))]]; };
  auto b_sort = [&](const std::string& s) { return snames[cs.of_node[qs.b(B.sort_index(s))]]; };

  // Function and relation symbols share one generic treatment.
  struct SymbolSide {
    std::string name;
    std::vector<std::string> arity;
    std::string result;
    bool rigid;
  };
  auto quotient_symbols = [&](size_t n0, size_t na, size_t nb, const std::vector<int>& chi_map,
                              const std::vector<int>& delta_map, auto side_symbol) {
    Quotient q(n0, na, nb);
    for (size_t i = 0; i < n0; ++i) {
      q.uf.unite(q.apex(i), q.a(chi_map[i]));
      q.uf.unite(q.apex(i), q.b(delta_map[i]));
    }
    Classes c = collect(q);
    std::vector<SymbolSide> cls;
    for (const auto& mem : c.members) {
      std::pair<int, std::string> best{99, ""};
      SymbolSide rep{};
      bool have = false, rigid = false;
      for (int node : mem) {
        SymbolSide s = side_symbol(q.side(node), q.side(node) == 0 ? node
                                                  : q.side(node) == 1 ? node - static_cast<int>(n0)
                                                                      : node - static_cast<int>(n0 + na));
        std::pair<int, std::string> key{q.side(node), s.name};
        if (q.side(node) != 0) {
          rigid = rigid || s.rigid;
          if (!have) {
            rep = s;
            have = true;
          }
        }
        if (key < best) best = key;
      }
      rep.name = best.second;
      rep.rigid = rigid;
      cls.push_back(rep);
    }
    std::vector<int> order(cls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return cls[x].name < cls[y].name; });
    std::set<std::pair<std::string, std::string>> used;
    for (int k : order) {
      std::string disc;
      for (const auto& a : cls[k].arity) disc += a + " ";
      disc += "> " + cls[k].result;
      cls[k].name = fresh_prime(cls[k].name, disc, used);
    }
    return std::make_tuple(std::move(q), std::move(c), std::move(cls));
  };

  auto fun_side = [&](int side, int i) -> SymbolSide {
    if (side == 0) return {D.funs[i].name, {}, "", false};
    if (side == 1) {
      SymbolSide s{A.funs[i].name, {}, a_sort(A.funs[i].result), static_cast<bool>(A.fun_rigid[i])};
      for (const auto& x : A.funs[i].arity) s.arity.push_back(a_sort(x));
      return s;
    }
    SymbolSide s{B.funs[i].name, {}, b_sort(B.funs[i].result), static_cast<bool>(B.fun_rigid[i])};
    for (const auto& x : B.funs[i].arity) s.arity.push_back(b_sort(x));
    return s;
  };
  auto rel_side = [&](int side, int i) -> SymbolSide {
    if (side == 0) return {D.rels[i].name, {}, "", false};
    if (side == 1) {
      SymbolSide s{A.rels[i].name, {}, "", static_cast<bool>(A.rel_rigid[i])};
      for (const auto& x : A.rels[i].arity) s.arity.push_back(a_sort(x));
      return s;
    }
    SymbolSide s{B.rels[i].name, {}, "", static_cast<bool>(B.rel_rigid[i])};
    for (const auto& x : B.rels[i].arity) s.arity.push_back(b_sort(x));
    return s;
  };
  auto nom_side = [&](int side, int i) -> SymbolSide {
    const auto& n = side == 0 ? D.nominals[i] : side == 1 ? A.nominals[i] : B.nominals[i];
    return {n, {}, "", false};
  };
  auto mod_side = [&](int side, int i) -> SymbolSide {
    const auto& m = side == 0 ? D.modalities[i] : side == 1 ? A.modalities[i] : B.modalities[i];
    return {m.name, {}, std::to_string(m.rank), false};
  };

  auto [qf, cf, funs] = quotient_symbols(D.funs.size(), A.funs.size(), B.funs.size(), chi.fun_map, delta.fun_map, fun_side);
  auto [qr, cr, rels] = quotient_symbols(D.rels.size(), A.rels.size(), B.rels.size(), chi.rel_map, delta.rel_map, rel_side);
  auto [qn, cn, noms] =
      quotient_symbols(D.nominals.size(), A.nominals.size(), B.nominals.size(), chi.nom_map, delta.nom_map, nom_side);
  auto [qm, cm, mods] = quotient_symbols(D.modalities.size(), A.modalities.size(), B.modalities.size(), chi.mod_map,
                                         delta.mod_map, mod_side);

  RawSignature raw;
  for (size_t c = 0; c < snames.size(); ++c) raw.sort(snames[c], srigid[c]);
  for (const auto& f : funs) raw.op(f.name, f.arity, f.result, f.rigid);
  for (const auto& r : rels) raw.rel(r.name, r.arity, r.rigid);
  for (const auto& n : noms) raw.nominal(n.name);
  for (const auto& m : mods) raw.modality(m.name, std::stoi(m.result));
  SigPtr Dd = validate_signature(raw);

  RawMorphism ra, rb;
  for (size_t i = 0; i < A.sorts.size(); ++i) ra.sorts[A.sorts[i]] = snames[cs.of_node[qs.a(i)]];
  for (size_t i = 0; i < B.sorts.size(); ++i) rb.sorts[B.sorts[i]] = snames[cs.of_node[qs.b(i)]];
  for (size_t i = 0; i < A.funs.size(); ++i) ra.functions.emplace_back(A.funs[i], funs[cf.of_node[qf.a(i)]].name);
  for (size_t i = 0; i < B.funs.size(); ++i) rb.functions.emplace_back(B.funs[i], funs[cf.of_node[qf.b(i)]].name);
  for (size_t i = 0; i < A.rels.size(); ++i) ra.relations.emplace_back(A.rels[i], rels[cr.of_node[qr.a(i)]].name);
  for (size_t i = 0; i < B.rels.size(); ++i) rb.relations.emplace_back(B.rels[i], rels[cr.of_node[qr.b(i)]].name);
  for (size_t i = 0; i < A.nominals.size(); ++i) ra.nominals[A.nominals[i]] = noms[cn.of_node[qn.a(i)]].name;
  for (size_t i = 0; i < B.nominals.size(); ++i) rb.nominals[B.nominals[i]] = noms[cn.of_node[qn.b(i)]].name;
  for (size_t i = 0; i < A.modalities.size(); ++i)
    ra.modalities[A.modalities[i].name] = mods[cm.of_node[qm.a(i)]].name;
  for (size_t i = 0; i < B.modalities.size(); ++i)
    rb.modalities[B.modalities[i].name] = mods[cm.of_node[qm.b(i)]].name;

  auto da = validate_morphism(chi.target, Dd, ra, "delta_a");
  auto cb = validate_morphism(delta.target, Dd, rb, "chi_b");
  return make_square(chi, delta, std::move(da), std::move(cb), "pushout");
}

// ---------------------------------------------------------------------------
// Extensions

Extension extend_with_constants(const SigPtr& sig, const std::vector<ConstantDecl>& decls) {
  RawSignature raw = sig->raw();
  std::set<std::string> noms(sig->nominals.begin(), sig->nominals.end());
  std::set<FunSym> funs(sig->funs.begin(), sig->funs.end());
  for (const auto& d : decls) {
    if (d.sort == kNom) {
      if (!noms.insert(d.name).second) throw ClashError("nominal " + d.name + " already exists");
      raw.nominal(d.name);
      continue;
    }
    int s = sig->sort_index(d.sort);
    if (s < 0) throw ResolveError("unknown sort " + d.sort + " for constant " + d.name);
    if (!sig->sort_rigid[s])
      throw FlexibleQuantificationError("constant " + d.name + " has flexible sort " + d.sort);
    FunSym f{d.name, {}, d.sort};
    if (!funs.insert(f).second) throw ClashError("constant " + f.str() + " already exists");
    raw.op(d.name, {}, d.sort, true);
  }
  auto ext = validate_signature(raw);
  return {ext, inclusion_morphism(sig, ext)};
}

// ---------------------------------------------------------------------------
// Criterion

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Preservation: return "Preservation";
    case Rule::I1: return "I1";
    case Rule::I2: return "I2";
    case Rule::J1: return "J1";
    case Rule::J2: return "J2";
    case Rule::SortInjectivity: return "SortInjectivity";
  }
  return "?";
}

std::set<Rule> CriterionReport::rules() const {
  std::set<Rule> out;
  for (const auto& f : violations) out.insert(f.rule);
  return out;
}

std::string CriterionReport::verdict() const {
  return passes() ? "injective on sorts and protects flexible symbols" : "fails criterion";
}

std::string SquareReport::verdict() const { return cip_guaranteed() ? "CIP guaranteed" : "CIP not guaranteed"; }

std::set<std::string> inhabited_sorts(const HybridSignature& sig) {
  std::vector<bool> inh(sig.sorts.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t f = 0; f < sig.funs.size(); ++f) {
      int r = sig.fun_result_sort[f];
      if (inh[r]) continue;
      bool ok = std::all_of(sig.fun_arg_sorts[f].begin(), sig.fun_arg_sorts[f].end(), [&](int a) { return inh[a]; });
      if (ok) {
        inh[r] = true;
        changed = true;
      }
    }
  }
  std::set<std::string> out;
  for (size_t i = 0; i < inh.size(); ++i)
    if (inh[i]) out.insert(sig.sorts[i]);
  return out;
}

namespace {

std::vector<Finding> protection_findings(const SignatureMorphism& m) {
  const auto& S = *m.source;
  const auto& T = *m.target;
  std::vector<Finding> out;

  for (size_t i = 0; i < S.sorts.size(); ++i)
    if (!S.sort_rigid[i] && T.sort_rigid[m.sort_map[i]]) out.push_back({Rule::Preservation, {S.sorts[i]}});

  std::map<int, std::vector<std::string>> flex_sort_images;
  for (size_t i = 0; i < S.sorts.size(); ++i)
    if (!S.sort_rigid[i]) flex_sort_images[m.sort_map[i]].push_back(S.sorts[i]);
  for (auto& [t, srcs] : flex_sort_images)
    if (srcs.size() > 1) out.push_back({Rule::I1, srcs});

  auto has_flex_arg = [&](const std::vector<int>& args) {
    return std::any_of(args.begin(), args.end(), [&](int a) { return !S.sort_rigid[a]; });
  };
  std::map<int, std::vector<std::string>> fun_images, rel_images;
  for (size_t i = 0; i < S.funs.size(); ++i)
    if (!S.fun_rigid[i] && has_flex_arg(S.fun_arg_sorts[i])) fun_images[m.fun_map[i]].push_back(S.funs[i].str());
  for (size_t i = 0; i < S.rels.size(); ++i)
    if (!S.rel_rigid[i] && has_flex_arg(S.rel_arg_sorts[i])) rel_images[m.rel_map[i]].push_back(S.rels[i].str());
  for (auto& [t, srcs] : fun_images)
    if (srcs.size() > 1) out.push_back({Rule::I2, srcs});
  for (auto& [t, srcs] : rel_images)
    if (srcs.size() > 1) out.push_back({Rule::I2, srcs});

  std::set<int> flex_fun_image, flex_sort_image;
  for (size_t i = 0; i < S.funs.size(); ++i)
    if (!S.fun_rigid[i]) flex_fun_image.insert(m.fun_map[i]);
  for (size_t i = 0; i < S.sorts.size(); ++i)
    if (!S.sort_rigid[i]) flex_sort_image.insert(m.sort_map[i]);
  auto inhabited = inhabited_sorts(T);
  for (size_t j = 0; j < T.funs.size(); ++j) {
    if (T.fun_rigid[j] || flex_fun_image.count(static_cast<int>(j))) continue;
    int s = T.fun_result_sort[j];
    if (!T.sort_rigid[s] && flex_sort_image.count(s)) out.push_back({Rule::J1, {T.funs[j].str()}});
    bool touches = std::any_of(T.fun_arg_sorts[j].begin(), T.fun_arg_sorts[j].end(),
                               [&](int a) { return flex_sort_image.count(a) > 0; });
    if (touches && !inhabited.count(T.sorts[s])) out.push_back({Rule::J2, {T.funs[j].str()}});
  }
  return out;
}

}  // namespace

bool protects_flexible_symbols(const SignatureMorphism& m) { return protection_findings(m).empty(); }

CriterionReport check_cip_criterion(const SignatureMorphism& m) {
  CriterionReport rep;
  rep.morphism = m.name;
  const auto& S = *m.source;
  std::map<int, std::vector<std::string>> images;
  for (size_t i = 0; i < S.sorts.size(); ++i) images[m.sort_map[i]].push_back(S.sorts[i]);
  for (auto& [t, srcs] : images)
    if (srcs.size() > 1) {
      rep.sort_injective = false;
      rep.violations.push_back({Rule::SortInjectivity, srcs});
    }
  auto prot = protection_findings(m);
  rep.violations.insert(rep.violations.end(), prot.begin(), prot.end());
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Finding& a, const Finding& b) { return a.rule < b.rule; });
  return rep;
}

SquareReport check_cip_criterion(const SignatureSquare& sq) {
  return {check_cip_criterion(sq.chi), check_cip_criterion(sq.delta)};
}

std::set<std::string> classify_fragment(const HybridSignature& sig) {
  bool no_rigid_symbols = std::none_of(sig.fun_rigid.begin(), sig.fun_rigid.end(), [](bool b) { return b; }) &&
                          std::none_of(sig.rel_rigid.begin(), sig.rel_rigid.end(), [](bool b) { return b; });
  bool no_rigid_sorts = std::none_of(sig.sort_rigid.begin(), sig.sort_rigid.end(), [](bool b) { return b; });
  bool single_binary = sig.modalities.size() == 1 && sig.modalities[0].rank == 2;
  std::set<std::string> tags;
  if (single_binary && sig.sorts.size() == 1 && sig.sort_rigid[0] && no_rigid_symbols) tags.insert("RFOHL");
  if (sig.sorts.empty() && no_rigid_sorts && no_rigid_symbols) tags.insert("HPL");
  if (tags.empty()) tags.insert("general");
  return tags;
}

}  // namespace hwb
