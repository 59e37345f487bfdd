#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "hwb/textio.hpp"

namespace hwb {

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> r{"not", "or", "and", "exists", "forall", "store", "until", "top", "bot"};
  return r;
}

bool plain_ident(const std::string& n) {
  if (n.empty()) return false;
  size_t i = 0;
  if (n[0] == '-') {
    if (n.size() < 2 || !std::isdigit(static_cast<unsigned char>(n[1]))) return false;
    i = 1;
  } else if (!(std::isalnum(static_cast<unsigned char>(n[0])) || n[0] == '_')) {
    return false;
  }
  for (; i < n.size(); ++i) {
    char c = n[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  }
  return true;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::vector<std::string> quoted(const std::vector<std::string>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(quote_name(x));
  return out;
}

std::string term_core(const Scope& sc, const Term& t) {
  std::string out = quote_name(t->fun.name);
  if (t->at) out += "@" + quote_name(*t->at);
  if (!t->args.empty()) {
    std::vector<std::string> a;
    for (const auto& x : t->args) a.push_back(print_term(sc, x));
    out += "(" + join(a, ", ") + ")";
  }
  return out;
}

void print_sen(std::ostringstream& os, const Scope& sc, const Sentence& s) {
  switch (s->kind) {
    case SenKind::Nominal:
      os << quote_name(s->name);
      return;
    case SenKind::Eq:
      os << print_term(sc, s->terms[0]) << " = " << print_term(sc, s->terms[1]);
      return;
    case SenKind::Rel: {
      os << quote_name(s->rel.name);
      if (s->rel_at) os << "@" << quote_name(*s->rel_at);
      std::vector<std::string> a;
      for (const auto& t : s->terms) a.push_back(print_term(sc, t));
      os << "(" << join(a, ", ") << ")";
      return;
    }
    case SenKind::Or:
      os << "or {";
      for (const auto& x : s->subs) {
        os << " ";
        print_sen(os, sc, x);
        os << ";";
      }
      os << " }";
      return;
    case SenKind::Not:
      os << "not ";
      print_sen(os, sc, s->subs[0]);
      return;
    case SenKind::At:
      os << "@" << quote_name(s->name) << " ";
      print_sen(os, sc, s->subs[0]);
      return;
    case SenKind::Diamond:
      os << "<" << quote_name(s->name) << "> ";
      print_sen(os, sc, s->subs[0]);
      return;
    case SenKind::Store:
      os << "store " << quote_name(s->var.name) << " . ";
      print_sen(os, sc.with(s->var), s->subs[0]);
      return;
    case SenKind::Exists:
      os << "exists " << quote_name(s->var.name) << " : " << quote_name(s->var.sort) << " . ";
      print_sen(os, sc.with(s->var), s->subs[0]);
      return;
  }
}

std::string fun_profile(const FunSym& f) {
  std::string out;
  for (const auto& a : f.arity) out += quote_name(a) + " ";
  return out + "-> " + quote_name(f.result);
}

std::string rel_profile(const RelSym& r) { return join(quoted(r.arity), " "); }

}  // namespace

std::string quote_name(const std::string& n) {
  if (plain_ident(n) && !reserved().count(n)) return n;
  return "`" + n + "`";
}

std::string print_term(const Scope& sc, const Term& t) {
  std::string core = term_core(sc, t);
  if (sc.funs_named(t->fun.name).size() > 1) return "(" + core + " : " + quote_name(t->fun.result) + ")";
  return core;
}

std::string print_sentence(const Scope& sc, const Sentence& s) {
  std::ostringstream os;
  print_sen(os, sc, s);
  return os.str();
}

std::string print_signature(const std::string& name, const HybridSignature& S) {
  std::ostringstream os;
  os << "signature " << quote_name(name) << " {\n";
  if (!S.nominals.empty()) os << "  nominals " << join(quoted(S.nominals), ", ") << ";\n";
  for (const auto& l : S.modalities) {
    os << "  modality " << quote_name(l.name) << " :";
    for (int i = 0; i < l.rank; ++i) os << " nom";
    os << ";\n";
  }
  std::vector<std::string> rs, fs;
  for (size_t i = 0; i < S.sorts.size(); ++i) (S.sort_rigid[i] ? rs : fs).push_back(S.sorts[i]);
  if (!rs.empty()) os << "  rigid sorts " << join(quoted(rs), ", ") << ";\n";
  if (!fs.empty()) os << "  sorts " << join(quoted(fs), ", ") << ";\n";
  for (size_t i = 0; i < S.funs.size(); ++i)
    os << "  " << (S.fun_rigid[i] ? "rigid " : "") << "op " << quote_name(S.funs[i].name) << " : "
       << fun_profile(S.funs[i]) << ";\n";
  for (size_t i = 0; i < S.rels.size(); ++i) {
    os << "  " << (S.rel_rigid[i] ? "rigid " : "") << "rel " << quote_name(S.rels[i].name) << " :";
    if (!S.rels[i].arity.empty()) os << " " << rel_profile(S.rels[i]);
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string print_morphism(const std::string& name, const std::string& source, const std::string& target,
                           const SignatureMorphism& m) {
  const auto& A = *m.source;
  const auto& B = *m.target;
  std::ostringstream os;
  os << "morphism " << quote_name(name) << " : " << quote_name(source) << " -> " << quote_name(target) << " {\n";
  for (size_t i = 0; i < A.sorts.size(); ++i)
    if (B.sorts[m.sort_map[i]] != A.sorts[i])
      os << "  sort " << quote_name(A.sorts[i]) << " |-> " << quote_name(B.sorts[m.sort_map[i]]) << ";\n";
  for (size_t i = 0; i < A.funs.size(); ++i) {
    const auto& g = B.funs[m.fun_map[i]].name;
    if (g == A.funs[i].name) continue;
    os << "  op " << quote_name(A.funs[i].name);
    if (A.funs_named(A.funs[i].name).size() > 1) os << " : " << fun_profile(A.funs[i]);
    os << " |-> " << quote_name(g) << ";\n";
  }
  for (size_t i = 0; i < A.rels.size(); ++i) {
    const auto& g = B.rels[m.rel_map[i]].name;
    if (g == A.rels[i].name) continue;
    os << "  rel " << quote_name(A.rels[i].name);
    if (A.rels_named(A.rels[i].name).size() > 1) os << " : " << rel_profile(A.rels[i]);
    os << " |-> " << quote_name(g) << ";\n";
  }
  for (size_t i = 0; i < A.nominals.size(); ++i)
    if (B.nominals[m.nom_map[i]] != A.nominals[i])
      os << "  nominal " << quote_name(A.nominals[i]) << " |-> " << quote_name(B.nominals[m.nom_map[i]]) << ";\n";
  for (size_t i = 0; i < A.modalities.size(); ++i)
    if (B.modalities[m.mod_map[i]].name != A.modalities[i].name)
      os << "  modality " << quote_name(A.modalities[i].name) << " |-> "
         << quote_name(B.modalities[m.mod_map[i]].name) << ";\n";
  os << "}\n";
  return os.str();
}

namespace {

std::string label(const KripkeStructure& m, int s, int w, int v) {
  if (v == kSentinel) return "?";
  return quote_name(m.carriers[s][m.sort_slot(s, w)][v]);
}

// Enumerates argument tuples of `ar` at `w` in table order.
template <class Fn>
void for_each_tuple(const KripkeStructure& m, const std::vector<int>& ar, int w, Fn&& fn) {
  std::size_t n = m.domain_size(ar, w);
  std::vector<int> args(ar.size(), 0);
  for (std::size_t c = 0; c < n; ++c) {
    fn(args);
    for (size_t i = 0; i < ar.size(); ++i) {
      if (++args[i] < m.size(ar[i], w)) break;
      args[i] = 0;
    }
  }
}

std::string tuple_text(const KripkeStructure& m, const std::vector<int>& ar, int w, const std::vector<int>& args) {
  std::vector<std::string> xs;
  for (size_t i = 0; i < ar.size(); ++i) xs.push_back(label(m, ar[i], w, args[i]));
  if (xs.size() == 1) return xs[0];
  return "(" + join(xs, ", ") + ")";
}

void print_block(std::ostringstream& os, const KripkeStructure& m, bool shared, int w) {
  const auto& S = *m.sig;
  for (size_t s = 0; s < S.sorts.size(); ++s) {
    if (S.sort_rigid[s] != shared) continue;
    os << "    carrier " << quote_name(S.sorts[s]) << " = {" << join(quoted(m.carriers[s][m.sort_slot(s, w)]), ", ")
       << "};\n";
  }
  for (size_t f = 0; f < S.funs.size(); ++f) {
    if (S.fun_rigid[f] != shared) continue;
    const auto& ar = S.fun_arg_sorts[f];
    int res = S.fun_result_sort[f];
    const auto& tab = m.fun_tab[f][m.fun_slot(f, w)];
    os << "    op " << quote_name(S.funs[f].name);
    if (S.funs_named(S.funs[f].name).size() > 1) os << " : " << fun_profile(S.funs[f]);
    if (ar.empty()) {
      if (tab.empty() || tab[0] == kUndef) {
        os << " = {};\n";
        continue;
      }
      os << " = " << label(m, res, w, tab[0]) << ";\n";
      continue;
    }
    std::vector<std::string> entries;
    for_each_tuple(m, ar, w, [&](const std::vector<int>& args) {
      int v = tab[m.index(ar, w, args.data())];
      if (v == kUndef) return;
      entries.push_back(tuple_text(m, ar, w, args) + " -> " + label(m, res, w, v));
    });
    os << " = {" << join(entries, ", ") << "};\n";
  }
  for (size_t r = 0; r < S.rels.size(); ++r) {
    if (S.rel_rigid[r] != shared) continue;
    const auto& ar = S.rel_arg_sorts[r];
    const auto& tab = m.rel_tab[r][m.rel_slot(r, w)];
    std::vector<std::string> entries;
    for_each_tuple(m, ar, w, [&](const std::vector<int>& args) {
      if (!tab[m.index(ar, w, args.data())]) return;
      entries.push_back(ar.empty() ? "()" : tuple_text(m, ar, w, args));
    });
    os << "    rel " << quote_name(S.rels[r].name);
    if (S.rels_named(S.rels[r].name).size() > 1) os << " : " << rel_profile(S.rels[r]);
    os << " = {" << join(entries, ", ") << "};\n";
  }
}

}  // namespace

std::string print_model(const std::string& name, const std::string& sig_name, const KripkeStructure& m) {
  const auto& S = *m.sig;
  int W = m.num_worlds();
  std::ostringstream os;
  os << "model " << quote_name(name) << " over " << quote_name(sig_name) << " {\n";
  if (m.partial) os << "  partial;\n";
  os << "  worlds " << join(quoted(m.worlds), ", ") << ";\n";
  for (size_t k = 0; k < S.nominals.size(); ++k)
    os << "  nominal " << quote_name(S.nominals[k]) << " = " << quote_name(m.worlds[m.nom_val[k]]) << ";\n";
  for (size_t l = 0; l < S.modalities.size(); ++l) {
    int rank = S.modalities[l].rank;
    std::vector<std::string> tuples;
    const auto& rel = m.mod_rel[l];
    for (std::size_t idx = 0; idx < rel.size(); ++idx) {
      if (!rel[idx]) continue;
      std::vector<std::string> ws(rank);
      std::size_t r = idx;
      for (int i = rank - 1; i >= 0; --i) {
        ws[i] = quote_name(m.worlds[r % W]);
        r /= W;
      }
      tuples.push_back(rank == 1 ? ws[0] : "(" + join(ws, ", ") + ")");
    }
    os << "  modality " << quote_name(S.modalities[l].name) << " = {" << join(tuples, ", ") << "};\n";
  }
  os << "  shared {\n";
  print_block(os, m, true, 0);
  os << "  }\n";
  for (int w = 0; w < W; ++w) {
    os << "  world " << quote_name(m.worlds[w]) << " {\n";
    print_block(os, m, false, w);
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

std::string print_presentation(const std::string& name, const std::string& sig_name, const Presentation& p) {
  Scope sc(p.sig);
  std::ostringstream os;
  os << "presentation " << quote_name(name) << " over " << quote_name(sig_name) << " {\n";
  for (const auto& s : p.sentences) os << "  " << print_sentence(sc, s) << ";\n";
  os << "}\n";
  return os.str();
}

std::string print_document(const Document& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : doc.order) {
    if (!first) os << "\n";
    first = false;
    switch (e.kind) {
      case DeclKind::Signature:
        os << print_signature(e.name, *doc.signatures.at(e.name));
        break;
      case DeclKind::Morphism: {
        const auto& d = doc.morphisms.at(e.name);
        os << print_morphism(e.name, d.source, d.target, d.morphism);
        break;
      }
      case DeclKind::Square: {
        const auto& d = doc.squares.at(e.name);
        if (d.is_pushout)
          os << "square " << quote_name(e.name) << " = pushout(" << quote_name(d.parts[0]) << ", "
             << quote_name(d.parts[1]) << ");\n";
        else
          os << "square " << quote_name(e.name) << " {\n  span " << quote_name(d.parts[0]) << ", "
             << quote_name(d.parts[1]) << ";\n  cospan " << quote_name(d.parts[2]) << ", " << quote_name(d.parts[3])
             << ";\n}\n";
        break;
      }
      case DeclKind::Model: {
        const auto& d = doc.models.at(e.name);
        os << print_model(e.name, d.sig, d.model);
        break;
      }
      case DeclKind::Presentation: {
        const auto& d = doc.presentations.at(e.name);
        os << print_presentation(e.name, d.sig, d.presentation);
        break;
      }
      case DeclKind::Sentence: {
        const auto& d = doc.sentences.at(e.name);
        Scope sc(doc.signatures.at(d.sig));
        os << "sentence " << quote_name(e.name) << " over " << quote_name(d.sig) << " = "
           << print_sentence(sc, d.sentence) << ";\n";
        break;
      }
    }
  }
  return os.str();
}

}  // namespace hwb
