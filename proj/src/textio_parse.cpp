#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "hwb/textio.hpp"

namespace hwb {

namespace {

enum class Tok { Ident, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  bool quoted = false;
  int line = 1, col = 1;
};

bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  static const char* puncts[] = {"|->", "->", "!=", "{", "}", "(", ")", ";", ",", ":", ".",
                                 "=",   "@",  "<",  ">", "[", "]", "&", "|", "?", "!"};
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t{Tok::Ident, "", false, line, col};
    if (c == '`') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '`' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '`' || j == i + 1)
        throw ParseError(line, col, {"closing backquote"}, "unterminated or empty quoted name");
      t.text = std::string(src.substr(i + 1, j - i - 1));
      t.quoted = true;
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    if (ident_start(c) || (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      std::string_view pv(p);
      if (src.substr(i, pv.size()) == pv) {
        t.kind = Tok::Punct;
        t.text = std::string(pv);
        advance(pv.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "byte " + std::to_string(static_cast<unsigned char>(c));
      throw ParseError(line, col, {}, "unexpected character " + shown);
    }
  }
  out.push_back({Tok::End, "", false, line, col});
  return out;
}

struct RawTerm {
  std::string name;
  std::optional<std::string> at;
  std::vector<RawTerm> args;
  std::optional<std::string> annot;
  int line = 0, col = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  // ---- token helpers
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(const char* p, size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }
  bool is_kw(const char* w, size_t k = 0) const {
    return peek(k).kind == Tok::Ident && !peek(k).quoted && peek(k).text == w;
  }
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    const Token& t = peek();
    throw ParseError(t.line, t.col, std::move(expected),
                     detail.empty() ? (t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'")
                                    : detail);
  }
  void expect(const char* p) {
    if (!is_punct(p)) fail({std::string("'") + p + "'"}, "");
    ++pos_;
  }
  void expect_kw(const char* w) {
    if (!is_kw(w)) fail({std::string("'") + w + "'"}, "");
    ++pos_;
  }
  bool accept(const char* p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_kw(const char* w) {
    if (!is_kw(w)) return false;
    ++pos_;
    return true;
  }
  std::string name(const char* what = "name") {
    if (peek().kind != Tok::Ident) fail({what}, "");
    return toks_[pos_++].text;
  }
  std::vector<std::string> names(const char* what = "name") {
    std::vector<std::string> out{name(what)};
    while (accept(",")) out.push_back(name(what));
    return out;
  }
  std::string where() const { return std::to_string(peek().line) + ":" + std::to_string(peek().col) + ": "; }
  [[noreturn]] void unresolved(const std::string& what) const { throw ResolveError(where() + what); }

  // ---- documents
  void document(Document& doc) {
    while (!at_end()) {
      if (is_kw("signature")) signature(doc);
      else if (is_kw("morphism")) morphism(doc);
      else if (is_kw("square")) square(doc);
      else if (is_kw("model")) model(doc);
      else if (is_kw("presentation")) presentation(doc);
      else if (is_kw("sentence")) sentence_decl(doc);
      else fail({"'signature'", "'morphism'", "'square'", "'model'", "'presentation'", "'sentence'"}, "");
    }
  }

  std::string fresh_decl_name(const Document& doc) {
    const Token& t = peek();
    std::string n = name("declaration name");
    if (doc.has(n)) throw ParseError(t.line, t.col, {}, "redefinition of " + n);
    return n;
  }

  const SigPtr& sig_ref(const Document& doc) {
    const Token& t = peek();
    std::string n = name("signature name");
    auto it = doc.signatures.find(n);
    if (it == doc.signatures.end())
      throw ResolveError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": unknown signature " + n);
    return it->second;
  }

  void signature(Document& doc) {
    expect_kw("signature");
    const Token& start = peek();
    std::string n = fresh_decl_name(doc);
    RawSignature raw;
    expect("{");
    while (!accept("}")) {
      if (accept_kw("nominals")) {
        for (auto& k : names("nominal")) raw.nominal(k);
      } else if (accept_kw("modality")) {
        std::string l = name("modality name");
        expect(":");
        int rank = 0;
        while (accept_kw("nom")) ++rank;
        if (rank == 0) fail({"'nom'"}, "");
        raw.modality(l, rank);
      } else {
        bool rigid = accept_kw("rigid");
        if (accept_kw("sorts")) {
          for (auto& s : names("sort")) raw.sort(s, rigid);
        } else if (accept_kw("op")) {
          std::string f = name("op name");
          expect(":");
          std::vector<std::string> ar;
          while (!is_punct("->")) ar.push_back(name("sort"));
          expect("->");
          raw.op(f, ar, name("sort"), rigid);
        } else if (accept_kw("rel")) {
          std::string r = name("rel name");
          expect(":");
          std::vector<std::string> ar;
          while (!is_punct(";")) ar.push_back(name("sort"));
          raw.rel(r, ar, rigid);
        } else {
          fail({"'nominals'", "'modality'", "'sorts'", "'op'", "'rel'", "'}'"}, "");
        }
      }
      expect(";");
    }
    try {
      doc.signatures[n] = validate_signature(raw);
    } catch (const ValidationError& e) {
      throw ParseError(start.line, start.col, {}, "invalid signature " + n + ": " + e.what());
    }
    doc.order.push_back({DeclKind::Signature, n});
  }

  void morphism(Document& doc) {
    expect_kw("morphism");
    const Token& start = peek();
    std::string n = fresh_decl_name(doc);
    expect(":");
    std::string src_name = peek().text;
    SigPtr src = sig_ref(doc);
    expect("->");
    std::string tgt_name = peek().text;
    SigPtr tgt = sig_ref(doc);
    RawMorphism raw;
    std::set<FunSym> listed_funs;
    std::set<RelSym> listed_rels;
    expect("{");
    while (!accept("}")) {
      if (accept_kw("sort")) {
        std::string a = name("sort");
        expect("|->");
        raw.sorts[a] = name("sort");
      } else if (accept_kw("nominal")) {
        std::string a = name("nominal");
        expect("|->");
        raw.nominals[a] = name("nominal");
      } else if (accept_kw("modality")) {
        std::string a = name("modality");
        expect("|->");
        raw.modalities[a] = name("modality");
      } else if (accept_kw("op")) {
        std::string f = name("op name");
        std::optional<FunSym> sym;
        if (accept(":")) {
          FunSym fs{f, {}, ""};
          while (!is_punct("->")) fs.arity.push_back(name("sort"));
          expect("->");
          fs.result = name("sort");
          sym = fs;
        }
        expect("|->");
        std::string g = name("op name");
        std::vector<FunSym> hits;
        for (int i : src->funs_named(f))
          if (!sym || src->funs[i] == *sym) hits.push_back(src->funs[i]);
        if (hits.empty()) unresolved("unknown op " + f + " in " + src_name);
        for (auto& h : hits) {
          raw.functions.emplace_back(h, g);
          listed_funs.insert(h);
        }
      } else if (accept_kw("rel")) {
        std::string r = name("rel name");
        std::optional<RelSym> sym;
        if (accept(":")) {
          RelSym rs{r, {}};
          while (!is_punct("|->")) rs.arity.push_back(name("sort"));
          sym = rs;
        }
        expect("|->");
        std::string g = name("rel name");
        std::vector<RelSym> hits;
        for (int i : src->rels_named(r))
          if (!sym || src->rels[i] == *sym) hits.push_back(src->rels[i]);
        if (hits.empty()) unresolved("unknown rel " + r + " in " + src_name);
        for (auto& h : hits) {
          raw.relations.emplace_back(h, g);
          listed_rels.insert(h);
        }
      } else {
        fail({"'sort'", "'op'", "'rel'", "'nominal'", "'modality'", "'}'"}, "");
      }
      expect(";");
    }
    for (const auto& s : src->sorts) raw.sorts.try_emplace(s, s);
    for (const auto& k : src->nominals) raw.nominals.try_emplace(k, k);
    for (const auto& l : src->modalities) raw.modalities.try_emplace(l.name, l.name);
    for (const auto& f : src->funs)
      if (!listed_funs.count(f)) raw.functions.emplace_back(f, f.name);
    for (const auto& r : src->rels)
      if (!listed_rels.count(r)) raw.relations.emplace_back(r, r.name);
    try {
      doc.morphisms[n] = {validate_morphism(src, tgt, raw, n), src_name, tgt_name};
    } catch (const MorphismError& e) {
      throw ParseError(start.line, start.col, {}, "invalid morphism " + n + ": " + e.what());
    }
    doc.order.push_back({DeclKind::Morphism, n});
  }

  const SignatureMorphism& morphism_ref(const Document& doc, std::string& out_name) {
    const Token& t = peek();
    out_name = name("morphism name");
    auto it = doc.morphisms.find(out_name);
    if (it == doc.morphisms.end())
      throw ResolveError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": unknown morphism " + out_name);
    return it->second.morphism;
  }

  void square(Document& doc) {
    expect_kw("square");
    const Token& start = peek();
    std::string n = fresh_decl_name(doc);
    SquareDecl d;
    try {
      if (accept("=")) {
        expect_kw("pushout");
        expect("(");
        const auto& chi = morphism_ref(doc, d.parts[0]);
        expect(",");
        const auto& delta = morphism_ref(doc, d.parts[1]);
        expect(")");
        expect(";");
        d.square = pushout(chi, delta);
        d.square.name = n;
        d.is_pushout = true;
        doc.signatures[n + "_d"] = d.square.delta_a.target;
      } else {
        expect("{");
        expect_kw("span");
        const auto& chi = morphism_ref(doc, d.parts[0]);
        expect(",");
        const auto& delta = morphism_ref(doc, d.parts[1]);
        expect(";");
        expect_kw("cospan");
        const auto& da = morphism_ref(doc, d.parts[2]);
        expect(",");
        const auto& cb = morphism_ref(doc, d.parts[3]);
        expect(";");
        expect("}");
        d.square = make_square(chi, delta, da, cb, n);
      }
    } catch (const CompositionError& e) {
      throw ParseError(start.line, start.col, {}, "invalid square " + n + ": " + e.what());
    }
    doc.squares[n] = std::move(d);
    doc.order.push_back({DeclKind::Square, n});
  }

  // ---- models
  struct RawEntry {
    std::vector<std::string> args;
    std::string value;  // "?" marks the sentinel
    int line, col;
  };
  struct RawItem {
    char kind;  // 'c' carrier, 'o' op, 'r' rel
    std::string name;
    std::optional<std::vector<std::string>> profile;  // op: arity + result; rel: arity
    std::vector<std::string> labels;                   // carrier
    std::vector<RawEntry> entries;                     // op
    std::vector<std::vector<std::string>> tuples;      // rel
    int line, col;
  };
  struct RawBlock {
    std::optional<std::string> world;  // empty for `shared`
    std::vector<RawItem> items;
    int line, col;
  };

  std::vector<std::string> tuple() {
    std::vector<std::string> t;
    if (accept("(")) {
      if (!accept(")")) {
        t = names("label");
        expect(")");
      }
    } else {
      t.push_back(name("label"));
    }
    return t;
  }

  std::vector<std::vector<std::string>> tuple_set() {
    std::vector<std::vector<std::string>> out;
    expect("{");
    if (accept("}")) return out;
    out.push_back(tuple());
    while (accept(",")) out.push_back(tuple());
    expect("}");
    return out;
  }

  std::string value_label() {
    if (accept("?")) return "?";
    return name("label");
  }

  RawBlock block(std::optional<std::string> world) {
    RawBlock b{std::move(world), {}, peek().line, peek().col};
    expect("{");
    while (!accept("}")) {
      RawItem it{};
      it.line = peek().line;
      it.col = peek().col;
      if (accept_kw("carrier")) {
        it.kind = 'c';
        it.name = name("sort");
        expect("=");
        expect("{");
        if (!accept("}")) {
          it.labels = names("label");
          expect("}");
        }
      } else if (accept_kw("op")) {
        it.kind = 'o';
        it.name = name("op name");
        if (accept(":")) {
          std::vector<std::string> p;
          while (!is_punct("->")) p.push_back(name("sort"));
          expect("->");
          p.push_back(name("sort"));
          it.profile = p;
        }
        expect("=");
        if (accept("{")) {
          if (!accept("}")) {
            do {
              RawEntry e{{}, "", peek().line, peek().col};
              e.args = tuple();
              expect("->");
              e.value = value_label();
              it.entries.push_back(std::move(e));
            } while (accept(","));
            expect("}");
          }
        } else {
          RawEntry e{{}, "", peek().line, peek().col};
          e.value = value_label();
          it.entries.push_back(std::move(e));
        }
      } else if (accept_kw("rel")) {
        it.kind = 'r';
        it.name = name("rel name");
        if (accept(":")) {
          std::vector<std::string> p;
          while (!is_punct("=")) p.push_back(name("sort"));
          it.profile = p;
        }
        expect("=");
        it.tuples = tuple_set();
      } else {
        fail({"'carrier'", "'op'", "'rel'", "'}'"}, "");
      }
      expect(";");
      b.items.push_back(std::move(it));
    }
    return b;
  }

  static std::string pos(int line, int col) { return std::to_string(line) + ":" + std::to_string(col) + ": "; }

  void model(Document& doc) {
    expect_kw("model");
    const Token& start = peek();
    std::string n = fresh_decl_name(doc);
    expect_kw("over");
    std::string sig_name = peek().text;
    SigPtr sig = sig_ref(doc);
    const auto& S = *sig;
    bool partial = false;
    std::optional<std::vector<std::string>> worlds;
    std::vector<std::tuple<std::string, std::string, int, int>> noms;
    std::vector<std::tuple<std::string, std::vector<std::vector<std::string>>, int, int>> mods;
    std::vector<RawBlock> blocks;
    expect("{");
    while (!accept("}")) {
      int line = peek().line, col = peek().col;
      if (accept_kw("partial")) {
        partial = true;
        expect(";");
      } else if (accept_kw("worlds")) {
        worlds.emplace();
        if (!is_punct(";")) *worlds = names("world");
        expect(";");
      } else if (accept_kw("nominal")) {
        std::string k = name("nominal");
        expect("=");
        noms.emplace_back(k, name("world"), line, col);
        expect(";");
      } else if (accept_kw("modality")) {
        std::string l = name("modality");
        expect("=");
        mods.emplace_back(l, tuple_set(), line, col);
        expect(";");
      } else if (accept_kw("shared")) {
        blocks.push_back(block(std::nullopt));
      } else if (accept_kw("world")) {
        std::string w = name("world");
        blocks.push_back(block(w));
      } else {
        fail({"'worlds'", "'nominal'", "'modality'", "'shared'", "'world'", "'partial'", "'}'"}, "");
      }
    }
    if (!worlds) throw ResolveError(pos(start.line, start.col) + "model " + n + " declares no worlds");
    int W = static_cast<int>(worlds->size());
    KripkeStructure m = blank_model(sig, W);
    m.worlds = *worlds;
    m.partial = partial;
    {
      std::set<std::string> seen(worlds->begin(), worlds->end());
      if (seen.size() != worlds->size()) throw ParseError(start.line, start.col, {}, "duplicate world names in " + n);
    }
    auto world_ix = [&](const std::string& w, int line, int col) {
      int i = m.world_index(w);
      if (i < 0) throw ResolveError(pos(line, col) + "unknown world " + w);
      return i;
    };
    std::vector<char> nom_set(S.nominals.size(), 0);
    for (auto& [k, w, line, col] : noms) {
      int i = S.nominal_index(k);
      if (i < 0) throw ResolveError(pos(line, col) + "unknown nominal " + k);
      m.nom_val[i] = world_ix(w, line, col);
      nom_set[i] = 1;
    }
    for (size_t k = 0; k < S.nominals.size(); ++k)
      if (!nom_set[k]) throw ResolveError(pos(start.line, start.col) + "nominal " + S.nominals[k] + " denotes no world");
    for (auto& [l, tuples, line, col] : mods) {
      int i = S.modality_index(l);
      if (i < 0) throw ResolveError(pos(line, col) + "unknown modality " + l);
      int rank = S.modalities[i].rank;
      for (const auto& t : tuples) {
        if (static_cast<int>(t.size()) != rank)
          throw ParseError(line, col, {}, "modality " + l + " expects tuples of length " + std::to_string(rank));
        std::size_t idx = 0;
        for (const auto& w : t) idx = idx * W + world_ix(w, line, col);
        m.mod_rel[i][idx] = 1;
      }
    }

    // Carriers first, so that op and rel tables can resolve labels.
    std::vector<std::vector<char>> carrier_set(S.sorts.size());
    for (size_t s = 0; s < S.sorts.size(); ++s) carrier_set[s].assign(m.carriers[s].size(), 0);
    std::set<std::string> block_names;
    for (const auto& b : blocks) {
      std::string key = b.world ? *b.world : "";
      if (!block_names.insert(key).second)
        throw ParseError(b.line, b.col, {}, b.world ? "repeated block for world " + *b.world : "repeated shared block");
      int w = b.world ? world_ix(*b.world, b.line, b.col) : 0;
      for (const auto& it : b.items) {
        if (it.kind != 'c') continue;
        int s = S.sort_index(it.name);
        if (s < 0) throw ResolveError(pos(it.line, it.col) + "unknown sort " + it.name);
        if (S.sort_rigid[s] == static_cast<bool>(b.world))
          throw ParseError(it.line, it.col, {},
                           S.sort_rigid[s] ? "rigid sort " + it.name + " belongs in the shared block"
                                           : "flexible sort " + it.name + " belongs in a world block");
        int slot = S.sort_rigid[s] ? 0 : w;
        if (carrier_set[s][slot]) throw ParseError(it.line, it.col, {}, "repeated carrier for " + it.name);
        carrier_set[s][slot] = 1;
        m.carriers[s][slot] = it.labels;
        std::set<std::string> uniq(it.labels.begin(), it.labels.end());
        if (uniq.size() != it.labels.size())
          throw ParseError(it.line, it.col, {}, "duplicate element labels in carrier of " + it.name);
      }
    }
    for (size_t s = 0; s < S.sorts.size(); ++s)
      for (size_t slot = 0; slot < carrier_set[s].size(); ++slot)
        if (!carrier_set[s][slot])
          throw ResolveError(pos(start.line, start.col) + "model " + n +
                             (S.sort_rigid[s] ? " shared block" : " world " + m.worlds[slot]) +
                             " omits a carrier for " + S.sorts[s]);
    resize_tables(m);

    std::vector<std::vector<char>> op_set(S.funs.size());
    for (size_t f = 0; f < S.funs.size(); ++f) op_set[f].assign(m.fun_tab[f].size(), 0);
    for (const auto& b : blocks) {
      int w = b.world ? m.world_index(*b.world) : 0;
      for (const auto& it : b.items) {
        if (it.kind == 'c') continue;
        if (it.kind == 'o') {
          std::vector<int> cands;
          for (int f : S.funs_named(it.name)) {
            const auto& fs = S.funs[f];
            if (it.profile) {
              std::vector<std::string> p = fs.arity;
              p.push_back(fs.result);
              if (p != *it.profile) continue;
            }
            cands.push_back(f);
          }
          if (cands.empty()) throw ResolveError(pos(it.line, it.col) + "unknown op " + it.name);
          if (cands.size() > 1)
            throw ParseError(it.line, it.col, {"profile annotation"}, "op " + it.name + " is overloaded");
          int f = cands[0];
          if (S.fun_rigid[f] == static_cast<bool>(b.world))
            throw ParseError(it.line, it.col, {},
                             S.fun_rigid[f] ? "rigid op " + it.name + " belongs in the shared block"
                                            : "flexible op " + it.name + " belongs in a world block");
          int slot = S.fun_rigid[f] ? 0 : w;
          if (op_set[f][slot]) throw ParseError(it.line, it.col, {}, "repeated table for op " + it.name);
          op_set[f][slot] = 1;
          const auto& ar = S.fun_arg_sorts[f];
          int res = S.fun_result_sort[f];
          auto& tab = m.fun_tab[f][slot];
          std::vector<char> filled(tab.size(), 0);
          for (const auto& e : it.entries) {
            if (e.args.size() != ar.size())
              throw ParseError(e.line, e.col, {}, "op " + it.name + " expects " + std::to_string(ar.size()) + " arguments");
            std::vector<int> args;
            for (size_t i = 0; i < ar.size(); ++i) {
              int x = m.element_index(ar[i], w, e.args[i]);
              if (x < 0) throw ResolveError(pos(e.line, e.col) + "unknown element " + e.args[i] + " of " + S.sorts[ar[i]]);
              args.push_back(x);
            }
            std::size_t idx = m.index(ar, w, args.data());
            if (filled[idx]) throw ParseError(e.line, e.col, {}, "repeated entry for op " + it.name);
            filled[idx] = 1;
            if (e.value == "?") {
              if (!partial) throw ParseError(e.line, e.col, {}, "'?' requires a partial model");
              tab[idx] = kSentinel;
            } else {
              int v = m.element_index(res, w, e.value);
              if (v < 0) throw ResolveError(pos(e.line, e.col) + "unknown element " + e.value + " of " + S.sorts[res]);
              tab[idx] = v;
            }
          }
          if (m.size(res, w) > 0)
            for (char x : filled)
              if (!x) throw ResolveError(pos(it.line, it.col) + "op " + it.name + " is not total");
        } else {
          std::vector<int> cands;
          for (int r : S.rels_named(it.name))
            if (!it.profile || S.rels[r].arity == *it.profile) cands.push_back(r);
          if (cands.empty()) throw ResolveError(pos(it.line, it.col) + "unknown rel " + it.name);
          if (cands.size() > 1)
            throw ParseError(it.line, it.col, {"profile annotation"}, "rel " + it.name + " is overloaded");
          int r = cands[0];
          if (S.rel_rigid[r] == static_cast<bool>(b.world))
            throw ParseError(it.line, it.col, {},
                             S.rel_rigid[r] ? "rigid rel " + it.name + " belongs in the shared block"
                                            : "flexible rel " + it.name + " belongs in a world block");
          const auto& ar = S.rel_arg_sorts[r];
          auto& tab = m.rel_tab[r][S.rel_rigid[r] ? 0 : w];
          for (const auto& t : it.tuples) {
            if (t.size() != ar.size())
              throw ParseError(it.line, it.col, {}, "rel " + it.name + " expects tuples of length " + std::to_string(ar.size()));
            std::vector<int> args;
            for (size_t i = 0; i < ar.size(); ++i) {
              int x = m.element_index(ar[i], w, t[i]);
              if (x < 0) throw ResolveError(pos(it.line, it.col) + "unknown element " + t[i] + " of " + S.sorts[ar[i]]);
              args.push_back(x);
            }
            tab[m.index(ar, w, args.data())] = 1;
          }
        }
      }
    }
    for (size_t f = 0; f < S.funs.size(); ++f)
      for (size_t slot = 0; slot < op_set[f].size(); ++slot) {
        if (op_set[f][slot]) continue;
        int w = static_cast<int>(slot);
        bool empty_dom = m.domain_size(S.fun_arg_sorts[f], w) == 0;
        bool empty_cod = m.size(S.fun_result_sort[f], w) == 0;
        if (!empty_dom && !empty_cod)
          throw ResolveError(pos(start.line, start.col) + "model " + n + " gives no table for op " + S.funs[f].str() +
                             (S.fun_rigid[f] ? "" : " at " + m.worlds[slot]));
      }
    try {
      validate_model(m);
    } catch (const InvalidModel& e) {
      throw ParseError(start.line, start.col, {}, "invalid model " + n + ": " + e.what());
    }
    doc.models[n] = {sig_name, std::move(m)};
    doc.order.push_back({DeclKind::Model, n});
  }

  void presentation(Document& doc) {
    expect_kw("presentation");
    std::string n = fresh_decl_name(doc);
    expect_kw("over");
    std::string sig_name = peek().text;
    SigPtr sig = sig_ref(doc);
    Scope scope(sig);
    Presentation p{sig, {}};
    expect("{");
    while (!accept("}")) {
      p.sentences.push_back(sentence(scope));
      expect(";");
    }
    doc.presentations[n] = {sig_name, std::move(p)};
    doc.order.push_back({DeclKind::Presentation, n});
  }

  void sentence_decl(Document& doc) {
    expect_kw("sentence");
    std::string n = fresh_decl_name(doc);
    expect_kw("over");
    std::string sig_name = peek().text;
    SigPtr sig = sig_ref(doc);
    expect("=");
    Scope scope(sig);
    Sentence s = sentence(scope);
    expect(";");
    doc.sentences[n] = {sig_name, std::move(s)};
    doc.order.push_back({DeclKind::Sentence, n});
  }

  // ---- sentences
  Sentence sentence(const Scope& sc) { return implication(sc); }

  Sentence implication(const Scope& sc) {
    Sentence a = disjunction(sc);
    if (accept("->")) return sen::implies(a, implication(sc));
    return a;
  }

  Sentence disjunction(const Scope& sc) {
    std::vector<Sentence> parts{conjunction(sc)};
    while (accept("|")) parts.push_back(conjunction(sc));
    return parts.size() == 1 ? parts[0] : sen::disj(parts);
  }

  Sentence conjunction(const Scope& sc) {
    std::vector<Sentence> parts{unary(sc)};
    while (accept("&")) parts.push_back(unary(sc));
    return parts.size() == 1 ? parts[0] : sen::conj(parts);
  }

  Variable binder_var(const Scope& sc, bool nominal) {
    std::string x = name("variable");
    std::string sort = kNom;
    if (!nominal) {
      expect(":");
      sort = name("sort");
    } else if (accept(":")) {
      if (name("sort") != kNom) fail({"'nom'"}, "store binds nominal variables");
    }
    if (sort != kNom && sc.sig()->sort_index(sort) < 0) unresolved("unknown sort " + sort);
    return sc.variable(x, sort);
  }

  Sentence unary(const Scope& sc) {
    if (accept_kw("not") || accept("!")) return sen::neg(unary(sc));
    if (accept("@")) {
      std::string k = name("nominal");
      if (!sc.is_nominal(k)) unresolved("unknown nominal " + k);
      return sen::at(sc, k, unary(sc));
    }
    if (is_punct("<") || is_punct("[")) {
      bool dia = accept("<");
      if (!dia) expect("[");
      std::string l = name("modality");
      if (sc.sig()->modality_index(l) < 0) unresolved("unknown modality " + l);
      expect(dia ? ">" : "]");
      Sentence body = unary(sc);
      return dia ? sen::diamond(sc, l, body) : sen::box(sc, l, body);
    }
    bool ex = is_kw("exists"), fa = is_kw("forall"), st = is_kw("store");
    if (ex || fa || st) {
      ++pos_;
      Variable v = binder_var(sc, st);
      expect(".");
      Scope inner = sc.with(v);
      Sentence body = sentence(inner);
      if (st) return sen::store(sc, v, body);
      return ex ? sen::exists(sc, v, body) : sen::forall(sc, v, body);
    }
    return primary(sc);
  }

  std::vector<Sentence> sentence_block(const Scope& sc) {
    std::vector<Sentence> out;
    expect("{");
    while (!accept("}")) {
      out.push_back(sentence(sc));
      if (!accept(";")) {
        expect("}");
        break;
      }
    }
    return out;
  }

  Sentence primary(const Scope& sc) {
    if (accept_kw("top")) return sen::top();
    if (accept_kw("bot")) return sen::bot();
    if (accept_kw("or")) return sen::disj(sentence_block(sc));
    if (accept_kw("and")) return sen::conj(sentence_block(sc));
    if (accept_kw("until")) {
      expect("(");
      Sentence a = sentence(sc);
      expect(",");
      Sentence b = sentence(sc);
      expect(")");
      return sen::until(sc, a, b);
    }
    if (is_punct("(")) {
      size_t save = pos_;
      try {
        ++pos_;
        Sentence s = sentence(sc);
        expect(")");
        if (!is_punct("=") && !is_punct("!=")) return s;
      } catch (const ParseError&) {
      } catch (const ResolveError&) {
      }
      pos_ = save;
      return equation(sc);
    }
    if (peek().kind != Tok::Ident) fail({"sentence"}, "");
    const std::string& n = peek().text;
    bool followed_by_term_syntax = is_punct("(", 1) || is_punct("=", 1) || is_punct("!=", 1) || is_punct("@", 1);
    if (!peek().quoted && !followed_by_term_syntax && (n == "true" || n == "false") && !sc.is_nominal(n)) {
      ++pos_;
      return n == "true" ? sen::top() : sen::bot();
    }
    if (sc.is_nominal(n) && !followed_by_term_syntax) {
      ++pos_;
      return sen::nominal(sc, n);
    }
    if (!sc.sig()->rels_named(n).empty()) {
      size_t save = pos_;
      if (!sc.funs_named(n).empty()) {
        try {
          return equation(sc);
        } catch (const ParseError&) {
          pos_ = save;
        }
      }
      return relation(sc);
    }
    return equation(sc);
  }

  Sentence relation(const Scope& sc) {
    int line = peek().line, col = peek().col;
    std::string r = name("rel name");
    std::optional<std::string> at;
    if (accept("@")) {
      at = name("nominal");
      if (!sc.is_nominal(*at)) unresolved("unknown nominal " + *at);
    }
    std::vector<RawTerm> args;
    if (accept("(")) {
      if (!accept(")")) {
        args.push_back(raw_term());
        while (accept(",")) args.push_back(raw_term());
        expect(")");
      }
    }
    std::vector<Sentence> hits;
    for (int ri : sc.sig()->rels_named(r)) {
      const auto& rs = sc.sig()->rels[ri];
      if (rs.arity.size() != args.size()) continue;
      std::vector<std::vector<Term>> opts;
      for (size_t i = 0; i < args.size(); ++i) {
        auto inh = sc.is_rigid_sort(rs.arity[i]) ? std::nullopt : at;
        opts.push_back(resolve(sc, args[i], rs.arity[i], inh));
      }
      for_each_choice(opts, [&](const std::vector<Term>& ts) {
        try {
          hits.push_back(sen::rel(sc, rs, ts, at));
        } catch (const IllFormedSentence&) {
        } catch (const IllFormedTerm&) {
        }
      });
    }
    if (hits.empty()) throw ParseError(line, col, {}, "no declaration of rel " + r + " fits these arguments");
    if (hits.size() > 1) throw ParseError(line, col, {"annotated arguments"}, "ambiguous use of rel " + r);
    return hits[0];
  }

  Sentence equation(const Scope& sc) {
    int line = peek().line, col = peek().col;
    RawTerm l = raw_term();
    bool neq = false;
    if (accept("!=")) neq = true;
    else expect("=");
    RawTerm r = raw_term();
    auto ls = resolve(sc, l, std::nullopt, std::nullopt);
    auto rs = resolve(sc, r, std::nullopt, std::nullopt);
    std::vector<Sentence> hits;
    for (const auto& a : ls)
      for (const auto& b : rs)
        if (sort_of(a, sc) == sort_of(b, sc)) hits.push_back(sen::eq(sc, a, b));
    if (hits.empty()) throw ParseError(line, col, {}, "the two sides of the equation have no common sort");
    if (hits.size() > 1) throw ParseError(line, col, {"(t : Sort)"}, "ambiguous equation; annotate a side");
    return neq ? sen::neg(hits[0]) : hits[0];
  }

  // ---- terms
  RawTerm raw_term() {
    RawTerm t;
    t.line = peek().line;
    t.col = peek().col;
    if (accept("(")) {
      t = raw_term();
      expect(":");
      t.annot = name("sort");
      expect(")");
      return t;
    }
    t.name = name("term");
    if (accept("@")) t.at = name("nominal");
    if (accept("(")) {
      if (!accept(")")) {
        t.args.push_back(raw_term());
        while (accept(",")) t.args.push_back(raw_term());
        expect(")");
      }
    }
    return t;
  }

  template <class Fn>
  static void for_each_choice(const std::vector<std::vector<Term>>& opts, Fn&& fn) {
    std::vector<Term> cur(opts.size());
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == opts.size()) {
        fn(cur);
        return;
      }
      for (const auto& t : opts[i]) {
        cur[i] = t;
        rec(i + 1);
      }
    };
    rec(0);
  }

  std::vector<Term> resolve(const Scope& sc, const RawTerm& r, const std::optional<std::string>& want,
                            const std::optional<std::string>& inherited) {
    auto all = sc.funs_named(r.name);
    if (all.empty()) throw ResolveError(pos(r.line, r.col) + "unknown symbol " + r.name);
    if (r.at && !sc.is_nominal(*r.at)) throw ResolveError(pos(r.line, r.col) + "unknown nominal " + *r.at);
    std::vector<Term> out;
    std::set<std::string> seen;
    for (const auto& f : all) {
      if (f.arity.size() != r.args.size()) continue;
      if (want && f.result != *want) continue;
      if (r.annot && f.result != *r.annot) continue;
      bool rigid = sc.is_rigid_fun(f);
      std::optional<std::string> tag = r.at ? r.at : (rigid ? std::nullopt : inherited);
      std::vector<std::vector<Term>> opts;
      bool dead = false;
      for (size_t i = 0; i < r.args.size() && !dead; ++i) {
        auto inh = sc.is_rigid_sort(f.arity[i]) ? std::nullopt : tag;
        opts.push_back(resolve(sc, r.args[i], f.arity[i], inh));
        dead = opts.back().empty();
      }
      if (dead) continue;
      for_each_choice(opts, [&](const std::vector<Term>& args) {
        try {
          Term t = make_app(sc, f, args, tag);
          if (seen.insert(t->key).second) out.push_back(t);
        } catch (const IllFormedTerm&) {
        }
      });
    }
    return out;
  }

  Term term(const Scope& sc) {
    int line = peek().line, col = peek().col;
    RawTerm r = raw_term();
    auto ts = resolve(sc, r, std::nullopt, std::nullopt);
    if (ts.empty()) throw ParseError(line, col, {}, "ill-sorted term");
    if (ts.size() > 1) throw ParseError(line, col, {"(t : Sort)"}, "ambiguous term");
    return ts[0];
  }

  // Semantic errors raised by constructors, relocated to the current token.
  template <class Fn>
  auto located(Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const ParseError&) {
      throw;
    } catch (const ResolveError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(peek().line, peek().col, {}, e.kind() + ": " + e.what());
    }
  }

  void finish() {
    if (!at_end()) fail({"end of input"}, "");
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

bool Document::has(const std::string& n) const {
  return signatures.count(n) || morphisms.count(n) || squares.count(n) || models.count(n) || presentations.count(n) ||
         sentences.count(n);
}

template <class Map>
static const auto& lookup(const Map& m, const std::string& n, const char* what) {
  auto it = m.find(n);
  if (it == m.end()) throw ResolveError(std::string("unknown ") + what + " " + n);
  return it->second;
}

const SigPtr& Document::signature(const std::string& n) const { return lookup(signatures, n, "signature"); }
const SignatureMorphism& Document::morphism(const std::string& n) const {
  return lookup(morphisms, n, "morphism").morphism;
}
const SignatureSquare& Document::square(const std::string& n) const { return lookup(squares, n, "square").square; }
const KripkeStructure& Document::model(const std::string& n) const { return lookup(models, n, "model").model; }
const Presentation& Document::presentation(const std::string& n) const {
  return lookup(presentations, n, "presentation").presentation;
}
const Sentence& Document::sentence(const std::string& n) const { return lookup(sentences, n, "sentence").sentence; }

std::string Document::signature_name(const SigPtr& sig) const {
  for (const auto& e : order)
    if (e.kind == DeclKind::Signature && signatures.at(e.name)->fingerprint == sig->fingerprint) return e.name;
  for (const auto& [n, s] : signatures)
    if (s->fingerprint == sig->fingerprint) return n;
  return "";
}

Document parse_document(std::string_view text, Document base) {
  Parser p(text);
  p.located([&] { p.document(base); });
  return base;
}

Sentence parse_sentence(const Scope& scope, std::string_view text) {
  Parser p(text);
  Sentence s = p.located([&] { return p.sentence(scope); });
  p.finish();
  return s;
}

Term parse_term(const Scope& scope, std::string_view text) {
  Parser p(text);
  Term t = p.located([&] { return p.term(scope); });
  p.finish();
  return t;
}

}  // namespace hwb
