#include "nrcq/parser.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "nrcq/typecheck.hpp"

namespace nrcq {

namespace {

enum class Tok {
  Ident, Int, String,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Dot, Colon, Semicolon,
  Eq, EqEq, Neq, Lt, Le, Gt, Ge,
  AndAnd, OrOr, Bang, At,
  LArrow, RArrow, PlusPlus, MinusMinus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void err(const std::string& msg) { throw ParseError(line, col, msg); }

  char peek(size_t k = 0) const { return pos + k < src.size() ? src[pos + k] : '\0'; }

  void advance() {
    if (pos < src.size()) {
      if (src[pos] == '\n') { ++line; col = 1; } else { ++col; }
      ++pos;
    }
  }

  Token next() {
    for (;;) {
      while (isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '#') {
        while (peek() && peek() != '\n') advance();
        continue;
      }
      break;
    }
    int l = line, c = col;
    auto tok = [&](Tok k, std::string text) { return Token{k, std::move(text), l, c}; };
    char ch = peek();
    if (!ch) return tok(Tok::End, "");
    if (isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string s;
      while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        s += peek();
        advance();
      }
      return tok(Tok::Ident, s);
    }
    if (isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '-' && isdigit(static_cast<unsigned char>(peek(1))) && peek(1) != '-')) {
      std::string s;
      if (peek() == '-') { s += '-'; advance(); }
      while (isdigit(static_cast<unsigned char>(peek()))) { s += peek(); advance(); }
      return tok(Tok::Int, s);
    }
    if (ch == '"') {
      advance();
      std::string s;
      while (peek() && peek() != '"') {
        if (peek() == '\\' && peek(1) == '"') advance();
        s += peek();
        advance();
      }
      if (!peek()) err("unterminated string literal");
      advance();
      return tok(Tok::String, s);
    }
    auto two = [&](char a, char b) { return peek() == a && peek(1) == b; };
    if (two('=', '=')) { advance(); advance(); return tok(Tok::EqEq, "=="); }
    if (two('!', '=')) { advance(); advance(); return tok(Tok::Neq, "!="); }
    if (two('<', '-')) { advance(); advance(); return tok(Tok::LArrow, "<-"); }
    if (two('-', '>')) { advance(); advance(); return tok(Tok::RArrow, "->"); }
    if (two('<', '=')) { advance(); advance(); return tok(Tok::Le, "<="); }
    if (two('>', '=')) { advance(); advance(); return tok(Tok::Ge, ">="); }
    if (two('&', '&')) { advance(); advance(); return tok(Tok::AndAnd, "&&"); }
    if (two('|', '|')) { advance(); advance(); return tok(Tok::OrOr, "||"); }
    if (two('+', '+')) { advance(); advance(); return tok(Tok::PlusPlus, "++"); }
    if (two('-', '-')) { advance(); advance(); return tok(Tok::MinusMinus, "--"); }
    advance();
    switch (ch) {
      case '(': return tok(Tok::LParen, "(");
      case ')': return tok(Tok::RParen, ")");
      case '{': return tok(Tok::LBrace, "{");
      case '}': return tok(Tok::RBrace, "}");
      case '[': return tok(Tok::LBracket, "[");
      case ']': return tok(Tok::RBracket, "]");
      case ',': return tok(Tok::Comma, ",");
      case '.': return tok(Tok::Dot, ".");
      case ':': return tok(Tok::Colon, ":");
      case ';': return tok(Tok::Semicolon, ";");
      case '=': return tok(Tok::Eq, "=");
      case '<': return tok(Tok::Lt, "<");
      case '>': return tok(Tok::Gt, ">");
      case '!': return tok(Tok::Bang, "!");
      case '@': return tok(Tok::At, "@");
      default: err(std::string("unexpected character '") + ch + "'");
    }
  }
};

// Untyped surface tree; elaboration to core terms needs types.
struct SNode;
using SPtr = std::shared_ptr<SNode>;

enum class SK {
  Ident, IntLit, StringLit,
  Record, Project, For, SetSingleton, BagSingleton,
  EmptySetLit, EmptyBagLit,
  Union, BagPlus, BagMinus,
  BinOp, Not,
  Dedup, Promote, Empty, WhereSet, WhereBag,
  Fun, Call, GraphSet, GraphBag, GraphApp,
};

struct SGen {
  std::string var;
  SPtr source;
};

struct SNode {
  SK kind;
  int line = 0, col = 0;
  std::string name;                 // Ident, BinOp op, Project label, Fun binder
  std::vector<std::pair<std::string, SPtr>> fields;  // Record
  std::vector<SPtr> kids;
  std::vector<SGen> gens;           // For / Graph*
  SPtr guard;                       // For
  Type annot;                       // EmptySetLit/EmptyBagLit (collection), Fun param
};

struct Parser {
  Lexer lex;
  Token cur;

  explicit Parser(const std::string& src) : lex(src) { cur = lex.next(); }

  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(cur.line, cur.col, msg);
  }

  Token eat(Tok k, const std::string& what) {
    if (cur.kind != k) err("expected " + what + ", found '" + cur.text + "'");
    Token t = cur;
    cur = lex.next();
    return t;
  }

  bool at_ident(const std::string& s) const {
    return cur.kind == Tok::Ident && cur.text == s;
  }

  bool eat_ident(const std::string& s) {
    if (!at_ident(s)) return false;
    cur = lex.next();
    return true;
  }

  SPtr mk(SK k) {
    auto n = std::make_shared<SNode>();
    n->kind = k;
    n->line = cur.line;
    n->col = cur.col;
    return n;
  }

  Type type_expr() {
    if (cur.kind == Tok::Ident) {
      if (eat_ident("Int")) return arrow_tail(Type::integer());
      if (eat_ident("Bool")) return arrow_tail(Type::boolean());
      if (eat_ident("String")) return arrow_tail(Type::string());
      err("expected a type");
    }
    if (cur.kind == Tok::LBrace) {
      eat(Tok::LBrace, "'{'");
      Type e = type_expr();
      eat(Tok::RBrace, "'}'");
      return arrow_tail(Type::set(e));
    }
    if (cur.kind == Tok::LBracket) {
      eat(Tok::LBracket, "'['");
      Type e = type_expr();
      eat(Tok::RBracket, "']'");
      return arrow_tail(Type::bag(e));
    }
    if (cur.kind == Tok::LParen) {
      eat(Tok::LParen, "'('");
      if (cur.kind == Tok::RParen) {
        eat(Tok::RParen, "')'");
        return arrow_tail(Type::record({}));
      }
      // (l:T, ...) record or (T, ...) tuple or (T) parens.
      std::vector<std::pair<std::string, Type>> fields;
      bool labeled = false;
      int idx = 1;
      for (;;) {
        if (cur.kind == Tok::Ident) {
          // Lookahead for label ':'.
          Lexer save_lex = lex;
          Token save_cur = cur;
          std::string label = cur.text;
          cur = lex.next();
          if (cur.kind == Tok::Colon) {
            cur = lex.next();
            fields.emplace_back(label, type_expr());
            labeled = true;
          } else {
            lex = save_lex;
            cur = save_cur;
            fields.emplace_back(std::to_string(idx), type_expr());
          }
        } else {
          fields.emplace_back(std::to_string(idx), type_expr());
        }
        ++idx;
        if (cur.kind != Tok::Comma) break;
        eat(Tok::Comma, "','");
      }
      eat(Tok::RParen, "')'");
      if (!labeled && fields.size() == 1) return arrow_tail(fields[0].second);
      return arrow_tail(Type::record(std::move(fields)));
    }
    err("expected a type");
  }

  Type arrow_tail(Type t) {
    if (cur.kind == Tok::RArrow) {
      eat(Tok::RArrow, "'->'");
      return Type::fun(std::move(t), type_expr());
    }
    return t;
  }

  SPtr expr() { return or_expr(); }

  SPtr or_expr() {
    SPtr a = and_expr();
    while (cur.kind == Tok::OrOr || at_ident("or")) {
      auto n = mk(SK::BinOp);
      n->name = "||";
      cur = lex.next();
      n->kids = {a, and_expr()};
      a = n;
    }
    return a;
  }

  SPtr and_expr() {
    SPtr a = cmp_expr();
    while (cur.kind == Tok::AndAnd || at_ident("and")) {
      auto n = mk(SK::BinOp);
      n->name = "&&";
      cur = lex.next();
      n->kids = {a, cmp_expr()};
      a = n;
    }
    return a;
  }

  SPtr cmp_expr() {
    SPtr a = coll_expr();
    auto op = [&]() -> std::optional<std::string> {
      switch (cur.kind) {
        case Tok::EqEq: return "==";
        case Tok::Neq: return "!=";
        case Tok::Lt: return "<";
        case Tok::Le: return "<=";
        case Tok::Gt: return ">";
        case Tok::Ge: return ">=";
        default: return std::nullopt;
      }
    }();
    if (op) {
      auto n = mk(SK::BinOp);
      n->name = *op;
      cur = lex.next();
      n->kids = {a, coll_expr()};
      return n;
    }
    return a;
  }

  SPtr coll_expr() {
    SPtr a = unary_expr();
    for (;;) {
      if (eat_ident("union")) {
        auto n = mk(SK::Union);
        n->kids = {a, unary_expr()};
        a = n;
      } else if (cur.kind == Tok::PlusPlus) {
        cur = lex.next();
        auto n = mk(SK::BagPlus);
        n->kids = {a, unary_expr()};
        a = n;
      } else if (cur.kind == Tok::MinusMinus) {
        cur = lex.next();
        auto n = mk(SK::BagMinus);
        n->kids = {a, unary_expr()};
        a = n;
      } else {
        return a;
      }
    }
  }

  SPtr unary_expr() {
    if (cur.kind == Tok::Bang || at_ident("not")) {
      auto n = mk(SK::Not);
      cur = lex.next();
      n->kids = {unary_expr()};
      return n;
    }
    return postfix_expr();
  }

  SPtr postfix_expr() {
    SPtr a = primary();
    for (;;) {
      if (cur.kind == Tok::Dot) {
        eat(Tok::Dot, "'.'");
        auto n = mk(SK::Project);
        if (cur.kind == Tok::Ident || cur.kind == Tok::Int)
          n->name = cur.text;
        else
          err("expected a field label after '.'");
        cur = lex.next();
        n->kids = {a};
        a = n;
      } else if (cur.kind == Tok::LParen) {
        eat(Tok::LParen, "'('");
        auto n = mk(SK::Call);
        n->kids.push_back(a);
        if (cur.kind != Tok::RParen) {
          n->kids.push_back(expr());
          while (cur.kind == Tok::Comma) {
            eat(Tok::Comma, "','");
            n->kids.push_back(expr());
          }
        }
        eat(Tok::RParen, "')'");
        a = n;
      } else if (cur.kind == Tok::At) {
        eat(Tok::At, "'@'");
        eat(Tok::LParen, "'('");
        auto n = mk(SK::GraphApp);
        n->kids.push_back(a);
        if (cur.kind != Tok::RParen) {
          n->kids.push_back(expr());
          while (cur.kind == Tok::Comma) {
            eat(Tok::Comma, "','");
            n->kids.push_back(expr());
          }
        }
        eat(Tok::RParen, "')'");
        a = n;
      } else {
        return a;
      }
    }
  }

  std::vector<SGen> generator_list() {
    std::vector<SGen> gens;
    eat(Tok::LParen, "'('");
    for (;;) {
      Token v = eat(Tok::Ident, "a generator variable");
      eat(Tok::LArrow, "'<-'");
      gens.push_back({v.text, expr()});
      if (cur.kind != Tok::Comma) break;
      eat(Tok::Comma, "','");
    }
    eat(Tok::RParen, "')'");
    return gens;
  }

  SPtr primary() {
    switch (cur.kind) {
      case Tok::Int: {
        auto n = mk(SK::IntLit);
        n->name = cur.text;
        cur = lex.next();
        return n;
      }
      case Tok::String: {
        auto n = mk(SK::StringLit);
        n->name = cur.text;
        cur = lex.next();
        return n;
      }
      case Tok::LBrace: {
        auto n = mk(SK::SetSingleton);
        eat(Tok::LBrace, "'{'");
        n->kids = {expr()};
        eat(Tok::RBrace, "'}'");
        return n;
      }
      case Tok::LBracket: {
        auto n = mk(SK::BagSingleton);
        eat(Tok::LBracket, "'['");
        if (cur.kind == Tok::RBracket) {
          eat(Tok::RBracket, "']'");
          // []set : {T}  /  []bag : [T]
          bool is_set;
          if (eat_ident("set")) is_set = true;
          else if (eat_ident("bag")) is_set = false;
          else err("expected 'set' or 'bag' after '[]'");
          eat(Tok::Colon, "':'");
          Type ct = type_expr();
          auto e = mk(is_set ? SK::EmptySetLit : SK::EmptyBagLit);
          if (is_set ? !ct.is_set() : !ct.is_bag())
            err("empty collection annotation must be a " +
                std::string(is_set ? "set" : "bag") + " type");
          e->annot = ct;
          return e;
        }
        n->kids = {expr()};
        eat(Tok::RBracket, "']'");
        return n;
      }
      case Tok::LParen: {
        eat(Tok::LParen, "'('");
        if (cur.kind == Tok::RParen) {
          eat(Tok::RParen, "')'");
          auto n = mk(SK::Record);
          return n;
        }
        // Record literal if IDENT '=' follows.
        if (cur.kind == Tok::Ident) {
          Lexer save_lex = lex;
          Token save_cur = cur;
          std::string label = cur.text;
          cur = lex.next();
          if (cur.kind == Tok::Eq) {
            cur = lex.next();
            auto n = mk(SK::Record);
            n->fields.emplace_back(label, expr());
            while (cur.kind == Tok::Comma) {
              eat(Tok::Comma, "','");
              Token l = eat(Tok::Ident, "a record label");
              eat(Tok::Eq, "'='");
              n->fields.emplace_back(l.text, expr());
            }
            eat(Tok::RParen, "')'");
            return n;
          }
          lex = save_lex;
          cur = save_cur;
        }
        SPtr first = expr();
        if (cur.kind == Tok::Comma) {
          // Unlabeled tuple: labels "1", "2", ...
          auto n = mk(SK::Record);
          int idx = 1;
          n->fields.emplace_back(std::to_string(idx++), first);
          while (cur.kind == Tok::Comma) {
            eat(Tok::Comma, "','");
            n->fields.emplace_back(std::to_string(idx++), expr());
          }
          eat(Tok::RParen, "')'");
          return n;
        }
        eat(Tok::RParen, "')'");
        return first;
      }
      case Tok::Ident: {
        if (at_ident("for")) {
          cur = lex.next();
          auto n = mk(SK::For);
          n->gens = generator_list();
          if (eat_ident("where")) {
            bool parens = cur.kind == Tok::LParen;
            if (parens) eat(Tok::LParen, "'('");
            n->guard = expr();
            if (parens) eat(Tok::RParen, "')'");
          }
          n->kids = {expr()};
          return n;
        }
        if (at_ident("fun")) {
          cur = lex.next();
          auto n = mk(SK::Fun);
          eat(Tok::LParen, "'('");
          Token v = eat(Tok::Ident, "a parameter name");
          eat(Tok::Colon, "':'");
          n->name = v.text;
          n->annot = type_expr();
          eat(Tok::RParen, "')'");
          eat(Tok::RArrow, "'->'");
          n->kids = {expr()};
          return n;
        }
        if (at_ident("graphset") || at_ident("graphbag")) {
          bool is_set = cur.text == "graphset";
          cur = lex.next();
          auto n = mk(is_set ? SK::GraphSet : SK::GraphBag);
          n->gens = generator_list();
          eat(Tok::LParen, "'('");
          n->kids = {expr()};
          eat(Tok::RParen, "')'");
          return n;
        }
        static const std::map<std::string, SK> unary_builtins = {
            {"dedup", SK::Dedup}, {"promote", SK::Promote}, {"empty", SK::Empty}};
        auto ub = unary_builtins.find(cur.text);
        if (ub != unary_builtins.end()) {
          cur = lex.next();
          auto n = mk(ub->second);
          eat(Tok::LParen, "'('");
          n->kids = {expr()};
          eat(Tok::RParen, "')'");
          return n;
        }
        if (at_ident("whereset") || at_ident("wherebag")) {
          bool is_set = cur.text == "whereset";
          cur = lex.next();
          auto n = mk(is_set ? SK::WhereSet : SK::WhereBag);
          eat(Tok::LParen, "'('");
          n->kids.push_back(expr());
          eat(Tok::Comma, "','");
          n->kids.push_back(expr());
          eat(Tok::RParen, "')'");
          return n;
        }
        auto n = mk(SK::Ident);
        n->name = cur.text;
        cur = lex.next();
        return n;
      }
      default:
        err("expected an expression, found '" + cur.text + "'");
    }
  }
};

struct Elab {
  const Signature& sig;
  TypeEnv ctx;

  [[noreturn]] void err(const SNode& n, const std::string& msg) const {
    throw ParseError(n.line, n.col, msg);
  }

  Type type_of(const SNode& at, const TermPtr& t) {
    try {
      return typecheck(ctx, t, sig);
    } catch (const TypeError& e) {
      throw ParseError(at.line, at.col, e.what());
    }
  }

  TermPtr expand_eq(const SNode& at, const TermPtr& a, const TermPtr& b, const Type& ty) {
    if (ty.is_base()) return mk::eq(a, b);
    if (ty.is_record()) {
      std::vector<TermPtr> cs;
      for (const auto& [l, ft] : ty.fields())
        cs.push_back(expand_eq(at, mk::project(a, l), mk::project(b, l), ft));
      return mk::conj(std::move(cs));
    }
    err(at, "equality is not supported at type " + ty.show());
  }

  TermPtr elab(const SPtr& sn) {
    const SNode& n = *sn;
    switch (n.kind) {
      case SK::Ident: {
        if (ctx.count(n.name)) return mk::var(n.name);
        if (sig.table(n.name)) return mk::table(n.name);
        const PrimSig* p = sig.prim(n.name);
        if (p && p->args.empty()) return mk::prim(n.name, {});
        err(n, "unknown table or constant name: " + n.name);
      }
      case SK::IntLit:
        return mk::prim(n.name, {});
      case SK::StringLit:
        return mk::string_lit(n.name);
      case SK::Record: {
        std::vector<std::pair<std::string, TermPtr>> fs;
        for (const auto& [l, e] : n.fields) fs.emplace_back(l, elab(e));
        return mk::record(std::move(fs));
      }
      case SK::Project:
        return mk::project(elab(n.kids[0]), n.name);
      case SK::SetSingleton:
        return mk::set_singleton(elab(n.kids[0]));
      case SK::BagSingleton:
        return mk::bag_singleton(elab(n.kids[0]));
      case SK::EmptySetLit:
        return mk::empty_set(n.annot.elem());
      case SK::EmptyBagLit:
        return mk::empty_bag(n.annot.elem());
      case SK::Union:
        return mk::set_union(elab(n.kids[0]), elab(n.kids[1]));
      case SK::BagPlus:
        return mk::bag_union(elab(n.kids[0]), elab(n.kids[1]));
      case SK::BagMinus:
        return mk::bag_diff(elab(n.kids[0]), elab(n.kids[1]));
      case SK::Not:
        return mk::lnot(elab(n.kids[0]));
      case SK::BinOp: {
        TermPtr a = elab(n.kids[0]);
        TermPtr b = elab(n.kids[1]);
        if (n.name == "==" || n.name == "!=") {
          Type ta = type_of(n, a);
          Type tb = type_of(n, b);
          if (!(ta == tb))
            err(n, "cannot compare " + ta.show() + " with " + tb.show());
          if (!ta.is_base()) {
            TermPtr e = expand_eq(n, a, b, ta);
            return n.name == "==" ? e : mk::lnot(e);
          }
        }
        return mk::prim(n.name, {a, b});
      }
      case SK::Dedup:
        return mk::dedup(elab(n.kids[0]));
      case SK::Promote:
        return mk::promote(elab(n.kids[0]));
      case SK::Empty: {
        TermPtr a = elab(n.kids[0]);
        Type t = type_of(n, a);
        if (t.is_set()) return mk::empty_set_test(a);
        if (t.is_bag()) return mk::empty_bag_test(a);
        err(n, "empty(...) needs a collection, got " + t.show());
      }
      case SK::WhereSet:
        return mk::where_set(elab(n.kids[0]), elab(n.kids[1]));
      case SK::WhereBag:
        return mk::where_bag(elab(n.kids[0]), elab(n.kids[1]));
      case SK::Fun: {
        auto saved = ctx.count(n.name) ? std::optional<Type>(ctx[n.name]) : std::nullopt;
        ctx[n.name] = n.annot;
        TermPtr body = elab(n.kids[0]);
        if (saved) ctx[n.name] = *saved; else ctx.erase(n.name);
        return mk::lam(n.name, n.annot, body);
      }
      case SK::Call: {
        // Either a primitive application or a function application.
        const SNode& head = *n.kids[0];
        if (head.kind == SK::Ident && !ctx.count(head.name) && sig.prim(head.name)) {
          std::vector<TermPtr> args;
          for (size_t i = 1; i < n.kids.size(); ++i) args.push_back(elab(n.kids[i]));
          return mk::prim(head.name, std::move(args));
        }
        if (n.kids.size() != 2)
          err(n, "function application takes exactly one argument");
        return mk::app(elab(n.kids[0]), elab(n.kids[1]));
      }
      case SK::For:
        return elab_for(n);
      case SK::GraphSet:
      case SK::GraphBag: {
        GeneratorList gens;
        std::vector<std::pair<std::string, std::optional<Type>>> saved;
        for (const auto& g : n.gens) {
          TermPtr src = elab(g.source);
          Type st = type_of(n, src);
          if (!st.is_set()) err(n, "graph generator " + g.var + " must range over a set");
          gens.push_back({g.var, src});
          saved.emplace_back(g.var, ctx.count(g.var) ? std::optional<Type>(ctx[g.var])
                                                     : std::nullopt);
          ctx[g.var] = st.elem();
        }
        TermPtr body = elab(n.kids[0]);
        for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
          if (it->second) ctx[it->first] = *it->second; else ctx.erase(it->first);
        }
        return n.kind == SK::GraphSet ? mk::graph_abs_set(std::move(gens), body)
                                      : mk::graph_abs_bag(std::move(gens), body);
      }
      case SK::GraphApp: {
        TermPtr g = elab(n.kids[0]);
        std::vector<TermPtr> args;
        for (size_t i = 1; i < n.kids.size(); ++i) args.push_back(elab(n.kids[i]));
        return mk::graph_app(g, std::move(args));
      }
    }
    err(n, "unreachable surface node");
  }

  TermPtr elab_for(const SNode& n) {
    struct GenInfo {
      std::string var;
      TermPtr src;
      Type src_type;
    };
    std::vector<GenInfo> gens;
    std::vector<std::pair<std::string, std::optional<Type>>> saved;
    for (const auto& g : n.gens) {
      TermPtr src = elab(g.source);
      Type st = type_of(n, src);
      if (!st.is_collection())
        err(n, "generator " + g.var + " must range over a collection, got " + st.show());
      gens.push_back({g.var, src, st});
      saved.emplace_back(g.var, ctx.count(g.var) ? std::optional<Type>(ctx[g.var])
                                                 : std::nullopt);
      ctx[g.var] = st.elem();
    }
    TermPtr guard = n.guard ? elab(n.guard) : nullptr;
    TermPtr body = elab(n.kids[0]);
    Type body_t = type_of(n, body);
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
      if (it->second) ctx[it->first] = *it->second; else ctx.erase(it->first);
    }
    if (!body_t.is_collection())
      err(n, "comprehension body must be a collection, got " + body_t.show());
    bool bag = body_t.is_bag();
    GeneratorList core_gens;
    for (auto& g : gens) {
      TermPtr src = g.src;
      if (bag && g.src_type.is_set()) src = mk::promote(src);  // implicit iota
      if (!bag && g.src_type.is_bag())
        err(n, "set comprehension generator " + g.var +
                   " ranges over a bag; apply dedup explicitly");
      core_gens.push_back({g.var, src});
    }
    TermPtr head = body;
    if (guard) head = bag ? mk::where_bag(head, guard) : mk::where_set(head, guard);
    return bag ? mk::bag_comp(head, std::move(core_gens))
               : mk::set_comp(head, std::move(core_gens));
  }
};

}  // namespace

TermPtr parse(const std::string& source, const Signature& sig) {
  Parser p(source);
  SPtr tree = p.expr();
  if (p.cur.kind != Tok::End)
    throw ParseError(p.cur.line, p.cur.col,
                     "trailing input after expression: '" + p.cur.text + "'");
  Elab e{sig, {}};
  return e.elab(tree);
}

Type parse_type(const std::string& source) {
  Parser p(source);
  Type t = p.type_expr();
  if (p.cur.kind != Tok::End)
    throw ParseError(p.cur.line, p.cur.col, "trailing input after type");
  return t;
}

}  // namespace nrcq
