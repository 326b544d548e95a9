#include "ipa/parser.hpp"

#include <set>

#include "ipa/lexer.hpp"

namespace ipa {

namespace {

ExprPtr mk(Expr::K k, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  e->span = std::move(span);
  return e;
}

const std::set<std::string> kBuiltins = {"Cardinality", "Len", "Append",
                                         "SubSeq", "Insert"};

class Parser {
 public:
  Parser(std::vector<Token> toks, Diagnostics& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& cur() const { return peek(0); }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return cur().kind == Token::Kind::End; }

  void err(const std::string& msg) { err(msg, cur().span); }
  void err(const std::string& msg, SourceSpan span) {
    diags_.push_back(error("E-parse", msg, std::move(span)));
    failed_ = true;
  }
  bool failed() const { return failed_; }

  bool accept_punct(const char* p) {
    if (cur().is_punct(p)) {
      take();
      return true;
    }
    return false;
  }
  bool accept_key(const char* k) {
    if (cur().is_key(k)) {
      take();
      return true;
    }
    return false;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) err(std::string("expected '") + p + "'");
  }
  void expect_key(const char* k) {
    if (!accept_key(k)) err(std::string("expected '") + k + "'");
  }
  std::string expect_ident(const char* what) {
    if (cur().kind == Token::Kind::Ident) return take().text;
    err(std::string("expected ") + what);
    return "";
  }
  void expect_newline() {
    if (cur().kind == Token::Kind::Newline) {
      take();
      return;
    }
    if (at_end()) return;
    err("expected end of line");
    sync_to_newline();
  }
  void sync_to_newline() {
    while (!at_end() && cur().kind != Token::Kind::Newline) take();
    if (cur().kind == Token::Kind::Newline) take();
  }
  void skip_newlines() {
    while (cur().kind == Token::Kind::Newline) take();
  }

  // --- expressions ---

  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr a = parse_or();
    if (accept_key("implies")) {
      ExprPtr b = parse_implies();  // right associative
      ExprPtr e = mk(Expr::K::Implies, a ? a->span : cur().span);
      e->kids = {a, b};
      return e;
    }
    return a;
  }

  ExprPtr parse_or() {
    ExprPtr a = parse_and();
    while (cur().is_key("or")) {
      SourceSpan sp = take().span;
      ExprPtr b = parse_and();
      ExprPtr e = mk(Expr::K::Or, sp);
      e->kids = {a, b};
      a = e;
    }
    return a;
  }

  ExprPtr parse_and() {
    ExprPtr a = parse_not();
    while (cur().is_key("and")) {
      SourceSpan sp = take().span;
      ExprPtr b = parse_not();
      ExprPtr e = mk(Expr::K::And, sp);
      e->kids = {a, b};
      a = e;
    }
    return a;
  }

  ExprPtr parse_not() {
    if (cur().is_key("not")) {
      SourceSpan sp = take().span;
      ExprPtr a = parse_not();
      ExprPtr e = mk(Expr::K::Not, sp);
      e->kids = {a};
      return e;
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    ExprPtr a = parse_add();
    char op = 0;
    if (cur().is_punct("=")) op = '=';
    else if (cur().is_punct("/=")) op = '!';
    else if (cur().is_punct("<")) op = '<';
    else if (cur().is_punct("<=")) op = 'l';
    else if (cur().is_punct(">")) op = '>';
    else if (cur().is_punct(">=")) op = 'g';
    if (op) {
      SourceSpan sp = take().span;
      ExprPtr b = parse_add();
      ExprPtr e = mk(Expr::K::Cmp, sp);
      e->op = op;
      e->kids = {a, b};
      return e;
    }
    if (cur().is_key("in") || cur().is_key("notin")) {
      bool neg = cur().is_key("notin");
      SourceSpan sp = take().span;
      ExprPtr b = parse_add();
      ExprPtr e = mk(Expr::K::In, sp);
      e->kids = {a, b};
      if (!neg) return e;
      ExprPtr n = mk(Expr::K::Not, sp);
      n->kids = {e};
      return n;
    }
    return a;
  }

  ExprPtr parse_add() {
    ExprPtr a = parse_mul();
    for (;;) {
      char op = 0;
      bool is_union = false;
      if (cur().is_punct("+")) op = '+';
      else if (cur().is_punct("-")) op = '-';
      else if (cur().is_key("union")) is_union = true;
      else break;
      SourceSpan sp = take().span;
      ExprPtr b = parse_mul();
      ExprPtr e = mk(is_union ? Expr::K::Union : Expr::K::Arith, sp);
      e->op = op;
      e->kids = {a, b};
      a = e;
    }
    return a;
  }

  ExprPtr parse_mul() {
    ExprPtr a = parse_postfix();
    while (cur().is_punct("*")) {
      SourceSpan sp = take().span;
      ExprPtr b = parse_postfix();
      ExprPtr e = mk(Expr::K::Arith, sp);
      e->op = '*';
      e->kids = {a, b};
      a = e;
    }
    return a;
  }

  ExprPtr parse_postfix() {
    ExprPtr a = parse_primary();
    for (;;) {
      if (cur().is_punct("[")) {
        SourceSpan sp = take().span;
        ExprPtr idx = parse_expr();
        expect_punct("]");
        ExprPtr e = mk(Expr::K::Index, sp);
        e->kids = {a, idx};
        a = e;
      } else if (cur().is_punct(".") && peek(1).kind == Token::Kind::Ident) {
        SourceSpan sp = take().span;
        ExprPtr e = mk(Expr::K::Field, sp);
        e->name = take().text;
        e->kids = {a};
        a = e;
      } else {
        break;
      }
    }
    return a;
  }

  // A lone identifier is a sort reference unless it starts a range bound
  // expression (constant arithmetic followed by "..").
  bool domain_is_sort() const {
    if (cur().kind != Token::Kind::Ident) return false;
    const Token& n = peek(1);
    return !(n.is_punct("..") || n.is_punct("+") || n.is_punct("-") ||
             n.is_punct("*"));
  }

  // Binder domain: a sort name or a constant integer range lo..hi.
  std::shared_ptr<BinderDomain> parse_binder_domain() {
    auto d = std::make_shared<BinderDomain>();
    d->span = cur().span;
    if (domain_is_sort()) {
      d->k = BinderDomain::K::Sort;
      d->sort = take().text;
      return d;
    }
    d->k = BinderDomain::K::Range;
    d->lo = parse_add();
    expect_punct("..");
    d->hi = parse_add();
    return d;
  }

  ExprPtr parse_quantifier(bool is_forall) {
    SourceSpan sp = take().span;  // forall/exists
    std::string var = expect_ident("bound variable");
    expect_key("in");
    auto dom = parse_binder_domain();
    expect_punct(":");
    ExprPtr body = parse_expr();
    ExprPtr e = mk(is_forall ? Expr::K::Forall : Expr::K::Exists, sp);
    e->name = var;
    e->dom = dom;
    e->kids = {body};
    return e;
  }

  ExprPtr parse_braces() {
    SourceSpan sp = take().span;  // '{'
    if (accept_punct("}")) return mk(Expr::K::SetLit, sp);
    // "{ x in D : pred }" is a filtered set; anything else is a literal.
    if (cur().kind == Token::Kind::Ident && peek(1).is_key("in")) {
      std::string var = take().text;
      take();  // in
      auto dom = parse_binder_domain();
      expect_punct(":");
      ExprPtr pred = parse_expr();
      expect_punct("}");
      ExprPtr e = mk(Expr::K::SetFilter, sp);
      e->name = var;
      e->dom = dom;
      e->kids = {pred};
      return e;
    }
    ExprPtr e = mk(Expr::K::SetLit, sp);
    e->kids.push_back(parse_expr());
    while (accept_punct(",")) e->kids.push_back(parse_expr());
    expect_punct("}");
    return e;
  }

  ExprPtr parse_seq_lit() {
    SourceSpan sp = take().span;  // '<<'
    ExprPtr e = mk(Expr::K::SeqLit, sp);
    if (accept_punct(">>")) return e;
    e->kids.push_back(parse_expr());
    while (accept_punct(",")) e->kids.push_back(parse_expr());
    expect_punct(">>");
    return e;
  }

  // '[' forms: map comprehension, record literal, or functional update.
  ExprPtr parse_brackets() {
    SourceSpan sp = take().span;  // '['
    if (cur().kind == Token::Kind::Ident && peek(1).is_key("in")) {
      std::string var = take().text;
      take();  // in
      auto dom = parse_binder_domain();
      expect_punct("|->");
      ExprPtr body = parse_expr();
      expect_punct("]");
      ExprPtr e = mk(Expr::K::MapCompr, sp);
      e->name = var;
      e->dom = dom;
      e->kids = {body};
      return e;
    }
    if (cur().kind == Token::Kind::Ident && peek(1).is_punct("|->")) {
      ExprPtr e = mk(Expr::K::RecLit, sp);
      do {
        std::string field = expect_ident("field name");
        expect_punct("|->");
        e->rec_fields.emplace_back(field, parse_expr());
      } while (accept_punct(","));
      expect_punct("]");
      return e;
    }
    ExprPtr base = parse_expr();
    expect_key("except");
    if (accept_punct(".")) {
      std::string field = expect_ident("field name");
      expect_punct("=");
      ExprPtr val = parse_expr();
      expect_punct("]");
      ExprPtr e = mk(Expr::K::RecExcept, sp);
      e->name = field;
      e->kids = {base, val};
      return e;
    }
    expect_punct("[");
    ExprPtr key = parse_expr();
    expect_punct("]");
    expect_punct("=");
    ExprPtr val = parse_expr();
    expect_punct("]");
    ExprPtr e = mk(Expr::K::MapExcept, sp);
    e->kids = {base, key, val};
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Token::Kind::Int: {
        ExprPtr e = mk(Expr::K::IntLit, t.span);
        e->ival = take().ival;
        return e;
      }
      case Token::Kind::Key: {
        if (t.text == "true" || t.text == "false") {
          ExprPtr e = mk(Expr::K::BoolLit, t.span);
          e->bval = take().text == "true";
          return e;
        }
        if (t.text == "if") {
          SourceSpan sp = take().span;
          ExprPtr c = parse_expr();
          expect_key("then");
          ExprPtr a = parse_expr();
          expect_key("else");
          ExprPtr b = parse_expr();
          ExprPtr e = mk(Expr::K::If, sp);
          e->kids = {c, a, b};
          return e;
        }
        if (t.text == "forall") return parse_quantifier(true);
        if (t.text == "exists") return parse_quantifier(false);
        err("unexpected '" + t.text + "' in expression");
        take();
        return mk(Expr::K::BoolLit, t.span);
      }
      case Token::Kind::Ident: {
        if (peek(1).is_punct("(") && kBuiltins.count(t.text)) {
          SourceSpan sp = take().span;
          std::string fn = toks_[pos_ - 1].text;
          take();  // '('
          std::vector<ExprPtr> args;
          if (!cur().is_punct(")")) {
            args.push_back(parse_expr());
            while (accept_punct(",")) args.push_back(parse_expr());
          }
          expect_punct(")");
          return make_builtin(fn, std::move(args), sp);
        }
        ExprPtr e = mk(Expr::K::VarRef, t.span);  // reclassified on resolve
        e->name = take().text;
        return e;
      }
      case Token::Kind::Punct: {
        if (t.text == "(") {
          take();
          ExprPtr e = parse_expr();
          expect_punct(")");
          return e;
        }
        if (t.text == "{") return parse_braces();
        if (t.text == "<<") return parse_seq_lit();
        if (t.text == "[") return parse_brackets();
        if (t.text == "-") {
          // unary minus over a literal; general negative values are not
          // needed by the language (arithmetic is + - * over naturals).
          SourceSpan sp = take().span;
          ExprPtr a = parse_postfix();
          ExprPtr zero = mk(Expr::K::IntLit, sp);
          ExprPtr e = mk(Expr::K::Arith, sp);
          e->op = '-';
          e->kids = {zero, a};
          return e;
        }
        break;
      }
      default:
        break;
    }
    err("expected expression");
    Token bad = take();
    return mk(Expr::K::BoolLit, bad.span);
  }

  ExprPtr make_builtin(const std::string& fn, std::vector<ExprPtr> args,
                       SourceSpan sp) {
    auto need = [&](size_t n) {
      if (args.size() != n) {
        err(fn + " takes " + std::to_string(n) + " argument(s)", sp);
        while (args.size() < n) args.push_back(mk(Expr::K::BoolLit, sp));
        args.resize(n);
      }
    };
    ExprPtr e;
    if (fn == "Cardinality") {
      need(1);
      e = mk(Expr::K::Card, sp);
    } else if (fn == "Len") {
      need(1);
      e = mk(Expr::K::Len, sp);
    } else if (fn == "Append") {
      need(2);
      e = mk(Expr::K::Append, sp);
    } else if (fn == "Insert") {
      need(2);
      e = mk(Expr::K::Insert, sp);
    } else {
      need(3);
      e = mk(Expr::K::SubSeq, sp);
    }
    e->kids = std::move(args);
    return e;
  }

  // --- declarations ---

  VarDomain parse_var_domain() {
    VarDomain d;
    d.span = cur().span;
    if (accept_key("bool")) {
      d.k = VarDomain::K::Bool;
      return d;
    }
    if (accept_key("set")) {
      expect_key("of");
      d.k = VarDomain::K::Set;
      d.elem = std::make_shared<VarDomain>(parse_var_domain());
      return d;
    }
    if (accept_key("seq")) {
      expect_key("of");
      d.k = VarDomain::K::Seq;
      d.elem = std::make_shared<VarDomain>(parse_var_domain());
      return d;
    }
    if (accept_key("map")) {
      d.k = VarDomain::K::Map;
      d.key = parse_binder_domain();
      expect_punct("->");
      d.elem = std::make_shared<VarDomain>(parse_var_domain());
      return d;
    }
    if (cur().is_punct("[")) {
      take();
      d.k = VarDomain::K::Rec;
      do {
        std::string field = expect_ident("field name");
        expect_punct(":");
        d.fields.emplace_back(field, parse_var_domain());
      } while (accept_punct(","));
      expect_punct("]");
      return d;
    }
    if (domain_is_sort()) {
      d.k = VarDomain::K::Sort;
      d.sort = take().text;
      return d;
    }
    d.k = VarDomain::K::IntRange;
    d.lo = parse_add();
    expect_punct("..");
    d.hi = parse_add();
    return d;
  }

  void parse_action(Module& mod) {
    take();  // 'action'
    Action a;
    a.span = cur().span;
    a.name = expect_ident("action name");
    if (accept_punct("(")) {
      if (!cur().is_punct(")")) {
        do {
          Param p;
          p.span = cur().span;
          p.name = expect_ident("parameter name");
          expect_key("in");
          p.dom = *parse_binder_domain();
          a.params.push_back(std::move(p));
        } while (accept_punct(","));
      }
      expect_punct(")");
    }
    expect_newline();
    for (;;) {
      skip_newlines();
      if (cur().is_key("when")) {
        take();
        a.guards.push_back(parse_expr());
        expect_newline();
      } else if (cur().is_key("then")) {
        take();
        Update u;
        u.span = cur().span;
        u.var = expect_ident("variable name");
        expect_punct("'");
        expect_punct("=");
        u.rhs = parse_expr();
        a.updates.push_back(std::move(u));
        expect_newline();
      } else if (cur().is_key("unchanged")) {
        // Documentation only: unlisted variables are implicitly unchanged.
        take();
        expect_ident("variable name");
        while (accept_punct(",")) expect_ident("variable name");
        expect_newline();
      } else {
        break;
      }
    }
    mod.actions.push_back(std::move(a));
  }

  std::optional<Manifest> parse_manifest_body() {
    Manifest m;
    skip_newlines();
    expect_key("manifest");
    m.span = cur().span;
    m.name = expect_ident("manifest name");
    expect_newline();
    for (;;) {
      skip_newlines();
      if (at_end()) break;
      if (cur().is_key("spec")) {
        SourceSpan sp = take().span;
        if (!m.root_path.empty()) err("duplicate spec entry", sp);
        m.root_path = expect_quoted("spec path");
        expect_newline();
      } else if (cur().is_key("module")) {
        take();
        Manifest::AbstractionEntry e;
        e.span = cur().span;
        e.module = expect_ident("module name");
        expect_punct("=");
        e.path = expect_quoted("abstraction path");
        m.abstractions.push_back(std::move(e));
        expect_newline();
      } else if (cur().is_key("map")) {
        take();
        Manifest::ActionMapEntry e;
        e.span = cur().span;
        e.module = expect_ident("module name");
        expect_punct(".");
        e.action = expect_ident("action name");
        expect_punct("->");
        if (accept_key("void")) {
          e.is_void = true;
        } else {
          e.abs_module = expect_ident("abstract module name");
          expect_punct(".");
          e.abs_action = expect_ident("abstract action name");
          // Explicit binding expressions over the concrete action's
          // parameters; omitted = positional identity.
          if (accept_punct("(")) {
            if (!cur().is_punct(")")) {
              do {
                e.args.push_back(parse_expr());
              } while (accept_punct(","));
            }
            expect_punct(")");
          }
        }
        m.action_map.push_back(std::move(e));
        expect_newline();
      } else if (cur().is_key("refine")) {
        take();
        Manifest::RefineEntry e;
        e.span = cur().span;
        e.var = expect_ident("variable name");
        expect_punct("=");
        e.expr = parse_expr();
        m.refine.push_back(std::move(e));
        expect_newline();
      } else if (cur().is_key("invariant")) {
        take();
        Manifest::InvariantEntry e;
        e.span = cur().span;
        e.name = expect_ident("invariant name");
        expect_punct("=");
        e.expr = parse_expr();
        m.invariants.push_back(std::move(e));
        expect_newline();
      } else {
        err("expected manifest entry (spec, module, map, refine, invariant)");
        sync_to_newline();
      }
    }
    if (m.root_path.empty())
      err("manifest is missing its spec entry", m.span);
    return m;
  }

  std::string expect_quoted(const char* what) {
    const Token& t = cur();
    if (t.kind == Token::Kind::Punct && t.text.size() >= 2 &&
        t.text.front() == '"' && t.text.back() == '"') {
      std::string s = t.text.substr(1, t.text.size() - 2);
      take();
      return s;
    }
    err(std::string("expected quoted ") + what);
    return "";
  }

  std::optional<Spec> parse_spec_file() {
    Spec spec;
    skip_newlines();
    expect_key("spec");
    spec.span = cur().span;
    spec.name = expect_ident("spec name");
    expect_newline();
    for (;;) {
      skip_newlines();
      if (at_end()) break;
      if (cur().is_key("const")) {
        take();
        ConstDecl c;
        c.span = cur().span;
        c.name = expect_ident("constant name");
        expect_punct("=");
        c.expr = parse_add();
        spec.consts.push_back(std::move(c));
        expect_newline();
      } else if (cur().is_key("sort")) {
        take();
        SortDecl s;
        s.span = cur().span;
        s.name = expect_ident("sort name");
        expect_punct("=");
        expect_punct("{");
        do {
          s.members.push_back(expect_ident("sort member"));
        } while (accept_punct(","));
        expect_punct("}");
        spec.sorts.push_back(std::move(s));
        expect_newline();
      } else if (cur().is_key("vars")) {
        take();
        expect_newline();
        skip_newlines();
        while (cur().kind == Token::Kind::Ident) {
          VarDecl v;
          v.span = cur().span;
          v.name = take().text;
          expect_punct(":");
          v.domain = parse_var_domain();
          expect_newline();
          spec.vars.push_back(std::move(v));
          skip_newlines();
        }
      } else if (cur().is_key("init")) {
        take();
        expect_newline();
        skip_newlines();
        while (cur().kind == Token::Kind::Ident) {
          SourceSpan sp = cur().span;
          std::string name = take().text;
          expect_punct("=");
          ExprPtr e = parse_expr();
          expect_newline();
          init_entries_.emplace_back(name, e, sp);
          skip_newlines();
        }
      } else if (cur().is_key("module")) {
        take();
        Module m;
        m.span = cur().span;
        m.name = expect_ident("module name");
        expect_newline();
        for (;;) {
          skip_newlines();
          if (cur().is_key("action")) parse_action(m);
          else break;
        }
        spec.modules.push_back(std::move(m));
      } else {
        err("expected declaration (const, sort, vars, init, module)");
        sync_to_newline();
      }
    }
    attach_inits(spec);
    return spec;
  }

  void attach_inits(Spec& spec) {
    for (auto& [name, expr, sp] : init_entries_) {
      bool found = false;
      for (VarDecl& v : spec.vars) {
        if (v.name == name) {
          if (v.init) err("duplicate init for variable '" + name + "'", sp);
          v.init = expr;
          found = true;
          break;
        }
      }
      if (!found) err("init for undeclared variable '" + name + "'", sp);
    }
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  Diagnostics& diags_;
  bool failed_ = false;
  std::vector<std::tuple<std::string, ExprPtr, SourceSpan>> init_entries_;
};

}  // namespace

SpecParse parse_spec(const std::string& text, const std::string& origin) {
  SpecParse result;
  std::vector<Token> toks = lex(text, origin, result.diags);
  if (has_errors(result.diags)) return result;
  Parser p(std::move(toks), result.diags);
  auto spec = p.parse_spec_file();
  if (has_errors(result.diags)) return result;
  resolve_spec(*spec, result.diags);
  if (!has_errors(result.diags)) result.spec = std::move(spec);
  return result;
}

ManifestParse parse_manifest(const std::string& text,
                             const std::filesystem::path& origin) {
  ManifestParse result;
  std::vector<Token> toks = lex(text, origin.string(), result.diags);
  if (has_errors(result.diags)) return result;
  Parser p(std::move(toks), result.diags);
  auto m = p.parse_manifest_body();
  if (!has_errors(result.diags)) {
    m->origin = origin;
    result.manifest = std::move(m);
  }
  return result;
}

}  // namespace ipa
