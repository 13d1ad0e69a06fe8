#include "rqpap/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace rqpap {

namespace {

enum class Tok : std::uint8_t {
  Ident, Nat,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Tilde, Dot, Plus, SPar, Par, CMerge, EMerge,
  Less, Greater, Comma, Semi, Eq, Star,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const char* tok_name(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Nat: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Tilde: return "'~'";
    case Tok::Dot: return "'.'";
    case Tok::Plus: return "'+'";
    case Tok::SPar: return "'|'";
    case Tok::Par: return "'||'";
    case Tok::CMerge: return "'><'";
    case Tok::EMerge: return "'##'";
    case Tok::Less: return "'<'";
    case Tok::Greater: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Eq: return "'='";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto span1 = [&](int len) { return SourceSpan{line, col, len}; };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (c == ' ' || c == '\t' || c == '\r') { ++col; ++i; continue; }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') { ++i; ++col; }
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      int len = static_cast<int>(j - i);
      out.push_back({Tok::Ident, text.substr(i, j - i), span1(len)});
      col += len; i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      int len = static_cast<int>(j - i);
      out.push_back({Tok::Nat, text.substr(i, j - i), span1(len)});
      col += len; i = j;
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (two('|', '|')) { out.push_back({Tok::Par, "||", span1(2)}); i += 2; col += 2; continue; }
    if (two('>', '<')) { out.push_back({Tok::CMerge, "><", span1(2)}); i += 2; col += 2; continue; }
    if (two('#', '#')) { out.push_back({Tok::EMerge, "##", span1(2)}); i += 2; col += 2; continue; }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '~': k = Tok::Tilde; break;
      case '.': k = Tok::Dot; break;
      case '+': k = Tok::Plus; break;
      case '|': k = Tok::SPar; break;
      case '<': k = Tok::Less; break;
      case '>': k = Tok::Greater; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case '=': k = Tok::Eq; break;
      case '*': k = Tok::Star; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", span1(1));
    }
    out.push_back({k, std::string(1, c), span1(1)});
    ++i; ++col;
  }
  out.push_back({Tok::End, "", span1(1)});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "delta" || s == "tau" || s == "encap" || s == "abs";
}

// Recursive-descent parser over the token stream.  Also hosts the model-file
// statement grammar so source spans stay correct across a whole file.
class Parser {
 public:
  Parser(std::vector<Token> toks, const Model& model)
      : toks_(std::move(toks)), model_(&model) {}

  // --- token plumbing -------------------------------------------------------
  const Token& peek(int k = 0) const {
    std::size_t i = pos_ + static_cast<std::size_t>(k);
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k, const std::string& ctx) {
    if (peek().kind != k)
      throw ParseError("expected " + std::string(tok_name(k)) + " " + ctx +
                           ", found " + std::string(tok_name(peek().kind)),
                       peek().span);
    return toks_[pos_++];
  }
  bool at_end() const { return peek().kind == Tok::End; }

  // --- term grammar ---------------------------------------------------------
  TermPtr term() { return sum(); }

  TermPtr sum() {
    std::vector<TermPtr> parts;
    parts.push_back(par());
    while (accept(Tok::Plus)) parts.push_back(par());
    return parts.size() == 1 ? parts[0] : Term::sum(std::move(parts));
  }

  static bool is_parop(Tok k) {
    return k == Tok::SPar || k == Tok::Par || k == Tok::CMerge || k == Tok::EMerge;
  }

  TermPtr par() {
    TermPtr acc = seq();
    if (!is_parop(peek().kind)) return acc;
    Tok op = peek().kind;
    while (is_parop(peek().kind)) {
      if (peek().kind != op)
        throw ParseError(
            "mixing different parallel operators needs parentheses", peek().span);
      next();
      TermPtr rhs = seq();
      switch (op) {
        case Tok::SPar: acc = Term::spar(acc, rhs); break;
        case Tok::Par: acc = Term::par(acc, rhs); break;
        case Tok::CMerge: acc = Term::cmerge(acc, rhs); break;
        default: acc = Term::emerge(acc, rhs); break;
      }
    }
    return acc;
  }

  TermPtr seq() {  // right-associative
    TermPtr l = factor();
    if (!accept(Tok::Dot)) return l;
    return Term::seq(l, seq());
  }

  TermPtr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        next();
        TermPtr inner = term();
        expect(Tok::RParen, "to close '('");
        return inner;
      }
      case Tok::Less: {  // <X|specname>
        next();
        Token var = expect(Tok::Ident, "for a recursion variable");
        expect(Tok::SPar, "between variable and spec name");
        Token spec = expect(Tok::Ident, "for a spec name");
        expect(Tok::Greater, "to close '<'");
        if (self_spec_ && spec.text == self_spec_->name)
          return Term::recvar(require_self_var(var), self_spec_);
        auto it = model_->specs.find(spec.text);
        if (it == model_->specs.end())
          throw ParseError("unbound spec name: " + spec.text, spec.span);
        if (!it->second->find(var.text))
          throw ParseError("spec " + spec.text + " has no variable " + var.text,
                           var.span);
        return Term::recvar(var.text, it->second);
      }
      case Tok::Ident:
        return ident_factor();
      default:
        throw ParseError("expected a term, found " + std::string(tok_name(t.kind)),
                         t.span);
    }
  }

  TermPtr ident_factor() {
    Token id = next();
    if (id.text == "delta") { reject_suffix(id); return Term::delta(); }
    if (id.text == "tau") {
      if (accept(Tok::LBracket)) {  // tau[~]: an executed silent step
        expect(Tok::Tilde, "('tau' only takes the keyless marker '~')");
        expect(Tok::RBracket, "to close the marker");
        return Term::atom(ActionLabel::tau().with_key(kKeylessMarker));
      }
      return Term::tau();
    }
    if (id.text == "encap" || id.text == "abs") {
      bool is_encap = id.text == "encap";
      expect(Tok::LBrace, "after '" + id.text + "'");
      std::set<std::string> names;
      if (peek().kind != Tok::RBrace) {
        names.insert(expect(Tok::Ident, "in the label set").text);
        while (accept(Tok::Comma))
          names.insert(expect(Tok::Ident, "in the label set").text);
      }
      expect(Tok::RBrace, "to close the label set");
      expect(Tok::LParen, "after the label set");
      TermPtr inner = term();
      expect(Tok::RParen, "to close '" + id.text + "(...)'");
      return is_encap ? Term::encap(std::move(names), inner)
                      : Term::abstraction(std::move(names), inner);
    }
    // A bare name: a recursion variable of the spec under construction, or
    // an action atom (fresh, keyed history, or keyless marker).
    if (self_spec_ && self_vars_.count(id.text)) {
      reject_suffix(id);
      return Term::recvar(id.text, self_spec_);
    }
    LabelKind kind = model_->classify(id.text);
    if (accept(Tok::LBracket)) {
      if (accept(Tok::Tilde)) {
        expect(Tok::RBracket, "to close the history suffix");
        ActionLabel l = kind == LabelKind::QuantumOp ? ActionLabel::quantum(id.text)
                                                     : ActionLabel::comm(id.text);
        return Term::atom(l.with_key(kKeylessMarker));
      }
      Token nat = expect(Tok::Nat, "as a history key");
      expect(Tok::RBracket, "to close the history suffix");
      if (nat.text.size() > 9)
        throw ParseError("history key out of range", nat.span);
      unsigned long v = std::stoul(nat.text);
      if (v < 1)
        throw ParseError("history keys start at 1 ('~' marks a keyless step)",
                         nat.span);
      ActionLabel l = kind == LabelKind::QuantumOp ? ActionLabel::quantum(id.text)
                                                   : ActionLabel::comm(id.text);
      return Term::atom(l.with_key(static_cast<KeyT>(v)));
    }
    return Term::atom(kind == LabelKind::QuantumOp ? ActionLabel::quantum(id.text)
                                                   : ActionLabel::comm(id.text));
  }

  void reject_suffix(const Token& id) {
    if (peek().kind == Tok::LBracket)
      throw ParseError("'" + id.text + "' cannot carry a history suffix",
                       peek().span);
  }

  std::string require_self_var(const Token& var) {
    if (!self_vars_.count(var.text))
      throw ParseError("spec " + self_spec_->name + " has no variable " + var.text,
                       var.span);
    return var.text;
  }

  // --- recursive specifications --------------------------------------------
  // Parses `X = term;`* until `stop`.  Equation right-hand sides may mention
  // the spec's own variables, so construction is two-phase: register all
  // left-hand names, then parse bodies against the still-mutable spec.
  RecSpecPtr spec_body(const std::string& name, Tok stop) {
    auto spec = std::make_shared<RecSpec>();
    spec->name = name;
    // Phase 1: collect left-hand variable names.
    std::size_t save = pos_;
    while (peek().kind != stop && !at_end()) {
      Token var = expect(Tok::Ident, "on the left of an equation");
      if (is_keyword(var.text))
        throw ParseError("'" + var.text + "' cannot name a recursion variable",
                         var.span);
      if (spec->find(var.text))
        throw ParseError("duplicate definition of " + var.text + " in spec " + name,
                         var.span);
      spec->equations.emplace_back(var.text, nullptr);
      expect(Tok::Eq, "after the variable name");
      skip_equation_body();
    }
    if (spec->equations.empty())
      throw ParseError("spec " + name + " has no equations", peek().span);
    // Phase 2: parse the bodies.
    pos_ = save;
    self_spec_ = spec;
    self_vars_.clear();
    for (const auto& [v, rhs] : spec->equations) self_vars_.insert(v);
    for (auto& [v, rhs] : spec->equations) {
      expect(Tok::Ident, "on the left of an equation");
      expect(Tok::Eq, "after the variable name");
      Token start = peek();
      rhs = term();
      expect(Tok::Semi, "to end the equation");
      check_guarded(rhs, v, start.span);
    }
    self_spec_ = nullptr;
    self_vars_.clear();
    return spec;
  }

  void skip_equation_body() {
    int depth = 0;
    while (!at_end()) {
      Tok k = peek().kind;
      if (depth == 0 && k == Tok::Semi) { next(); return; }
      if (k == Tok::LBrace || k == Tok::LParen || k == Tok::LBracket) ++depth;
      if (k == Tok::RBrace || k == Tok::RParen || k == Tok::RBracket) {
        if (depth == 0)
          throw ParseError("unbalanced bracket in equation", peek().span);
        --depth;
      }
      next();
    }
    throw ParseError("missing ';' at end of equation", peek().span);
  }

  // Guardedness: every occurrence of one of the spec's own variables must sit
  // behind an action prefix.  Sequential composition guards its right side
  // when the left side mentions no own-spec variable (it must then act, or
  // deadlock, before the right side is exposed).
  void check_guarded(const TermPtr& t, const std::string& eq_var, SourceSpan span) {
    if (!guarded(t, false)) {
      throw ParseError("unguarded variable occurrence in equation for " + eq_var,
                       span);
    }
  }

  bool mentions_self(const TermPtr& t) const {
    if (t->op() == Op::RecVar) return t->spec() == self_spec_;
    for (const auto& k : t->kids())
      if (mentions_self(k)) return true;
    return false;
  }

  bool guarded(const TermPtr& t, bool under) const {
    switch (t->op()) {
      case Op::Atom: return true;
      case Op::RecVar: return t->spec() != self_spec_ || under;
      case Op::Seq:
        return guarded(t->kid(0), under) &&
               guarded(t->kid(1), under || !mentions_self(t->kid(0)));
      case Op::Encap:
      case Op::Abstract:
        return guarded(t->kid(0), under);
      default:
        for (const auto& k : t->kids())
          if (!guarded(k, under)) return false;
        return true;
    }
  }

  // --- model files ----------------------------------------------------------
  void model_file(Model& m) {
    model_ = &m;  // classification must see declarations as they accumulate
    while (!at_end()) {
      Token kw = expect(Tok::Ident, "to start a statement");
      if (kw.text == "comm" || kw.text == "qop") {
        do {
          Token id = expect(Tok::Ident, "in the declaration");
          if (is_keyword(id.text))
            throw ParseError("'" + id.text + "' is reserved", id.span);
          try {
            if (kw.text == "comm") m.declare_comm(id.text);
            else m.declare_qop(id.text);
          } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), id.span);
          }
        } while (accept(Tok::Comma));
        expect(Tok::Semi, "to end the declaration");
      } else if (kw.text == "gamma") {
        expect(Tok::LParen, "after 'gamma'");
        Token a = expect(Tok::Ident, "as the first action");
        expect(Tok::Comma, "between the actions");
        Token b = expect(Tok::Ident, "as the second action");
        expect(Tok::RParen, "to close 'gamma('");
        expect(Tok::Eq, "after 'gamma(..)'");
        Token r = expect(Tok::Ident, "as the result action");
        expect(Tok::Semi, "to end the statement");
        for (const Token* id : {&a, &b, &r}) {
          if (m.is_qop(id->text))
            throw ParseError("gamma argument/result must be a communication action: " +
                                 id->text,
                             id->span);
          m.declare_comm(id->text);
        }
        m.declare_gamma(a.text, b.text, r.text);
      } else if (kw.text == "spec") {
        Token name = expect(Tok::Ident, "as the spec name");
        if (m.specs.count(name.text))
          throw ParseError("duplicate spec name: " + name.text, name.span);
        expect(Tok::LBrace, "to open the spec");
        m.specs[name.text] = spec_body(name.text, Tok::RBrace);
        expect(Tok::RBrace, "to close the spec");
        accept(Tok::Semi);
      } else if (kw.text == "term") {
        Token name = expect(Tok::Ident, "as the term name");
        if (m.terms.count(name.text))
          throw ParseError("duplicate term name: " + name.text, name.span);
        expect(Tok::Eq, "after the term name");
        m.terms[name.text] = term();
        expect(Tok::Semi, "to end the statement");
      } else if (kw.text == "effect") {
        Token name = expect(Tok::Ident, "as the quantum op name");
        if (m.is_comm(name.text))
          throw ParseError("effects attach to quantum ops, not communication actions",
                           name.span);
        m.declare_qop(name.text);
        expect(Tok::Eq, "after the op name");
        m.effects[name.text] = effect_expr();
        expect(Tok::Semi, "to end the statement");
      } else if (kw.text == "state") {
        if (m.initial_rho)
          throw ParseError("duplicate state declaration", kw.span);
        m.initial_rho = state_expr();
        expect(Tok::Semi, "to end the statement");
      } else {
        throw ParseError("unknown statement '" + kw.text +
                             "' (expected comm, qop, gamma, spec, term, effect, or state)",
                         kw.span);
      }
    }
  }

  int target_index(const Token& t) {
    if (t.text.size() >= 2 && t.text.size() <= 4 && t.text[0] == 'q') {
      bool digits = true;
      for (std::size_t i = 1; i < t.text.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
      if (digits) return std::stoi(t.text.substr(1));
    }
    throw ParseError("expected a qubit target like q0", t.span);
  }

  QuantumEffect effect_expr() {
    Token kind = expect(Tok::Ident, "for the effect kind");
    if (kind.text == "identity") return QuantumEffect::identity();
    if (kind.text != "measure" && kind.text != "unitary")
      throw ParseError("effect kind must be measure, unitary, or identity", kind.span);
    expect(Tok::LParen, "after the effect kind");
    Token head = expect(Tok::Ident, "for the basis or matrix name");
    std::vector<int> targets;
    while (accept(Tok::Comma))
      targets.push_back(target_index(expect(Tok::Ident, "as a qubit target")));
    expect(Tok::RParen, "to close the effect");
    if (targets.empty())
      throw ParseError("effect needs at least one qubit target", head.span);
    if (kind.text == "measure") {
      if (head.text != "std")
        throw ParseError("only the standard basis 'std' is supported", head.span);
      return QuantumEffect::measure_std(std::move(targets));
    }
    Mat u;
    try {
      u = builtin_matrix(head.text);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), head.span);
    }
    try {
      return QuantumEffect::unitary(std::move(u), std::move(targets));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), head.span);
    }
  }

  DensityMatrix state_expr() {
    DensityMatrix acc = state_part();
    while (accept(Tok::Star)) acc = kron(acc, state_part());
    return acc;
  }

  DensityMatrix state_part() {
    Token kind = expect(Tok::Ident, "for a state constructor");
    expect(Tok::LParen, "after the state constructor");
    Token n = expect(Tok::Nat, "as the argument");
    expect(Tok::RParen, "to close the state constructor");
    if (n.text.size() > 2) throw ParseError("state argument out of range", n.span);
    try {
      if (kind.text == "bell") return bell_state(std::stoi(n.text));
      if (kind.text == "ground") return ground_state(std::stoi(n.text));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), n.span);
    }
    throw ParseError("state constructors are bell(i) and ground(n)", kind.span);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Model* model_;
  std::shared_ptr<RecSpec> self_spec_;  // spec currently being defined
  std::set<std::string> self_vars_;
};

}  // namespace

TermPtr parse_term(const std::string& text, const Model& model) {
  Parser p(lex(text), model);
  TermPtr t = p.term();
  if (!p.at_end())
    throw ParseError("trailing input after the term", p.peek().span);
  return t;
}

RecSpecPtr parse_spec(const std::string& name, const std::string& text,
                      const Model& model) {
  Parser p(lex(text), model);
  RecSpecPtr s = p.spec_body(name, Tok::End);
  if (!p.at_end())
    throw ParseError("trailing input after the spec", p.peek().span);
  return s;
}

Model parse_model_text(const std::string& text) {
  Model m;
  Parser p(lex(text), m);
  p.model_file(m);
  return m;
}

Model parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

// Binding strength for parenthesization decisions.
enum Level { kSum = 0, kPar = 1, kSeq = 2, kAtomic = 3 };

Level level_of(const Term& t) {
  switch (t.op()) {
    case Op::Sum: return kSum;
    case Op::StaticPar:
    case Op::CommMerge:
    case Op::EntMerge:
    case Op::Parallel: return kPar;
    case Op::Seq: return kSeq;
    default: return kAtomic;
  }
}

const char* par_symbol(Op op) {
  switch (op) {
    case Op::StaticPar: return " | ";
    case Op::CommMerge: return " >< ";
    case Op::EntMerge: return " ## ";
    default: return " || ";
  }
}

void render_into(const Term& t, std::string& out);

void child(const Term& parent, const Term& c, bool right_slot, std::string& out) {
  bool parens = false;
  Level pl = level_of(parent), cl = level_of(c);
  if (cl < pl) {
    parens = true;
  } else if (cl == pl && pl == kPar) {
    // Same level in the parallel family: keep left-nesting of the same
    // operator flat, parenthesize everything else (different operator, or
    // a right-nested occurrence of the same one).
    parens = right_slot || c.op() != parent.op();
  } else if (cl == pl && pl == kSeq) {
    parens = !right_slot;  // '.' is rendered right-associative
  } else if (pl == kPar && cl == kSeq) {
    parens = true;  // readability grouping: (a . x) ## (a . y)
  }
  if (parens) out.push_back('(');
  render_into(c, out);
  if (parens) out.push_back(')');
}

void render_into(const Term& t, std::string& out) {
  switch (t.op()) {
    case Op::Atom:
      out += t.label().render();
      return;
    case Op::Sum:
      for (std::size_t i = 0; i < t.kids().size(); ++i) {
        if (i) out += " + ";
        child(t, *t.kid(i), i > 0, out);
      }
      return;
    case Op::Seq:
      child(t, *t.kid(0), false, out);
      out += " . ";
      child(t, *t.kid(1), true, out);
      return;
    case Op::StaticPar:
    case Op::CommMerge:
    case Op::EntMerge:
    case Op::Parallel:
      child(t, *t.kid(0), false, out);
      out += par_symbol(t.op());
      child(t, *t.kid(1), true, out);
      return;
    case Op::Encap:
    case Op::Abstract: {
      out += t.op() == Op::Encap ? "encap{" : "abs{";
      bool first = true;
      for (const auto& n : t.names()) {
        if (!first) out += ",";
        first = false;
        out += n;
      }
      out += "}(";
      render_into(*t.kid(0), out);
      out += ")";
      return;
    }
    case Op::RecVar:
      out += "<" + t.var() + "|" + t.spec()->name + ">";
      return;
  }
}

}  // namespace

std::string render(const TermPtr& t) {
  std::string out;
  render_into(*t, out);
  return out;
}

}  // namespace rqpap
