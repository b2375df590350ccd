#include "interlock/parser.hpp"

#include <fstream>
#include <sstream>

namespace interlock {

namespace {

enum class Tok { Ident, Var, LParen, RParen, LBracket, RBracket, Comma, Dot, If, Lt, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + msg);
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::End, "", line_, col_};
      return;
    }
    char c = text_[pos_];
    auto single = [&](Tok k) {
      tok_ = {k, std::string(1, c), line_, col_};
      bump();
    };
    if (c == '(') return single(Tok::LParen);
    if (c == ')') return single(Tok::RParen);
    if (c == '[') return single(Tok::LBracket);
    if (c == ']') return single(Tok::RBracket);
    if (c == ',') return single(Tok::Comma);
    if (c == '.') return single(Tok::Dot);
    if (c == '<') return single(Tok::Lt);
    if (c == '=') return single(Tok::Eq);
    if (c == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        tok_ = {Tok::If, ":-", line_, col_};
        bump();
        bump();
        return;
      }
      fail("stray ':'");
    }
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      int l = line_, co = col_;
      std::string s;
      while (pos_ < text_.size() &&
             (isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        s += text_[pos_];
        bump();
      }
      bool var = isupper(static_cast<unsigned char>(s[0])) || s[0] == '_';
      tok_ = {var ? Tok::Var : Tok::Ident, s, l, co};
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

// Surface term: variable, constant, compound, list, or infix comparison
// (functor "<" or "=").
struct PTerm {
  std::string functor;
  std::vector<PTerm> args;
  bool is_var = false;
  bool is_list = false;
  int line = 0, col = 0;

  bool atomic() const { return !is_var && !is_list && args.empty(); }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  // clause := item (':-' item (',' item)*)? '.'
  struct Clause {
    PTerm head;
    std::vector<PTerm> body;
  };

  std::vector<Clause> clauses() {
    std::vector<Clause> out;
    while (lex_.peek().kind != Tok::End) {
      Clause c;
      c.head = item();
      if (lex_.peek().kind == Tok::If) {
        lex_.take();
        c.body.push_back(item());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.take();
          c.body.push_back(item());
        }
      }
      expect(Tok::Dot, "'.'");
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  Lexer lex_;

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError("line " + std::to_string(at.line) + ", col " + std::to_string(at.col) + ": " +
                     msg);
  }

  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k)
      fail(lex_.peek(), "expected " + what + ", found '" + lex_.peek().text + "'");
    return lex_.take();
  }

  // item := term (('<'|'=') term)?
  PTerm item() {
    PTerm t = term();
    Tok k = lex_.peek().kind;
    if (k == Tok::Lt || k == Tok::Eq) {
      Token op = lex_.take();
      PTerm rhs = term();
      PTerm cmp;
      cmp.functor = (k == Tok::Lt) ? "<" : "=";
      cmp.line = op.line;
      cmp.col = op.col;
      cmp.args = {std::move(t), std::move(rhs)};
      return cmp;
    }
    return t;
  }

  PTerm term() {
    const Token& p = lex_.peek();
    if (p.kind == Tok::LBracket) {
      Token open = lex_.take();
      PTerm list;
      list.is_list = true;
      list.line = open.line;
      list.col = open.col;
      if (lex_.peek().kind != Tok::RBracket) {
        list.args.push_back(item());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.take();
          list.args.push_back(item());
        }
      }
      expect(Tok::RBracket, "']'");
      return list;
    }
    if (p.kind == Tok::Var) {
      Token v = lex_.take();
      PTerm t;
      t.functor = v.text;
      t.is_var = true;
      t.line = v.line;
      t.col = v.col;
      return t;
    }
    if (p.kind == Tok::Ident) {
      Token id = lex_.take();
      PTerm t;
      t.functor = id.text;
      t.line = id.line;
      t.col = id.col;
      if (lex_.peek().kind == Tok::LParen) {
        lex_.take();
        t.args.push_back(item());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.take();
          t.args.push_back(item());
        }
        expect(Tok::RParen, "')'");
      }
      return t;
    }
    fail(p, "expected a term, found '" + p.text + "'");
  }
};

[[noreturn]] void fail_at(const PTerm& t, const std::string& msg) {
  throw ParseError("line " + std::to_string(t.line) + ", col " + std::to_string(t.col) + ": " + msg);
}

class Interpreter {
 public:
  DataStructureSpec run(const std::vector<Parser::Clause>& clauses) {
    // declarations and rules first, code blocks after classification data
    std::vector<const Parser::Clause*> code;
    for (const auto& c : clauses) {
      if (c.body.empty() && c.head.functor == "code" && !c.head.is_var) {
        if (c.head.args.size() != 5) fail_at(c.head, "code expects 5 arguments");
        code.push_back(&c);
      } else {
        declaration(c);
      }
    }
    collect_classification_sets();
    for (const auto* c : code) code_block(*c);
    if (spec_.name.empty()) throw ParseError("spec declares no name");
    infer_sorts(spec_);
    return std::move(spec_);
  }

 private:
  DataStructureSpec spec_;

  void declaration(const Parser::Clause& c) {
    const PTerm& h = c.head;
    if (h.is_var || h.is_list) fail_at(h, "clause head must be an atom");
    const std::string& f = h.functor;
    if (c.body.empty() && f == "name") {
      spec_.name = atomic_arg(h, 0);
    } else if (c.body.empty() && f == "rule") {
      if (h.args.size() != 2) fail_at(h, "rule expects a head and a body list");
      Rule r;
      r.head = plain_atom(h.args[0]);
      if (!h.args[1].is_list) fail_at(h.args[1], "rule body must be a list");
      for (const auto& b : h.args[1].args) {
        Literal l = body_literal(b);
        if (!l.positive) fail_at(b, "negation is not allowed in structural rules");
        r.body.push_back(std::move(l));
      }
      spec_.structural.push_back(std::move(r));
    } else if (c.body.empty() && f == "fluent") {
      spec_.fluents.insert(atomic_arg(h, 0));
    } else if (c.body.empty() && f == "invariant") {
      spec_.invariant = atomic_arg(h, 0);
    } else if (c.body.empty() && f == "start_node") {
      spec_.start_node = atomic_arg(h, 0);
    } else if (c.body.empty() && f == "end_node") {
      spec_.end_node = atomic_arg(h, 0);
    } else if (c.body.empty() && f == "primitive") {
      primitive_decl(h);
    } else if (c.body.empty() && f == "causes") {
      if (h.args.size() != 2) fail_at(h, "causes expects an effect and an action");
      Atom effect = normalize(plain_atom(h.args[0]));
      Atom action = normalize(plain_atom(h.args[1]));
      spec_.primitive.causes.emplace_back(std::move(effect), std::move(action));
    } else {
      Rule r;
      r.head = plain_atom(h);
      for (const auto& b : c.body) r.body.push_back(body_literal(b));
      spec_.derived.push_back(std::move(r));
    }
  }

  void primitive_decl(const PTerm& h) {
    if (h.args.size() != 2) fail_at(h, "primitive expects an action and a modifies term");
    Atom action = normalize(plain_atom(h.args[0]));
    const PTerm& m = h.args[1];
    if (m.functor != "modifies" || m.args.size() != 1 || !m.args[0].is_var)
      fail_at(m, "second primitive argument must be modifies(Var)");
    spec_.primitive.action = action.pred;
    bool found = false;
    for (size_t i = 0; i < action.args.size(); ++i) {
      if (action.args[i].is_var() && action.args[i].name == m.args[0].functor) {
        spec_.primitive.modifies = i;
        found = true;
      }
    }
    if (!found) fail_at(m, "modifies names a variable absent from the action");
  }

  std::string atomic_arg(const PTerm& h, size_t i) {
    if (h.args.size() <= i || !h.args[i].atomic())
      fail_at(h, h.functor + " expects a plain constant argument");
    return h.args[i].functor;
  }

  // terms inside ordinary atoms: constants and variables only
  Term simple_term(const PTerm& t) {
    if (t.is_list || !t.args.empty()) fail_at(t, "nested terms are not supported here");
    return t.is_var ? variable(t.functor) : constant(t.functor);
  }

  Atom plain_atom(const PTerm& t) {
    if (t.is_var || t.is_list) fail_at(t, "expected an atom");
    if (t.functor == "<" || t.functor == "=") {
      Atom a;
      a.pred = (t.functor == "<") ? "lt" : "eq_num";
      for (const auto& arg : t.args) a.args.push_back(simple_term(arg));
      return a;
    }
    Atom a;
    a.pred = t.functor;
    for (const auto& arg : t.args) a.args.push_back(simple_term(arg));
    return a;
  }

  // edge/2 and link/2 are sugar for the single default field
  Atom normalize(Atom a) {
    if ((a.pred == "edge" || a.pred == spec_.primitive.action) && a.args.size() == 2)
      a.args.insert(a.args.begin() + 1, constant("next"));
    return a;
  }

  Literal body_literal(const PTerm& t) {
    if (t.functor == "not" && !t.is_var && t.args.size() == 1)
      return naf(normalize(plain_atom(t.args[0])));
    return pos(normalize(plain_atom(t)));
  }

  // --- code/5 interpretation ---

  std::set<std::string> named_constants_;  // classified as constants inside code lists

  void collect_classification_sets() {
    spec_.field_constants.insert("next");
    auto scan_rule = [&](const Rule& r) {
      auto scan_atom = [&](const Atom& a) {
        if ((a.pred == "edge" || a.pred == spec_.primitive.action) && a.args.size() == 3 &&
            !a.args[1].is_var())
          spec_.field_constants.insert(a.args[1].name);
        if (a.pred == "key" && a.args.size() == 2 && !a.args[1].is_var())
          spec_.key_constants.insert(a.args[1].name);
        if ((a.pred == "lt" || a.pred == "eq_num"))
          for (const auto& arg : a.args)
            if (!arg.is_var()) spec_.key_constants.insert(arg.name);
      };
      if (r.head) scan_atom(*r.head);
      for (const auto& l : r.body) scan_atom(l.atom);
    };
    for (const auto& r : spec_.structural) scan_rule(r);
    for (const auto& r : spec_.derived) scan_rule(r);
    if (!spec_.start_node.empty()) named_constants_.insert(spec_.start_node);
    if (!spec_.end_node.empty()) named_constants_.insert(spec_.end_node);
    named_constants_.insert(spec_.key_constants.begin(), spec_.key_constants.end());
  }

  // Lowercase names in code lists are block parameters unless they denote
  // a declared sentinel, a structural key constant, or an edge label.
  Term code_term(const PTerm& t, bool field_position) {
    if (t.is_list || !t.args.empty()) fail_at(t, "nested terms are not supported here");
    if (t.is_var) return variable(t.functor);
    if (field_position || named_constants_.count(t.functor)) return constant(t.functor);
    return variable(t.functor);
  }

  Atom code_atom(const PTerm& t) {
    if (t.is_var || t.is_list) fail_at(t, "expected an atom");
    Atom a;
    if (t.functor == "<" || t.functor == "=") {
      a.pred = (t.functor == "<") ? "lt" : "eq_num";
      for (const auto& arg : t.args) a.args.push_back(code_term(arg, false));
      return a;
    }
    a.pred = t.functor;
    bool labeled = (a.pred == "edge" || a.pred == spec_.primitive.action) && t.args.size() == 3;
    for (size_t i = 0; i < t.args.size(); ++i)
      a.args.push_back(code_term(t.args[i], labeled && i == 1));
    return normalize(a);
  }

  Literal code_literal(const PTerm& t) {
    if (t.functor == "not" && !t.is_var && t.args.size() == 1) return naf(code_atom(t.args[0]));
    return pos(code_atom(t));
  }

  void code_block(const Parser::Clause& c) {
    const PTerm& h = c.head;
    std::string op = atomic_arg(h, 0);
    BlockSpec block;
    block.id = atomic_arg(h, 1);
    for (size_t i = 2; i <= 4; ++i)
      if (!h.args[i].is_list) fail_at(h.args[i], "code pre, steps, and post must be lists");
    for (const auto& t : h.args[2].args) block.pre.push_back(code_literal(t));
    for (const auto& t : h.args[3].args) {
      Atom a = code_atom(t);
      if (a.pred != spec_.primitive.action)
        fail_at(t, "steps must use the declared primitive '" + spec_.primitive.action + "'");
      if (a.args.size() != 3 || a.args[1].is_var())
        fail_at(t, "step field must be a constant label");
      block.steps.push_back(LinkAction{a.args[0], a.args[1].name, a.args[2]});
    }
    for (const auto& t : h.args[4].args) block.post.push_back(code_literal(t));
    if (block.steps.empty()) fail_at(h, "block '" + block.id + "' has no steps");

    for (auto& o : spec_.operations) {
      if (o.name == op) {
        for (const auto& b : o.blocks)
          if (b.id == block.id) fail_at(h, "duplicate block '" + block.id + "' in " + op);
        o.blocks.push_back(std::move(block));
        return;
      }
    }
    spec_.operations.push_back(OperationSpec{op, {std::move(block)}});
  }
};

}  // namespace

DataStructureSpec parse_spec(const std::string& text) {
  Parser parser(text);
  return Interpreter{}.run(parser.clauses());
}

DataStructureSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace interlock
