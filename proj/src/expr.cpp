#include "tvlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace tvlab {

namespace {

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind;
  double number = 0.0;
  std::string ident;
  std::size_t offset = 0;
};

class Lexer {
public:
  explicit Lexer(const std::string& src, std::size_t base_offset)
      : src_(src), base_(base_offset) {
    advance();
  }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_.offset = base_ + pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      const char* end = src_.data() + src_.size();
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc()) throw ParseError("malformed number", base_ + pos_);
      pos_ += static_cast<std::size_t>(ptr - begin);
      tok_.kind = Token::Kind::Number;
      tok_.number = value;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.ident = src_.substr(start, pos_ - start);
      return;
    }
    ++pos_;
    switch (c) {
      case '+': tok_.kind = Token::Kind::Plus; return;
      case '-': tok_.kind = Token::Kind::Minus; return;
      case '*': tok_.kind = Token::Kind::Star; return;
      case '/': tok_.kind = Token::Kind::Slash; return;
      case '^': tok_.kind = Token::Kind::Caret; return;
      case '(': tok_.kind = Token::Kind::LParen; return;
      case ')': tok_.kind = Token::Kind::RParen; return;
      default: throw ParseError(std::string("unexpected character '") + c + "'", base_ + pos_ - 1);
    }
  }

  const std::string& src_;
  std::size_t base_;
  std::size_t pos_ = 0;
  Token tok_;
};

ExprPtr make_const(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->cval = v;
  return e;
}

ExprPtr make_binary(Expr::Kind k, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

class Parser {
public:
  Parser(Lexer& lex, int arity_x, int arity_a)
      : lex_(lex), arity_x_(arity_x), arity_a_(arity_a) {}

  ExprPtr parse_expression() { return parse_sum(); }

  void expect_end() {
    if (lex_.peek().kind != Token::Kind::End)
      throw ParseError("trailing input", lex_.peek().offset);
  }

private:
  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (lex_.peek().kind == Token::Kind::Plus) {
        lex_.take();
        lhs = make_binary(Expr::Kind::Add, lhs, parse_term());
      } else if (lex_.peek().kind == Token::Kind::Minus) {
        lex_.take();
        lhs = make_binary(Expr::Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (lex_.peek().kind == Token::Kind::Star) {
        lex_.take();
        lhs = make_binary(Expr::Kind::Mul, lhs, parse_unary());
      } else if (lex_.peek().kind == Token::Kind::Slash) {
        lex_.take();
        lhs = make_binary(Expr::Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (lex_.peek().kind == Token::Kind::Minus) {
      lex_.take();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Neg;
      e->lhs = parse_unary();
      return e;
    }
    if (lex_.peek().kind == Token::Kind::Plus) {
      lex_.take();
      return parse_unary();
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (lex_.peek().kind == Token::Kind::Caret) {
      lex_.take();
      int sign = 1;
      if (lex_.peek().kind == Token::Kind::Minus) {
        lex_.take();
        sign = -1;
      }
      Token t = lex_.take();
      if (t.kind != Token::Kind::Number || t.number != static_cast<int>(t.number))
        throw ParseError("exponent must be an integer literal", t.offset);
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Pow;
      e->ipow = sign * static_cast<int>(t.number);
      e->lhs = base;
      return e;
    }
    return base;
  }

  ExprPtr parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::Number: return make_const(t.number);
      case Token::Kind::LParen: {
        ExprPtr inner = parse_expression();
        Token close = lex_.take();
        if (close.kind != Token::Kind::RParen)
          throw ParseError("expected ')'", close.offset);
        return inner;
      }
      case Token::Kind::Ident: return parse_ident(t);
      case Token::Kind::End: throw ParseError("unexpected end of expression", t.offset);
      default: throw ParseError("unexpected token", t.offset);
    }
  }

  ExprPtr parse_ident(const Token& t) {
    static const std::pair<const char*, UnaryFn> kFns[] = {
        {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos},   {"exp", UnaryFn::Exp},
        {"log", UnaryFn::Log}, {"sqrt", UnaryFn::Sqrt}, {"abs", UnaryFn::Abs}};
    for (const auto& [name, fn] : kFns) {
      if (t.ident == name) {
        Token open = lex_.take();
        if (open.kind != Token::Kind::LParen)
          throw ParseError("expected '(' after function name", open.offset);
        ExprPtr arg = parse_expression();
        Token close = lex_.take();
        if (close.kind != Token::Kind::RParen)
          throw ParseError("expected ')'", close.offset);
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Fun;
        e->fn = fn;
        e->lhs = arg;
        return e;
      }
    }
    if ((t.ident[0] == 'x' || t.ident[0] == 'a') && t.ident.size() > 1) {
      int idx = 0;
      auto [ptr, ec] =
          std::from_chars(t.ident.data() + 1, t.ident.data() + t.ident.size(), idx);
      if (ec == std::errc() && ptr == t.ident.data() + t.ident.size() && idx >= 1) {
        const bool is_x = t.ident[0] == 'x';
        const int arity = is_x ? arity_x_ : arity_a_;
        if (idx > arity)
          throw ParseError("variable '" + t.ident + "' exceeds declared arity", t.offset);
        auto e = std::make_shared<Expr>();
        e->kind = is_x ? Expr::Kind::VarX : Expr::Kind::VarA;
        e->index = idx - 1;
        return e;
      }
    }
    throw ParseError("unknown identifier '" + t.ident + "'", t.offset);
  }

  Lexer& lex_;
  int arity_x_;
  int arity_a_;
};

std::vector<std::pair<std::string, std::size_t>> split_components(const std::string& source) {
  std::string body = source;
  std::size_t base = 0;
  // Trim whitespace, then strip one enclosing bracket pair if present.
  std::size_t first = body.find_first_not_of(" \t\n\r");
  std::size_t last = body.find_last_not_of(" \t\n\r");
  if (first == std::string::npos) throw ParseError("empty source", 0);
  if (body[first] == '[') {
    if (body[last] != ']') throw ParseError("expected closing ']'", last);
    base = first + 1;
    body = source.substr(first + 1, last - first - 1);
  }

  std::vector<std::pair<std::string, std::size_t>> parts;
  std::size_t depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    const bool at_end = i == body.size();
    const char c = at_end ? '\0' : body[i];
    if (!at_end && c == '(') ++depth;
    if (!at_end && c == ')') {
      if (depth == 0) throw ParseError("unbalanced ')'", base + i);
      --depth;
    }
    const bool sep = !at_end && depth == 0 && (c == ';' || c == ',');
    if (sep || at_end) {
      parts.emplace_back(body.substr(start, i - start), base + start);
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced '('", base + body.size());
  return parts;
}

void print_node(const Expr& e, std::ostream& os) {
  switch (e.kind) {
    case Expr::Kind::Const: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << e.cval;
      std::string s = tmp.str();
      if (e.cval < 0) os << "(" << s << ")";
      else os << s;
      return;
    }
    case Expr::Kind::VarX: os << "x" << (e.index + 1); return;
    case Expr::Kind::VarA: os << "a" << (e.index + 1); return;
    case Expr::Kind::Add:
      os << "(";
      print_node(*e.lhs, os);
      os << " + ";
      print_node(*e.rhs, os);
      os << ")";
      return;
    case Expr::Kind::Sub:
      os << "(";
      print_node(*e.lhs, os);
      os << " - ";
      print_node(*e.rhs, os);
      os << ")";
      return;
    case Expr::Kind::Mul:
      os << "(";
      print_node(*e.lhs, os);
      os << " * ";
      print_node(*e.rhs, os);
      os << ")";
      return;
    case Expr::Kind::Div:
      os << "(";
      print_node(*e.lhs, os);
      os << " / ";
      print_node(*e.rhs, os);
      os << ")";
      return;
    case Expr::Kind::Pow:
      os << "(";
      print_node(*e.lhs, os);
      os << ")^";
      if (e.ipow < 0) os << "-" << -e.ipow;
      else os << e.ipow;
      return;
    case Expr::Kind::Neg:
      os << "(-";
      print_node(*e.lhs, os);
      os << ")";
      return;
    case Expr::Kind::Fun: {
      const char* name = "";
      switch (e.fn) {
        case UnaryFn::Sin: name = "sin"; break;
        case UnaryFn::Cos: name = "cos"; break;
        case UnaryFn::Exp: name = "exp"; break;
        case UnaryFn::Log: name = "log"; break;
        case UnaryFn::Sqrt: name = "sqrt"; break;
        case UnaryFn::Abs: name = "abs"; break;
      }
      os << name << "(";
      print_node(*e.lhs, os);
      os << ")";
      return;
    }
  }
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ExprMap parse(const std::string& source, int arity_x, int arity_a) {
  if (arity_x < 0 || arity_a < 0) throw ArityError("negative arity");
  auto parts = split_components(source);
  std::vector<ExprPtr> components;
  components.reserve(parts.size());
  for (const auto& [text, offset] : parts) {
    Lexer lex(text, offset);
    Parser p(lex, arity_x, arity_a);
    components.push_back(p.parse_expression());
    p.expect_end();
  }
  return ExprMap(arity_x, arity_a, std::move(components));
}

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  print_node(e, os);
  return os.str();
}

std::string print(const ExprMap& map) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < map.output_dim(); ++i) {
    if (i) os << ", ";
    print_node(*map.components()[static_cast<std::size_t>(i)], os);
  }
  os << "]";
  return os.str();
}

namespace {
ExprPtr bind_node(const Expr& e, const Eigen::VectorXd& a) {
  if (e.kind == Expr::Kind::VarA) {
    auto c = std::make_shared<Expr>();
    c->kind = Expr::Kind::Const;
    c->cval = a[e.index];
    return c;
  }
  auto copy = std::make_shared<Expr>(e);
  if (e.lhs) copy->lhs = bind_node(*e.lhs, a);
  if (e.rhs) copy->rhs = bind_node(*e.rhs, a);
  return copy;
}
}  // namespace

ExprMap bind_parameters(const ExprMap& map, const Eigen::VectorXd& a) {
  if (a.size() != map.arity_a()) throw ArityError("parameter vector does not match arity_a");
  std::vector<ExprPtr> bound;
  bound.reserve(map.components().size());
  for (const auto& c : map.components()) bound.push_back(bind_node(*c, a));
  return ExprMap(map.arity_x(), 0, std::move(bound));
}

Eigen::VectorXd eval(const ExprMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& a) {
  auto out = map.eval_generic(to_std(x), to_std(a));
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::MatrixXd jacobian(const ExprMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& a,
                         WithRespectTo wrt) {
  const int n = map.arity_x();
  const int p = map.arity_a();
  if (x.size() != n || a.size() != p) throw ArityError("evaluation point does not match map arity");

  const bool seed_x = wrt != WithRespectTo::A;
  const bool seed_a = wrt != WithRespectTo::X;
  const int width = (seed_x ? n : 0) + (seed_a ? p : 0);

  std::vector<Dual<double>> xd(static_cast<std::size_t>(n));
  std::vector<Dual<double>> ad(static_cast<std::size_t>(p));
  int col = 0;
  for (int i = 0; i < n; ++i) {
    xd[static_cast<std::size_t>(i)] = Dual<double>(x[i]);
    if (seed_x) {
      xd[static_cast<std::size_t>(i)].d.assign(static_cast<std::size_t>(width), 0.0);
      xd[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(col++)] = 1.0;
    }
  }
  for (int i = 0; i < p; ++i) {
    ad[static_cast<std::size_t>(i)] = Dual<double>(a[i]);
    if (seed_a) {
      ad[static_cast<std::size_t>(i)].d.assign(static_cast<std::size_t>(width), 0.0);
      ad[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(col++)] = 1.0;
    }
  }

  auto out = map.eval_generic(xd, ad);
  Eigen::MatrixXd J(map.output_dim(), width);
  for (int r = 0; r < map.output_dim(); ++r)
    for (int c = 0; c < width; ++c)
      J(r, c) = out[static_cast<std::size_t>(r)].partial(static_cast<std::size_t>(c));
  return J;
}

std::vector<Eigen::MatrixXd> hessians(const ExprMap& map, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& a) {
  const int n = map.arity_x();
  const int p = map.arity_a();
  if (x.size() != n || a.size() != p) throw ArityError("evaluation point does not match map arity");

  using D2 = Dual<Dual<double>>;
  std::vector<D2> xd(static_cast<std::size_t>(n));
  std::vector<D2> ad(static_cast<std::size_t>(p));
  for (int i = 0; i < n; ++i) {
    Dual<double> inner(x[i]);
    inner.d.assign(static_cast<std::size_t>(n), 0.0);
    inner.d[static_cast<std::size_t>(i)] = 1.0;
    D2 outer;
    outer.v = inner;
    outer.d.assign(static_cast<std::size_t>(n), Dual<double>(0.0));
    outer.d[static_cast<std::size_t>(i)] = Dual<double>(1.0);
    xd[static_cast<std::size_t>(i)] = outer;
  }
  for (int i = 0; i < p; ++i) ad[static_cast<std::size_t>(i)] = D2(a[i]);

  auto out = map.eval_generic(xd, ad);
  std::vector<Eigen::MatrixXd> hs;
  hs.reserve(out.size());
  for (const auto& comp : out) {
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
      Dual<double> di = comp.partial(static_cast<std::size_t>(i));
      for (int j = 0; j < n; ++j) H(i, j) = di.partial(static_cast<std::size_t>(j));
    }
    hs.push_back(std::move(H));
  }
  return hs;
}

}  // namespace tvlab
