#include "ncconv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ncconv {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, PipeMono, PipeFree, PipeBool, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(current_.line, current_.col, msg);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      bump();
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Tok::End;
      current_.text = "<end>";
      return;
    }
    const char c = text_[pos_];
    if (c == '(') {
      // infix sugar "(+)" and "(u)" are single tokens
      if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '+' && text_[pos_ + 2] == ')') {
        current_.kind = Tok::PipeFree;
        current_.text = "(+)";
        bump();
        bump();
        bump();
        return;
      }
      if (pos_ + 2 < text_.size() && text_[pos_ + 1] == 'u' && text_[pos_ + 2] == ')') {
        current_.kind = Tok::PipeBool;
        current_.text = "(u)";
        bump();
        bump();
        bump();
        return;
      }
      current_.kind = Tok::LParen;
      current_.text = "(";
      bump();
      return;
    }
    if (c == ')') {
      current_.kind = Tok::RParen;
      current_.text = ")";
      bump();
      return;
    }
    if (c == ',') {
      current_.kind = Tok::Comma;
      current_.text = ",";
      bump();
      return;
    }
    if (c == '|' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      current_.kind = Tok::PipeMono;
      current_.text = "|>";
      bump();
      bump();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ident.push_back(text_[pos_]);
        bump();
      }
      current_.kind = Tok::Ident;
      current_.text = std::move(ident);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      const std::size_t start = pos_;
      if (c == '-' || c == '+') bump();
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        bump();
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        bump();
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) bump();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          bump();
      }
      const std::string_view body = text_.substr(start, pos_ - start);
      double value = 0;
      const auto result = std::from_chars(body.data(), body.data() + body.size(), value);
      if (result.ec != std::errc() || result.ptr != body.data() + body.size())
        throw ParseError(current_.line, current_.col,
                         "malformed number '" + std::string(body) + "'");
      current_.kind = Tok::Number;
      current_.text = std::string(body);
      current_.number = value;
      return;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c +
                                      "'; expected a call, number, '(', or infix");
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

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

struct Arg {
  std::optional<double> number;
  ExprPtr expr;
  int line = 1;
  int col = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  MeasureExpr parse() {
    MeasureExpr e = parse_expr();
    if (lex_.peek().kind != Tok::End)
      lex_.fail("trailing input; expected end of expression");
    return e;
  }

 private:
  MeasureExpr parse_expr() {
    MeasureExpr node = parse_primary();
    while (true) {
      const Tok k = lex_.peek().kind;
      BinaryOp op;
      if (k == Tok::PipeMono)
        op = BinaryOp::MonoAdd;
      else if (k == Tok::PipeFree)
        op = BinaryOp::FreeAdd;
      else if (k == Tok::PipeBool)
        op = BinaryOp::BoolAdd;
      else
        break;
      lex_.take();
      MeasureExpr rhs = parse_primary();
      node = MeasureExpr{BinaryExpr{op, true,
                                    std::make_shared<MeasureExpr>(std::move(node)),
                                    std::make_shared<MeasureExpr>(std::move(rhs))}};
    }
    return node;
  }

  MeasureExpr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.take();
      MeasureExpr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) return parse_call();
    lex_.fail("expected a measure expression (call, '(', number literal)");
  }

  void expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind)
      lex_.fail(std::string("expected ") + what + ", got '" + lex_.peek().text + "'");
    lex_.take();
  }

  std::vector<Arg> parse_args() {
    std::vector<Arg> args;
    expect(Tok::LParen, "'('");
    if (lex_.peek().kind == Tok::RParen) {
      lex_.take();
      return args;
    }
    while (true) {
      Arg a;
      a.line = lex_.peek().line;
      a.col = lex_.peek().col;
      if (lex_.peek().kind == Tok::Number) {
        a.number = lex_.take().number;
      } else {
        a.expr = std::make_shared<MeasureExpr>(parse_expr());
      }
      args.push_back(std::move(a));
      if (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        continue;
      }
      expect(Tok::RParen, "')' or ','");
      break;
    }
    return args;
  }

  [[noreturn]] void arg_fail(const Token& name, const std::string& msg) {
    throw ParseError(name.line, name.col, name.text + ": " + msg);
  }

  double want_number(const Token& name, const std::vector<Arg>& args, std::size_t i) {
    if (i >= args.size() || !args[i].number)
      arg_fail(name, "argument " + std::to_string(i + 1) + " must be a number");
    return *args[i].number;
  }

  ExprPtr want_expr(const Token& name, const std::vector<Arg>& args, std::size_t i) {
    if (i >= args.size()) arg_fail(name, "missing argument " + std::to_string(i + 1));
    if (args[i].expr) return args[i].expr;
    arg_fail(name, "argument " + std::to_string(i + 1) + " must be a measure expression");
  }

  MeasureExpr parse_call() {
    const Token name = lex_.take();
    if (name.text == "uniform_circle") {
      if (lex_.peek().kind == Tok::LParen) {
        const auto args = parse_args();
        if (!args.empty()) arg_fail(name, "takes no arguments");
      }
      return MeasureExpr{UniformCircleLit{}};
    }
    const auto args = parse_args();
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        arg_fail(name, "expected " + std::to_string(n) + " arguments, got " +
                           std::to_string(args.size()));
    };
    if (name.text == "dirac") {
      need(1);
      return MeasureExpr{DiracLit{want_number(name, args, 0)}};
    }
    if (name.text == "bern") {
      need(3);
      return MeasureExpr{BernLit{want_number(name, args, 0),
                                 want_number(name, args, 1),
                                 want_number(name, args, 2)}};
    }
    if (name.text == "semicircle") {
      need(2);
      return MeasureExpr{SemicircleLit{want_number(name, args, 0),
                                       want_number(name, args, 1)}};
    }
    if (name.text == "atoms") {
      if (args.empty() || args.size() % 2 != 0)
        arg_fail(name, "expects position,weight pairs");
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < args.size(); i += 2)
        atoms.push_back({want_number(name, args, i), want_number(name, args, i + 1)});
      return MeasureExpr{AtomsLit{std::move(atoms)}};
    }
    if (name.text == "translate" || name.text == "dilate" || name.text == "rotate") {
      need(2);
      const UnaryMap map = name.text == "translate" ? UnaryMap::Translate
                           : name.text == "dilate"  ? UnaryMap::Dilate
                                                    : UnaryMap::Rotate;
      return MeasureExpr{UnaryExpr{map, want_number(name, args, 1),
                                   want_expr(name, args, 0)}};
    }
    static const std::vector<std::pair<std::string, BinaryOp>> kBinary{
        {"mono_add", BinaryOp::MonoAdd},         {"bool_add", BinaryOp::BoolAdd},
        {"free_add", BinaryOp::FreeAdd},         {"mono_mult", BinaryOp::MonoMult},
        {"mono_mult_alt", BinaryOp::MonoMultAlt}, {"bool_mult", BinaryOp::BoolMult},
        {"bool_mult_new", BinaryOp::BoolMultNew}, {"free_mult", BinaryOp::FreeMult}};
    for (const auto& [ident, op] : kBinary) {
      if (name.text == ident) {
        need(2);
        return MeasureExpr{BinaryExpr{op, false, want_expr(name, args, 0),
                                      want_expr(name, args, 1)}};
      }
    }
    arg_fail(name,
             "unknown function; expected one of dirac, atoms, bern, "
             "uniform_circle, semicircle, translate, dilate, rotate, mono_add, "
             "bool_add, free_add, mono_mult, mono_mult_alt, bool_mult, "
             "bool_mult_new, free_mult");
  }

  Lexer lex_;
};

std::string format_number(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

const char* binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::MonoAdd: return "mono_add";
    case BinaryOp::BoolAdd: return "bool_add";
    case BinaryOp::FreeAdd: return "free_add";
    case BinaryOp::MonoMult: return "mono_mult";
    case BinaryOp::MonoMultAlt: return "mono_mult_alt";
    case BinaryOp::BoolMult: return "bool_mult";
    case BinaryOp::BoolMultNew: return "bool_mult_new";
    case BinaryOp::FreeMult: return "free_mult";
  }
  return "?";
}

std::string print_node(const MeasureExpr& expr, bool parenthesize_sugar);

std::string print_binary(const BinaryExpr& b) {
  if (!b.sugared)
    return std::string(binary_name(b.op)) + "(" + print_node(*b.lhs, false) + "," +
           print_node(*b.rhs, false) + ")";
  const char* infix = b.op == BinaryOp::MonoAdd ? " |> "
                      : b.op == BinaryOp::FreeAdd ? " (+) "
                                                  : " (u) ";
  // left-associative chains print bare; sugared right children need parens
  return print_node(*b.lhs, false) + infix + print_node(*b.rhs, true);
}

std::string print_node(const MeasureExpr& expr, bool parenthesize_sugar) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, DiracLit>) {
          return "dirac(" + format_number(node.x) + ")";
        } else if constexpr (std::is_same_v<T, AtomsLit>) {
          std::string out = "atoms(";
          for (std::size_t i = 0; i < node.atoms.size(); ++i) {
            if (i) out += ",";
            out += format_number(node.atoms[i].position) + "," +
                   format_number(node.atoms[i].weight);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, BernLit>) {
          return "bern(" + format_number(node.p) + "," + format_number(node.a) +
                 "," + format_number(node.b) + ")";
        } else if constexpr (std::is_same_v<T, UniformCircleLit>) {
          return "uniform_circle()";
        } else if constexpr (std::is_same_v<T, SemicircleLit>) {
          return "semicircle(" + format_number(node.mean) + "," +
                 format_number(node.variance) + ")";
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          const char* name = node.map == UnaryMap::Translate ? "translate"
                             : node.map == UnaryMap::Dilate  ? "dilate"
                                                             : "rotate";
          return std::string(name) + "(" + print_node(*node.child, false) + "," +
                 format_number(node.parameter) + ")";
        } else {
          const std::string body = print_binary(node);
          if (parenthesize_sugar && node.sugared) return "(" + body + ")";
          return body;
        }
      },
      expr.node);
}

// ---- domain inference -------------------------------------------------------

constexpr unsigned kReal = 1, kPositive = 2, kCircle = 4;

unsigned literal_mask(const std::vector<Atom>& atoms,
                      const std::optional<Domain>& forced) {
  if (forced) {
    switch (*forced) {
      case Domain::RealLine: return kReal;
      case Domain::PositiveHalfLine: {
        for (const auto& a : atoms)
          if (a.position < 0)
            throw DomainError("negative atom in a measure forced onto R+");
        return kPositive;
      }
      case Domain::UnitCircle: return kCircle;  // positions read as angles
    }
  }
  unsigned mask = kReal;
  bool nonneg = true;
  for (const auto& a : atoms) nonneg = nonneg && a.position >= 0;
  if (nonneg) mask |= kPositive;
  return mask;
}

std::vector<Atom> literal_atoms(const MeasureExpr& expr) {
  if (const auto* d = std::get_if<DiracLit>(&expr.node))
    return {{d->x, 1.0}};
  if (const auto* a = std::get_if<AtomsLit>(&expr.node)) return a->atoms;
  if (const auto* b = std::get_if<BernLit>(&expr.node))
    return {{b->a, b->p}, {b->b, 1.0 - b->p}};
  throw PreconditionError("not an atomic literal");
}

unsigned infer_mask(const MeasureExpr& expr, const EvalOptions& opts) {
  return std::visit(
      [&](const auto& node) -> unsigned {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, DiracLit> || std::is_same_v<T, AtomsLit> ||
                      std::is_same_v<T, BernLit>) {
          return literal_mask(literal_atoms(expr), opts.literal_domain);
        } else if constexpr (std::is_same_v<T, UniformCircleLit>) {
          return kCircle;
        } else if constexpr (std::is_same_v<T, SemicircleLit>) {
          return kReal;
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          const unsigned child = infer_mask(*node.child, opts);
          const unsigned want = node.map == UnaryMap::Translate ? kReal
                                : node.map == UnaryMap::Dilate  ? kPositive
                                                                : kCircle;
          if (!(child & want))
            throw DomainError("map/domain mismatch in the expression");
          return want;
        } else {
          const BinaryExpr& b = node;
          const unsigned lhs = infer_mask(*b.lhs, opts);
          const unsigned rhs = infer_mask(*b.rhs, opts);
          switch (b.op) {
            case BinaryOp::MonoAdd:
            case BinaryOp::BoolAdd:
            case BinaryOp::FreeAdd:
              if (!(lhs & kReal) || !(rhs & kReal))
                throw DomainError(std::string(binary_name(b.op)) +
                                  " needs real-line operands");
              return kReal;
            case BinaryOp::MonoMultAlt:
            case BinaryOp::BoolMultNew:
              if (!(lhs & kPositive) || !(rhs & kPositive))
                throw DomainError(std::string(binary_name(b.op)) +
                                  " needs half-line operands");
              return kPositive;
            default:
              if ((lhs & kPositive) && (rhs & kPositive)) return kPositive;
              if ((lhs & kCircle) && (rhs & kCircle)) return kCircle;
              throw DomainError(std::string(binary_name(b.op)) +
                                " needs both operands on R+ or both on the circle");
          }
        }
      },
      expr.node);
}

// Operations pin their operand domains during inference; a surviving
// ambiguity (bare literals) defaults to the real line.
Domain mask_to_domain(unsigned mask) {
  if (mask & kReal) return Domain::RealLine;
  if (mask & kPositive) return Domain::PositiveHalfLine;
  return Domain::UnitCircle;
}

OpKind resolve_op(BinaryOp op, Domain domain) {
  switch (op) {
    case BinaryOp::MonoAdd: return OpKind::MonoAdd;
    case BinaryOp::BoolAdd: return OpKind::BoolAdd;
    case BinaryOp::FreeAdd: return OpKind::FreeAdd;
    case BinaryOp::MonoMultAlt: return OpKind::MonoMultAlt;
    case BinaryOp::BoolMultNew: return OpKind::BoolMultNew;
    case BinaryOp::MonoMult:
      return domain == Domain::UnitCircle ? OpKind::MonoMultCircle
                                          : OpKind::MonoMultPos;
    case BinaryOp::BoolMult:
      return domain == Domain::UnitCircle ? OpKind::BoolMultCircle
                                          : OpKind::BoolMultBercovici;
    case BinaryOp::FreeMult:
      return domain == Domain::UnitCircle ? OpKind::FreeMultCircle
                                          : OpKind::FreeMultPos;
  }
  throw PreconditionError("unknown operation");
}

EvalValue eval_node(const MeasureExpr& expr, Domain target, const EvalOptions& opts);

EvalValue eval_binary(const BinaryExpr& b, Domain target, const EvalOptions& opts) {
  const Domain operand_domain =
      (b.op == BinaryOp::MonoAdd || b.op == BinaryOp::BoolAdd ||
       b.op == BinaryOp::FreeAdd)
          ? Domain::RealLine
          : target;
  const EvalValue lhs = eval_node(*b.lhs, operand_domain, opts);
  const EvalValue rhs = eval_node(*b.rhs, operand_domain, opts);
  if (lhs.is_undefined() || rhs.is_undefined())
    throw PreconditionError("an operand is the Undefined outcome");
  const OpKind op = resolve_op(b.op, operand_domain);
  ConvolutionResult result =
      op == OpKind::BoolMultBercovici
          ? bool_mult_bercovici_pos(lhs.handle(), rhs.handle(),
                                    opts.bercovici_class_samples, opts.seed)
          : convolve(op, lhs.handle(), rhs.handle(), opts.solve);
  return EvalValue{std::move(result.value), operand_domain};
}

EvalValue eval_node(const MeasureExpr& expr, Domain target, const EvalOptions& opts) {
  return std::visit(
      [&](const auto& node) -> EvalValue {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, DiracLit> || std::is_same_v<T, AtomsLit> ||
                      std::is_same_v<T, BernLit>) {
          return EvalValue{make_atomic_rescaled(target, literal_atoms(expr)),
                           target};
        } else if constexpr (std::is_same_v<T, UniformCircleLit>) {
          return EvalValue{handle_of(haar_circle()), Domain::UnitCircle};
        } else if constexpr (std::is_same_v<T, SemicircleLit>) {
          return EvalValue{semicircle_handle(node.mean, node.variance),
                           Domain::RealLine};
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          const EvalValue child = eval_node(*node.child, target, opts);
          if (child.is_undefined())
            throw PreconditionError("cannot map the Undefined outcome");
          PushMap map = node.map == UnaryMap::Translate
                            ? PushMap(Translate{node.parameter})
                        : node.map == UnaryMap::Dilate
                            ? PushMap(Dilate{node.parameter})
                            : PushMap(Rotate{node.parameter});
          if (child.is_atomic())
            return EvalValue{push_map(child.atoms(), map), target};
          return EvalValue{push_handle(child.handle(), map), target};
        } else {
          return eval_binary(node, target, opts);
        }
      },
      expr.node);
}

}  // namespace

MeasureExpr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string pretty_print(const MeasureExpr& expr) { return print_node(expr, false); }

TransformHandle EvalValue::handle() const {
  if (is_undefined())
    throw PreconditionError("the Undefined outcome has no transforms");
  if (is_atomic()) return handle_of(atoms());
  return std::get<TransformHandle>(value);
}

EvalValue evaluate_expression(const MeasureExpr& expr, const EvalOptions& opts) {
  const unsigned mask = infer_mask(expr, opts);
  return eval_node(expr, mask_to_domain(mask), opts);
}

RootConvolution root_convolution(const MeasureExpr& expr, const EvalOptions& opts) {
  const auto* b = std::get_if<BinaryExpr>(&expr.node);
  if (!b)
    throw PreconditionError("model dump needs a convolution at the top level");
  const unsigned mask = infer_mask(expr, opts);
  const Domain domain = mask_to_domain(mask);
  const Domain operand_domain =
      (b->op == BinaryOp::MonoAdd || b->op == BinaryOp::BoolAdd ||
       b->op == BinaryOp::FreeAdd)
          ? Domain::RealLine
          : domain;
  const EvalValue lhs = eval_node(*b->lhs, operand_domain, opts);
  const EvalValue rhs = eval_node(*b->rhs, operand_domain, opts);
  if (!lhs.is_atomic() || !rhs.is_atomic())
    throw PreconditionError("model dump needs atomic operands");
  return RootConvolution{resolve_op(b->op, operand_domain), lhs.atoms(),
                         rhs.atoms()};
}

}  // namespace ncconv
