#include "cascade/parse.hpp"

#include <algorithm>
#include <cctype>

namespace cascade {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool constant_coefficients(const LinearOperator& op) {
  return std::all_of(op.terms().begin(), op.terms().end(),
                     [](const auto& t) { return t.second.is_constant(); });
}

class Parser {
 public:
  Parser(const std::string& text, const Variables& vars, bool free_variables, bool operators)
      : s_(text), vars_(vars), free_(free_variables), operators_(operators) {}

  LinearOperator parse_all() {
    LinearOperator v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  const std::string& s_;
  const Variables& vars_;
  bool free_;
  bool operators_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::optional<std::size_t> at = std::nullopt) const {
    throw ParseError(ErrorKind::Parse, at.value_or(pos_), "syntax error: " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  LinearOperator scalar(const Expr& e) const { return LinearOperator::scalar(vars_, e); }

  static std::optional<Expr> as_scalar(const LinearOperator& op) {
    if (op.order() > 0) return std::nullopt;
    return op.coefficient(MultiIndex(op.vars().size(), 0));
  }

  Expr scalar_only(const LinearOperator& op, std::size_t at) const {
    auto e = as_scalar(op);
    if (!e) fail("derivation not allowed here", at);
    return *e;
  }

  std::string identifier() {
    skip();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected identifier");
    const std::size_t b = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return s_.substr(b, pos_ - b);
  }

  long integer() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected integer");
    if (pos_ - b > 6) fail("integer too large", b);
    return std::stol(s_.substr(b, pos_ - b));
  }

  LinearOperator sum() {
    LinearOperator v = product();
    for (;;) {
      if (accept('+'))
        v += product();
      else if (accept('-'))
        v -= product();
      else
        return v;
    }
  }

  LinearOperator multiply(const LinearOperator& a, const LinearOperator& b, std::size_t at) const {
    if (auto c = as_scalar(a)) return *c * b;
    if (auto c = as_scalar(b); c && c->is_constant()) return *c * a;
    if (constant_coefficients(b)) return compose(a, b);
    fail("nonconstant coefficient right of a derivation (operators are read in normal order)", at);
  }

  LinearOperator product() {
    LinearOperator v = unary();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('*')) {
        v = multiply(v, unary(), at);
      } else if (accept('/')) {
        const std::size_t rhs_at = pos_;
        Expr d = scalar_only(unary(), rhs_at);
        if (d.is_zero()) fail("division by zero", rhs_at);
        v = d.inverse() * v;
      } else {
        return v;
      }
    }
  }

  LinearOperator unary() {
    if (accept('-')) return Expr(-1) * unary();
    if (accept('+')) return unary();
    return power();
  }

  LinearOperator power() {
    LinearOperator base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t at = pos_;
    bool neg = false;
    if (accept('(')) {
      neg = accept('-');
      long e = integer();
      expect(')');
      return raise(base, neg ? -e : e, at);
    }
    neg = accept('-');
    long e = integer();
    return raise(base, neg ? -e : e, at);
  }

  LinearOperator raise(const LinearOperator& base, long e, std::size_t at) const {
    if (auto c = as_scalar(base)) {
      if (c->is_zero() && e < 0) fail("division by zero", at);
      return scalar(c->pow(static_cast<int>(e)));
    }
    if (e < 0) fail("negative power of an operator", at);
    if (!constant_coefficients(base)) fail("power of an operator with nonconstant coefficients", at);
    LinearOperator out = scalar(Expr(1));
    for (long i = 0; i < e; ++i) out = compose(out, base);
    return out;
  }

  LinearOperator primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return scalar(Expr(Rational(s_.substr(b, pos_ - b))));
    }
    if (accept('(')) {
      LinearOperator v = sum();
      expect(')');
      return v;
    }
    if (!ident_start(c)) fail("unexpected '" + std::string(1, c) + "'");
    const std::size_t at = pos_;
    const std::string name = identifier();
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '(' || s_[pos_] == '\'')) return call(name, at);
    auto vi = std::find(vars_.begin(), vars_.end(), name);
    if (vi != vars_.end()) return scalar(var(name));
    if (operators_ && name.size() > 1 && name[0] == 'D') {
      const std::string v = name.substr(1);
      auto di = std::find(vars_.begin(), vars_.end(), v);
      if (di == vars_.end())
        throw ParseError(ErrorKind::UnknownVariable, at + 1, "unknown variable '" + v + "' in derivation " + name);
      return LinearOperator::derivation(vars_, static_cast<std::size_t>(di - vars_.begin()));
    }
    if (free_) return scalar(var(name));
    throw ParseError(ErrorKind::UnknownVariable, at, "unknown variable '" + name + "'");
  }

  Expr scalar_arg() {
    skip();
    const std::size_t at = pos_;
    return scalar_only(sum(), at);
  }

  LinearOperator call(const std::string& name, std::size_t at) {
    std::vector<int> derivative;
    bool primed = false;
    int primes = 0;
    while (accept('\'')) ++primes;
    if (primes > 0) {
      primed = true;
      if (primes == 1 && accept('[')) {
        do derivative.push_back(static_cast<int>(integer()));
        while (accept(','));
        expect(']');
      }
    }
    if (std::find(vars_.begin(), vars_.end(), name) != vars_.end())
      fail("variable '" + name + "' used as a function", at);
    expect('(');
    if (!primed && name == "int") {
      Expr f = scalar_arg();
      expect(',');
      const std::string v = identifier();
      if (!free_ && std::find(vars_.begin(), vars_.end(), v) == vars_.end())
        throw ParseError(ErrorKind::UnknownVariable, pos_ - v.size(), "unknown variable '" + v + "'");
      expect(')');
      return scalar(integral_node(f, v));
    }
    std::vector<Expr> args{scalar_arg()};
    while (accept(',')) args.push_back(scalar_arg());
    expect(')');
    if (!primed && name == "exp" && args.size() == 1) return scalar(exp(args[0]));
    if (!primed && name == "ln" && args.size() == 1) {
      if (args[0].is_zero()) fail("ln(0)", at);
      return scalar(ln(args[0]));
    }
    if (primed) {
      if (derivative.empty()) {
        if (args.size() != 1) fail("prime notation needs [..] for functions of several arguments", at);
        derivative.push_back(primes);
      }
      if (derivative.size() != args.size()) fail("derivative annotation does not match argument count", at);
      if (std::any_of(derivative.begin(), derivative.end(), [](int d) { return d < 0; }))
        fail("negative derivative order", at);
      return scalar(func_derivative(name, derivative, args));
    }
    return scalar(func(name, args));
  }
};

}  // namespace

Expr parse_expression(const std::string& text, const Variables& vars, bool free_variables) {
  Parser p(text, vars, free_variables, false);
  const LinearOperator v = p.parse_all();
  return v.coefficient(MultiIndex(vars.size(), 0));
}

LinearOperator parse_operator(const std::string& text, const Variables& vars) {
  if (vars.size() < 2 || vars.size() > 3)
    throw Error(ErrorKind::Precondition, "operators need 2 or 3 variables");
  Parser p(text, vars, false, true);
  return p.parse_all();
}

Variables parse_variable_list(const std::string& text) {
  Variables out;
  std::size_t b = 0;
  for (;;) {
    const std::size_t e = text.find(',', b);
    std::string name = text.substr(b, e == std::string::npos ? std::string::npos : e - b);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty() || !ident_start(name[0]) ||
        !std::all_of(name.begin(), name.end(), ident_char))
      throw Error(ErrorKind::Parse, "invalid variable name '" + name + "'");
    if (std::find(out.begin(), out.end(), name) != out.end())
      throw Error(ErrorKind::Parse, "duplicate variable '" + name + "'");
    if (name[0] == 'D' || name == "exp" || name == "ln" || name == "int")
      throw Error(ErrorKind::Parse, "reserved variable name '" + name + "'");
    out.push_back(name);
    if (e == std::string::npos) break;
    b = e + 1;
  }
  return out;
}

}  // namespace cascade
