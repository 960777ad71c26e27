#include "lgcol/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace lgcol {

namespace {

class Parser
{
public:
  using Instr = Expression::Instr;
  using Op    = Expression::Op;

  explicit Parser(const std::string & src) : src_(src) {}

  std::vector<Instr> run()
  {
    expr();
    skip_space();
    if (pos_ != src_.size()) { throw ExprParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_); }
    return std::move(out_);
  }

private:
  void skip_space()
  {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) { ++pos_; }
  }

  bool accept(char c)
  {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c)) { throw ExprParseError(std::string("expected '") + c + "'", pos_); }
  }

  void expr()
  {
    term();
    while (true) {
      if (accept('+')) {
        term();
        out_.push_back({Op::Add});
      } else if (accept('-')) {
        term();
        out_.push_back({Op::Sub});
      } else {
        return;
      }
    }
  }

  void term()
  {
    unary();
    while (true) {
      if (accept('*')) {
        unary();
        out_.push_back({Op::Mul});
      } else if (accept('/')) {
        unary();
        out_.push_back({Op::Div});
      } else {
        return;
      }
    }
  }

  void unary()
  {
    if (accept('-')) {
      unary();
      out_.push_back({Op::Neg});
    } else if (accept('+')) {
      unary();
    } else {
      primary();
    }
  }

  void primary()
  {
    skip_space();
    if (pos_ >= src_.size()) { throw ExprParseError("unexpected end of expression", pos_); }
    const char c = src_[pos_];
    if (accept('(')) {
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) { ++pos_; }
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "t") {
        out_.push_back({Op::Time});
      } else if (name == "pi") {
        out_.push_back({Op::Const, std::numbers::pi});
      } else if (name == "sin" || name == "cos") {
        expect('(');
        expr();
        expect(')');
        out_.push_back({name == "sin" ? Op::Sin : Op::Cos});
      } else {
        throw ExprParseError("unknown identifier '" + name + "'", start);
      }
      return;
    }
    throw ExprParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  void number()
  {
    const char * first = src_.data() + pos_;
    const char * last  = src_.data() + src_.size();
    double value       = 0.;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) { throw ExprParseError("malformed number", pos_); }
    pos_ += static_cast<std::size_t>(ptr - first);
    out_.push_back({Op::Const, value});
  }

  const std::string & src_;
  std::size_t pos_{0};
  std::vector<Instr> out_;
};

}  // namespace

Expression Expression::parse(const std::string & source)
{
  Expression e;
  e.source_  = source;
  e.program_ = Parser(source).run();
  return e;
}

double Expression::operator()(double t) const
{
  std::vector<double> stack;
  stack.reserve(program_.size());
  const auto pop = [&stack] {
    const double v = stack.back();
    stack.pop_back();
    return v;
  };
  for (const auto & in : program_) {
    switch (in.op) {
    case Op::Const: stack.push_back(in.value); break;
    case Op::Time: stack.push_back(t); break;
    case Op::Neg: stack.back() = -stack.back(); break;
    case Op::Sin: stack.back() = std::sin(stack.back()); break;
    case Op::Cos: stack.back() = std::cos(stack.back()); break;
    case Op::Add: {
      const double b = pop();
      stack.back() += b;
      break;
    }
    case Op::Sub: {
      const double b = pop();
      stack.back() -= b;
      break;
    }
    case Op::Mul: {
      const double b = pop();
      stack.back() *= b;
      break;
    }
    case Op::Div: {
      const double b = pop();
      stack.back() /= b;
      break;
    }
    }
  }
  return stack.back();
}

}  // namespace lgcol
