#ifndef LGCOL__EXPR_HPP_
#define LGCOL__EXPR_HPP_

/**
 * @file
 * @brief Tiny arithmetic expression language over time t for open-loop controls.
 *
 * Grammar:
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('+' | '-') unary | primary
 *   primary := number | 't' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
 */

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgcol {

class ExprParseError : public std::runtime_error
{
public:
  ExprParseError(const std::string & message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)), position(position)
  {}

  std::size_t position;
};

class Expression
{
public:
  /// Throws ExprParseError with the 0-based character position of the problem.
  static Expression parse(const std::string & source);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] const std::string & source() const { return source_; }

  enum class Op { Const, Time, Add, Sub, Mul, Div, Neg, Sin, Cos };

  struct Instr
  {
    Op op;
    double value{0.};
  };

private:
  std::string source_;
  std::vector<Instr> program_;  ///< postfix
};

}  // namespace lgcol

#endif  // LGCOL__EXPR_HPP_
