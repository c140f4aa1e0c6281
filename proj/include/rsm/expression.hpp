#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rsm/system_model.hpp"

namespace rsm {

// Scalar expression in x1.., y1.. (x, y alias x1, y1), numbers, pi,
// + - * / ^, parentheses and sin cos tan exp log sqrt tanh abs.
// Parse errors are ConfigErrors naming the offending position.
class Expression {
 public:
  static Expression parse(const std::string& text, std::size_t n_slow, std::size_t n_fast);

  double operator()(const Vec& x, const Vec& y) const;
  const std::string& text() const noexcept { return text_; }

  enum class Code : unsigned char {
    constant, slow, fast, add, sub, mul, div, pow, neg,
    sin, cos, tan, exp, log, sqrt, tanh, abs
  };
  struct Instr {
    Code code;
    double value = 0.0;
    std::size_t index = 0;
  };

 private:
  std::vector<Instr> program_;  // postfix
  std::string text_;
  std::size_t depth_ = 0;
};

VectorField compile_field(const std::vector<std::string>& components, std::size_t n_slow,
                          std::size_t n_fast);

}  // namespace rsm
