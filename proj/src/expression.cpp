#include "rsm/expression.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include "rsm/errors.hpp"

namespace rsm {

namespace {

using Code = Expression::Code;
using Instr = Expression::Instr;

class Parser {
 public:
  Parser(const std::string& s, std::size_t n1, std::size_t n2) : s_(s), n1_(n1), n2_(n2) {}

  std::vector<Instr> run() {
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + s_ + "\": " + what + " at position " +
                      std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expr() {
    term();
    for (;;) {
      if (eat('+')) {
        term();
        out_.push_back({Code::add});
      } else if (eat('-')) {
        term();
        out_.push_back({Code::sub});
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (eat('*')) {
        unary();
        out_.push_back({Code::mul});
      } else if (eat('/')) {
        unary();
        out_.push_back({Code::div});
      } else {
        return;
      }
    }
  }

  // Unary minus binds looser than ^: -x^2 = -(x^2).
  void unary() {
    if (eat('-')) {
      unary();
      out_.push_back({Code::neg});
    } else if (eat('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (eat('^')) {
      unary();  // right associative
      out_.push_back({Code::pow});
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      expr();
      if (!eat(')')) fail("missing ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      out_.push_back({Code::constant, v});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      static const std::map<std::string, Code> funcs = {
          {"sin", Code::sin},   {"cos", Code::cos},   {"tan", Code::tan},
          {"exp", Code::exp},   {"log", Code::log},   {"sqrt", Code::sqrt},
          {"tanh", Code::tanh}, {"abs", Code::abs}};
      if (auto it = funcs.find(id); it != funcs.end()) {
        if (!eat('(')) fail("function " + id + " needs '('");
        expr();
        if (!eat(')')) fail("missing ')'");
        out_.push_back({it->second});
        return;
      }
      if (id == "pi") {
        out_.push_back({Code::constant, std::numbers::pi});
        return;
      }
      if (id == "x" || id == "y") {
        variable(id[0], 1, start);
        return;
      }
      if ((id[0] == 'x' || id[0] == 'y') && id.size() > 1 &&
          id.find_first_not_of("0123456789", 1) == std::string::npos) {
        variable(id[0], std::stoul(id.substr(1)), start);
        return;
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void variable(char kind, std::size_t k, std::size_t start) {
    const std::size_t n = kind == 'x' ? n1_ : n2_;
    if (k < 1 || k > n) {
      pos_ = start;
      fail(std::string(1, kind) + std::to_string(k) + " out of range (dimension " +
           std::to_string(n) + ")");
    }
    out_.push_back({kind == 'x' ? Code::slow : Code::fast, 0.0, k - 1});
  }

  const std::string& s_;
  std::size_t n1_;
  std::size_t n2_;
  std::size_t pos_ = 0;
  std::vector<Instr> out_;
};

}  // namespace

Expression Expression::parse(const std::string& text, std::size_t n_slow, std::size_t n_fast) {
  Expression e;
  e.text_ = text;
  e.program_ = Parser(text, n_slow, n_fast).run();
  std::size_t depth = 0;
  for (const auto& in : e.program_) {
    switch (in.code) {
      case Code::constant:
      case Code::slow:
      case Code::fast:
        ++depth;
        break;
      case Code::add:
      case Code::sub:
      case Code::mul:
      case Code::div:
      case Code::pow:
        --depth;
        break;
      default:
        break;
    }
    e.depth_ = std::max(e.depth_, depth);
  }
  return e;
}

double Expression::operator()(const Vec& x, const Vec& y) const {
  double stack[64] = {};
  double* heap = nullptr;
  std::vector<double> big;
  if (depth_ > 64) {
    big.resize(depth_);
    heap = big.data();
  }
  double* st = heap ? heap : stack;
  std::size_t sp = 0;
  for (const auto& in : program_) {
    switch (in.code) {
      case Code::constant: st[sp++] = in.value; break;
      case Code::slow: st[sp++] = x[static_cast<Eigen::Index>(in.index)]; break;
      case Code::fast: st[sp++] = y[static_cast<Eigen::Index>(in.index)]; break;
      case Code::add: --sp; st[sp - 1] += st[sp]; break;
      case Code::sub: --sp; st[sp - 1] -= st[sp]; break;
      case Code::mul: --sp; st[sp - 1] *= st[sp]; break;
      case Code::div: --sp; st[sp - 1] /= st[sp]; break;
      case Code::pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
      case Code::neg: st[sp - 1] = -st[sp - 1]; break;
      case Code::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Code::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Code::tan: st[sp - 1] = std::tan(st[sp - 1]); break;
      case Code::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Code::log: st[sp - 1] = std::log(st[sp - 1]); break;
      case Code::sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
      case Code::tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
      case Code::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
    }
  }
  return st[0];
}

VectorField compile_field(const std::vector<std::string>& components, std::size_t n_slow,
                          std::size_t n_fast) {
  std::vector<Expression> exprs;
  for (const auto& c : components) exprs.push_back(Expression::parse(c, n_slow, n_fast));
  return [exprs = std::move(exprs)](const Vec& x, const Vec& y) {
    Vec out(static_cast<Eigen::Index>(exprs.size()));
    for (std::size_t i = 0; i < exprs.size(); ++i) out[static_cast<Eigen::Index>(i)] = exprs[i](x, y);
    return out;
  };
}

}  // namespace rsm
