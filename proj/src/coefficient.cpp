#include "liouville/coefficient.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace liouville {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::MaximaNotSeparated: return "MaximaNotSeparated";
    case ErrorCode::DegenerateProbes: return "DegenerateProbes";
    case ErrorCode::SizeCap: return "SizeCap";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BallOutsideDomain: return "BallOutsideDomain";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::SingularKernelMatrix: return "SingularKernelMatrix";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::NotSingleBubble: return "NotSingleBubble";
    case ErrorCode::NewtonStalled: return "NewtonStalled";
    case ErrorCode::BranchTerminated: return "BranchTerminated";
    case ErrorCode::PeakCountMismatch: return "PeakCountMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Polynomial2

void Polynomial2::add_term(int i, int j, double c) {
  if (c == 0.0) return;
  auto key = std::make_pair(i, j);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial2 Polynomial2::constant(double c) {
  Polynomial2 p;
  p.add_term(0, 0, c);
  return p;
}

Polynomial2 Polynomial2::x() {
  Polynomial2 p;
  p.add_term(1, 0, 1.0);
  return p;
}

Polynomial2 Polynomial2::y() {
  Polynomial2 p;
  p.add_term(0, 1, 1.0);
  return p;
}

Polynomial2 Polynomial2::real_part(const std::vector<cplx>& coeffs) {
  // Track z^m = A + iB as a pair of real polynomials.
  Polynomial2 A = constant(1.0), B;
  Polynomial2 out;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    if (m > 0) {
      Polynomial2 nA = A * x() - B * y();
      Polynomial2 nB = A * y() + B * x();
      A = std::move(nA);
      B = std::move(nB);
    }
    const cplx c = coeffs[m];
    if (c != cplx(0.0)) out = out + A * c.real() - B * c.imag();
  }
  return out;
}

static double ipow(double b, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

double Polynomial2::value(double x, double y) const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += c * ipow(x, k.first) * ipow(y, k.second);
  return s;
}

Eigen::Vector2d Polynomial2::gradient(double x, double y) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& [k, c] : terms_) {
    const auto [i, j] = k;
    if (i > 0) g[0] += c * i * ipow(x, i - 1) * ipow(y, j);
    if (j > 0) g[1] += c * j * ipow(x, i) * ipow(y, j - 1);
  }
  return g;
}

Eigen::Matrix2d Polynomial2::hessian(double x, double y) const {
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  for (const auto& [k, c] : terms_) {
    const auto [i, j] = k;
    if (i > 1) H(0, 0) += c * i * (i - 1) * ipow(x, i - 2) * ipow(y, j);
    if (j > 1) H(1, 1) += c * j * (j - 1) * ipow(x, i) * ipow(y, j - 2);
    if (i > 0 && j > 0) H(0, 1) += c * i * j * ipow(x, i - 1) * ipow(y, j - 1);
  }
  H(1, 0) = H(0, 1);
  return H;
}

bool Polynomial2::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == std::make_pair(0, 0));
}

int Polynomial2::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
  return d;
}

std::string Polynomial2::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    if (!first) os << " + ";
    first = false;
    os << "(" << buf << ")";
    if (k.first > 0) os << "*x^" << k.first;
    if (k.second > 0) os << "*y^" << k.second;
  }
  return os.str();
}

Polynomial2 Polynomial2::operator+(const Polynomial2& o) const {
  Polynomial2 r = *this;
  for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, c);
  return r;
}

Polynomial2 Polynomial2::operator-(const Polynomial2& o) const { return *this + o * -1.0; }

Polynomial2 Polynomial2::operator*(const Polynomial2& o) const {
  Polynomial2 r;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) r.add_term(a.first + b.first, a.second + b.second, ca * cb);
  return r;
}

Polynomial2 Polynomial2::operator*(double s) const {
  Polynomial2 r;
  for (const auto& [k, c] : terms_) r.add_term(k.first, k.second, c * s);
  return r;
}

Polynomial2 Polynomial2::pow(int n) const {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial power");
  Polynomial2 r = constant(1.0), b = *this;
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Coefficient parse() {
    Coefficient c = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigError,
                "coefficient expression '" + s_ + "' at " + std::to_string(pos_) + ": " + msg);
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

  Coefficient add(const Coefficient& a, const Coefficient& b, double sign) {
    if (!(a.exponent() == b.exponent()))
      fail("sums are only allowed between terms with the same exp() factor");
    return Coefficient(a.prefactor() + b.prefactor() * sign, a.exponent());
  }

  Coefficient expr() {
    Coefficient acc = term();
    for (;;) {
      if (eat('+')) acc = add(acc, term(), 1.0);
      else if (eat('-')) acc = add(acc, term(), -1.0);
      else return acc;
    }
  }

  Coefficient term() {
    Coefficient acc = factor();
    for (;;) {
      if (eat('*')) {
        acc = acc * factor();
      } else if (eat('/')) {
        Coefficient d = factor();
        if (!d.prefactor().is_constant() || !d.exponent().is_zero() || d.prefactor().is_zero())
          fail("division only by nonzero constants");
        acc = Coefficient(acc.prefactor() * (1.0 / d.prefactor().value(0, 0)), acc.exponent());
      } else {
        return acc;
      }
    }
  }

  Coefficient factor() {
    if (eat('-')) {
      Coefficient c = factor();
      return Coefficient(c.prefactor() * -1.0, c.exponent());
    }
    if (eat('+')) return factor();
    Coefficient base = primary();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected non-negative integer exponent");
      const int n = std::atoi(s_.substr(start, pos_ - start).c_str());
      return Coefficient(base.prefactor().pow(n), base.exponent() * static_cast<double>(n));
    }
    return base;
  }

  Coefficient primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Coefficient e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return Coefficient(Polynomial2::constant(v), Polynomial2());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return Coefficient(Polynomial2::x(), Polynomial2());
      if (id == "y") return Coefficient(Polynomial2::y(), Polynomial2());
      if (id == "exp") {
        if (!eat('(')) fail("expected '(' after exp");
        Coefficient arg = expr();
        if (!eat(')')) fail("expected ')'");
        if (!arg.exponent().is_zero()) fail("exp() argument must be a polynomial");
        return Coefficient(Polynomial2::constant(1.0), arg.prefactor());
      }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------- Coefficient

Coefficient Coefficient::parse(const std::string& text) { return Parser(text).parse(); }

double Coefficient::value(cplx p) const {
  return prefactor_.value(p.real(), p.imag()) * std::exp(exponent_.value(p.real(), p.imag()));
}

cplx Coefficient::gradient(cplx p) const {
  const double x = p.real(), y = p.imag();
  const double P = prefactor_.value(x, y), e = std::exp(exponent_.value(x, y));
  const Eigen::Vector2d g = (prefactor_.gradient(x, y) + P * exponent_.gradient(x, y)) * e;
  return {g[0], g[1]};
}

Eigen::Matrix2d Coefficient::hessian(cplx p) const {
  const double x = p.real(), y = p.imag();
  const double P = prefactor_.value(x, y), e = std::exp(exponent_.value(x, y));
  const Eigen::Vector2d gP = prefactor_.gradient(x, y), gQ = exponent_.gradient(x, y);
  const Eigen::Matrix2d H = prefactor_.hessian(x, y) + gP * gQ.transpose() + gQ * gP.transpose() +
                            P * (gQ * gQ.transpose() + exponent_.hessian(x, y));
  return H * e;
}

cplx Coefficient::log_gradient(cplx p) const {
  const double x = p.real(), y = p.imag();
  const Eigen::Vector2d g =
      prefactor_.gradient(x, y) / prefactor_.value(x, y) + exponent_.gradient(x, y);
  return {g[0], g[1]};
}

double Coefficient::log_laplacian(cplx p) const {
  const double x = p.real(), y = p.imag();
  const double P = prefactor_.value(x, y);
  const Eigen::Vector2d gP = prefactor_.gradient(x, y);
  return prefactor_.hessian(x, y).trace() / P - gP.squaredNorm() / (P * P) +
         exponent_.hessian(x, y).trace();
}

Coefficient Coefficient::operator*(const Coefficient& o) const {
  return Coefficient(prefactor_ * o.prefactor_, exponent_ + o.exponent_);
}

std::string Coefficient::to_string() const {
  if (exponent_.is_zero()) return prefactor_.to_string();
  return "(" + prefactor_.to_string() + ")*exp(" + exponent_.to_string() + ")";
}

// ---------------------------------------------------------------- Weight

double Weight::value(cplx p) const {
  return ipow(std::norm(p), N_) * h_.value(p);
}

cplx Weight::gradient(cplx p) const {
  const double r2 = std::norm(p);
  cplx g = ipow(r2, N_) * h_.gradient(p);
  if (N_ > 0) g += 2.0 * N_ * ipow(r2, N_ - 1) * h_.value(p) * p;
  return g;
}

Coefficient family_compensation(int N, cplx xi, double tau, int terms) {
  if (N < 0 || !(tau > 0.0) || terms < 1)
    throw Error(ErrorCode::InvalidArgument, "family_compensation arguments");
  const int n1 = N + 1;
  std::vector<cplx> c(static_cast<std::size_t>(terms * n1 + 1), cplx(0.0));
  const cplx t = std::conj(xi) / std::pow(tau, 2 * n1);
  cplx tk = 1.0;
  for (int k = 1; k <= terms; ++k) {
    tk *= t;
    c[static_cast<std::size_t>(k * n1)] = 4.0 * tk / static_cast<double>(k);
  }
  return Coefficient(Polynomial2::constant(1.0), Polynomial2::real_part(c));
}

}  // namespace liouville
