#include "tssa/gamma_poly.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tssa {

GammaPoly::GammaPoly(double constant) {
  if (constant != 0.0) c_.assign(1, constant);
}

GammaPoly GammaPoly::term(double k, int p) {
  if (p < 0) throw std::invalid_argument("GammaPoly: negative exponent");
  GammaPoly out;
  if (k != 0.0) {
    out.c_.assign(static_cast<std::size_t>(p) + 1, 0.0);
    out.c_[static_cast<std::size_t>(p)] = k;
  }
  return out;
}

int GammaPoly::degree() const {
  for (std::size_t i = c_.size(); i-- > 0;)
    if (c_[i] != 0.0) return static_cast<int>(i);
  return -1;
}

double GammaPoly::coeff(int p) const {
  if (p < 0 || static_cast<std::size_t>(p) >= c_.size()) return 0.0;
  return c_[static_cast<std::size_t>(p)];
}

LeadingTerm GammaPoly::leading() const {
  int d = degree();
  if (d < 0) return LeadingTerm{};
  return LeadingTerm{c_[static_cast<std::size_t>(d)], d};
}

double GammaPoly::eval(double gamma) const {
  double acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * gamma + c_[i];
  return acc;
}

double GammaPoly::max_abs_coeff() const {
  double m = 0.0;
  for (double k : c_) m = std::max(m, std::abs(k));
  return m;
}

std::size_t GammaPoly::term_count() const {
  std::size_t n = 0;
  for (double k : c_)
    if (k != 0.0) ++n;
  return n;
}

void GammaPoly::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

void GammaPoly::set_coeff(int p, double k) {
  if (p < 0) throw std::invalid_argument("GammaPoly: negative exponent");
  if (static_cast<std::size_t>(p) >= c_.size()) {
    if (k == 0.0) return;
    c_.resize(static_cast<std::size_t>(p) + 1, 0.0);
  }
  c_[static_cast<std::size_t>(p)] = k;
  trim();
}

GammaPoly GammaPoly::operator-() const {
  GammaPoly out = *this;
  for (double& k : out.c_) k = -k;
  return out;
}

GammaPoly GammaPoly::combine(const GammaPoly& a, const GammaPoly& b, double sign_b) {
  GammaPoly out;
  const int d = std::max(a.degree(), b.degree());
  if (d < 0) return out;
  out.c_.assign(static_cast<std::size_t>(d) + 1, 0.0);
  for (int p = 0; p <= d; ++p) {
    const double ka = a.coeff(p);
    const double kb = sign_b * b.coeff(p);
    double sum = ka + kb;
    const double contributed = std::max(std::abs(ka), std::abs(kb));
    if (std::abs(sum) <= kCancelTol * contributed) sum = 0.0;
    out.c_[static_cast<std::size_t>(p)] = sum;
  }
  out.trim();
  return out;
}

GammaPoly operator+(const GammaPoly& a, const GammaPoly& b) {
  return GammaPoly::combine(a, b, 1.0);
}

GammaPoly operator-(const GammaPoly& a, const GammaPoly& b) {
  return GammaPoly::combine(a, b, -1.0);
}

GammaPoly operator*(const GammaPoly& a, const GammaPoly& b) {
  const int da = a.degree(), db = b.degree();
  GammaPoly out;
  if (da < 0 || db < 0) return out;
  out.c_.assign(static_cast<std::size_t>(da + db) + 1, 0.0);
  std::vector<double> contrib(out.c_.size(), 0.0);
  for (int i = 0; i <= da; ++i) {
    const double ka = a.coeff(i);
    if (ka == 0.0) continue;
    for (int j = 0; j <= db; ++j) {
      const double kb = b.coeff(j);
      if (kb == 0.0) continue;
      const double prod = ka * kb;
      const auto p = static_cast<std::size_t>(i + j);
      out.c_[p] += prod;
      contrib[p] = std::max(contrib[p], std::abs(prod));
    }
  }
  for (std::size_t p = 0; p < out.c_.size(); ++p)
    if (std::abs(out.c_[p]) <= GammaPoly::kCancelTol * contrib[p]) out.c_[p] = 0.0;
  out.trim();
  return out;
}

GammaPoly& GammaPoly::operator+=(const GammaPoly& o) {
  *this = combine(*this, o, 1.0);
  return *this;
}

GammaPoly& GammaPoly::operator-=(const GammaPoly& o) {
  *this = *this - o;
  return *this;
}

GammaPoly& GammaPoly::operator*=(const GammaPoly& o) {
  *this = *this * o;
  return *this;
}

GammaPoly gp_div_asymptotic(const GammaPoly& a, const GammaPoly& b) {
  const LeadingTerm bl = b.leading();
  if (bl.is_zero()) throw std::invalid_argument("GammaPoly division by zero");
  GammaPoly quot;
  GammaPoly rem = a;
  while (!rem.is_zero() && rem.degree() >= bl.p) {
    const int p = rem.degree() - bl.p;
    const double k = rem.coeff(rem.degree()) / bl.k;
    quot += GammaPoly::term(k, p);
    const int top = rem.degree();
    rem -= GammaPoly::term(k, p) * b;
    rem.set_coeff(top, 0.0);  // force exact degree reduction
  }
  return quot;
}

GammaPoly gp_add(const GammaPoly& a, const GammaPoly& b) { return a + b; }
GammaPoly gp_mul(const GammaPoly& a, const GammaPoly& b) { return a * b; }
LeadingTerm leading(const GammaPoly& a) { return a.leading(); }

std::string to_text(const GammaPoly& a) {
  const int d = a.degree();
  if (d < 0) return "0";
  std::string out;
  bool first = true;
  char buf[64];
  for (int p = d; p >= 0; --p) {
    const double k = a.coeff(p);
    if (k == 0.0) continue;
    const double mag = std::abs(k);
    if (first) {
      if (k < 0.0) out += "-";
      first = false;
    } else {
      out += (k < 0.0) ? " - " : " + ";
    }
    const bool unit = (mag == 1.0);
    if (p == 0 || !unit) {
      std::snprintf(buf, sizeof buf, "%.17g", mag);
      out += buf;
    }
    if (p > 0) {
      if (!unit) out += "*";
      out += "G";
      if (p > 1) {
        std::snprintf(buf, sizeof buf, "^%d", p);
        out += buf;
      }
    }
  }
  return out;
}

namespace {

[[noreturn]] void bad_poly(const std::string& text) {
  throw std::invalid_argument("cannot parse Gamma-polynomial: '" + text + "'");
}

}  // namespace

GammaPoly parse_gamma_poly(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) bad_poly(text);

  GammaPoly out;
  std::size_t i = 0;
  while (i < s.size()) {
    double sign = 1.0;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    if (i >= s.size()) bad_poly(text);

    double k = 1.0;
    bool have_number = false;
    if (s[i] != 'G' && s[i] != 'g') {
      std::size_t used = 0;
      try {
        k = std::stod(s.substr(i), &used);
      } catch (const std::exception&) {
        bad_poly(text);
      }
      if (used == 0) bad_poly(text);
      i += used;
      have_number = true;
    }

    int p = 0;
    if (i < s.size() && s[i] == '*') {
      if (!have_number) bad_poly(text);
      ++i;
      if (i >= s.size() || (s[i] != 'G' && s[i] != 'g')) bad_poly(text);
    }
    if (i < s.size() && (s[i] == 'G' || s[i] == 'g')) {
      ++i;
      p = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t used = 0;
        long e = 0;
        try {
          e = std::stol(s.substr(i), &used);
        } catch (const std::exception&) {
          bad_poly(text);
        }
        if (used == 0 || e < 0 || e > 64) bad_poly(text);
        p = static_cast<int>(e);
        i += used;
      }
    }
    if (i < s.size() && s[i] != '+' && s[i] != '-') bad_poly(text);
    out += GammaPoly::term(sign * k, p);
  }
  return out;
}

}  // namespace tssa
