#include "plab/discrete_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "plab/errors.hpp"
#include "plab/format.hpp"

namespace plab {

namespace {

class LawParser {
 public:
  explicit LawParser(std::string_view s) : s_(s) {}

  GrowthLaw run() {
    std::size_t colon = s_.find(':');
    if (colon == std::string_view::npos) fail("expected '<kind>:' prefix", 0);
    std::string_view kind = s_.substr(0, colon);
    pos_ = colon + 1;
    if (kind == "list") return list();
    if (kind != "arith" && kind != "log" && kind != "poly")
      fail("unknown set kind '" + std::string(kind) + "'", 0);
    auto p = params();
    if (kind == "arith") {
      ArithmeticLaw law{take(p, "a", 1.0), take(p, "b", 0.0)};
      leftovers(p);
      if (law.a == 0.0) fail("arith step a must be nonzero", value_col_.at("a"));
      return law;
    }
    if (kind == "log") {
      LogarithmicLaw law{require(p, "c"), take(p, "d", 0.0)};
      leftovers(p);
      if (!(law.c > 0.0)) fail("log growth c must be positive", value_col_.at("c"));
      if (law.d < 0.0) fail("log correction d must be >= 0", value_col_.at("d"));
      return law;
    }
    PolynomialLaw law{require(p, "c"), require(p, "k")};
    leftovers(p);
    if (law.c == 0.0) fail("poly scale c must be nonzero", value_col_.at("c"));
    if (!(law.k > 0.0)) fail("poly exponent k must be positive", value_col_.at("k"));
    return law;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t pos) { throw ParseError(msg, pos + 1); }

  bool at(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  double atom() {
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    if (pos_ >= s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      fail("expected number", pos_);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number", pos_);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  double number() {
    double sign = 1.0;
    if (at('-')) {
      sign = -1.0;
      ++pos_;
    }
    double v = atom();
    if (at('*')) {
      ++pos_;
      v *= atom();
    } else if (at('/')) {
      ++pos_;
      std::size_t c = pos_;
      double d = atom();
      if (d == 0.0) fail("division by zero", c);
      v /= d;
    }
    if (!std::isfinite(v)) fail("number out of range", pos_);
    return sign * v;
  }

  GrowthLaw list() {
    ListLaw law;
    std::vector<std::pair<double, std::size_t>> seen;
    while (true) {
      std::size_t c = pos_;
      double v = number();
      for (auto& [x, col] : seen)
        if (x == v) fail("duplicate point " + fmt_double(v), c);
      seen.emplace_back(v, c);
      law.points.push_back(v);
      if (pos_ == s_.size()) break;
      if (!at(',')) fail("expected ',' or end of input", pos_);
      ++pos_;
    }
    return law;
  }

  std::map<std::string, double> params() {
    std::map<std::string, double> out;
    while (true) {
      std::size_t c = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == c) fail("expected parameter name", c);
      std::string key(s_.substr(c, pos_ - c));
      if (out.count(key)) fail("repeated parameter '" + key + "'", c);
      if (!at('=')) fail("expected '=' after '" + key + "'", pos_);
      ++pos_;
      key_col_[key] = c;
      value_col_[key] = pos_;
      out[key] = number();
      if (pos_ == s_.size()) break;
      if (!at(',')) fail("expected ',' or end of input", pos_);
      ++pos_;
    }
    return out;
  }

  double take(std::map<std::string, double>& p, const std::string& k, double def) {
    auto it = p.find(k);
    if (it == p.end()) {
      value_col_[k] = s_.size();
      return def;
    }
    double v = it->second;
    p.erase(it);
    return v;
  }
  double require(std::map<std::string, double>& p, const std::string& k) {
    if (!p.count(k)) fail("missing parameter '" + k + "'", s_.size());
    return take(p, k, 0.0);
  }
  void leftovers(const std::map<std::string, double>& p) {
    if (!p.empty()) fail("unknown parameter '" + p.begin()->first + "'", key_col_.at(p.begin()->first));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> key_col_, value_col_;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

GrowthLaw parse_growth_law(std::string_view spec) { return LawParser(spec).run(); }

std::string to_spec(const GrowthLaw& law) {
  return std::visit(overloaded{
                        [](const ListLaw& l) {
                          std::string s = "list:";
                          for (std::size_t i = 0; i < l.points.size(); ++i)
                            s += (i ? "," : "") + fmt_double(l.points[i]);
                          return s;
                        },
                        [](const ArithmeticLaw& l) {
                          return "arith:a=" + fmt_double(l.a) + ",b=" + fmt_double(l.b);
                        },
                        [](const LogarithmicLaw& l) {
                          std::string s = "log:c=" + fmt_double(l.c);
                          if (l.d != 0.0) s += ",d=" + fmt_double(l.d);
                          return s;
                        },
                        [](const PolynomialLaw& l) {
                          return "poly:c=" + fmt_double(l.c) + ",k=" + fmt_double(l.k);
                        }},
                    law);
}

double law_point(const GrowthLaw& law, std::size_t i) {
  return std::visit(overloaded{
                        [i](const ListLaw& l) { return l.points.at(i); },
                        [i](const ArithmeticLaw& l) {
                          double k = (i % 2 == 1) ? static_cast<double>((i + 1) / 2)
                                                  : -static_cast<double>(i / 2);
                          return l.a * k + l.b;
                        },
                        [i](const LogarithmicLaw& l) {
                          double L = std::log1p(static_cast<double>(i));
                          return l.c * L + (l.d != 0.0 ? l.d * std::log1p(L) : 0.0);
                        },
                        [i](const PolynomialLaw& l) {
                          return l.c * std::pow(static_cast<double>(i), l.k);
                        }},
                    law);
}

std::size_t law_size(const GrowthLaw& law) {
  if (auto* l = std::get_if<ListLaw>(&law)) return l->points.size();
  return std::numeric_limits<std::size_t>::max();
}

void DiscreteSet::finish() {
  for (double x : enumeration_)
    if (!std::isfinite(x)) throw PreconditionError("set contains a non-finite point");
  sorted_ = enumeration_;
  std::sort(sorted_.begin(), sorted_.end());
  for (std::size_t i = 1; i < sorted_.size(); ++i)
    if (sorted_[i] == sorted_[i - 1])
      throw PreconditionError("duplicate point " + fmt_double(sorted_[i]));
}

DiscreteSet DiscreteSet::from_points(std::vector<double> points) {
  DiscreteSet s;
  s.enumeration_ = std::move(points);
  s.finish();
  return s;
}

DiscreteSet DiscreteSet::from_law(const GrowthLaw& law, std::size_t count, std::size_t offset) {
  DiscreteSet s;
  std::size_t total = law_size(law);
  std::size_t end = offset + std::min(count, total > offset ? total - offset : 0);
  for (std::size_t i = offset; i < end; ++i) s.enumeration_.push_back(law_point(law, i));
  s.law_ = law;
  s.offset_ = offset;
  s.finish();
  return s;
}

DiscreteSet DiscreteSet::parse(std::string_view spec, std::size_t count) {
  return from_law(parse_growth_law(spec), count);
}

std::string DiscreteSet::spec() const {
  if (!law_) {
    std::string s = "table:";
    for (std::size_t i = 0; i < enumeration_.size(); ++i) s += (i ? "," : "") + fmt_double(enumeration_[i]);
    return s;
  }
  std::string s = to_spec(*law_);
  if (!std::holds_alternative<ListLaw>(*law_)) s += "#" + std::to_string(offset_) + "+" + std::to_string(size());
  return s;
}

DiscreteSet DiscreteSet::drop_first(std::size_t m) const {
  if (m > size()) throw PreconditionError("cannot drop more points than the set holds");
  if (law_) return from_law(*law_, size() - m, offset_ + m);
  return from_points(std::vector<double>(enumeration_.begin() + static_cast<long>(m), enumeration_.end()));
}

}  // namespace plab
