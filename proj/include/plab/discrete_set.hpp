#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace plab {

struct ListLaw {
  std::vector<double> points;  // as written
};
// lambda = a k + b over k in Z, enumerated k = 0, 1, -1, 2, -2, ...
struct ArithmeticLaw {
  double a = 1.0;
  double b = 0.0;
};
// lambda_k = c log(k+1) + d log(1 + log(k+1)), k >= 0
struct LogarithmicLaw {
  double c = 1.0;
  double d = 0.0;
};
// lambda_j = c j^k, j >= 0
struct PolynomialLaw {
  double c = 1.0;
  double k = 1.0;
};

using GrowthLaw = std::variant<ListLaw, ArithmeticLaw, LogarithmicLaw, PolynomialLaw>;

// Grammar (whitespace not allowed):
//   spec   = "list:" number {"," number}
//          | ("arith" | "log" | "poly") ":" param {"," param}
//   param  = key "=" number
//   number = ["-"] atom [("*" | "/") atom]
//   atom   = decimal | "pi"
// arith keys: a (default 1), b (default 0); log keys: c (required), d (default 0);
// poly keys: c, k (both required).
GrowthLaw parse_growth_law(std::string_view spec);
std::string to_spec(const GrowthLaw& law);
double law_point(const GrowthLaw& law, std::size_t index);
// number of points the law has (SIZE_MAX for infinite laws)
std::size_t law_size(const GrowthLaw& law);

class DiscreteSet {
 public:
  // custom table: no law, so no tail certificate
  static DiscreteSet from_points(std::vector<double> points);
  // law indices offset .. offset+count-1 (clipped for finite lists)
  static DiscreteSet from_law(const GrowthLaw& law, std::size_t count, std::size_t offset = 0);
  static DiscreteSet parse(std::string_view spec, std::size_t count);

  const std::vector<double>& points() const { return sorted_; }
  const std::vector<double>& enumeration() const { return enumeration_; }
  std::size_t size() const { return sorted_.size(); }
  const std::optional<GrowthLaw>& law() const { return law_; }
  std::size_t offset() const { return offset_; }
  std::string spec() const;

  DiscreteSet drop_first(std::size_t m) const;

 private:
  DiscreteSet() = default;
  void finish();

  std::vector<double> enumeration_;
  std::vector<double> sorted_;
  std::optional<GrowthLaw> law_;
  std::size_t offset_ = 0;
};

}  // namespace plab
