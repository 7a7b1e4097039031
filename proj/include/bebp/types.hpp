#ifndef BEBP_TYPES_HPP
#define BEBP_TYPES_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bebp {

using Vector = std::vector<double>;
using ConstRow = std::span<const double>;

// Abnormal is the positive class everywhere (TP/FN accounting, sign of
// decision values).
enum class Label { kNormal, kAbnormal };

std::string_view to_string(Label label);

// Error categories surfaced by the library. All derive from std::runtime_error
// so callers that do not care about the category can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class QuotaError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

double squared_distance(ConstRow a, ConstRow b);
double dot(ConstRow a, ConstRow b);
double norm2(ConstRow a);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace bebp

#endif  // BEBP_TYPES_HPP
