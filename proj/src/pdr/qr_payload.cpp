#include <array>
#include <charconv>
#include <cmath>
#include <optional>

#include "airloc/pdr.hpp"

namespace airloc {

namespace {

using Kind = QrParseError::Kind;

constexpr std::string_view kPrefix = "AIRLOC";
constexpr std::array<std::string_view, 5> kKeys{"v", "b", "f", "x", "y"};

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  std::string_view digits = text;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (!all_digits(digits)) throw QrParseError(Kind::kNonNumeric, "field '" + std::string(key) + "' is not an integer");
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{}) throw QrParseError(Kind::kNonNumeric, "field '" + std::string(key) + "' out of range");
  return v;
}

// -?digits(.digits)?
double parse_decimal(std::string_view key, std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && body.front() == '-') body.remove_prefix(1);
  const std::size_t dot = body.find('.');
  const bool ok = dot == std::string_view::npos ? all_digits(body)
                                                 : all_digits(body.substr(0, dot)) && all_digits(body.substr(dot + 1));
  if (!ok) throw QrParseError(Kind::kNonNumeric, "field '" + std::string(key) + "' is not a decimal number");
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::fixed);
  if (res.ec != std::errc{} || !std::isfinite(v)) {
    throw QrParseError(Kind::kNonNumeric, "field '" + std::string(key) + "' out of range");
  }
  return v;
}

std::string format_decimal(double v) {
  if (!std::isfinite(v)) throw PdrError("anchor coordinates must be finite");
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 400> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

Anchor parse_qr_payload(std::string_view text) {
  std::array<std::optional<std::string_view>, kKeys.size()> values;
  std::size_t pos = text.find(';');
  if (text.substr(0, pos) != kPrefix) throw QrParseError(Kind::kBadPrefix, "payload does not start with AIRLOC");
  while (pos != std::string_view::npos) {
    const std::size_t start = pos + 1;
    pos = text.find(';', start);
    const std::string_view item = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw QrParseError(Kind::kMalformed, "malformed item '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    std::size_t slot = kKeys.size();
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
      if (kKeys[i] == key) slot = i;
    }
    if (slot == kKeys.size()) throw QrParseError(Kind::kUnknownField, "unknown field '" + std::string(key) + "'");
    if (values[slot]) throw QrParseError(Kind::kDuplicateField, "duplicate field '" + std::string(key) + "'");
    values[slot] = item.substr(eq + 1);
  }

  if (!values[0]) throw QrParseError(Kind::kMissingField, "missing field 'v'");
  if (*values[0] != "1") throw QrParseError(Kind::kUnknownVersion, "unsupported payload version '" + std::string(*values[0]) + "'");
  for (std::size_t i = 1; i < kKeys.size(); ++i) {
    if (!values[i]) throw QrParseError(Kind::kMissingField, "missing field '" + std::string(kKeys[i]) + "'");
  }

  Anchor a;
  a.building = parse_int("b", *values[1]);
  a.floor = parse_int("f", *values[2]);
  a.x = parse_decimal("x", *values[3]);
  a.y = parse_decimal("y", *values[4]);
  return a;
}

std::string encode_qr_payload(const Anchor& anchor) {
  return std::string(kPrefix) + ";v=1;b=" + std::to_string(anchor.building) + ";f=" + std::to_string(anchor.floor) +
         ";x=" + format_decimal(anchor.x) + ";y=" + format_decimal(anchor.y);
}

}  // namespace airloc
