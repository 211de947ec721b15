#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "binpick/errors.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::detail {

using geometry::RigidTransform;

inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct LineReader {
  std::istream& in;
  std::string source;
  std::size_t line_no = 0;

  /// Next non-blank, non-comment line split on whitespace; empty at end of file.
  std::vector<std::string> next_any() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    ++line_no;
    return {};
  }

  std::vector<std::string> next(const char* expected) {
    auto tok = next_any();
    if (tok.empty()) fail("unexpected end of file, expected '" + std::string(expected) + "'");
    if (tok[0] != expected) fail("expected '" + std::string(expected) + "', found '" + tok[0] + "'");
    return tok;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line_no, what); }

  double number(const std::vector<std::string>& tok, std::size_t i) const {
    if (i >= tok.size()) fail("missing field " + std::to_string(i) + " of '" + tok[0] + "'");
    double v = 0.0;
    const auto& s = tok[i];
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("field " + std::to_string(i) + " of '" + tok[0] + "' is not a number: " + s);
    }
    return v;
  }

  std::uint64_t integer(const std::vector<std::string>& tok, std::size_t i) const {
    if (i >= tok.size()) fail("missing field " + std::to_string(i) + " of '" + tok[0] + "'");
    std::uint64_t v = 0;
    const auto& s = tok[i];
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail("field " + std::to_string(i) + " of '" + tok[0] + "' is not an integer: " + s);
    }
    return v;
  }

  RigidTransform pose(const std::vector<std::string>& tok) const {
    if (tok.size() != 17) fail("'" + tok[0] + "' needs 16 numbers");
    geometry::Mat4 m;
    for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = number(tok, i + 1);
    try {
      return RigidTransform::from_matrix(m);
    } catch (const ArgumentError& e) {
      fail(e.what());
    }
  }
};

inline void write_pose(std::ostream& out, const char* key, const RigidTransform& t) {
  out << key;
  const auto m = t.matrix();
  for (int i = 0; i < 16; ++i) out << ' ' << fmt(m(i / 4, i % 4));
  out << '\n';
}

}  // namespace binpick::detail
