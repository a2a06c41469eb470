#include "glsig/signature.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "glsig/errors.hpp"

namespace glsig {

GLSignature::GLSignature(std::vector<std::vector<int>> entries)
    : entries_(std::move(entries)) {
  for (const auto& v : entries_) {
    if (v.size() != entries_.front().size()) {
      throw InvalidGeometry("signature vectors have different lengths");
    }
    for (int x : v) {
      if (x < 0) throw InvalidGeometry("signature entries must be >= 0");
    }
  }
  std::sort(entries_.begin(), entries_.end());
}

std::optional<std::size_t> GLSignature::vector_length() const {
  if (entries_.empty()) return std::nullopt;
  return entries_.front().size();
}

std::string GLSignature::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out << ',';
    out << '[';
    for (std::size_t k = 0; k < entries_[i].size(); ++k) {
      if (k) out << ',';
      out << entries_[i][k];
    }
    out << ']';
  }
  out << '}';
  return out.str();
}

GLSignature GLSignature::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError("signature '" + text + "': " + why + " at offset " +
                      std::to_string(pos));
  };
  auto expect = [&](char c) {
    if (pos >= s.size() || s[pos] != c) {
      throw fail(std::string("expected '") + c + "'");
    }
    ++pos;
  };
  expect('{');
  std::vector<std::vector<int>> entries;
  if (pos < s.size() && s[pos] == '}') {
    ++pos;
  } else {
    while (true) {
      expect('[');
      std::vector<int> v;
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
      } else {
        while (true) {
          std::size_t start = pos;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
          }
          if (start == pos) throw fail("expected a non-negative integer");
          v.push_back(std::stoi(s.substr(start, pos - start)));
          if (pos < s.size() && s[pos] == ',') {
            ++pos;
            continue;
          }
          expect(']');
          break;
        }
      }
      entries.push_back(std::move(v));
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        continue;
      }
      expect('}');
      break;
    }
  }
  if (pos != s.size()) throw fail("trailing characters");
  try {
    return GLSignature(std::move(entries));
  } catch (const InvalidGeometry& e) {
    throw ParseError("signature '" + text + "': " + e.what());
  }
}

bool signatures_equal(const GLSignature& a, const GLSignature& b) {
  const auto la = a.vector_length();
  const auto lb = b.vector_length();
  if (la && lb && *la != *lb) {
    throw MismatchedSkeleton("signature vectors of length " +
                             std::to_string(*la) + " and " +
                             std::to_string(*lb));
  }
  return a == b;
}

}  // namespace glsig
