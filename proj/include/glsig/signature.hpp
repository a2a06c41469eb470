#pragma once

#include <optional>
#include <string>
#include <vector>

namespace glsig {

/// Multiset of per-loop h-vectors. Entries are kept sorted so that equality
/// and the text form ignore insertion order but keep multiplicity.
class GLSignature {
 public:
  GLSignature() = default;
  /// Throws InvalidGeometry on negative entries or vectors of unequal length.
  explicit GLSignature(std::vector<std::vector<int>> entries);

  const std::vector<std::vector<int>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Common vector length, or nullopt for the empty multiset.
  std::optional<std::size_t> vector_length() const;

  /// Canonical text, e.g. `{[0,1],[1,0]}`; `{}` when empty.
  std::string to_string() const;
  /// Inverse of to_string. Whitespace is ignored. Throws ParseError.
  static GLSignature parse(const std::string& text);

  friend bool operator==(const GLSignature&, const GLSignature&) = default;

 private:
  std::vector<std::vector<int>> entries_;
};

/// Multiset equality. Throws MismatchedSkeleton when both sides are non-empty
/// and their vectors have different lengths.
bool signatures_equal(const GLSignature& a, const GLSignature& b);

}  // namespace glsig
