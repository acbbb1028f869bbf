#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "pottslab/model.hpp"

namespace pottslab {

// Tree geometry. Vertices below the root are words over {1..d}; leaves of
// T^d_n are ordered lexicographically, which is the same as reading the word
// as a base-d number with the first letter most significant. The subtree of a
// vertex at depth k therefore owns a contiguous block of d^(n-k) leaves.

/// d^n; throws ValidationError on overflow of 64 bits.
std::uint64_t leaf_count(int d, int n);

/// Number of non-leaf vertices of T^d_n: (d^n - 1)/(d - 1), or n when d = 1.
std::uint64_t interior_count(int d, int n);

/// A boundary condition on the leaves of T^d_n. Colours are 1-based.
class BoundarySpec {
 public:
  struct Pure {
    int color;
    friend bool operator==(const Pure&, const Pure&) = default;
  };
  struct Explicit {
    std::vector<int> leaf_colors;
    friend bool operator==(const Explicit&, const Explicit&) = default;
  };

  static BoundarySpec pure(int color);
  static BoundarySpec explicit_colors(std::vector<int> leaf_colors);

  bool is_pure() const noexcept { return std::holds_alternative<Pure>(kind_); }
  /// Only valid when is_pure().
  int pure_color() const;
  /// Only valid when !is_pure().
  const std::vector<int>& leaf_colors() const;

  /// Throws ValidationError if colours fall outside [q] or an explicit
  /// boundary does not have exactly d^n entries.
  void validate(const ModelParams& params, int n) const;

  /// Flat lexicographic leaf colours for T^d_n (expands Pure).
  std::vector<int> materialize(int d, int n) const;

  /// Relabels every colour c to perm[c-1]; perm must be a bijection on [q].
  BoundarySpec permuted(std::span<const int> perm) const;

  friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;

 private:
  explicit BoundarySpec(std::variant<Pure, Explicit> kind) : kind_(std::move(kind)) {}
  std::variant<Pure, Explicit> kind_;
};

// Boundary file format: one line per leaf in lexicographic leaf order, each
// line a decimal colour in 1..q. Blank lines and trailing whitespace are
// ignored on read; the writer emits "<colour>\n" per leaf.

void write_boundary(std::ostream& out, std::span<const int> leaf_colors);
void write_boundary_file(const std::filesystem::path& path, std::span<const int> leaf_colors);

/// Throws ValidationError("boundary", ...) with the offending line number on
/// malformed input. Range checks against q are left to BoundarySpec::validate.
std::vector<int> read_boundary(std::istream& in);
std::vector<int> read_boundary_file(const std::filesystem::path& path);

}  // namespace pottslab
