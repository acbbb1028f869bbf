#include "pottslab/boundary.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "pottslab/errors.hpp"

namespace pottslab {

std::uint64_t leaf_count(int d, int n) {
  if (d < 1) throw ValidationError("d", "branching factor must be >= 1");
  if (n < 0) throw ValidationError("n", "height must be >= 0");
  std::uint64_t leaves = 1;
  for (int level = 0; level < n; ++level) {
    if (leaves > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(d)) {
      throw ValidationError("n", "d^n overflows 64 bits");
    }
    leaves *= static_cast<std::uint64_t>(d);
  }
  return leaves;
}

std::uint64_t interior_count(int d, int n) {
  if (d == 1) return static_cast<std::uint64_t>(std::max(n, 0));
  std::uint64_t total = 0;
  std::uint64_t width = 1;
  for (int level = 0; level < n; ++level) {
    total += width;
    width *= static_cast<std::uint64_t>(d);
  }
  return total;
}

BoundarySpec BoundarySpec::pure(int color) { return BoundarySpec(Pure{color}); }

BoundarySpec BoundarySpec::explicit_colors(std::vector<int> leaf_colors) {
  return BoundarySpec(Explicit{std::move(leaf_colors)});
}

int BoundarySpec::pure_color() const { return std::get<Pure>(kind_).color; }

const std::vector<int>& BoundarySpec::leaf_colors() const { return std::get<Explicit>(kind_).leaf_colors; }

void BoundarySpec::validate(const ModelParams& params, int n) const {
  const auto check_color = [&](int c) {
    if (c < 1 || c > params.q()) {
      throw ValidationError("boundary", "colour " + std::to_string(c) + " outside [1," + std::to_string(params.q()) + "]");
    }
  };
  if (is_pure()) {
    check_color(pure_color());
    return;
  }
  const auto& colors = leaf_colors();
  const std::uint64_t expected = leaf_count(params.d(), n);
  if (colors.size() != expected) {
    throw ValidationError("boundary", "explicit boundary has " + std::to_string(colors.size()) + " leaves, tree of height " +
                                          std::to_string(n) + " needs " + std::to_string(expected));
  }
  std::for_each(colors.begin(), colors.end(), check_color);
}

std::vector<int> BoundarySpec::materialize(int d, int n) const {
  if (is_pure()) return std::vector<int>(leaf_count(d, n), pure_color());
  return leaf_colors();
}

BoundarySpec BoundarySpec::permuted(std::span<const int> perm) const {
  const auto map = [&](int c) { return perm[static_cast<std::size_t>(c - 1)]; };
  if (is_pure()) return pure(map(pure_color()));
  std::vector<int> out = leaf_colors();
  std::transform(out.begin(), out.end(), out.begin(), map);
  return explicit_colors(std::move(out));
}

void write_boundary(std::ostream& out, std::span<const int> leaf_colors) {
  for (int c : leaf_colors) out << c << '\n';
}

void write_boundary_file(const std::filesystem::path& path, std::span<const int> leaf_colors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open boundary file for writing: " + path.string());
  write_boundary(out, leaf_colors);
  if (!out) throw std::runtime_error("failed writing boundary file: " + path.string());
}

std::vector<int> read_boundary(std::istream& in) {
  std::vector<int> colors;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || used == 0) {
      throw ValidationError("boundary", "line " + std::to_string(lineno) + ": expected an integer colour, got '" + token + "'");
    }
    colors.push_back(value);
  }
  return colors;
}

std::vector<int> read_boundary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open boundary file: " + path.string());
  return read_boundary(in);
}

}  // namespace pottslab
