#include "mlines/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace mlines {

LatticeIndex::LatticeIndex(int dim) : dim_(dim) {
  if (dim < 0 || dim > kMaxLatticeDim) {
    throw Error(ErrorCode::ShapeMismatch, "lattice dimension " + std::to_string(dim));
  }
}

LatticeIndex::LatticeIndex(std::initializer_list<int> coords)
    : LatticeIndex(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticeIndex::LatticeIndex(const std::vector<int>& coords)
    : LatticeIndex(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticeIndex LatticeIndex::shifted(int direction, int by) const {
  if (direction < 1 || direction > dim_) {
    throw Error(ErrorCode::IndexClash, "direction " + std::to_string(direction) + " outside Z^" +
                                           std::to_string(dim_));
  }
  LatticeIndex out = *this;
  out.c_[static_cast<std::size_t>(direction - 1)] += by;
  return out;
}

int LatticeIndex::level() const {
  int s = 0;
  for (int a = 0; a < dim_; ++a) s += c_[static_cast<std::size_t>(a)];
  return s;
}

std::vector<int> LatticeIndex::coords() const {
  return {c_.begin(), c_.begin() + dim_};
}

std::string LatticeIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << c_[static_cast<std::size_t>(a)];
  os << ')';
  return os.str();
}

std::size_t LatticeIndexHash::operator()(const LatticeIndex& n) const noexcept {
  std::size_t h = static_cast<std::size_t>(n.dim());
  for (int a = 0; a < n.dim(); ++a) {
    h = h * 1000003u ^ static_cast<std::size_t>(n[a] + 0x9e3779b9);
  }
  return h;
}

Box::Box(std::vector<std::pair<int, int>> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty() || static_cast<int>(ranges_.size()) > kMaxLatticeDim) {
    throw Error(ErrorCode::ShapeMismatch, "box dimension " + std::to_string(ranges_.size()));
  }
  for (const auto& [lo, hi] : ranges_) {
    if (lo > hi) throw Error(ErrorCode::ShapeMismatch, "empty box range " + std::to_string(lo) +
                                                           ".." + std::to_string(hi));
  }
}

Box Box::cube(int dim, int lo, int hi) {
  return Box(std::vector<std::pair<int, int>>(static_cast<std::size_t>(dim), {lo, hi}));
}

bool Box::contains(const LatticeIndex& n) const {
  if (n.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (n[a] < lo(a) || n[a] > hi(a)) return false;
  }
  return true;
}

std::size_t Box::size() const {
  std::size_t s = 1;
  for (const auto& [lo, hi] : ranges_) s *= static_cast<std::size_t>(hi - lo + 1);
  return s;
}

std::size_t Box::offset(const LatticeIndex& n) const {
  std::size_t off = 0;
  for (int a = 0; a < dim(); ++a) {
    off = off * static_cast<std::size_t>(hi(a) - lo(a) + 1) + static_cast<std::size_t>(n[a] - lo(a));
  }
  return off;
}

std::string Box::str() const {
  std::ostringstream os;
  for (int a = 0; a < dim(); ++a) os << (a ? "," : "") << lo(a) << ".." << hi(a);
  return os.str();
}

std::vector<LatticeIndex> sweep_order(const Box& box) {
  std::vector<LatticeIndex> out;
  out.reserve(box.size());
  LatticeIndex n(box.dim());
  for (int a = 0; a < box.dim(); ++a) n[a] = box.lo(a);
  while (true) {
    out.push_back(n);
    int a = box.dim() - 1;
    while (a >= 0 && n[a] == box.hi(a)) {
      n[a] = box.lo(a);
      --a;
    }
    if (a < 0) break;
    ++n[a];
  }
  std::stable_sort(out.begin(), out.end(), [](const LatticeIndex& x, const LatticeIndex& y) {
    return x.level() < y.level();
  });
  return out;
}

bool on_cauchy_surface(int i, int k, const LatticeIndex& n) {
  for (int l = 1; l <= n.dim(); ++l) {
    if (l != i && l != k && n[l - 1] != 0) return false;
  }
  return true;
}

std::vector<LatticeIndex> cauchy_surface(int i, int k, const Box& box) {
  std::vector<LatticeIndex> out;
  for (const auto& n : sweep_order(box)) {
    if (on_cauchy_surface(i, k, n)) out.push_back(n);
  }
  return out;
}

}  // namespace mlines
