#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlines/errors.hpp"

namespace mlines {

inline constexpr int kMaxLatticeDim = 6;

/// A point n = (n_1, ..., n_N) of Z^N. Axis a (0-based) carries direction
/// label a + 1.
class LatticeIndex {
 public:
  LatticeIndex() = default;
  explicit LatticeIndex(int dim);
  LatticeIndex(std::initializer_list<int> coords);
  explicit LatticeIndex(const std::vector<int>& coords);

  int dim() const { return dim_; }
  int operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }
  int& operator[](int axis) { return c_[static_cast<std::size_t>(axis)]; }

  /// n + by * e_l, where l is the 1-based direction label.
  LatticeIndex shifted(int direction, int by = 1) const;
  /// n_1 + ... + n_N.
  int level() const;
  std::vector<int> coords() const;
  std::string str() const;

  friend bool operator==(const LatticeIndex& a, const LatticeIndex& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  friend std::strong_ordering operator<=>(const LatticeIndex& a, const LatticeIndex& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return a.c_ <=> b.c_;
  }

 private:
  std::array<int, kMaxLatticeDim> c_{};
  int dim_ = 0;
};

struct LatticeIndexHash {
  std::size_t operator()(const LatticeIndex& n) const noexcept;
};

/// Axis-aligned bounds, inclusive on both ends.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<std::pair<int, int>> ranges);
  static Box cube(int dim, int lo, int hi);

  int dim() const { return static_cast<int>(ranges_.size()); }
  int lo(int axis) const { return ranges_[static_cast<std::size_t>(axis)].first; }
  int hi(int axis) const { return ranges_[static_cast<std::size_t>(axis)].second; }
  const std::vector<std::pair<int, int>>& ranges() const { return ranges_; }
  bool contains(const LatticeIndex& n) const;
  std::size_t size() const;
  /// Row-major offset of n; n must be contained.
  std::size_t offset(const LatticeIndex& n) const;
  std::string str() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<std::pair<int, int>> ranges_;
};

/// All indices of the box sorted by level, ties broken lexicographically.
std::vector<LatticeIndex> sweep_order(const Box& box);

/// S^{ik} = { n in box : n_l = 0 for every direction l in L \ {i, k} }.
/// L is {1, ..., box.dim()}.
std::vector<LatticeIndex> cauchy_surface(int i, int k, const Box& box);
bool on_cauchy_surface(int i, int k, const LatticeIndex& n);

/// Sparse or dense map from lattice sites to values. Reads of unassigned
/// sites and repeated writes both throw; values are immutable once set.
template <typename T>
class LatticeField {
 public:
  /// Sparse storage.
  LatticeField() = default;
  /// Dense storage over the box.
  explicit LatticeField(Box box) : box_(std::move(box)), dense_(box_->size()) {}

  bool is_dense() const { return box_.has_value(); }
  const std::optional<Box>& box() const { return box_; }

  bool contains(const LatticeIndex& n) const {
    if (box_) return box_->contains(n) && dense_[box_->offset(n)].has_value();
    return sparse_.count(n) != 0;
  }

  const T& at(const LatticeIndex& n) const {
    if (box_) {
      if (box_->contains(n)) {
        const auto& slot = dense_[box_->offset(n)];
        if (slot) return *slot;
      }
    } else if (auto it = sparse_.find(n); it != sparse_.end()) {
      return it->second;
    }
    throw Error(ErrorCode::UnassignedSite, "no value at site " + n.str());
  }

  const T* find(const LatticeIndex& n) const {
    if (box_) {
      if (!box_->contains(n)) return nullptr;
      const auto& slot = dense_[box_->offset(n)];
      return slot ? &*slot : nullptr;
    }
    auto it = sparse_.find(n);
    return it == sparse_.end() ? nullptr : &it->second;
  }

  void set(const LatticeIndex& n, T value) {
    if (box_) {
      if (!box_->contains(n)) {
        throw Error(ErrorCode::OutOfBox, "site " + n.str() + " outside " + box_->str());
      }
      auto& slot = dense_[box_->offset(n)];
      if (slot) throw Error(ErrorCode::DoubleAssignment, "site " + n.str() + " already written");
      slot = std::move(value);
      ++count_;
      return;
    }
    auto [it, inserted] = sparse_.emplace(n, std::move(value));
    if (!inserted) throw Error(ErrorCode::DoubleAssignment, "site " + n.str() + " already written");
    ++count_;
  }

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// Occupied sites in sweep order.
  std::vector<LatticeIndex> sites() const {
    std::vector<LatticeIndex> out;
    out.reserve(count_);
    if (box_) {
      for (const auto& n : sweep_order(*box_)) {
        if (dense_[box_->offset(n)]) out.push_back(n);
      }
      return out;
    }
    for (const auto& [n, v] : sparse_) out.push_back(n);
    std::sort(out.begin(), out.end(), [](const LatticeIndex& a, const LatticeIndex& b) {
      if (a.level() != b.level()) return a.level() < b.level();
      return a < b;
    });
    return out;
  }

 private:
  std::optional<Box> box_;
  std::vector<std::optional<T>> dense_;
  std::unordered_map<LatticeIndex, T, LatticeIndexHash> sparse_;
  std::size_t count_ = 0;
};

}  // namespace mlines
