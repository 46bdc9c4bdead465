#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace aftcs {

/// Binary heap with an optional shared comparison counter, used to check the
/// queue-maintenance complexity bound empirically.
template <typename T, typename Less>
class CountingHeap {
 public:
  CountingHeap() = default;
  explicit CountingHeap(Less less, std::uint64_t* counter = nullptr)
      : less_(std::move(less)), counter_(counter) {}

  void set_counter(std::uint64_t* counter) { counter_ = counter; }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const T& top() const { return items_.front(); }
  const std::vector<T>& items() const { return items_; }

  void push(T value) {
    items_.push_back(std::move(value));
    std::push_heap(items_.begin(), items_.end(), counted_less());
  }

  T pop() {
    std::pop_heap(items_.begin(), items_.end(), counted_less());
    T out = std::move(items_.back());
    items_.pop_back();
    return out;
  }

  void clear() { items_.clear(); }

  // Rebuild after in-place key updates.
  template <typename Fn>
  void update_all(Fn&& fn) {
    for (auto& item : items_) fn(item);
    std::make_heap(items_.begin(), items_.end(), counted_less());
  }

  template <typename Pred>
  bool erase_first(Pred&& pred) {
    for (auto it = items_.begin(); it != items_.end(); ++it) {
      if (pred(*it)) {
        items_.erase(it);
        std::make_heap(items_.begin(), items_.end(), counted_less());
        return true;
      }
    }
    return false;
  }

  // Full-scan heap property check, for tests.
  bool is_heap() const {
    auto less = less_;
    return std::is_heap(items_.begin(), items_.end(), less);
  }

 private:
  auto counted_less() {
    return [this](const T& a, const T& b) {
      if (counter_) ++*counter_;
      return less_(a, b);
    };
  }

  std::vector<T> items_;
  Less less_;
  std::uint64_t* counter_ = nullptr;
};

}  // namespace aftcs
