#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hrtdp {

// Value estimates stored only at the checkpoint times {1, h+1, ..., H+1},
// over concrete states or abstract states. Checkpoint n holds time n*h + 1.
class ValueTable {
 public:
  // Optimistic initialization: checkpoint n is filled with H - n*h.
  // Throws ConfigError unless h divides H.
  ValueTable(std::size_t width, std::size_t horizon, std::size_t lookahead);

  std::size_t width() const { return width_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t lookahead() const { return lookahead_; }
  std::size_t num_checkpoints() const { return horizon_ / lookahead_ + 1; }
  std::size_t num_entries() const { return values_.size(); }
  std::size_t checkpoint_time(std::size_t n) const { return n * lookahead_ + 1; }

  // Index of the first checkpoint strictly after time t (t in [1, H]).
  std::size_t next_checkpoint(std::size_t t) const { return (t - 1) / lookahead_ + 1; }
  bool is_checkpoint_time(std::size_t t) const { return (t - 1) % lookahead_ == 0; }

  std::span<const double> values(std::size_t n) const {
    return {values_.data() + n * width_, width_};
  }
  double get(std::size_t n, std::size_t i) const { return values_[n * width_ + i]; }
  // Writes a value; bumps version() when the stored value changes.
  void set(std::size_t n, std::size_t i, double v);

  // X = sum over checkpoints n = 1 .. H/h - 1 of every stored value.
  double interior_sum() const;

  // Incremented on every change of a stored value.
  std::uint64_t version() const { return version_; }

  friend bool operator==(const ValueTable& a, const ValueTable& b) {
    return a.width_ == b.width_ && a.horizon_ == b.horizon_ && a.lookahead_ == b.lookahead_ &&
           a.values_ == b.values_;
  }

 private:
  std::size_t width_;
  std::size_t horizon_;
  std::size_t lookahead_;
  std::vector<double> values_;
  std::uint64_t version_ = 0;
};

ValueTable init_table(std::size_t width, std::size_t horizon, std::size_t lookahead);

}  // namespace hrtdp
