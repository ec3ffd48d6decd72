#include "hrtdp/value_table.hpp"

#include "hrtdp/errors.hpp"

namespace hrtdp {

ValueTable::ValueTable(std::size_t width, std::size_t horizon, std::size_t lookahead)
    : width_(width), horizon_(horizon), lookahead_(lookahead) {
  if (width == 0 || horizon == 0) throw ConfigError("ValueTable: width and horizon must be positive");
  if (lookahead == 0 || horizon % lookahead != 0) {
    throw ConfigError("ValueTable: lookahead h must divide the horizon H");
  }
  values_.resize(num_checkpoints() * width_);
  for (std::size_t n = 0; n < num_checkpoints(); ++n) {
    const double init = static_cast<double>(horizon_ - n * lookahead_);
    for (std::size_t i = 0; i < width_; ++i) values_[n * width_ + i] = init;
  }
}

void ValueTable::set(std::size_t n, std::size_t i, double v) {
  double& slot = values_.at(n * width_ + i);
  if (slot != v) {
    slot = v;
    ++version_;
  }
}

double ValueTable::interior_sum() const {
  double total = 0.0;
  for (std::size_t n = 1; n + 1 < num_checkpoints(); ++n) {
    for (double v : values(n)) total += v;
  }
  return total;
}

ValueTable init_table(std::size_t width, std::size_t horizon, std::size_t lookahead) {
  return ValueTable(width, horizon, lookahead);
}

}  // namespace hrtdp
