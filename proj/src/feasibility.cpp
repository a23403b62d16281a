#include "pfocus/errors.hpp"
#include "pfocus/realize.hpp"

namespace pfocus {

Feasibility ff_feasibility(int k1, int k2, int k) {
  if (k1 < 0 || k2 < 0 || k < 1) throw Error(ErrorCode::InvalidInput, "need k1, k2 >= 0 and k >= 1");
  const int s = std::min(k1, k2);
  const std::string bound = std::to_string(2 * s + 1);
  if (k1 == k2) {
    if (k >= 2 * s + 1) return {true, "equal orders: k >= " + bound};
    if (k % 2 == 0) return {true, "equal orders: k even"};
    return {false, "equal orders: odd k below " + bound};
  }
  if (k == 2 * s + 1) return {true, "unequal orders: k = " + bound};
  if (k % 2 == 0 && k < 2 * s + 1) return {true, "unequal orders: k even below " + bound};
  if (k > 2 * s + 1) return {false, "unequal orders: k above " + bound};
  return {false, "unequal orders: odd k below " + bound};
}

Feasibility mixed_feasibility(int k, int n) {
  if (k < 0 || n < 1) throw Error(ErrorCode::InvalidInput, "need k >= 0 and n >= 1");
  const std::string bound = std::to_string(2 * k + 1);
  if (n == 2 * k + 1) return {true, "n = " + bound};
  if (n % 2 == 0 && n < 2 * k + 1) return {true, "n even below " + bound};
  if (n > 2 * k + 1) return {false, "n above " + bound};
  return {false, "odd n below " + bound};
}

Feasibility pp_feasibility(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "need n >= 1");
  if (n % 2 == 0) return {true, "n even"};
  return {false, "PP orders are even"};
}

}  // namespace pfocus
