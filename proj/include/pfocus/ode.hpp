#pragma once

#include <array>
#include <functional>

namespace pfocus {

using Vec2 = std::array<double, 2>;
using Rhs = std::function<Vec2(const Vec2&)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  /// 0 picks a starting step automatically
  double initial_step = 0.0;
  double max_step = 0.0;
  long max_steps = 200000;
};

/// Dormand-Prince 8(5,3) for autonomous planar systems, with the 7th order
/// continuous extension. Time may run backwards (direction = -1).
class Dop853 {
 public:
  Dop853(Rhs f, Vec2 y0, double t0, int direction, const OdeOptions& opt);

  /// Advances one accepted step, never past t_limit when one is given.
  void step(const double* t_limit = nullptr);

  double t() const noexcept { return t_; }
  double t_prev() const noexcept { return t_old_; }
  const Vec2& y() const noexcept { return y_; }
  const Vec2& y_prev() const noexcept { return y_old_; }
  const Vec2& dy() const noexcept { return k1_; }
  double step_size() const noexcept { return h_; }
  long accepted() const noexcept { return accepted_; }
  long rejected() const noexcept { return rejected_; }

  /// Dense output on [t_prev, t].
  Vec2 dense(double t) const;

 private:
  void initial_step();

  Rhs f_;
  OdeOptions opt_;
  int dir_;
  double t_, t_old_;
  double h_;  // magnitude of the next trial step
  Vec2 y_, y_old_, k1_;
  std::array<Vec2, 8> cont_{};
  long accepted_ = 0, rejected_ = 0;
  bool last_rejected_ = false;
};

/// Flows y0 for time T (any sign) and returns the endpoint.
Vec2 integrate(const Rhs& f, Vec2 y0, double T, const OdeOptions& opt = {});

}  // namespace pfocus
