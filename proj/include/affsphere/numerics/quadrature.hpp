#pragma once

#include <functional>
#include <vector>

namespace affsphere::numerics {

using ScalarFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

struct QuadOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

/// One 21-point Gauss-Kronrod panel on [a, b]; error is |K21 - G10|.
QuadResult gauss_kronrod21(const ScalarFn& f, double a, double b);

/// Globally adaptive GK21 on a finite interval. Throws QuadratureFailure when
/// the interval budget runs out before the tolerance is met.
QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts = {});

/// Running integral x -> int_lo^x f over [lo, hi], built once on an adaptively
/// refined cell list. Queries inside a cell cost one extra GK21 panel.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(ScalarFn f, double lo, double hi, double abs_tol, int initial_cells = 16);
  /// `breaks` must be increasing; each piece starts with `initial_cells` cells.
  CumulativeIntegral(ScalarFn f, const std::vector<double>& breaks, double abs_tol, int initial_cells = 8);

  double operator()(double x) const;
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double error_estimate() const { return error_; }
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  std::size_t cells() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }

 private:
  ScalarFn f_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
  double error_ = 0.0;
};

}  // namespace affsphere::numerics
