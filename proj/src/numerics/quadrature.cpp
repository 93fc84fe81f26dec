#include "affsphere/numerics/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <queue>
#include <sstream>

#include "affsphere/errors.hpp"

namespace affsphere::numerics {

namespace {

// QUADPACK dqk21 abscissae and weights.
constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

QuadResult gauss_kronrod21(const ScalarFn& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resk = wgk[10] * fc;
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = hlgth * xgk[j];
    const double fsum = f(centr - dx) + f(centr + dx);
    resk += wgk[j] * fsum;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  QuadResult r;
  r.value = resk * hlgth;
  r.error = std::abs((resk - resg) * hlgth);
  r.evaluations = 21;
  r.intervals = 1;
  if (!std::isfinite(r.value)) {
    std::ostringstream os;
    os << "non-finite integrand on [" << a << ", " << b << "]";
    fail(ErrorKind::Quadrature, os.str());
  }
  return r;
}

QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  QuadResult first = gauss_kronrod21(f, a, b);
  heap.push({a, b, first.value, first.error});
  double total = first.value, err = first.error;
  int evals = first.evaluations;
  // Panels narrower than this cannot be split further in double precision.
  const double min_width = 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  double frozen_err = 0.0;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals || heap.empty()) {
      std::ostringstream os;
      os << "interval budget exhausted on [" << a << ", " << b << "]: value " << total << ", error " << err
         << ", requested " << std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
      fail(ErrorKind::Quadrature, os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    if (std::abs(worst.b - worst.a) <= min_width) {
      frozen_err += worst.error;
      if (heap.empty()) break;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    QuadResult l = gauss_kronrod21(f, worst.a, mid);
    QuadResult r = gauss_kronrod21(f, mid, worst.b);
    evals += 42;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push({worst.a, mid, l.value, l.error});
    heap.push({mid, worst.b, r.value, r.error});
  }
  // Recompute the sum from the panels to shed accumulated update round-off.
  QuadResult res;
  res.value = 0.0;
  res.error = frozen_err;
  res.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    res.value += heap.top().value;
    res.error += heap.top().error;
    heap.pop();
  }
  res.evaluations = evals;
  return res;
}

CumulativeIntegral::CumulativeIntegral(ScalarFn f, double lo, double hi, double abs_tol, int initial_cells)
    : CumulativeIntegral(std::move(f), std::vector<double>{lo, hi}, abs_tol, initial_cells) {}

CumulativeIntegral::CumulativeIntegral(ScalarFn f, const std::vector<double>& breaks, double abs_tol,
                                       int initial_cells)
    : f_(std::move(f)) {
  if (breaks.size() < 2 || !(breaks.back() > breaks.front()))
    fail(ErrorKind::Domain, "CumulativeIntegral: empty interval");
  const double lo = breaks.front(), hi = breaks.back();
  const double density = abs_tol / (hi - lo);
  struct Cell {
    double a, b;
    int depth;
  };
  std::vector<Cell> stack;
  for (std::size_t piece = breaks.size() - 1; piece-- > 0;) {
    const double pa = breaks[piece], pb = breaks[piece + 1];
    if (!(pb > pa)) continue;
    for (int i = initial_cells - 1; i >= 0; --i) {
      const double a = pa + (pb - pa) * i / initial_cells;
      const double b = i + 1 == initial_cells ? pb : pa + (pb - pa) * (i + 1) / initial_cells;
      stack.push_back({a, b, 0});
    }
  }
  nodes_.push_back(lo);
  cumulative_.push_back(0.0);
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    QuadResult r = gauss_kronrod21(f_, c.a, c.b);
    const bool ok = r.error <= std::max(density * (c.b - c.a), 1e-17 * std::abs(r.value));
    if (ok || c.depth >= 48) {
      error_ += r.error;
      nodes_.push_back(c.b);
      cumulative_.push_back(cumulative_.back() + r.value);
      continue;
    }
    const double mid = 0.5 * (c.a + c.b);
    stack.push_back({mid, c.b, c.depth + 1});
    stack.push_back({c.a, mid, c.depth + 1});
  }
}

double CumulativeIntegral::operator()(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return cumulative_.back();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (x == nodes_[i]) return cumulative_[i];
  // Integrate the shorter side of the cell to keep the partial panel small.
  const double a = nodes_[i], b = nodes_[i + 1];
  if (x - a <= b - x) return cumulative_[i] + gauss_kronrod21(f_, a, x).value;
  return cumulative_[i + 1] - gauss_kronrod21(f_, x, b).value;
}

}  // namespace affsphere::numerics
