// Global-adaptive Gauss-Kronrod (10-point Gauss / 21-point Kronrod pair)
// integration for real or complex integrands.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace fdasim {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  std::size_t max_subdivisions = std::size_t{1} << 20;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  std::size_t subdivisions = 0;
};

namespace detail {

// QUADPACK qk21 abscissae (descending, centre last) and weights.
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208643582494, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// 10-point Gauss weights at Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T kronrod = f(center) * kKronrodWeights[10];
  T gauss{};
  for (std::size_t i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    const T pair = f(center - dx) + f(center + dx);
    kronrod += pair * kKronrodWeights[i];
    if (i % 2 == 1) gauss += pair * kGaussWeights[i / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [a, b]. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol * |I|); throws QuadratureError when the subdivision
/// budget runs out first.
template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::invoke_result_t<F&, double>> {
  using T = std::invoke_result_t<F&, double>;
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw QuadratureError("integration limits must be finite");
  }
  QuadratureResult<T> out;
  if (a == b) return out;

  std::priority_queue<detail::Panel<T>> panels;
  auto first = detail::gk21<T>(f, a, b);
  T total = first.value;
  double error = first.error;
  panels.push(first);
  std::size_t subdivisions = 0;

  auto converged = [&] {
    return error <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total));
  };
  while (!converged()) {
    if (subdivisions >= opt.max_subdivisions) {
      throw QuadratureError("adaptive quadrature did not converge within " +
                            std::to_string(opt.max_subdivisions) + " subdivisions");
    }
    const auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature reached machine resolution");
    }
    auto left = detail::gk21<T>(f, worst.a, mid);
    auto right = detail::gk21<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
    // Running sums drift; refresh them periodically.
    if (subdivisions % 4096 == 0) {
      auto copy = panels;
      total = T{};
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  out.value = total;
  out.error = error;
  out.subdivisions = subdivisions;
  return out;
}

}  // namespace fdasim
