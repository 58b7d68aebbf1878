#include "qbgk/gauss_legendre.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qbgk {

namespace {

Rule1D build_rule(int n) {
  // Boost returns the non-negative zeros of P_n in ascending order.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  Rule1D rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double z : zeros) {
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

Rule1D composite_rule(std::span<const Panel> panels) {
  Rule1D out;
  for (const Panel& panel : panels) {
    const Rule1D& ref = gauss_legendre(panel.order);
    const double half = 0.5 * (panel.hi - panel.lo);
    const double mid = 0.5 * (panel.hi + panel.lo);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      out.nodes.push_back(mid + half * ref.nodes[i]);
      out.weights.push_back(half * ref.weights[i]);
    }
  }
  return out;
}

}  // namespace qbgk
