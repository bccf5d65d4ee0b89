#include "krein/random.hpp"

#include <cmath>
#include <numbers>

namespace krein {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ + 0x632BE59BD9B4E019ULL));
  return splitmix64(key + 0x9E3779B97F4A7C15ULL * (counter_++));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  // Box-Muller; u1 is kept away from zero.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) * std::numbers::sqrt2 * 0.5;
}

CMatrix CounterRng::ginibre(Eigen::Index rows, Eigen::Index cols) {
  CMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = complex_normal();
  return g;
}

CMatrix CounterRng::haar_unitary(Eigen::Index n) {
  const CMatrix g = ginibre(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

CVector CounterRng::unit_vector(Eigen::Index n) {
  CVector v = ginibre(n, 1);
  return v / v.norm();
}

}  // namespace krein
