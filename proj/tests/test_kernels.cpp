#include "iriseg/kernels.hpp"

#include <doctest.h>

#include <cmath>

using namespace iriseg;

TEST_CASE("kernel size rule") {
  CHECK(kernel_size(2.0) == 13);
  CHECK(kernel_size(1.0) == 7);
  CHECK(kernel_size(5.0) == 31);
  CHECK(kernel_size(26.0) == 157);
  CHECK(kernel_size(0.5) == 3);
  CHECK_THROWS_AS(kernel_size(0.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_size(-1.0), std::invalid_argument);
}

TEST_CASE("raw center tap equals the closed form") {
  for (double sigma : {1.0, 2.0, 3.7}) {
    const Image k = log_kernel(sigma, false, false);
    const int c = static_cast<int>(k.rows()) / 2;
    const double expected = -1.0 / (kPi * sigma * sigma * sigma * sigma);
    CHECK(k(c, c) == doctest::Approx(expected).epsilon(1e-14));
    // The center is the most negative tap.
    CHECK(k(c, c) == doctest::Approx(k.minCoeff()));
  }
}

TEST_CASE("sign change sits on the circle x^2+y^2 = 2 sigma^2") {
  const double sigma = 2.0;
  const Image k = log_kernel(sigma, false, false);
  const int n = static_cast<int>(k.rows()), c = n / 2;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
      if (r2 < 2.0 * sigma * sigma - 1e-9)
        CHECK(k(y, x) < 0.0);
      else if (r2 > 2.0 * sigma * sigma + 1e-9)
        CHECK(k(y, x) > 0.0);
      else
        CHECK(std::abs(k(y, x)) < 1e-18);
    }
}

TEST_CASE("point symmetry") {
  const Image k = log_kernel(3.0, true, true);
  const int n = static_cast<int>(k.rows());
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      CHECK(k(y, x) == k(n - 1 - y, n - 1 - x));
}

TEST_CASE("DC correction gives an exactly balanced kernel") {
  for (double sigma : {1.1, 2.0, 5.0, 13.0, 26.0}) {
    const Image k = log_kernel(sigma, true, true);
    CHECK(std::abs(k.sum()) < 1e-12);
    const Image k_plain = log_kernel(sigma, false, true);
    CHECK(std::abs(k_plain.sum()) < 1e-12);
  }
}

TEST_CASE("scale normalization is exactly sigma^2 per tap before DC correction") {
  for (double sigma : {1.5, 2.0, 8.0}) {
    const Image plain = log_kernel(sigma, false, false);
    const Image normalized = log_kernel(sigma, true, false);
    const double s2 = sigma * sigma;
    for (Eigen::Index i = 0; i < plain.size(); ++i)
      CHECK(normalized.data()[i] == plain.data()[i] * s2);
  }
}

TEST_CASE("gaussian taps: unit sum, symmetric, peaked at center") {
  for (double sigma : {0.8, 2.0, 6.0}) {
    const Eigen::ArrayXd g = gaussian_taps(sigma);
    CHECK(g.size() == kernel_size(sigma));
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      CHECK(g(i) == g(g.size() - 1 - i));
      CHECK(g(i) <= g(g.size() / 2));
    }
  }
}
