#include "iriseg/components.hpp"

#include <doctest.h>

using namespace iriseg;

TEST_CASE("diagonal pixels: one component under 8, two under 4") {
  Mask m = Mask::Zero(4, 4);
  m(1, 1) = 1;
  m(2, 2) = 1;
  CHECK(label_components(m, 8).count() == 1);
  CHECK(label_components(m, 4).count() == 2);
}

TEST_CASE("sizes and largest component") {
  Mask m = Mask::Zero(8, 12);
  for (int x = 0; x < 5; ++x) m(0, x) = 1;      // size 5
  m(4, 4) = 1;                                  // size 1
  for (int y = 6; y < 8; ++y)
    for (int x = 8; x < 12; ++x) m(y, x) = 1;   // size 8
  const ComponentLabels cc = label_components(m);
  REQUIRE(cc.count() == 3);
  int total = 0;
  for (int s : cc.sizes) total += s;
  CHECK(total == 14);
  CHECK(cc.sizes[largest_component(cc) - 1] == 8);
}

TEST_CASE("empty mask has no components") {
  const Mask m = Mask::Zero(5, 5);
  const ComponentLabels cc = label_components(m);
  CHECK(cc.count() == 0);
  CHECK(largest_component(cc) == 0);
  CHECK((cc.labels == 0).all());
}

TEST_CASE("labels cover exactly the set pixels") {
  Mask m = Mask::Zero(6, 6);
  m(0, 0) = 1;
  m(5, 5) = 1;
  m(2, 3) = 1;
  m(3, 3) = 1;
  const ComponentLabels cc = label_components(m);
  for (Eigen::Index y = 0; y < 6; ++y)
    for (Eigen::Index x = 0; x < 6; ++x)
      CHECK((cc.labels(y, x) != 0) == (m(y, x) != 0));
}
