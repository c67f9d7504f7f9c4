#include <atomic>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "cep/executor.hpp"

namespace cep {
namespace {

TEST(ExecutorTest, VisitsEveryIndexOnce) {
  for (int workers : {1, 3, 8}) {
    Executor ex(workers);
    std::vector<std::atomic<int>> hits(257);
    ex.parallel_for(257, [&](int i) { hits[i].fetch_add(1); });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ExecutorTest, ReusableAcrossLoops) {
  Executor ex(4);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> out(round, 0);
    ex.parallel_for(round, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < round; ++i) EXPECT_EQ(out[i], i * i);
  }
}

TEST(ExecutorTest, RethrowsLowestFailingIndex) {
  Executor ex(4);
  try {
    ex.parallel_for(100, [](int i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
  int count = 0;
  ex.parallel_for(5, [&](int) {});
  ex.parallel_for(1, [&](int) { ++count; });
  EXPECT_EQ(count, 1);
}

TEST(ExecutorTest, ZeroCountIsNoop) {
  Executor ex(2);
  ex.parallel_for(0, [](int) { FAIL(); });
}

}  // namespace
}  // namespace cep
