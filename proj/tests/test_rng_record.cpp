#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <autoexplore/rng.hpp>
#include <autoexplore/run_record.hpp>

using namespace autoexplore;

TEST(CounterRng, SameSeedSameStream) {
  CounterRng a(42, 0), b(42, 0);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a(), b());
  }
}

TEST(CounterRng, StreamsDiffer) {
  CounterRng a(42, 0), b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    equal += a() == b();
  }
  EXPECT_EQ(equal, 0);
}

TEST(CounterRng, UniformMomentsAndRange) {
  CounterRng rng(7, 3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Standard error of the mean is 1/sqrt(12 n) ~ 6.5e-4.
  EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(CounterRng, GeometricCountsFailures) {
  CounterRng rng(9, 0);
  const double p = 0.25;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto g = rng.geometric(p);
    ASSERT_GE(g, 0);
    sum += static_cast<double>(g);
  }
  // Mean (1 - p) / p = 3, sd sqrt(1 - p) / p ~ 3.46.
  EXPECT_NEAR(sum / n, 3.0, 0.05);
  EXPECT_EQ(CounterRng(1, 1).geometric(1.0), 0);
}

TEST(CounterRng, CategoricalFrequencies) {
  CounterRng rng(11, 0);
  const double cumulative[] = {0.2, 0.5, 1.0};
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) {
    ++counts[rng.categorical(cumulative)];
  }
  EXPECT_NEAR(counts[0] / 1e5, 0.2, 0.01);
  EXPECT_NEAR(counts[1] / 1e5, 0.3, 0.01);
  EXPECT_NEAR(counts[2] / 1e5, 0.5, 0.01);
}

TEST(CounterRng, DerivedSeedsDistinct) {
  EXPECT_NE(derive_seed(5, 0), derive_seed(5, 1));
  EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
}

TEST(RunRecord, RejectsNonMonotoneIter) {
  RunRecord r({"iter", "samples_cum", "x"});
  r.add_row({1, 10, 0.5});
  EXPECT_THROW(r.add_row({1, 12, 0.5}), std::logic_error);
  EXPECT_THROW(r.add_row({2, 9, 0.5}), std::logic_error);
  r.add_row({2, 10, 0.25});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.last("x"), 0.25);
}

TEST(RunRecord, RowWidthChecked) {
  RunRecord r({"iter", "x"});
  EXPECT_ANY_THROW(r.add_row({1.0}));
}

TEST(RunRecord, CsvLayout) {
  RunRecord r({"iter", "value"});
  r.add_row({1, 0.1});
  r.add_row({2, std::numeric_limits<double>::quiet_NaN()});
  std::ostringstream out;
  r.write_csv(out, {"seed=3"});
  EXPECT_EQ(out.str(), "# seed=3\niter,value\n1,0.10000000000000001\n2,nan\n");
}

TEST(RunRecord, FormatDouble) {
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(0.5), "0.5");
}
