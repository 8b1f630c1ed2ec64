#include <gtest/gtest.h>

#include "svmp/config.hpp"

using namespace svmp;

TEST(Config, ParsesKeysCommentsAndBlankLines) {
  config::CliConfig cfg;
  config::apply_text(cfg,
                     "# pooling\n"
                     "eta = 0.25\n"
                     "c1=3   # trailing comment\n"
                     "\n"
                     "algorithm = ordered\n"
                     "pair_mode = consecutive\n"
                     "kernel = intersection\n"
                     "period = 0.3\n"
                     "classes = 7\n"
                     "seed = 11\n"
                     "normalize_descriptor = false\n",
                     "test.cfg");
  EXPECT_DOUBLE_EQ(cfg.pooling.eta, 0.25);
  EXPECT_DOUBLE_EQ(cfg.pooling.c1, 3.0);
  EXPECT_EQ(cfg.algorithm, Algorithm::kOrdered);
  EXPECT_EQ(cfg.pooling.pair_mode, PairMode::kConsecutive);
  ASSERT_TRUE(cfg.kernel.has_value());
  EXPECT_EQ(cfg.kernel->kernel, kermap::Kernel::kIntersection);
  EXPECT_DOUBLE_EQ(cfg.kernel->period, 0.3);
  EXPECT_EQ(cfg.synthetic.classes, 7);
  EXPECT_EQ(cfg.synthetic.seed, 11U);
  EXPECT_EQ(cfg.pooling.seed, 11U);
  EXPECT_FALSE(cfg.pooling.normalize_descriptor);
}

TEST(Config, UnknownKeyNamesLine) {
  config::CliConfig cfg;
  try {
    config::apply_text(cfg, "eta = 0.5\nbogus = 1\n", "x.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Config, MalformedValues) {
  config::CliConfig cfg;
  EXPECT_THROW(config::apply_text(cfg, "eta = high\n", "x"), Error);
  EXPECT_THROW(config::apply_text(cfg, "max_outer_iters = 2.5\n", "x"), Error);
  EXPECT_THROW(config::apply_text(cfg, "just words\n", "x"), Error);
  EXPECT_THROW(config::apply_text(cfg, "kernel = rbf\n", "x"), Error);
  config::apply_text(cfg, "kernel = chi2\nkernel = none\n", "x");
  EXPECT_FALSE(cfg.kernel.has_value());
}

TEST(Config, KnownKeysCoverPoolingFields) {
  const auto& keys = config::known_keys();
  for (const char* k : {"eta", "c1", "c1_init", "c1_multiplier", "c1_max", "c2", "delta", "lambda_layer",
                        "solver_tol", "max_solver_epochs", "max_outer_iters", "convergence_threshold",
                        "enumeration_cap", "ordered_max_iters", "pair_mode", "ordered_solver",
                        "normalize_descriptor", "seed", "kernel", "order", "period"}) {
    EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
  }
}
