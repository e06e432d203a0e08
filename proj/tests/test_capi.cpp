#include <gtest/gtest.h>
#include <tpmhd/tpmhd.h>

#include <filesystem>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

TEST(CApi, ConfigErrorsCarryMessages) {
  tpmhd_config* c = nullptr;
  EXPECT_EQ(tpmhd_config_parse("experiment = converge\nnu==\n", &c), TPMHD_ERR_CONFIG);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(tpmhd_last_error()).find("line 2"), std::string::npos);
  EXPECT_EQ(tpmhd_config_load("/nonexistent/x.cfg", &c), TPMHD_ERR_CONFIG);
  EXPECT_EQ(tpmhd_config_parse(nullptr, &c), TPMHD_ERR_ARGUMENT);
  EXPECT_EQ(tpmhd_run(nullptr, nullptr, nullptr, nullptr), TPMHD_ERR_ARGUMENT);

  ASSERT_EQ(tpmhd_config_parse("experiment = kh\nn = 4\ndt = 1e-3\nT_final = 1e-3\n", &c), TPMHD_OK);
  EXPECT_STREQ(tpmhd_last_error(), "");
  EXPECT_STREQ(tpmhd_config_experiment(c), "kh");
  EXPECT_EQ(tpmhd_config_set_output_dir(c, ""), TPMHD_ERR_ARGUMENT);
  tpmhd_config_free(c);
  tpmhd_config_free(nullptr);
  tpmhd_result_free(nullptr);
}

TEST(CApi, RunsAndReportsOutputs) {
  const fs::path dir = fs::path(::testing::TempDir()) / "tpmhd_capi";
  fs::remove_all(dir);
  tpmhd_config* c = nullptr;
  ASSERT_EQ(tpmhd_config_parse("experiment = spinodal\nn = 4\ndt = 1e-3\nT_final = 2e-3\nseed = 1\ndump_every = 1\n", &c),
            TPMHD_OK);
  ASSERT_EQ(tpmhd_config_set_output_dir(c, dir.c_str()), TPMHD_OK);
  std::vector<std::string> lines;
  tpmhd_result* r = nullptr;
  const auto log = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); };
  ASSERT_EQ(tpmhd_run(c, log, &lines, &r), TPMHD_OK) << tpmhd_last_error();
  EXPECT_FALSE(lines.empty());
  EXPECT_EQ(fs::path(tpmhd_result_csv(r)), dir / "spinodal.csv");
  EXPECT_TRUE(fs::exists(tpmhd_result_csv(r)));
  ASSERT_EQ(tpmhd_result_dump_count(r), 3u);
  for (size_t i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(tpmhd_result_dump(r, i)));
  EXPECT_EQ(tpmhd_result_dump(r, 3), nullptr);
  tpmhd_result_free(r);
  tpmhd_config_free(c);
}

TEST(CApi, SolverFailureStatus) {
  tpmhd_config* c = nullptr;
  ASSERT_EQ(tpmhd_config_parse("experiment = spinodal\nn = 4\ndt = 1e-3\nT_final = 1e-3\nseed = 1\nnewton_max = 1\n"
                               "newton_tol = 1e-30\n",
                               &c),
            TPMHD_OK);
  const fs::path dir = fs::path(::testing::TempDir()) / "tpmhd_capi_fail";
  ASSERT_EQ(tpmhd_config_set_output_dir(c, dir.c_str()), TPMHD_OK);
  EXPECT_EQ(tpmhd_run(c, nullptr, nullptr, nullptr), TPMHD_ERR_SOLVER);
  EXPECT_NE(std::string(tpmhd_last_error()).find("step 1"), std::string::npos);
  tpmhd_config_free(c);
}

}  // namespace
