#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "toroid/runner.hpp"

using namespace toroid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

const char* spectrum_text = R"([scenario]
experiment = spectrum
[geometry]
major_radius = 150 nm
minor_radius = 15 nm
thickness = 5 nm
[grid]
n_s = 32
n_alpha = 48
[basis]
m_max = 6
)";

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("toroid_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Runner, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Runner, ExportsAreDeterministicAndTagged) {
  const Scenario sc = load_scenario(spectrum_text);
  RunOptions a, b;
  a.output_dir = scratch_dir("a").string();
  b.output_dir = scratch_dir("b").string();
  const RunReport ra = run(sc, a), rb = run(sc, b);
  ASSERT_EQ(ra.files, rb.files);
  ASSERT_FALSE(ra.files.empty());
  const std::string tag = "# scenario_sha256=" + sha256_hex(spectrum_text) + " experiment=spectrum";
  for (const auto& f : ra.files) {
    const std::string x = slurp(ra.directory / f);
    EXPECT_EQ(x, slurp(rb.directory / f)) << f;
    EXPECT_EQ(x.rfind(tag, 0), 0u) << f;
    EXPECT_NE(ra.manifest.find("=" + f + "\n"), std::string::npos) << f;
    EXPECT_NE(ra.manifest.find(sha256_hex(x)), std::string::npos) << f;
  }
  EXPECT_EQ(slurp(ra.directory / "manifest.txt"), ra.manifest);
  EXPECT_NE(ra.manifest.find("param.basis.electrons=19"), std::string::npos);
  EXPECT_NE(ra.manifest.find("wall_time_s="), std::string::npos);
}

TEST(Runner, ResolutionScale) {
  const Scenario sc = load_scenario(spectrum_text);
  const Scenario s2 = scaled(sc, 2.0);
  EXPECT_EQ(s2.n_s, 64u);
  EXPECT_EQ(s2.n_alpha, 96u);
  EXPECT_EQ(s2.n_phi, 256);
  EXPECT_EQ(scaled(sc, 1.3).n_alpha % 2, 0u);
  EXPECT_THROW(scaled(sc, 0.0), ConfigError);
}

TEST(Runner, SchedulePeriod) {
  using K = SequenceKind;
  EXPECT_EQ(detail::schedule_period({K::PS_I, K::PS_II, K::PS_II, K::PS_I, K::PS_I, K::PS_II, K::PS_II, K::PS_I}), 4);
  EXPECT_EQ(detail::schedule_period({K::PS_I, K::PS_I, K::PS_I}), 1);
  EXPECT_EQ(detail::schedule_period({K::PS_I}), 1);
}

TEST(Runner, BundledScenariosValidate) {
  const char* dir = std::getenv("TOROID_SCENARIO_DIR");
  if (!dir) GTEST_SKIP() << "TOROID_SCENARIO_DIR not set";
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_scenario(slurp(e.path()))) << e.path();
    ++count;
  }
  EXPECT_EQ(count, 7);
}

TEST(Runner, SteadyStateExportsFieldLaws) {
  std::string text = R"([scenario]
experiment = fig5_steady
[geometry]
major_radius = 150 nm
minor_radius = 15 nm
thickness = 5 nm
[basis]
m_max = 6
[grid]
n_s = 32
n_alpha = 48
)";
  RunOptions o;
  o.output_dir = scratch_dir("fig5").string();
  const RunReport r = run(load_scenario(text), o);
  EXPECT_TRUE(fs::exists(r.directory / "fig5_axis.tsv"));
  EXPECT_TRUE(fs::exists(r.directory / "fig5_fieldmap.tsv"));
  EXPECT_TRUE(fs::exists(r.directory / "fig5_moments.tsv"));
}
