#include <gtest/gtest.h>

#include "toroid/scenario.hpp"

using namespace toroid;

namespace {
const char* minimal = R"(
[scenario]
experiment = fig6_buildup
[geometry]
major_radius = 150 nm
minor_radius = 15 nm
thickness = 5 nm
)";

std::string all_messages(const ParseResult& r) { return format_issues(r.issues); }
}  // namespace

TEST(Scenario, MinimalFileUsesDefaults) {
  const Scenario sc = load_scenario(minimal);
  EXPECT_EQ(sc.experiment, Experiment::Fig6Buildup);
  EXPECT_EQ(sc.n_s, 48u);
  EXPECT_DOUBLE_EQ(sc.pulses.photon_energy, 2.5);
  EXPECT_DOUBLE_EQ(sc.basis.electron_count, 19.0);
  EXPECT_DOUBLE_EQ(sc.pulses.fields.front(), 600.0 * units::volt_per_cm);
}

TEST(Scenario, TypoGetsSuggestion) {
  const ParseResult r = parse_scenario("[scenario]\nexperiment = spectrum\n[geometry]\nmajro_radius = 150\nminor_radius = 15\nthickness = 5\n");
  ASSERT_FALSE(r.scenario);
  const std::string msg = all_messages(r);
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("did you mean 'geometry.major_radius'"), std::string::npos) << msg;
}

TEST(Scenario, EmptyFileListsEveryMissingKey) {
  const ParseResult r = parse_scenario("");
  ASSERT_FALSE(r.scenario);
  const std::string msg = all_messages(r);
  for (const char* k : {"scenario.experiment", "geometry.major_radius", "geometry.minor_radius", "geometry.thickness"})
    EXPECT_NE(msg.find(k), std::string::npos) << k;
}

TEST(Scenario, UnitsConvert) {
  std::string text = minimal;
  text += "[pulses]\nfield = 1.2 kV/cm\nphoton_energy = 0.0025 eV\nwaist = 3 um\nstart = 500 fs\n";
  text += "[relaxation]\nrate = 20 1/ns\n";
  const Scenario sc = load_scenario(text);
  EXPECT_NEAR(sc.pulses.fields.front(), 0.12, 1e-15);
  EXPECT_NEAR(sc.pulses.photon_energy, 2.5, 1e-12);
  EXPECT_NEAR(sc.pulses.waist, 3000.0, 1e-9);
  EXPECT_NEAR(sc.pulses.start, 0.5, 1e-15);
  EXPECT_NEAR(sc.relaxation.rate, 0.02, 1e-15);
}

TEST(Scenario, WrongUnitRejected) {
  std::string text = minimal;
  text += "[pulses]\nwaist = 3 meV\n";
  const ParseResult r = parse_scenario(text);
  ASSERT_FALSE(r.scenario);
  EXPECT_NE(all_messages(r).find("pulses.waist: unit 'meV'"), std::string::npos);
}

TEST(Scenario, SweepListsExpand) {
  std::string text = minimal;
  text += "[pulses]\nfield = 300, 600, 900 V/cm\n[basis]\nheadroom = 5, 7\n[probe]\nheights = 30, 40, 50 nm\n";
  const Scenario sc = load_scenario(text);
  EXPECT_EQ(sc.pulses.fields.size(), 3u);
  EXPECT_EQ(sc.headrooms, (std::vector<double>{5.0, 7.0}));
  EXPECT_EQ(sc.probe.heights.size(), 3u);
}

TEST(Scenario, RangeAndDuplicateChecks) {
  std::string text = minimal;
  text += "[grid]\nn_alpha = 63\nn_s = 48\nn_s = 50\n[time]\nsteps_per_cycle = 10\n";
  const ParseResult r = parse_scenario(text);
  ASSERT_FALSE(r.scenario);
  const std::string msg = all_messages(r);
  EXPECT_NE(msg.find("must be even"), std::string::npos) << msg;
  EXPECT_NE(msg.find("duplicate key 'grid.n_s'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("time.steps_per_cycle"), std::string::npos) << msg;
}

TEST(Scenario, GeometryValidatedAcrossKeys) {
  const ParseResult r = parse_scenario(
      "[scenario]\nexperiment = spectrum\n[geometry]\nmajor_radius = 10 nm\nminor_radius = 15 nm\nthickness = 5 nm\n");
  ASSERT_FALSE(r.scenario);
  EXPECT_NE(all_messages(r).find("self-intersects"), std::string::npos);
}

TEST(Scenario, SolidVariantNeedsNoMinorRadius) {
  const Scenario sc = load_scenario("[scenario]\nexperiment = fig10_solid\n[geometry]\nvariant = solid\nmajor_radius = 75 nm\nthickness = 20 nm\n");
  EXPECT_EQ(sc.geometry.variant, TorusVariant::SolidDonut);
  EXPECT_DOUBLE_EQ(sc.geometry.outer_radius(), 20.0);
}

TEST(Scenario, CommentsAndScheduleParsing) {
  std::string text = minimal;
  text += "; comment line\n[pulses]\nschedule = PS_I, PS_II , PS_I  # trailing\n";
  const Scenario sc = load_scenario(text);
  ASSERT_EQ(sc.pulses.schedule.size(), 3u);
  EXPECT_EQ(sc.pulses.schedule[1], SequenceKind::PS_II);
  EXPECT_THROW(load_scenario(std::string(minimal) + "[pulses]\nschedule = PS_III\n"), ConfigError);
}

TEST(Scenario, ResolvedListsDefaults) {
  const auto kv = load_scenario(minimal).resolved();
  auto has = [&](const std::string& prefix) {
    return std::any_of(kv.begin(), kv.end(), [&](const auto& p) { return p.first.rfind(prefix, 0) == 0; });
  };
  for (const char* k : {"basis.electrons", "basis.temperature", "relaxation.rate", "grid.n_s", "grid.n_alpha"})
    EXPECT_TRUE(has(k)) << k;
}
