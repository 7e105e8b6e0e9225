#include "mlqg/config.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace mlqg;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kFull = R"([model]
n_layers = 3
froude = 1.5

[grid]
n_r = 48
n_theta = 96

[time]
dt = 0.005
t_end = 0.25

[solver]
picard_tol = 1e-09
picard_max_iter = 30
interpolation = monotone

[ic]
preset = gaussian_blob
field = streamfunction
center_x = -0.2
center_y = 0.35
width = 0.12
amplitude = 2.5
weights = 1, -0.5, 0.25
perturbation = 1e-06
seed = 12345

[forcing]
preset = rotating_dipole
amplitude = 0.3
frequency = 2

[output]
directory = results/run1
snapshot_every = 10
diagnostics_every = 2
)";

}  // namespace

TEST(Config, MinimalConfigUsesDefaults) {
  const SimConfig c = parse_config("[model]\nn_layers = 3\n");
  EXPECT_EQ(c.n_layers, 3u);
  EXPECT_EQ(c.froude, 1.0);
  EXPECT_EQ(c.n_r, 64);
  EXPECT_EQ(c.n_theta, 128);
  EXPECT_EQ(c.dt, 0.01);
  EXPECT_EQ(c.t_end, 1.0);
  EXPECT_EQ(c.n_steps(), 100);
  EXPECT_EQ(c.picard_tol, 1e-10);
  EXPECT_EQ(c.picard_max_iter, 50);
  EXPECT_EQ(c.interpolation, InterpolationMode::cubic);
  EXPECT_EQ(c.ic.preset, InitialPreset::gaussian_blob);
  EXPECT_EQ(c.ic.weights, std::vector<double>(3, 1.0));
  EXPECT_EQ(c.forcing.preset, ForcingPreset::none);
  EXPECT_EQ(c.output_directory, "out");
}

TEST(Config, NegativeTimeStepNamesKey) {
  const std::string text = "[time]\ndt = -0.1\n";
  EXPECT_NE(error_message(text).find("time.dt"), std::string::npos);
  EXPECT_EQ(error_line(text), 2);
}

TEST(Config, FullConfigRoundTripsByteIdentically) {
  const SimConfig c = parse_config(kFull);
  EXPECT_EQ(dump_config(c), kFull);
  EXPECT_EQ(parse_config(dump_config(c)), c);
}

TEST(Config, DumpIsCanonical) {
  const SimConfig c = parse_config("# comment\n[forcing]\n  preset=constant # trailing\nvalue = 0.5\n[model]\nfroude=2.0\n");
  const std::string dumped = dump_config(c);
  EXPECT_EQ(dump_config(parse_config(dumped)), dumped);
  EXPECT_NE(dumped.find("froude = 2\n"), std::string::npos);
  EXPECT_NE(dumped.find("value = 0.5\n"), std::string::npos);
}

TEST(Config, UnknownKeyReportsLine) {
  EXPECT_EQ(error_line("[model]\nn_layers = 3\nlayers = 4\n"), 3);
  EXPECT_NE(error_message("[model]\nlayers = 4\n").find("unknown key"), std::string::npos);
}

TEST(Config, UnknownSectionReportsLine) { EXPECT_EQ(error_line("\n\n[physics]\n"), 3); }

TEST(Config, KeyOutsideSection) { EXPECT_EQ(error_line("dt = 0.1\n"), 1); }

TEST(Config, MalformedLines) {
  EXPECT_EQ(error_line("[time]\ndt 0.1\n"), 2);
  EXPECT_EQ(error_line("[time\n"), 1);
  EXPECT_EQ(error_line("[time]\ndt =\n"), 2);
  EXPECT_EQ(error_line("[time]\ndt = 0.1x\n"), 2);
}

TEST(Config, DuplicateKey) { EXPECT_EQ(error_line("[time]\ndt = 0.1\ndt = 0.2\n"), 3); }

TEST(Config, UnknownPreset) {
  EXPECT_EQ(error_line("[ic]\npreset = vortex\n"), 2);
  EXPECT_EQ(error_line("[forcing]\npreset = wind\n"), 2);
  EXPECT_EQ(error_line("[solver]\ninterpolation = linear\n"), 2);
}

TEST(Config, ParameterOfOtherPresetRejected) {
  EXPECT_EQ(error_line("[ic]\npreset = zero\nwidth = 0.2\n"), 3);
  EXPECT_EQ(error_line("[forcing]\npreset = constant\nfrequency = 1\n"), 3);
  EXPECT_EQ(error_line("[ic]\npreset = radial\ncase = 1\n"), 3);
}

TEST(Config, ValidationErrors) {
  EXPECT_NE(error_message("[grid]\nn_theta = 65\n").find("grid.n_theta"), std::string::npos);
  EXPECT_NE(error_message("[grid]\nn_r = 4\n").find("grid.n_r"), std::string::npos);
  EXPECT_NE(error_message("[model]\nn_layers = 0\n").find("model.n_layers"), std::string::npos);
  EXPECT_NE(error_message("[model]\nfroude = 0\n").find("model.froude"), std::string::npos);
  EXPECT_NE(error_message("[time]\nt_end = 0.105\n").find("time.t_end"), std::string::npos);
  EXPECT_NE(error_message("[time]\ndt = 0.5\nt_end = 0.25\n").find("time.t_end"), std::string::npos);
  EXPECT_NE(error_message("[ic]\nweights = 1, 2\n").find("ic.weights"), std::string::npos);
  EXPECT_NE(error_message("[ic]\npreset = manufactured\ncase = 3\n").find("ic.case"), std::string::npos);
  EXPECT_NE(error_message("[ic]\ncenter_x = 1.2\n").find("ic.center_x"), std::string::npos);
  EXPECT_NE(error_message("[output]\ndiagnostics_every = 0\n").find("output.diagnostics_every"), std::string::npos);
  EXPECT_NE(error_message("[solver]\npicard_tol = 0\n").find("solver.picard_tol"), std::string::npos);
}

TEST(Config, ValidateStandalone) {
  SimConfig c;
  EXPECT_NO_THROW(validate(c));
  c.dt = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError); }
