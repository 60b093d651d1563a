#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "sae_info/checkpoint.hpp"
#include "sae_info/errors.hpp"

namespace fs = std::filesystem;
using namespace sae_info;

namespace {

struct CheckpointFile : ::testing::Test {
  fs::path dir = fs::temp_directory_path() /
                 ("sae_info_ckpt_" + std::to_string(::getpid()) + "_" +
                  ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::path file = dir / "c.bin";

  void SetUp() override { fs::create_directories(dir); }
  void TearDown() override { fs::remove_all(dir); }

  TrainingSnapshot snapshot() const {
    TrainingSnapshot s{1234, build_sae({5, 3, 2, 3, 5}, 17), 0.0421};
    s.model.layers[1].bias.setConstant(-0.25);
    return s;
  }

  std::string bytes() const {
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  void put(const std::string& b) const {
    std::ofstream out(file, std::ios::binary);
    out << b;
  }
};

}  // namespace

TEST_F(CheckpointFile, RoundTripIsExact) {
  const TrainingSnapshot s = snapshot();
  save_checkpoint(file, s, true);
  const Checkpoint c = load_checkpoint(file);
  EXPECT_EQ(c.iteration, 1234);
  EXPECT_EQ(c.train_mse, 0.0421);
  EXPECT_TRUE(c.tied);
  EXPECT_EQ(c.model.dims, s.model.dims);
  EXPECT_EQ(c.model.seed, 17u);
  for (std::size_t l = 0; l < s.model.layers.size(); ++l) {
    EXPECT_EQ(c.model.layers[l].weights, s.model.layers[l].weights);
    EXPECT_EQ(c.model.layers[l].bias, s.model.layers[l].bias);
    EXPECT_EQ(c.model.layers[l].activation, s.model.layers[l].activation);
  }
}

TEST_F(CheckpointFile, ExpectedSize) {
  save_checkpoint(file, snapshot());
  // header: 8 magic + 4 version + 4 count + 5*4 dims + 4 codes + 1 tied + 8 + 8 + 8
  const std::size_t params = (5 * 3 + 3) + (3 * 2 + 2) + (2 * 3 + 3) + (3 * 5 + 5);
  EXPECT_EQ(fs::file_size(file), 8 + 4 + 4 + 20 + 4 + 1 + 24 + 8 * params);
}

TEST_F(CheckpointFile, BadMagic) {
  save_checkpoint(file, snapshot());
  std::string b = bytes();
  b[0] = 'X';
  put(b);
  try {
    load_checkpoint(file);
    FAIL();
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("magic"), std::string::npos);
    EXPECT_NE(msg.find(file.string()), std::string::npos);
  }
}

TEST_F(CheckpointFile, UnknownVersion) {
  save_checkpoint(file, snapshot());
  std::string b = bytes();
  b[8] = 9;
  put(b);
  EXPECT_THROW(load_checkpoint(file), FormatError);
}

TEST_F(CheckpointFile, Truncated) {
  save_checkpoint(file, snapshot());
  const std::string b = bytes();
  for (std::size_t cut : {std::size_t{4}, std::size_t{30}, b.size() - 1}) {
    put(b.substr(0, cut));
    EXPECT_THROW(load_checkpoint(file), LengthError) << "cut at " << cut;
  }
}

TEST_F(CheckpointFile, TrailingBytes) {
  save_checkpoint(file, snapshot());
  put(bytes() + "x");
  EXPECT_THROW(load_checkpoint(file), FormatError);
}

TEST_F(CheckpointFile, NonPalindromeTopology) {
  save_checkpoint(file, snapshot());
  std::string b = bytes();
  b[16 + 4] = 4;  // second width 3 -> 4
  put(b);
  EXPECT_THROW(load_checkpoint(file), FormatError);
}

TEST_F(CheckpointFile, MissingFile) { EXPECT_THROW(load_checkpoint(dir / "nope.bin"), IoError); }
