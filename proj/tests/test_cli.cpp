#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "schatten_qp/channels.hpp"
#include "schatten_qp/io.hpp"
#include "schatten_qp/random.hpp"

namespace sqp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sqp_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    write("id4.json", io::matrix_to_json(identity(4)));
    write("mixed.json", io::matrix_to_json(identity(4) / 4.0, {2, 2}));
    write("product.json", io::matrix_to_json(tensor(random_density(2, 1), random_density(2, 2)), {2, 2}));
    write("pure.json", io::matrix_to_json(max_entangled(2), {2, 2}));
    write("replacer.json", channel_to_json(replacer_channel(2)));
    write("idch.json", channel_to_json(identity_channel(2)));
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const json& j) { std::ofstream(dir_ / name) << j.dump(); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }
  json result() const { return json::parse(out_.str()); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(ParseIndex, Tokens) {
  EXPECT_DOUBLE_EQ(cli::parse_index("0.5"), 0.5);
  EXPECT_DOUBLE_EQ(cli::parse_index("1/3"), 1.0 / 3);
  EXPECT_TRUE(std::isinf(cli::parse_index("inf")));
  EXPECT_TRUE(std::isinf(cli::parse_index("INF")));
  EXPECT_THROW(cli::parse_index("abc"), ParseError);
  EXPECT_THROW(cli::parse_index("1/0"), ParseError);
  EXPECT_THROW(cli::parse_index("2x"), ParseError);
  EXPECT_THROW(cli::parse_index("0"), BadIndex);
  EXPECT_THROW(cli::parse_index("-1"), BadIndex);
}

TEST_F(Cli, NormExamples) {
  ASSERT_EQ(call({"norm", path("id4.json"), "--dims", "2,2", "--q", "1", "--p", "2"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), 2 * std::sqrt(2.0), 5e-3);
  EXPECT_TRUE(err_.str().empty());

  EXPECT_EQ(call({"norm", path("id4.json"), "--dims", "2,2", "--q", "1/4", "--p", "inf"}), cli::kBadIndex);
  EXPECT_NE(err_.str().find("|1/q - 1/p| <= 1"), std::string::npos);

  ASSERT_EQ(call({"norm", path("id4.json"), "--dims", "2,2", "--q", "2", "--p", "2"}), cli::kOk);
  EXPECT_EQ(result().at("value").get<double>(), 2.0);
  EXPECT_EQ(result().at("bound").get<std::string>(), "exact");
}

TEST_F(Cli, NormWitnessRoundTrip) {
  ASSERT_EQ(call({"norm", path("mixed.json"), "--q", "2", "--p", "1"}), cli::kOk);
  const json j = result();
  for (const char* key : {"witness_a", "witness_b"}) {
    const Matrix w = io::matrix_from_json(j.at(key));
    const Matrix again = io::matrix_from_json(json::parse(io::dump_rounded(io::matrix_to_json(w))));
    EXPECT_LT((w - again).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(j.at("bound").get<std::string>(), "lower");
}

TEST_F(Cli, ParseErrors) {
  EXPECT_EQ(call({"norm", path("missing.json"), "--dims", "2,2"}), cli::kParse);
  EXPECT_EQ(call({"norm", path("id4.json")}), cli::kParse);  // no dims anywhere
  EXPECT_EQ(call({"norm", path("id4.json"), "--dims", "2,3"}), cli::kParse);
  EXPECT_EQ(call({"norm", path("id4.json"), "--dims", "2,2", "--q", "x"}), cli::kParse);
  EXPECT_EQ(call({"frobnicate"}), cli::kParse);
  EXPECT_EQ(call({}), cli::kParse);
  EXPECT_EQ(call({"--help"}), cli::kOk);
}

TEST_F(Cli, EntropyExamples) {
  ASSERT_EQ(call({"entropy", path("mixed.json"), "--alpha", "1/2"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), std::log(2.0), 1e-9);
  EXPECT_EQ(result().at("unit").get<std::string>(), "nats");
  ASSERT_EQ(call({"entropy", path("mixed.json"), "--alpha", "1/2", "--bits"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), 1.0, 1e-9);
  ASSERT_EQ(call({"entropy", path("product.json"), "--quantity", "umlaut", "--alpha", "0.5"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), 0.0, 5e-3);
  EXPECT_EQ(call({"entropy", path("pure.json"), "--quantity", "umlaut-limit"}), cli::kRankDeficient);
  EXPECT_EQ(call({"entropy", path("mixed.json"), "--alpha", "0"}), cli::kBadIndex);
  EXPECT_EQ(call({"entropy", path("mixed.json"), "--quantity", "umlaut", "--alpha", "2"}), cli::kBadIndex);
}

TEST_F(Cli, ChannelExamples) {
  ASSERT_EQ(call({"channel", path("replacer.json"), "--mode", "cb-norm", "--q", "1/2", "--p", "1/2", "--e-max", "2"}),
            cli::kOk);
  EXPECT_GE(result().at("value").get<double>(), 4.0 - 1e-3);
  EXPECT_EQ(result().at("sweep").size(), 2u);
  ASSERT_EQ(call({"channel", path("idch.json"), "--mode", "norm", "--q", "1", "--p", "1"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), 1.0, 1e-6);
  ASSERT_EQ(call({"channel", path("replacer.json"), "--mode", "max-ent", "--p", "1/2"}), cli::kOk);
  EXPECT_NEAR(result().at("value").get<double>(), std::log(2.0), 1e-6);
  EXPECT_EQ(call({"channel", path("replacer.json"), "--mode", "norm", "--q", "0"}), cli::kBadIndex);
}

TEST_F(Cli, OutFlagWritesFile) {
  const std::string out = path("norm_out.json");
  ASSERT_EQ(call({"norm", path("id4.json"), "--dims", "2,2", "--q", "2", "--p", "2", "--out", out}), cli::kOk);
  EXPECT_TRUE(out_.str().empty());
  EXPECT_EQ(io::read_json_file(out).at("value").get<double>(), 2.0);
}

TEST_F(Cli, VerifyCommands) {
  EXPECT_EQ(call({"verify", "no_such_check"}), cli::kUnknownCheck);
  ASSERT_EQ(call({"verify", "--list"}), cli::kOk);
  EXPECT_NE(out_.str().find("block_counterexample"), std::string::npos);

  const std::string report = path("report.json");
  ASSERT_EQ(call({"verify", "block_counterexample", "--out", report}), cli::kOk);
  EXPECT_NE(out_.str().find("0 failed checks"), std::string::npos);
  EXPECT_TRUE(err_.str().empty());
  const json r = io::read_json_file(report);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_GE(r[0].at("notes").at("values").at(0).at("gap").get<double>(), 4.0 - std::sqrt(2.0) - 1e-3);
  EXPECT_FALSE(r[0].contains("wall_time"));

  ASSERT_EQ(call({"verify", "amgm_rewrite", "--trials", "2", "--seed", "3", "--timings", "--out", report}), cli::kOk);
  EXPECT_TRUE(io::read_json_file(report)[0].contains("wall_time"));
}

}  // namespace
}  // namespace sqp
