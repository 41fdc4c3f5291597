#include "etac/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "etac/codec.hpp"

namespace etac {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("etac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& data) const {
        std::ofstream os(path(name), std::ios::binary);
        os << data;
    }

    std::string slurp(const std::string& name) const { return read_file(path(name)); }

    // Runs the CLI with stderr captured to a file; returns the exit code.
    int run(const std::string& args) {
        const std::string cmd = std::string(ETAC_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                                path("stderr.txt");
        const int status = std::system(cmd.c_str());
        stdout_ = slurp("stdout.txt");
        stderr_ = slurp("stderr.txt");
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
    std::string stdout_;
    std::string stderr_;
};

TEST(Tokens, ParseAndFormat) {
    EXPECT_EQ(parse_tokens("5 1 3\n2\t2\r\n"), (Message{5, 1, 3, 2, 2}));
    EXPECT_EQ(parse_tokens(""), Message{});
    EXPECT_EQ(parse_tokens("  \n "), Message{});
    EXPECT_EQ(parse_tokens("4611686018427387904"), Message{kMaxSymbol});
    EXPECT_EQ(format_tokens({5, 1, 3}), "5 1 3\n");
    EXPECT_EQ(format_tokens({}), "");
}

TEST(Tokens, ErrorsNameTokenAndPosition) {
    try {
        (void)parse_tokens("1 2\n3 0 4");
        FAIL();
    } catch (const TokenError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 3u);
        EXPECT_EQ(e.token(), "0");
    }
    EXPECT_THROW((void)parse_tokens("1 -2"), TokenError);
    EXPECT_THROW((void)parse_tokens("1 2.5"), TokenError);
    EXPECT_THROW((void)parse_tokens("abc"), TokenError);
    EXPECT_THROW((void)parse_tokens("4611686018427387905"), TokenError);
    EXPECT_THROW((void)parse_tokens("99999999999999999999999"), TokenError);
}

TEST(Tokens, NGrid) {
    EXPECT_EQ(parse_n_grid("1024..8192"), (std::vector<std::size_t>{1024, 2048, 4096, 8192}));
    EXPECT_EQ(parse_n_grid("100..300"), (std::vector<std::size_t>{100, 200}));
    EXPECT_EQ(parse_n_grid("10,20,40"), (std::vector<std::size_t>{10, 20, 40}));
    EXPECT_EQ(parse_n_grid("5000"), (std::vector<std::size_t>{5000}));
    for (const char* bad : {"", "0..10", "10..5", "a", "1,,2", "1..x"}) {
        EXPECT_THROW((void)parse_n_grid(bad), std::invalid_argument) << bad;
    }
}

TEST_F(CliTest, CompressDecompressRoundTrip) {
    write("in.txt", "5 1 3 2 2\n");
    ASSERT_EQ(run("compress " + path("in.txt") + " " + path("c.etc")), 0) << stderr_;
    EXPECT_NE(stderr_.find("N_censored=2"), std::string::npos) << stderr_;
    EXPECT_NE(stderr_.find("total_bits="), std::string::npos);
    EXPECT_NE(stderr_.find("mixture_bits="), std::string::npos);
    EXPECT_NE(stderr_.find("elias_bits="), std::string::npos);
    EXPECT_EQ(slurp("c.etc").substr(0, 4), "ETC1");
    ASSERT_EQ(run("decompress " + path("c.etc") + " " + path("out.txt")), 0) << stderr_;
    EXPECT_EQ(slurp("out.txt"), "5 1 3 2 2\n");
}

TEST_F(CliTest, ValueRuleRecordedInContainer) {
    write("in.txt", "9 4 4 7 1 2 8 8 3 1000000000");
    ASSERT_EQ(run("compress --rule value " + path("in.txt") + " " + path("c.etc")), 0);
    EXPECT_EQ(static_cast<unsigned char>(slurp("c.etc")[4]), 1u);
    ASSERT_EQ(run("decompress " + path("c.etc") + " " + path("out.txt")), 0);
    EXPECT_EQ(slurp("out.txt"), "9 4 4 7 1 2 8 8 3 1000000000\n");
    ASSERT_EQ(run("inspect " + path("c.etc")), 0);
    EXPECT_NE(stdout_.find("rule: value"), std::string::npos);
    EXPECT_NE(stdout_.find("symbols: 10"), std::string::npos);
}

TEST_F(CliTest, EmptyFile) {
    write("in.txt", "");
    ASSERT_EQ(run("compress " + path("in.txt") + " " + path("c.etc")), 0);
    EXPECT_EQ(slurp("c.etc").size(), 6u);
    ASSERT_EQ(run("decompress " + path("c.etc") + " " + path("out.txt")), 0);
    EXPECT_EQ(slurp("out.txt"), "");
}

TEST_F(CliTest, BytesMode) {
    std::string data;
    for (int i = 0; i < 256; ++i) {
        data.push_back(static_cast<char>(i));
    }
    data += "hello hello hello";
    write("in.bin", data);
    ASSERT_EQ(run("compress --bytes " + path("in.bin") + " " + path("c.etc")), 0);
    ASSERT_EQ(run("decompress --bytes " + path("c.etc") + " " + path("out.bin")), 0);
    EXPECT_EQ(slurp("out.bin"), data);
    ASSERT_EQ(run("decompress " + path("c.etc") + " " + path("out.txt")), 0);
    EXPECT_EQ(slurp("out.txt").substr(0, 6), "1 2 3 ");
}

TEST_F(CliTest, ZeroTokenIsDataError) {
    write("in.txt", "3 0 1");
    EXPECT_EQ(run("compress " + path("in.txt") + " " + path("c.etc")), 1);
    EXPECT_NE(stderr_.find("'0'"), std::string::npos) << stderr_;
    EXPECT_NE(stderr_.find("line 1, column 3"), std::string::npos) << stderr_;
    EXPECT_FALSE(fs::exists(path("c.etc")));
}

TEST_F(CliTest, MissingInputIsDataError) {
    EXPECT_EQ(run("compress " + path("nope.txt") + " " + path("c.etc")), 1);
    EXPECT_NE(stderr_.find("nope.txt"), std::string::npos);
    EXPECT_EQ(run("inspect " + path("nope.etc")), 1);
}

TEST_F(CliTest, CorruptContainersAreDataErrors) {
    write("in.txt", "7 7 7 1 2 3 400 5 6");
    ASSERT_EQ(run("compress " + path("in.txt") + " " + path("c.etc")), 0);
    const std::string good = slurp("c.etc");

    write("trunc.etc", good.substr(0, good.size() - 2));
    EXPECT_EQ(run("decompress " + path("trunc.etc") + " " + path("out.txt")), 1);
    EXPECT_FALSE(fs::exists(path("out.txt")));
    EXPECT_FALSE(fs::exists(path("out.txt.tmp")));

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    write("magic.etc", bad_magic);
    EXPECT_EQ(run("decompress " + path("magic.etc") + " " + path("out.txt")), 1);
    EXPECT_NE(stderr_.find("bad-magic"), std::string::npos) << stderr_;

    std::string flags = good;
    flags[4] = 4;
    write("flags.etc", flags);
    EXPECT_EQ(run("decompress " + path("flags.etc") + " " + path("out.txt")), 1);
    EXPECT_NE(stderr_.find("unknown-flags"), std::string::npos) << stderr_;

    write("garbage.etc", good + std::string(1, '\x01'));
    EXPECT_EQ(run("decompress " + path("garbage.etc") + " " + path("out.txt")), 1);
    EXPECT_FALSE(fs::exists(path("out.txt")));
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("compress"), 2);
    EXPECT_EQ(run("compress --level 9 a b"), 2);
    write("in.txt", "1 2 3");
    EXPECT_EQ(run("compress --rule median " + path("in.txt") + " " + path("c.etc")), 2);
    EXPECT_EQ(run("bench-redundancy --trials 10"), 2);
    EXPECT_EQ(run("bench-threshold --trials 100"), 2);
    EXPECT_EQ(run("bench-threshold --envelope power:alpha=0.5"), 2);
    EXPECT_EQ(run("bench-threshold --envelope geometric:q=0.5"), 2);
    EXPECT_EQ(run("bench-distinct --source cauchy"), 2);
    EXPECT_EQ(run("bench-distinct --n 10..5"), 2);
    EXPECT_EQ(run("bench-threshold --trials abc"), 2);
}

TEST_F(CliTest, HelpIsSuccess) {
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(stdout_.find("bench-redundancy"), std::string::npos);
    EXPECT_EQ(run("compress --help"), 0);
}

TEST_F(CliTest, BenchIsDeterministic) {
    const std::string args = " --n 256..1024 --trials 200 --seed 7 --threads 2 --out ";
    ASSERT_EQ(run("bench-threshold" + args + path("a.csv")), 0) << stderr_;
    EXPECT_NE(stderr_.find("var<=mean: PASS"), std::string::npos) << stderr_;
    ASSERT_EQ(run("bench-threshold" + args + path("b.csv")), 0);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    EXPECT_EQ(slurp("a.csv").substr(0, 16), "n,trials,mean_M,");

    ASSERT_EQ(run("bench-redundancy --n 256,512 --trials 30 --seed 3 --out " + path("r1.csv")), 0) << stderr_;
    ASSERT_EQ(run("bench-redundancy --n 256,512 --trials 30 --seed 3 --threads 3 --out " + path("r2.csv")), 0);
    EXPECT_EQ(slurp("r1.csv"), slurp("r2.csv"));
    ASSERT_EQ(run("bench-redundancy --n 256,512 --trials 30 --seed 4 --out " + path("r3.csv")), 0);
    EXPECT_NE(slurp("r1.csv"), slurp("r3.csv"));
}

TEST_F(CliTest, BenchWritesStdoutWithoutOut) {
    ASSERT_EQ(run("bench-distinct --source bayes --n 256,512 --trials 200"), 0) << stderr_;
    EXPECT_EQ(stdout_.substr(0, 21), "n,trials,mean_K,se_K,");
    EXPECT_NE(stderr_.find("K/m' spread<=3: PASS"), std::string::npos) << stderr_;
}

TEST_F(CliTest, ConfigFile) {
    write("bench.ini", "n = 256..512\ntrials = 200\nseed = 7\nenvelope = \"geometric:q=0.8\"\n");
    ASSERT_EQ(run("bench-threshold --config " + path("bench.ini") + " --out " + path("a.csv")), 0) << stderr_;
    ASSERT_EQ(run("bench-threshold --n 256..512 --trials 200 --seed 7 --envelope geometric:q=0.8 --out " +
                  path("b.csv")),
              0);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    // Command-line flags win over the file.
    ASSERT_EQ(run("bench-threshold --config " + path("bench.ini") + " --n 256 --out " + path("c.csv")), 0);
    const std::string a = slurp("a.csv");
    const std::string c = slurp("c.csv");
    EXPECT_EQ(c, a.substr(0, a.find("\n512,") + 1));
    write("bad.ini", "trials = 5\n");
    EXPECT_EQ(run("bench-threshold --config " + path("bad.ini")), 2);
    write("typo.ini", "trails = 300\n");
    EXPECT_EQ(run("bench-threshold --config " + path("typo.ini")), 2);
    write("nan.ini", "trials = many\n");
    EXPECT_EQ(run("bench-threshold --config " + path("nan.ini")), 2);
    EXPECT_EQ(run("bench-threshold --config " + path("missing.ini")), 1);
}

}  // namespace
}  // namespace etac
