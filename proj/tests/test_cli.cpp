#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "handuse/handuse.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace handuse;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(HANDUSE_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p)
{
    std::ifstream is(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("handuse_cli_" + std::to_string(::getpid()) + "_" +
               ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string p(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

// Labelled feature CSV in which only f3 separates the classes.
void write_f3_separable(const std::string& path, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> lo(0.001, 0.01), hi(0.1, 1.0);
    std::ofstream os(path);
    write_feature_header(os, true);
    for (std::size_t i = 0; i < 6000; ++i) {
        FeatureRow r;
        r.label = (i / 600) % 2 ? Label::in_use : Label::not_in_use;
        r.x.t = static_cast<double>(i) / 10.0;
        r.x.valid = true;
        r.x.f = {noise(rng), noise(rng), r.label == Label::in_use ? hi(rng) : lo(rng), noise(rng), noise(rng)};
        write_feature_row(os, r, true);
    }
}

} // namespace

TEST_F(Cli, HelpAndUsageErrors)
{
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    EXPECT_EQ(run("preprocess --input " + p("missing.csv") + " --out " + p("f.csv")), 2);
    EXPECT_EQ(run("synth --out " + p("x") + " --C -1"), 2);
}

TEST_F(Cli, SynthIsByteIdenticalAcrossRuns)
{
    const std::string sched = std::string(HANDUSE_SAMPLES) + "/schedule.csv";
    ASSERT_EQ(run("synth --schedule " + sched + " --datasets a,b --seed 9 --out " + p("one")), 0);
    ASSERT_EQ(run("synth --schedule " + sched + " --datasets a,b --seed 9 --out " + p("two/nested")), 0);
    for (const char* f : {"a.imu.csv", "a.labels.csv", "b.imu.csv", "run_config.json"})
        EXPECT_EQ(slurp(dir / "one" / f), slurp(dir / "two" / "nested" / f)) << f;
    EXPECT_NE(slurp(dir / "one" / "a.imu.csv"), slurp(dir / "one" / "b.imu.csv"));
    const auto imu = lines(dir / "one" / "a.imu.csv");
    EXPECT_EQ(imu[0], "# fs=120");
    EXPECT_EQ(imu.size(), 2u + 600u * 120u);
    const auto labels = lines(dir / "one" / "a.labels.csv");
    EXPECT_EQ(labels.size(), 1u + 7u);
}

TEST_F(Cli, PreprocessTrainEvaluateDetect)
{
    ASSERT_EQ(run("synth --segments 12 --segment-seconds 60 --datasets trip --seed 3 --out " + p("raw")), 0);
    ASSERT_EQ(run("preprocess --input " + p("raw/trip.imu.csv") + " --labels " + p("raw/trip.labels.csv") +
                  " --out " + p("trip.features.csv")),
              0);
    const auto feat = lines(dir / "trip.features.csv");
    ASSERT_EQ(feat.size(), 1u + 12u * 60u * 120u);
    EXPECT_EQ(feat[0], "t,f1,f2,f3,f4,f5,valid,label");
    EXPECT_EQ(feat[1].substr(feat[1].rfind(',', feat[1].size() - 4)), ",0,-1");
    EXPECT_TRUE(fs::exists(dir / "trip.features.csv.config.json"));

    ASSERT_EQ(run("train --features " + p("trip.features.csv") + " --mask f3 --model " + p("m.model")), 0);
    std::ifstream mis(p("m.model"));
    const auto model = load_model(mis);
    EXPECT_EQ(model.mask, FeatureMask::from_features({3}));

    ASSERT_EQ(run("evaluate --model " + p("m.model") + " --features " + p("trip.features.csv") +
                  " --name validation --out " + p("eval")),
              0);
    const auto report = lines(dir / "eval" / "report.csv");
    ASSERT_EQ(report.size(), 2u);
    EXPECT_EQ(report[0] + '\n', table_csv_header());
    EXPECT_EQ(report[1].rfind("validation,4,|w|_bpf,", 0), 0u);
    EXPECT_TRUE(fs::exists(dir / "eval" / "run_config.json"));

    ASSERT_EQ(run("detect --model " + p("m.model") + " --input " + p("raw/trip.imu.csv") + " --out " + p("det.csv")),
              0);
    const auto det = lines(dir / "det.csv");
    ASSERT_EQ(det.size(), feat.size());
    EXPECT_EQ(det[0], "t,label,margin,valid");
    // Model and stream agree sample by sample with the in-process pipeline.
    std::ifstream fis(p("trip.features.csv"));
    const auto rows = read_feature_csv(fis);
    std::size_t agree = 0, valid = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].x.valid) continue;
        ++valid;
        const int label = std::stoi(det[i + 1].substr(det[i + 1].find(',') + 1));
        agree += label == to_int(predict(model, rows[i].x).label);
    }
    EXPECT_GT(valid, 0u);
    EXPECT_EQ(agree, valid);
}

TEST_F(Cli, SweepTopRowOnSeparableFeatures)
{
    write_f3_separable(p("train.csv"), 1);
    write_f3_separable(p("val.csv"), 2);
    write_f3_separable(p("test.csv"), 3);
    ASSERT_EQ(run("sweep --train " + p("train.csv") + " --validation " + p("val.csv") + " --test " + p("test.csv") +
                  " --train-stride 5 --save-models --out " + p("sweep")),
              0);
    const auto val = lines(dir / "sweep" / "sweep_validation.csv");
    ASSERT_EQ(val.size(), 32u);
    EXPECT_EQ(val[1].rfind("validation,4,|w|_bpf,100.000,", 0), 0u) << val[1];
    EXPECT_EQ(lines(dir / "sweep" / "sweep_test.csv").size(), 32u);
    for (const char* f : {"sweep_detailed.csv", "sweep_plot.csv", "sweep_table.txt", "run_config.json",
                          "models/mask_04.model", "models/mask_31.model"})
        EXPECT_TRUE(fs::exists(dir / "sweep" / f)) << f;
}

TEST_F(Cli, ConvergenceFailureExitCode)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    {
        std::ofstream os(p("noisy.csv"));
        write_feature_header(os, true);
        for (int i = 0; i < 3000; ++i) {
            FeatureRow r;
            r.x.t = i * 0.1;
            r.x.valid = true;
            for (auto& f : r.x.f) f = g(rng);
            r.label = (i / 7) % 2 ? Label::in_use : Label::not_in_use;
            write_feature_row(os, r, true);
        }
    }
    EXPECT_EQ(run("train --features " + p("noisy.csv") + " --train-stride 1 --C 1000 --tol 1e-15 --max-epochs 1 " +
                  "--model " + p("m.model")),
              3);
    EXPECT_EQ(run("train --features " + p("noisy.csv") + " --model " + p("ok.model")), 0);
}

TEST_F(Cli, ConfigFileEnvironmentAndOverrides)
{
    {
        std::ofstream os(p("cfg.json"));
        os << R"({"version": 1, "svm": {"C": 7.5, "mask": "f3,f4"}, "t_hold": 2.0})";
    }
    const std::string cli = HANDUSE_CLI;
    auto config_of = [&](const std::string& prefix, const std::string& args) {
        const std::string cmd = prefix + cli + " " + args + " config > " + p("out.json") + " 2>/dev/null";
        EXPECT_EQ(std::system(cmd.c_str()), 0);
        std::ifstream is(p("out.json"));
        return cli::from_json(cli::json::parse(is));
    };
    const auto from_file = config_of("", "--config " + p("cfg.json"));
    EXPECT_EQ(from_file.train.C, 7.5);
    EXPECT_EQ(from_file.mask, "f3,f4");
    EXPECT_EQ(from_file.eval.t_hold, 2.0);
    EXPECT_EQ(from_file.pipeline.band_low, 4.0);
    const auto from_env = config_of("HANDUSE_CONFIG=" + p("cfg.json") + " ", "");
    EXPECT_EQ(from_env.train.C, 7.5);
    const auto overridden = config_of("HANDUSE_CONFIG=" + p("cfg.json") + " ", "--C 0.5");
    EXPECT_EQ(overridden.train.C, 0.5);
    EXPECT_EQ(overridden.eval.t_hold, 2.0);

    {
        std::ofstream os(p("bad.json"));
        os << R"({"version": 2})";
    }
    EXPECT_EQ(run("--config " + p("bad.json") + " config"), 2);
}

TEST_F(Cli, FiltersListing)
{
    ASSERT_EQ(run("filters --out " + p("filters.txt")), 0);
    const auto text = slurp(dir / "filters.txt");
    EXPECT_NE(text.find("section,b0,b1,b2,a1,a2"), std::string::npos);
    EXPECT_NE(text.find("band-pass"), std::string::npos);
}
