#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "handuse/handuse.hpp"
#include "run_config.hpp"

using namespace handuse;

namespace {

std::string message_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(ImuCsv, RoundTripKeepsValuesAndRate)
{
    std::mt19937_64 rng(61);
    std::normal_distribution<double> g(0.0, 3.0);
    std::vector<ImuSample> xs;
    for (int i = 0; i < 500; ++i) xs.push_back({i / 120.0, g(rng), g(rng), g(rng), g(rng), g(rng), g(rng)});
    std::stringstream ss;
    write_imu_csv(ss, xs, 120.0);
    ImuCsvReader reader(ss);
    EXPECT_EQ(*reader.declared_fs(), 120.0);
    for (const auto& x : xs) {
        const auto y = reader.next();
        ASSERT_TRUE(y.has_value());
        EXPECT_NEAR(y->t, x.t, 1e-9 * (1.0 + x.t));
        EXPECT_NEAR(y->ax, x.ax, 1e-9 * std::abs(x.ax) + 1e-12);
        EXPECT_NEAR(y->gz, x.gz, 1e-9 * std::abs(x.gz) + 1e-12);
    }
    EXPECT_FALSE(reader.next().has_value());
}

TEST(ImuCsv, ErrorsNameTheLine)
{
    std::stringstream bad("t,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n0.1,0,zero,9.8,0,0,0\n");
    EXPECT_NE(message_of([&] { read_imu_csv(bad); }).find("line 3"), std::string::npos);
    std::stringstream nan_row("t,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,nan\n");
    const auto msg = message_of([&] { read_imu_csv(nan_row); });
    EXPECT_NE(msg.find("line 2"), std::string::npos);
    EXPECT_NE(msg.find("gz"), std::string::npos);
    std::stringstream short_row("t,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0\n");
    EXPECT_THROW(read_imu_csv(short_row), InputError);
    std::stringstream no_header("0,0,0,9.8,0,0,0\n");
    EXPECT_THROW(read_imu_csv(no_header), InputError);
    std::stringstream empty("");
    EXPECT_THROW(read_imu_csv(empty), InputError);
}

TEST(ImuCsv, RateMismatchIsAnError)
{
    std::stringstream ss("# fs=100\nt,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n");
    EXPECT_THROW(read_imu_csv(ss, 120.0), InputError);
    std::stringstream ok("# fs=120\nt,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n");
    EXPECT_EQ(read_imu_csv(ok, 120.0).size(), 1u);
    std::stringstream crlf("t,ax,ay,az,gx,gy,gz\r\n0,0,0,9.8,0,0,0\r\n");
    EXPECT_EQ(read_imu_csv(crlf).size(), 1u);
}

TEST(LabelCsv, RoundTripAndLookup)
{
    const std::vector<LabelInterval> iv = {{0.0, 60.0, Label::not_in_use}, {60.0, 120.0, Label::in_use}};
    std::stringstream ss;
    write_labels_csv(ss, iv);
    const auto track = read_labels_csv(ss);
    EXPECT_EQ(*track.at(0.0), Label::not_in_use);
    EXPECT_EQ(*track.at(59.99), Label::not_in_use);
    EXPECT_EQ(*track.at(60.0), Label::in_use);
    EXPECT_FALSE(track.at(120.0).has_value());
    EXPECT_FALSE(track.at(-1.0).has_value());
}

TEST(LabelCsv, RejectsMalformedAndOverlapping)
{
    std::stringstream bad_label("start_t,end_t,label\n0,10,2\n");
    EXPECT_NE(message_of([&] { read_labels_csv(bad_label); }).find("line 2"), std::string::npos);
    std::stringstream overlap("start_t,end_t,label\n0,10,1\n5,20,-1\n");
    EXPECT_THROW(read_labels_csv(overlap), InputError);
    std::stringstream reversed("start_t,end_t,label\n10,5,1\n");
    EXPECT_THROW(read_labels_csv(reversed), InputError);
}

TEST(FeatureCsv, RoundTripIsExact)
{
    std::mt19937_64 rng(62);
    std::lognormal_distribution<double> g(0.0, 3.0);
    std::vector<FeatureRow> rows;
    for (int i = 0; i < 200; ++i) {
        FeatureRow r;
        r.x.t = i * 0.25;
        for (auto& f : r.x.f) f = g(rng);
        r.x.valid = i % 3 != 0;
        if (i % 5 != 0) r.label = i % 2 ? Label::in_use : Label::not_in_use;
        rows.push_back(r);
    }
    std::stringstream ss;
    write_feature_header(ss, true);
    for (const auto& r : rows) write_feature_row(ss, r, true);
    bool has_label = false;
    const auto back = read_feature_csv(ss, &has_label);
    EXPECT_TRUE(has_label);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].x.f, rows[i].x.f);
        EXPECT_EQ(back[i].x.valid, rows[i].x.valid);
        EXPECT_EQ(back[i].label, rows[i].label);
    }
}

TEST(FeatureCsv, RejectsBadHeaderAndRows)
{
    std::stringstream bad("t,f1,f2\n");
    EXPECT_THROW(read_feature_csv(bad), InputError);
    std::stringstream short_row("t,f1,f2,f3,f4,f5,valid\n0,1,2,3\n");
    EXPECT_NE(message_of([&] { read_feature_csv(short_row); }).find("line 2"), std::string::npos);
    std::stringstream bad_label("t,f1,f2,f3,f4,f5,valid,label\n0,1,2,3,4,5,1,7\n");
    EXPECT_THROW(read_feature_csv(bad_label), InputError);
}

TEST(RunConfig, JsonRoundTrip)
{
    cli::RunConfig c;
    c.train.C = 3.5;
    c.pipeline.band_low = 3.0;
    c.mask = "f3,f4";
    c.amplitudes.usage_modulation = 0.25;
    c.train.seed = 77;
    const auto j = cli::to_json(c);
    const auto back = cli::from_json(cli::json::parse(j.dump()));
    EXPECT_EQ(cli::to_json(back).dump(), j.dump());
    EXPECT_EQ(back.train.C, 3.5);
    EXPECT_EQ(back.train.seed, 77u);
}

TEST(RunConfig, MissingFieldsKeepDefaultsAndVersionIsChecked)
{
    const auto c = cli::from_json(cli::json::parse(R"({"version": 1, "svm": {"C": 2.0}})"));
    EXPECT_EQ(c.train.C, 2.0);
    EXPECT_EQ(c.pipeline.band_high, 15.0);
    EXPECT_THROW(cli::from_json(cli::json::parse(R"({"version": 99})")), InputError);
}
