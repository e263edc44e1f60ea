#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "handuse/handuse.hpp"

namespace handuse::cli {

inline constexpr int kConfigVersion = 1;

// Everything a run depends on apart from its input files.
struct RunConfig {
    PipelineParams pipeline;
    FeatureParams features;
    EvalParams eval;
    TrainConfig train;
    std::size_t train_stride = 60;
    unsigned threads = 0;
    std::string mask = "all";
    SynthAmplitudes amplitudes;
    double segment_seconds = 60.0;
    std::size_t segments = 40;

    void validate() const
    {
        pipeline.validate();
        if (!(features.ratio_epsilon > 0.0)) throw InputError("ratio_epsilon must be > 0");
        if (!(eval.t_hold >= 0.0)) throw InputError("t_hold must be >= 0");
        if (eval.spike_max_len < 1) throw InputError("spike_max_len must be >= 1");
        train.validate();
        if (train_stride < 1) throw InputError("train_stride must be >= 1");
        FeatureMask::parse(mask);
        if (!(segment_seconds > 0.0)) throw InputError("segment_seconds must be > 0");
        ScenarioSpec probe;
        probe.amplitudes = amplitudes;
        probe.fs = pipeline.fs;
        probe.validate();
    }
};

using json = nlohmann::ordered_json;

inline json to_json(const RunConfig& c)
{
    const auto& p = c.pipeline;
    const auto& a = c.amplitudes;
    json j;
    j["version"] = kConfigVersion;
    j["fs"] = p.fs;
    j["filters"] = {
        {"band_low", p.band_low},
        {"band_high", p.band_high},
        {"band_order", p.band_order},
        {"split_low", p.split_low},
        {"split_high", p.split_high},
        {"split_order", p.split_order},
        {"gyro_low_pass", p.gyro_low_pass},
        {"gyro_low_pass_order", p.gyro_low_pass_order},
        {"debias", p.debias},
        {"debias_order", p.debias_order},
        {"variance_high_pass", p.variance_high_pass},
        {"variance_low_pass", p.variance_low_pass},
        {"variance_order", p.variance_order},
        {"warmup_periods", p.warmup_periods},
        {"gap_periods", p.gap_periods},
    };
    j["ratio_epsilon"] = c.features.ratio_epsilon;
    j["t_hold"] = c.eval.t_hold;
    j["spike_max_len"] = c.eval.spike_max_len;
    j["svm"] = {
        {"C", c.train.C},
        {"tol", c.train.tol},
        {"max_epochs", c.train.max_epochs},
        {"standardize", c.train.standardize},
        {"train_stride", c.train_stride},
        {"mask", c.mask},
    };
    j["seed"] = c.train.seed;
    j["threads"] = c.threads;
    j["synth"] = {
        {"segment_seconds", c.segment_seconds},
        {"segments", c.segments},
        {"vehicle_accel", a.vehicle_accel},
        {"holder_attenuation", a.holder_attenuation},
        {"road_accel", a.road_accel},
        {"engine_accel", a.engine_accel},
        {"usage_accel", a.usage_accel},
        {"usage_gyro", a.usage_gyro},
        {"usage_gyro_low", a.usage_gyro_low},
        {"usage_gyro_high", a.usage_gyro_high},
        {"vehicle_gyro", a.vehicle_gyro},
        {"accel_noise", a.accel_noise},
        {"gyro_noise", a.gyro_noise},
        {"usage_intensity_min", a.usage_intensity_min},
        {"usage_intensity_max", a.usage_intensity_max},
        {"usage_modulation", a.usage_modulation},
        {"vehicle_intensity_spread", a.vehicle_intensity_spread},
        {"tones_per_band", a.tones_per_band},
    };
    return j;
}

namespace detail {

template <class T>
void take(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("config field '") + key + "' has the wrong type");
    }
}

} // namespace detail

// Missing fields keep their defaults; unknown versions are rejected.
inline RunConfig from_json(const json& j)
{
    using detail::take;
    if (!j.is_object()) throw InputError("config must be a JSON object");
    int version = kConfigVersion;
    take(j, "version", version);
    if (version != kConfigVersion) throw InputError("unsupported config version " + std::to_string(version));

    RunConfig c;
    auto& p = c.pipeline;
    take(j, "fs", p.fs);
    if (j.contains("filters")) {
        const auto& f = j.at("filters");
        take(f, "band_low", p.band_low);
        take(f, "band_high", p.band_high);
        take(f, "band_order", p.band_order);
        take(f, "split_low", p.split_low);
        take(f, "split_high", p.split_high);
        take(f, "split_order", p.split_order);
        take(f, "gyro_low_pass", p.gyro_low_pass);
        take(f, "gyro_low_pass_order", p.gyro_low_pass_order);
        take(f, "debias", p.debias);
        take(f, "debias_order", p.debias_order);
        take(f, "variance_high_pass", p.variance_high_pass);
        take(f, "variance_low_pass", p.variance_low_pass);
        take(f, "variance_order", p.variance_order);
        take(f, "warmup_periods", p.warmup_periods);
        take(f, "gap_periods", p.gap_periods);
    }
    take(j, "ratio_epsilon", c.features.ratio_epsilon);
    take(j, "t_hold", c.eval.t_hold);
    take(j, "spike_max_len", c.eval.spike_max_len);
    if (j.contains("svm")) {
        const auto& s = j.at("svm");
        take(s, "C", c.train.C);
        take(s, "tol", c.train.tol);
        take(s, "max_epochs", c.train.max_epochs);
        take(s, "standardize", c.train.standardize);
        take(s, "train_stride", c.train_stride);
        take(s, "mask", c.mask);
    }
    take(j, "seed", c.train.seed);
    take(j, "threads", c.threads);
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        auto& a = c.amplitudes;
        take(s, "segment_seconds", c.segment_seconds);
        take(s, "segments", c.segments);
        take(s, "vehicle_accel", a.vehicle_accel);
        take(s, "holder_attenuation", a.holder_attenuation);
        take(s, "road_accel", a.road_accel);
        take(s, "engine_accel", a.engine_accel);
        take(s, "usage_accel", a.usage_accel);
        take(s, "usage_gyro", a.usage_gyro);
        take(s, "usage_gyro_low", a.usage_gyro_low);
        take(s, "usage_gyro_high", a.usage_gyro_high);
        take(s, "vehicle_gyro", a.vehicle_gyro);
        take(s, "accel_noise", a.accel_noise);
        take(s, "gyro_noise", a.gyro_noise);
        take(s, "usage_intensity_min", a.usage_intensity_min);
        take(s, "usage_intensity_max", a.usage_intensity_max);
        take(s, "usage_modulation", a.usage_modulation);
        take(s, "vehicle_intensity_spread", a.vehicle_intensity_spread);
        take(s, "tones_per_band", a.tones_per_band);
    }
    return c;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InputError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    return from_json(j);
}

} // namespace handuse::cli
