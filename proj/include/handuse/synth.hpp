#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "handuse/features.hpp"
#include "handuse/imu.hpp"

namespace handuse {

// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then the
// standard 30/27/31 xor-shift-multiply finaliser. Uniform doubles take the
// top 53 bits. Fully specified, so streams are reproducible across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one draw per call.
    double normal()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

// Derives an independent seed for sub-stream `index` of `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    return g.next();
}

enum class VehicleState { engine_off, engine_on, moving };
enum class PhoneState { in_use, passenger_seat, phone_holder };

inline const char* to_string(VehicleState v)
{
    switch (v) {
    case VehicleState::engine_off: return "engine-off";
    case VehicleState::engine_on: return "engine-on";
    case VehicleState::moving: return "moving";
    }
    return "?";
}

inline const char* to_string(PhoneState p)
{
    switch (p) {
    case PhoneState::in_use: return "using";
    case PhoneState::passenger_seat: return "passenger-seat";
    case PhoneState::phone_holder: return "phone-holder";
    }
    return "?";
}

inline VehicleState parse_vehicle_state(const std::string& s)
{
    if (s == "engine-off") return VehicleState::engine_off;
    if (s == "engine-on") return VehicleState::engine_on;
    if (s == "moving") return VehicleState::moving;
    throw InputError("unknown vehicle state '" + s + "' (engine-off, engine-on, moving)");
}

inline PhoneState parse_phone_state(const std::string& s)
{
    if (s == "using") return PhoneState::in_use;
    if (s == "passenger-seat") return PhoneState::passenger_seat;
    if (s == "phone-holder") return PhoneState::phone_holder;
    throw InputError("unknown phone state '" + s + "' (using, passenger-seat, phone-holder)");
}

// RMS amplitudes of each generated component. Accelerometer bands act along
// the gravity direction, so they show up one-to-one in |a|.
struct SynthAmplitudes {
    double vehicle_accel = 0.6;       // m/s^2, 1-3 Hz, moving only
    double holder_attenuation = 0.4;  // applied to vehicle/road bands in the holder
    double road_accel = 0.1;          // m/s^2, 3-20 Hz road texture, moving only
    double engine_accel = 0.05;       // m/s^2, 25-35 Hz, engine on or moving
    double usage_accel = 0.45;        // m/s^2, 4-12 Hz, using only
    double usage_gyro = 0.7;          // rad/s per axis, using only
    double usage_gyro_low = 0.5;      // Hz, band of the usage gyro content
    double usage_gyro_high = 20.0;
    double vehicle_gyro = 0.12;       // rad/s per axis, 0.1-2 Hz, moving only
    double accel_noise = 0.02;        // m/s^2 per axis, white
    double gyro_noise = 0.004;        // rad/s per axis, white
    double usage_intensity_min = 1.0; // per-segment usage factor, log-uniform in [min, max]
    double usage_intensity_max = 1.6;
    double usage_modulation = 1.0;    // depth of the slow (0.05-0.5 Hz) burst envelope on usage content
    double vehicle_intensity_spread = 0.5; // per-segment vehicle factor in [1 - spread, 1 + spread]
    int tones_per_band = 12;
};

struct ScenarioSpec {
    VehicleState vehicle = VehicleState::engine_off;
    PhoneState phone = PhoneState::passenger_seat;
    double duration = 60.0;
    double fs = kDefaultSampleRate;
    std::uint64_t seed = 0;
    // Seed of the vehicle-borne components (vehicle, road, engine). Segments
    // sharing it continue the same vibration across a phone-state change.
    std::optional<std::uint64_t> environment_seed;
    SynthAmplitudes amplitudes;

    Label label() const { return phone == PhoneState::in_use ? Label::in_use : Label::not_in_use; }

    std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(duration * fs)); }

    void validate() const
    {
        if (!(duration > 0.0) || !std::isfinite(duration)) throw InputError("scenario duration must be > 0");
        if (!(fs > 0.0) || !std::isfinite(fs)) throw InputError("scenario fs must be > 0");
        if (amplitudes.tones_per_band < 1) throw InputError("tones_per_band must be >= 1");
        if (!(amplitudes.usage_intensity_min > 0.0) ||
            !(amplitudes.usage_intensity_max >= amplitudes.usage_intensity_min))
            throw InputError("usage intensity range must satisfy 0 < min <= max");
        if (!(amplitudes.usage_gyro_low > 0.0) || !(amplitudes.usage_gyro_high > amplitudes.usage_gyro_low))
            throw InputError("usage gyro band must satisfy 0 < low < high");
        if (!(amplitudes.usage_modulation >= 0.0)) throw InputError("usage modulation must be >= 0");
        if (!(amplitudes.vehicle_intensity_spread >= 0.0) || !(amplitudes.vehicle_intensity_spread < 1.0))
            throw InputError("vehicle intensity spread must be in [0, 1)");
    }
};

namespace detail {

// Sum of randomly placed tones in [lo, hi] with total RMS `rms`. Tones
// above Nyquist are dropped.
class BandNoise {
public:
    BandNoise() = default;
    BandNoise(SplitMix64& rng, double lo, double hi, double rms, int tones, double fs)
    {
        if (rms <= 0.0) return;
        const double amp = rms * std::sqrt(2.0 / tones);
        for (int k = 0; k < tones; ++k) {
            Tone t{2.0 * std::numbers::pi * rng.uniform(lo, hi), rng.uniform(0.0, 2.0 * std::numbers::pi), amp};
            if (t.omega < std::numbers::pi * fs) tones_.push_back(t);
        }
    }

    double operator()(double t) const
    {
        double s = 0.0;
        for (const auto& tone : tones_) s += tone.amp * std::sin(tone.omega * t + tone.phase);
        return s;
    }

private:
    struct Tone {
        double omega, phase, amp;
    };
    std::vector<Tone> tones_;
};

} // namespace detail

// Synthetic IMU stream for one scenario, timestamps starting at t0.
inline std::vector<ImuSample> generate(const ScenarioSpec& spec, double t0 = 0.0)
{
    spec.validate();
    const SynthAmplitudes& a = spec.amplitudes;
    SplitMix64 rng(spec.seed);
    const int tones = a.tones_per_band;
    const bool moving = spec.vehicle == VehicleState::moving;
    const bool engine = spec.vehicle != VehicleState::engine_off;
    const bool in_use = spec.phone == PhoneState::in_use;
    const double mount = spec.phone == PhoneState::phone_holder ? a.holder_attenuation : 1.0;

    SplitMix64 env(spec.environment_seed.value_or(derive_seed(spec.seed, 0xE4)));

    const double usage_factor =
        std::exp(rng.uniform(std::log(a.usage_intensity_min), std::log(a.usage_intensity_max)));
    const double vehicle_factor =
        env.uniform(1.0 - a.vehicle_intensity_spread, 1.0 + a.vehicle_intensity_spread);

    // Phone orientation: uniformly random direction of gravity in the sensor frame.
    const double uz = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - uz * uz));
    const std::array<double, 3> up = {r * std::cos(phi), r * std::sin(phi), uz};

    using detail::BandNoise;
    const BandNoise vehicle(env, 1.0, 3.0, moving ? a.vehicle_accel * vehicle_factor * mount : 0.0, tones, spec.fs);
    const BandNoise road(env, 3.0, 20.0, moving ? a.road_accel * vehicle_factor * mount : 0.0, tones, spec.fs);
    const BandNoise engine_vib(env, 25.0, 35.0, engine ? a.engine_accel : 0.0, tones, spec.fs);
    std::array<BandNoise, 3> gyro_usage, gyro_vehicle;
    for (int k = 0; k < 3; ++k)
        gyro_vehicle[k] =
            BandNoise(env, 0.1, 2.0, moving ? a.vehicle_gyro * vehicle_factor * mount : 0.0, tones, spec.fs);
    const BandNoise usage(rng, 4.0, 12.0, in_use ? a.usage_accel * usage_factor : 0.0, tones, spec.fs);
    const BandNoise burst(rng, 0.05, 0.5, in_use ? a.usage_modulation : 0.0, tones, spec.fs);
    for (int k = 0; k < 3; ++k)
        gyro_usage[k] = BandNoise(rng, a.usage_gyro_low, a.usage_gyro_high, in_use ? a.usage_gyro * usage_factor : 0.0,
                                  tones, spec.fs);

    const std::size_t n = spec.sample_count();
    std::vector<ImuSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tl = static_cast<double>(i) / spec.fs;
        const double ta = t0 + tl; // vehicle-borne tones run on trip time
        const double envelope = std::max(0.0, 1.0 + burst(tl)); // interaction comes in bursts
        const double along = kGravity + vehicle(ta) + road(ta) + engine_vib(ta) + envelope * usage(tl);
        ImuSample s;
        s.t = ta;
        s.ax = along * up[0] + a.accel_noise * rng.normal();
        s.ay = along * up[1] + a.accel_noise * rng.normal();
        s.az = along * up[2] + a.accel_noise * rng.normal();
        s.gx = envelope * gyro_usage[0](tl) + gyro_vehicle[0](ta) + a.gyro_noise * rng.normal();
        s.gy = envelope * gyro_usage[1](tl) + gyro_vehicle[1](ta) + a.gyro_noise * rng.normal();
        s.gz = envelope * gyro_usage[2](tl) + gyro_vehicle[2](ta) + a.gyro_noise * rng.normal();
        out.push_back(s);
    }
    return out;
}

struct ScheduleEntry {
    double start = 0.0;
    ScenarioSpec spec;
};

// Ordered, contiguous segments.
struct ScenarioSchedule {
    std::vector<ScheduleEntry> entries;

    void validate() const
    {
        if (entries.empty()) throw InputError("schedule is empty");
        for (std::size_t k = 0; k < entries.size(); ++k) {
            entries[k].spec.validate();
            if (entries[k].spec.fs != entries[0].spec.fs) throw InputError("schedule segments must share fs");
            if (k == 0) continue;
            const auto& prev = entries[k - 1];
            const double prev_end = prev.start + static_cast<double>(prev.spec.sample_count()) / prev.spec.fs;
            const double tol = 0.5 / prev.spec.fs;
            if (entries[k].start < prev_end - tol)
                throw InputError("schedule segment " + std::to_string(k) + " overlaps the previous one");
            if (entries[k].start > prev_end + tol)
                throw InputError("schedule segment " + std::to_string(k) + " leaves a gap after the previous one");
        }
    }
};

struct LabelInterval {
    double start = 0.0;
    double end = 0.0; // exclusive
    Label label = Label::not_in_use;
};

struct LabelTransition {
    double t = 0.0;
    Label from = Label::not_in_use;
    Label to = Label::not_in_use;
};

struct Trip {
    std::vector<ImuSample> samples;
    std::vector<LabelInterval> labels;
    std::vector<LabelTransition> transitions;
};

// Concatenates the schedule's segments. Adjacent segments with the same
// label share one label interval.
inline Trip generate_trip(const ScenarioSchedule& schedule)
{
    schedule.validate();
    Trip trip;
    double next_start = schedule.entries.front().start;
    for (const auto& e : schedule.entries) {
        const double t0 = next_start;
        auto seg = generate(e.spec, t0);
        const double end = t0 + static_cast<double>(seg.size()) / e.spec.fs;
        const Label label = e.spec.label();
        if (!trip.labels.empty() && trip.labels.back().label == label) {
            trip.labels.back().end = end;
        } else {
            if (!trip.labels.empty()) trip.transitions.push_back({t0, trip.labels.back().label, label});
            trip.labels.push_back({t0, end, label});
        }
        trip.samples.insert(trip.samples.end(), seg.begin(), seg.end());
        next_start = end;
    }
    return trip;
}

// Back-to-back segments of `segment_seconds` alternating non-use and use
// (non-use first). Each use segment shares the vehicle state and vibration
// of the segment before it; non-use segments cycle through all six (vehicle, placement)
// combinations.
inline ScenarioSchedule alternating_schedule(std::size_t segments, double segment_seconds, std::uint64_t seed,
                                             double fs = kDefaultSampleRate, const SynthAmplitudes& amps = {})
{
    static constexpr VehicleState vehicles[] = {VehicleState::moving, VehicleState::engine_on,
                                                VehicleState::engine_off};
    static constexpr PhoneState idle[] = {PhoneState::passenger_seat, PhoneState::phone_holder};
    ScenarioSchedule s;
    for (std::size_t k = 0; k < segments; ++k) {
        const std::size_t pair = k / 2;
        ScheduleEntry e;
        e.start = static_cast<double>(k) * segment_seconds;
        e.spec.vehicle = vehicles[pair % 3];
        e.spec.phone = k % 2 == 1 ? PhoneState::in_use : idle[(pair / 3) % 2];
        e.spec.duration = segment_seconds;
        e.spec.fs = fs;
        e.spec.seed = derive_seed(seed, k);
        e.spec.environment_seed = derive_seed(seed, 1000000 + pair);
        e.spec.amplitudes = amps;
        s.entries.push_back(e);
    }
    return s;
}

} // namespace handuse
