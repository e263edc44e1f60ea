#pragma once

#include <cmath>
#include <string>

#include "handuse/error.hpp"

namespace handuse {

// Default IMU sampling rate [Hz].
inline constexpr double kDefaultSampleRate = 120.0;
inline constexpr double kGravity = 9.81;

// One 6-axis reading. Accelerations are specific force in m/s^2 (gravity
// included), angular rates in rad/s.
struct ImuSample {
    double t = 0.0;
    double ax = 0.0, ay = 0.0, az = 0.0;
    double gx = 0.0, gy = 0.0, gz = 0.0;
};

struct NormSample {
    double t = 0.0;
    double a_norm = 0.0;
    double w_norm = 0.0;
};

class SampleRate {
public:
    explicit SampleRate(double hz = kDefaultSampleRate) : hz_(hz)
    {
        if (!(hz > 0.0) || !std::isfinite(hz))
            throw InputError("sample rate must be finite and > 0, got " + std::to_string(hz));
    }

    double hz() const { return hz_; }
    double period() const { return 1.0 / hz_; }
    double nyquist() const { return 0.5 * hz_; }

    // True when every cutoff up to `highest_cutoff` is representable.
    bool admits(double highest_cutoff) const { return hz_ > 2.0 * highest_cutoff; }

private:
    double hz_;
};

// Throws InputError naming the first offending channel.
inline void validate(const ImuSample& s)
{
    struct Channel { const char* name; double v; };
    const Channel channels[] = {{"t", s.t},   {"ax", s.ax}, {"ay", s.ay}, {"az", s.az},
                                {"gx", s.gx}, {"gy", s.gy}, {"gz", s.gz}};
    for (const auto& c : channels) {
        if (!std::isfinite(c.v))
            throw InputError(std::string("rejected sample: channel ") + c.name + " is not finite");
    }
    if (s.t < 0.0)
        throw InputError("rejected sample: negative timestamp " + std::to_string(s.t));
}

// Euclidean norms of the accelerometer and gyroscope vectors. Orientation
// independent: any axis permutation or reflection leaves the result unchanged.
inline NormSample compute_norms(const ImuSample& s)
{
    validate(s);
    return {s.t, std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az),
            std::sqrt(s.gx * s.gx + s.gy * s.gy + s.gz * s.gz)};
}

} // namespace handuse
