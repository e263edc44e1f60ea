#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "handuse/error.hpp"

namespace handuse {

enum class FilterKind { low_pass, high_pass, band_pass };

inline const char* to_string(FilterKind k)
{
    switch (k) {
    case FilterKind::low_pass: return "low-pass";
    case FilterKind::high_pass: return "high-pass";
    case FilterKind::band_pass: return "band-pass";
    }
    return "?";
}

// Butterworth filter request. `cutoff` is the single cutoff of a LP/HP
// filter or the lower edge of a band-pass; `cutoff_high` is only used for
// band-pass. For band-pass `order` applies to each edge.
struct FilterSpec {
    FilterKind kind = FilterKind::low_pass;
    double cutoff = 1.0;
    double cutoff_high = 0.0;
    int order = 2;
    double fs = 120.0;

    static FilterSpec low_pass(double fc, int order, double fs) { return {FilterKind::low_pass, fc, 0.0, order, fs}; }
    static FilterSpec high_pass(double fc, int order, double fs) { return {FilterKind::high_pass, fc, 0.0, order, fs}; }
    static FilterSpec band_pass(double lo, double hi, int order, double fs) { return {FilterKind::band_pass, lo, hi, order, fs}; }

    double lowest_cutoff() const { return cutoff; }
    double highest_cutoff() const { return kind == FilterKind::band_pass ? cutoff_high : cutoff; }

    void validate() const
    {
        if (!(fs > 0.0) || !std::isfinite(fs))
            throw DesignError("sample rate must be > 0");
        if (order < 1 || order > 8)
            throw DesignError("filter order must be in [1, 8], got " + std::to_string(order));
        auto check = [&](double f) {
            if (!(f > 0.0) || !(f < 0.5 * fs))
                throw DesignError("cutoff " + std::to_string(f) + " Hz outside (0, fs/2) for fs = " +
                                  std::to_string(fs) + " Hz");
        };
        check(cutoff);
        if (kind == FilterKind::band_pass) {
            check(cutoff_high);
            if (!(cutoff < cutoff_high))
                throw DesignError("band-pass needs low cutoff < high cutoff");
        }
    }
};

// Second-order section, transposed direct form II:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
// First-order sections have b2 = a2 = 0.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double s1 = 0.0, s2 = 0.0;

    double step(double x)
    {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

    // Load the state a constant input `x` would have settled to; returns the output.
    double prime(double x)
    {
        const double y = dc_gain() * x;
        s2 = b2 * x - a2 * y;
        s1 = b1 * x - a1 * y + s2;
        return y;
    }

    void reset() { s1 = s2 = 0.0; }

    std::complex<double> response(double f, double fs) const
    {
        const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
        return (b0 + z1 * (b1 + z1 * b2)) / (1.0 + z1 * (a1 + z1 * a2));
    }

    // Largest pole magnitude of 1 + a1 z^-1 + a2 z^-2.
    double pole_radius() const
    {
        const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
        const std::complex<double> p1 = 0.5 * (-a1 + disc);
        const std::complex<double> p2 = 0.5 * (-a1 - disc);
        return std::max(std::abs(p1), std::abs(p2));
    }

    bool stable() const { return pole_radius() < 1.0; }
};

class Cascade {
public:
    Cascade() = default;
    explicit Cascade(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

    double step(double x)
    {
        for (auto& s : sections_) x = s.step(x);
        return x;
    }

    double prime(double x)
    {
        for (auto& s : sections_) x = s.prime(x);
        return x;
    }

    void reset()
    {
        for (auto& s : sections_) s.reset();
    }

    std::complex<double> response(double f, double fs) const
    {
        std::complex<double> h{1.0, 0.0};
        for (const auto& s : sections_) h *= s.response(f, fs);
        return h;
    }

    double magnitude(double f, double fs) const { return std::abs(response(f, fs)); }

    bool stable() const
    {
        for (const auto& s : sections_)
            if (!s.stable()) return false;
        return true;
    }

    const std::vector<Biquad>& sections() const { return sections_; }

    void append(const Cascade& other)
    {
        sections_.insert(sections_.end(), other.sections_.begin(), other.sections_.end());
    }

private:
    std::vector<Biquad> sections_;
};

namespace detail {

// Bilinear transform with the cutoff prewarped, so |H| = 1/sqrt(2) exactly at fc.
inline Cascade butterworth(bool high_pass, double fc, int order, double fs)
{
    const double k = std::tan(std::numbers::pi * fc / fs);
    std::vector<Biquad> sections;
    for (int i = 0; i < order / 2; ++i) {
        const double theta = std::numbers::pi * (order - 1.0 - 2.0 * i) / (2.0 * order);
        const double q = 1.0 / (2.0 * std::cos(theta));
        const double norm = 1.0 / (1.0 + k / q + k * k);
        Biquad s;
        if (high_pass) {
            s.b0 = norm;
            s.b1 = -2.0 * norm;
        } else {
            s.b0 = k * k * norm;
            s.b1 = 2.0 * s.b0;
        }
        s.b2 = s.b0;
        s.a1 = 2.0 * (k * k - 1.0) * norm;
        s.a2 = (1.0 - k / q + k * k) * norm;
        sections.push_back(s);
    }
    if (order % 2 == 1) {
        const double norm = 1.0 / (1.0 + k);
        Biquad s;
        if (high_pass) {
            s.b0 = norm;
            s.b1 = -norm;
        } else {
            s.b0 = k * norm;
            s.b1 = s.b0;
        }
        s.a1 = (k - 1.0) * norm;
        sections.push_back(s);
    }
    return Cascade(std::move(sections));
}

} // namespace detail

// Butterworth design. Band-pass is a high-pass at the lower edge followed by
// a low-pass at the upper edge, each of the requested order.
inline Cascade design_filter(const FilterSpec& spec)
{
    spec.validate();
    switch (spec.kind) {
    case FilterKind::low_pass: return detail::butterworth(false, spec.cutoff, spec.order, spec.fs);
    case FilterKind::high_pass: return detail::butterworth(true, spec.cutoff, spec.order, spec.fs);
    case FilterKind::band_pass: {
        Cascade c = detail::butterworth(true, spec.cutoff, spec.order, spec.fs);
        c.append(detail::butterworth(false, spec.cutoff_high, spec.order, spec.fs));
        return c;
    }
    }
    throw DesignError("unknown filter kind");
}

// Human-readable coefficient listing, one section per line, 17 significant digits.
inline std::string coefficient_listing(const std::string& name, const FilterSpec& spec, const Cascade& c)
{
    std::string out = "# " + name + ": " + to_string(spec.kind) + " order " + std::to_string(spec.order);
    char buf[256];
    if (spec.kind == FilterKind::band_pass)
        std::snprintf(buf, sizeof buf, " cutoffs %.17g %.17g Hz", spec.cutoff, spec.cutoff_high);
    else
        std::snprintf(buf, sizeof buf, " cutoff %.17g Hz", spec.cutoff);
    out += buf;
    std::snprintf(buf, sizeof buf, " fs %.17g Hz\n", spec.fs);
    out += buf;
    out += "section,b0,b1,b2,a1,a2\n";
    int i = 0;
    for (const auto& s : c.sections()) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i++, s.b0, s.b1, s.b2, s.a1, s.a2);
        out += buf;
    }
    return out;
}

} // namespace handuse
