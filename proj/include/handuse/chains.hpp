#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "handuse/filter.hpp"
#include "handuse/imu.hpp"

namespace handuse {

// Cutoffs and orders of every filter in the preprocessing pipeline.
struct PipelineParams {
    double fs = kDefaultSampleRate;

    double band_low = 4.0;    // band-pass lower edge, acc and gyro
    double band_high = 15.0;  // band-pass upper edge
    int band_order = 2;       // per edge

    double split_low = 4.0;   // a_spf low-pass branch
    double split_high = 15.0; // a_spf high-pass branch
    int split_order = 4;

    double gyro_low_pass = 20.0;
    int gyro_low_pass_order = 2;

    double debias = 0.05;
    int debias_order = 1;

    double variance_high_pass = 0.01;
    double variance_low_pass = 0.1;
    int variance_order = 1;

    // Outputs are flagged invalid for warmup_periods / (lowest cutoff) seconds.
    double warmup_periods = 3.0;
    // A timestamp gap above gap_periods sample periods resets all filter state.
    double gap_periods = 2.5;

    double highest_cutoff() const
    {
        return std::max({band_low, band_high, split_low, split_high, gyro_low_pass, debias, variance_high_pass,
                         variance_low_pass});
    }

    void validate() const
    {
        SampleRate rate(fs);
        if (!rate.admits(highest_cutoff()))
            throw DesignError("fs = " + std::to_string(fs) + " Hz cannot represent a " +
                              std::to_string(highest_cutoff()) + " Hz cutoff");
        if (!(warmup_periods >= 0.0)) throw DesignError("warmup_periods must be >= 0");
        if (!(gap_periods > 1.0)) throw DesignError("gap_periods must be > 1");
        // Exercise every design once so bad orders/cutoffs surface here.
        for (const auto& spec : all_specs()) spec.second.validate();
    }

    FilterSpec band_spec() const { return FilterSpec::band_pass(band_low, band_high, band_order, fs); }
    FilterSpec split_low_spec() const { return FilterSpec::low_pass(split_low, split_order, fs); }
    FilterSpec split_high_spec() const { return FilterSpec::high_pass(split_high, split_order, fs); }
    FilterSpec gyro_low_pass_spec() const { return FilterSpec::low_pass(gyro_low_pass, gyro_low_pass_order, fs); }
    FilterSpec debias_spec() const { return FilterSpec::high_pass(debias, debias_order, fs); }
    FilterSpec variance_high_pass_spec() const { return FilterSpec::high_pass(variance_high_pass, variance_order, fs); }
    FilterSpec variance_low_pass_spec() const { return FilterSpec::low_pass(variance_low_pass, variance_order, fs); }

    std::vector<std::pair<std::string, FilterSpec>> all_specs() const
    {
        return {{"band_pass", band_spec()},
                {"split_low_pass", split_low_spec()},
                {"split_high_pass", split_high_spec()},
                {"gyro_low_pass", gyro_low_pass_spec()},
                {"debias_high_pass", debias_spec()},
                {"variance_high_pass", variance_high_pass_spec()},
                {"variance_low_pass", variance_low_pass_spec()}};
    }

    std::size_t warmup_samples(double lowest_cutoff) const
    {
        return static_cast<std::size_t>(std::ceil(warmup_periods / lowest_cutoff * fs));
    }
};

// Coefficient listing of every designed filter.
inline std::string coefficient_listing(const PipelineParams& p)
{
    std::string out;
    for (const auto& [name, spec] : p.all_specs()) out += coefficient_listing(name, spec, design_filter(spec));
    return out;
}

// Shared warm-up bookkeeping: a chain is valid once `needed` samples have
// passed since the last reset.
class WarmupCounter {
public:
    WarmupCounter() = default;
    explicit WarmupCounter(std::size_t needed) : needed_(needed) {}

    void reset() { seen_ = 0; }
    void tick() { if (seen_ < needed_) ++seen_; }
    bool valid() const { return seen_ >= needed_; }
    std::size_t needed() const { return needed_; }

private:
    std::size_t needed_ = 0;
    std::size_t seen_ = 0;
};

// Base for the single-input streaming chains. Derived classes implement
// run() and prime_with(); the first sample after a reset primes the state.
template <class Derived>
class StreamChain {
public:
    struct Output {
        double value;
        bool valid;
    };

    Output step(double x)
    {
        auto& self = static_cast<Derived&>(*this);
        double y;
        if (!primed_) {
            y = self.prime_with(x);
            primed_ = true;
        } else {
            y = self.run(x);
        }
        warmup_.tick();
        return {y, warmup_.valid()};
    }

    void reset()
    {
        primed_ = false;
        warmup_.reset();
    }

    std::size_t warmup_samples() const { return warmup_.needed(); }

protected:
    explicit StreamChain(std::size_t warmup) : warmup_(warmup) {}

private:
    WarmupCounter warmup_;
    bool primed_ = false;
};

// |a|_bpf and |w|_bpf: band-pass between band_low and band_high.
class BandPassChain : public StreamChain<BandPassChain> {
public:
    explicit BandPassChain(const PipelineParams& p)
        : StreamChain(p.warmup_samples(p.band_low)), bp_(design_filter(p.band_spec()))
    {
    }

    double run(double x) { return bp_.step(x); }
    double prime_with(double x) { return bp_.prime(x); }

    const Cascade& filter() const { return bp_; }

private:
    Cascade bp_;
};

// |a|_spf: low-pass and high-pass branches in parallel, summed, then debiased.
class SplitChain : public StreamChain<SplitChain> {
public:
    explicit SplitChain(const PipelineParams& p)
        : StreamChain(p.warmup_samples(std::min(p.debias, p.split_low))),
          lp_(design_filter(p.split_low_spec())),
          hp_(design_filter(p.split_high_spec())),
          debias_(design_filter(p.debias_spec()))
    {
    }

    double run(double x) { return debias_.step(lp_.step(x) + hp_.step(x)); }
    double prime_with(double x) { return debias_.prime(lp_.prime(x) + hp_.prime(x)); }

    std::complex<double> response(double f, double fs) const
    {
        return (lp_.response(f, fs) + hp_.response(f, fs)) * debias_.response(f, fs);
    }

    bool stable() const { return lp_.stable() && hp_.stable() && debias_.stable(); }

private:
    Cascade lp_, hp_, debias_;
};

// |w|_lpf: low-pass then debias.
class LowPassChain : public StreamChain<LowPassChain> {
public:
    explicit LowPassChain(const PipelineParams& p)
        : StreamChain(p.warmup_samples(p.debias)),
          lp_(design_filter(p.gyro_low_pass_spec())),
          debias_(design_filter(p.debias_spec()))
    {
    }

    double run(double x) { return debias_.step(lp_.step(x)); }
    double prime_with(double x) { return debias_.prime(lp_.prime(x)); }

    std::complex<double> response(double f, double fs) const
    {
        return lp_.response(f, fs) * debias_.response(f, fs);
    }

    bool stable() const { return lp_.stable() && debias_.stable(); }

private:
    Cascade lp_, debias_;
};

// Streaming variance: high-pass to remove the mean, square, low-pass to take
// the expectation. Negative outputs (smoother overshoot) are clamped to 0 and
// counted.
class VarianceChain : public StreamChain<VarianceChain> {
public:
    explicit VarianceChain(const PipelineParams& p)
        : StreamChain(p.warmup_samples(std::min(p.variance_high_pass, p.variance_low_pass))),
          hp_(design_filter(p.variance_high_pass_spec())),
          lp_(design_filter(p.variance_low_pass_spec()))
    {
    }

    double run(double x)
    {
        const double d = hp_.step(x);
        return clamp(lp_.step(d * d));
    }

    double prime_with(double x)
    {
        const double d = hp_.prime(x);
        return clamp(lp_.prime(d * d));
    }

    std::size_t clamped_count() const { return clamped_; }

private:
    double clamp(double v)
    {
        if (v < 0.0) {
            ++clamped_;
            return 0.0;
        }
        return v;
    }

    Cascade hp_, lp_;
    std::size_t clamped_ = 0;
};

// The 0.1 Hz smoother on its own (used for the ratio feature).
class SmootherChain : public StreamChain<SmootherChain> {
public:
    explicit SmootherChain(const PipelineParams& p)
        : StreamChain(p.warmup_samples(p.variance_low_pass)), lp_(design_filter(p.variance_low_pass_spec()))
    {
    }

    double run(double x) { return lp_.step(x); }
    double prime_with(double x) { return lp_.prime(x); }

private:
    Cascade lp_;
};

struct FilteredSignals {
    double t = 0.0;
    double a_bpf = 0.0;
    double a_spf = 0.0;
    double w_lpf = 0.0;
    double w_bpf = 0.0;
    bool valid = false;
};

// The four preprocessing chains applied to one norm stream.
class FilterBank {
public:
    explicit FilterBank(const PipelineParams& p) : a_bpf_(p), a_spf_(p), w_lpf_(p), w_bpf_(p) {}

    FilteredSignals step(const NormSample& n)
    {
        const auto ab = a_bpf_.step(n.a_norm);
        const auto as = a_spf_.step(n.a_norm);
        const auto wl = w_lpf_.step(n.w_norm);
        const auto wb = w_bpf_.step(n.w_norm);
        return {n.t, ab.value, as.value, wl.value, wb.value, ab.valid && as.valid && wl.valid && wb.valid};
    }

    void reset()
    {
        a_bpf_.reset();
        a_spf_.reset();
        w_lpf_.reset();
        w_bpf_.reset();
    }

private:
    BandPassChain a_bpf_;
    SplitChain a_spf_;
    LowPassChain w_lpf_;
    BandPassChain w_bpf_;
};

} // namespace handuse
