#pragma once

#include <cstddef>

#include "handuse/features.hpp"

namespace handuse {

// Raw IMU samples -> feature vectors. Memory is constant in stream length.
//
// Timestamps must be non-decreasing. A gap larger than gap_periods sample
// periods is a stream break: every filter is reset and the warm-up restarts.
class FeaturePipeline {
public:
    explicit FeaturePipeline(const PipelineParams& p = {}, const FeatureParams& fp = {})
        : params_((p.validate(), p)), bank_(p), extractor_(p, fp), max_gap_(p.gap_periods / p.fs)
    {
    }

    FeatureVector push(const ImuSample& s)
    {
        const NormSample n = compute_norms(s);
        if (started_) {
            if (n.t < last_t_)
                throw InputError("timestamps must be non-decreasing (" + std::to_string(n.t) + " after " +
                                 std::to_string(last_t_) + ")");
            if (n.t - last_t_ > max_gap_) {
                bank_.reset();
                extractor_.reset();
                ++breaks_;
            }
        }
        started_ = true;
        last_t_ = n.t;
        return extractor_.step(bank_.step(n));
    }

    std::size_t stream_breaks() const { return breaks_; }
    std::size_t clamped_variances() const { return extractor_.clamped_count(); }
    const PipelineParams& params() const { return params_; }

private:
    PipelineParams params_;
    FilterBank bank_;
    FeatureExtractor extractor_;
    double max_gap_;
    double last_t_ = 0.0;
    bool started_ = false;
    std::size_t breaks_ = 0;
};

} // namespace handuse
