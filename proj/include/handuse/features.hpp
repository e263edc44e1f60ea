#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handuse/chains.hpp"

namespace handuse {

inline constexpr std::size_t kNumFeatures = 5;

// Canonical feature order:
//   f1 Var(|a|_bpf), f2 Var(|a|_spf), f3 Var(|w|_bpf), f4 Var(|w|_lpf),
//   f5 mean of Var(|a|_bpf) / Var(|a|_spf)
inline const std::array<const char*, kNumFeatures> kFeatureNames = {"|a|_bpf", "|a|_spf", "|w|_bpf", "|w|_lpf",
                                                                    "ratio"};

enum class Label : int { not_in_use = -1, in_use = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }

inline Label label_from_int(int v)
{
    if (v == 1) return Label::in_use;
    if (v == -1) return Label::not_in_use;
    throw InputError("label must be +1 or -1, got " + std::to_string(v));
}

struct FeatureVector {
    double t = 0.0;
    std::array<double, kNumFeatures> f{};
    bool valid = false;
};

struct LabeledFeature {
    FeatureVector x;
    Label label = Label::not_in_use;
};

// Non-empty subset of the five features. Bit k selects f(k+1); the index of
// a mask in canonical order equals its bit pattern (1..31).
class FeatureMask {
public:
    constexpr FeatureMask() = default;

    static FeatureMask from_bits(unsigned bits)
    {
        if (bits == 0 || bits > 31) throw InputError("feature mask must be in [1, 31], got " + std::to_string(bits));
        FeatureMask m;
        m.bits_ = static_cast<std::uint8_t>(bits);
        return m;
    }

    static FeatureMask all() { return from_bits(31); }

    // From 1-based feature numbers, e.g. {3, 4}.
    static FeatureMask from_features(std::initializer_list<int> features)
    {
        unsigned bits = 0;
        for (int f : features) {
            if (f < 1 || f > 5) throw InputError("feature number out of range: " + std::to_string(f));
            bits |= 1u << (f - 1);
        }
        return from_bits(bits);
    }

    // Parses "f1,f3", "1,3" or a bare index "5".
    static FeatureMask parse(const std::string& text);

    unsigned bits() const { return bits_; }
    unsigned index() const { return bits_; }
    bool has(std::size_t feature) const { return (bits_ >> feature) & 1u; }
    std::size_t size() const { return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits_))); }

    bool accel_only() const { return (bits_ & 0b01100u) == 0; }
    bool gyro_only() const { return (bits_ & 0b10011u) == 0; }

    std::string name() const
    {
        std::string out;
        for (std::size_t k = 0; k < kNumFeatures; ++k) {
            if (!has(k)) continue;
            if (!out.empty()) out += '+';
            out += 'f' + std::to_string(k + 1);
        }
        return out;
    }

    // Signal names joined with ' ', as in the report's "Features Used" column.
    std::string signals() const
    {
        std::string out;
        for (std::size_t k = 0; k < kNumFeatures; ++k) {
            if (!has(k)) continue;
            if (!out.empty()) out += ' ';
            out += kFeatureNames[k];
        }
        return out;
    }

    friend bool operator==(FeatureMask a, FeatureMask b) { return a.bits_ == b.bits_; }
    friend auto operator<=>(FeatureMask a, FeatureMask b) { return a.bits_ <=> b.bits_; }

private:
    std::uint8_t bits_ = 31;
};

inline FeatureMask FeatureMask::parse(const std::string& text)
{
    if (text == "all") return all();
    unsigned bits = 0;
    bool list = text.find(',') != std::string::npos || text.find('f') != std::string::npos;
    std::size_t pos = 0;
    try {
        if (!list) return from_bits(static_cast<unsigned>(std::stoul(text)));
        while (pos <= text.size()) {
            auto end = text.find(',', pos);
            if (end == std::string::npos) end = text.size();
            std::string tok = text.substr(pos, end - pos);
            if (!tok.empty() && (tok[0] == 'f' || tok[0] == 'F')) tok.erase(0, 1);
            const int f = std::stoi(tok);
            if (f < 1 || f > 5) throw InputError("feature number out of range in mask '" + text + "'");
            bits |= 1u << (f - 1);
            pos = end + 1;
        }
    } catch (const std::logic_error&) {
        throw InputError("cannot parse feature mask '" + text + "'");
    }
    return from_bits(bits);
}

// All 31 masks in canonical (binary counting) order.
inline std::vector<FeatureMask> enumerate_masks()
{
    std::vector<FeatureMask> out;
    out.reserve(31);
    for (unsigned b = 1; b <= 31; ++b) out.push_back(FeatureMask::from_bits(b));
    return out;
}

inline std::vector<double> apply_mask(const FeatureVector& v, FeatureMask m)
{
    std::vector<double> out;
    out.reserve(m.size());
    for (std::size_t k = 0; k < kNumFeatures; ++k)
        if (m.has(k)) out.push_back(v.f[k]);
    return out;
}

// Classifier numbers used in the published comparison table, mapped onto masks.
inline const std::map<int, FeatureMask>& published_mask_aliases()
{
    static const std::map<int, FeatureMask> aliases = {
        {22, FeatureMask::from_features({3})},
        {24, FeatureMask::from_features({3, 4})},
        {5, FeatureMask::from_features({2, 3, 4})},
        {1, FeatureMask::from_features({2, 3})},
        {2, FeatureMask::from_features({1, 3})},
        {8, FeatureMask::from_features({1})},
    };
    return aliases;
}

inline std::optional<FeatureMask> resolve_published_alias(int classifier)
{
    const auto& a = published_mask_aliases();
    auto it = a.find(classifier);
    if (it == a.end()) return std::nullopt;
    return it->second;
}

struct FeatureParams {
    double ratio_epsilon = 1e-6; // (m/s^2)^2, floor of the ratio denominator
};

// Smoothed ratio Var(|a|_bpf) / max(Var(|a|_spf), eps).
class RatioFeature {
public:
    RatioFeature(const PipelineParams& p, double epsilon) : smoother_(p), epsilon_(epsilon)
    {
        if (!(epsilon > 0.0)) throw InputError("ratio epsilon must be > 0");
    }

    SmootherChain::Output step(double v_bpf, double v_spf) { return smoother_.step(v_bpf / std::max(v_spf, epsilon_)); }
    void reset() { smoother_.reset(); }
    double epsilon() const { return epsilon_; }

private:
    SmootherChain smoother_;
    double epsilon_;
};

// Filtered signals -> five-feature stream, one vector per sample.
class FeatureExtractor {
public:
    FeatureExtractor(const PipelineParams& p, const FeatureParams& fp)
        : v_{VarianceChain(p), VarianceChain(p), VarianceChain(p), VarianceChain(p)}, ratio_(p, fp.ratio_epsilon)
    {
    }

    FeatureVector step(const FilteredSignals& s)
    {
        FeatureVector out;
        out.t = s.t;
        const auto v1 = v_[0].step(s.a_bpf);
        const auto v2 = v_[1].step(s.a_spf);
        const auto v3 = v_[2].step(s.w_bpf);
        const auto v4 = v_[3].step(s.w_lpf);
        const auto r = ratio_.step(v1.value, v2.value);
        out.f = {v1.value, v2.value, v3.value, v4.value, r.value};
        out.valid = s.valid && v1.valid && v2.valid && v3.valid && v4.valid && r.valid;
        return out;
    }

    void reset()
    {
        for (auto& c : v_) c.reset();
        ratio_.reset();
    }

    std::size_t clamped_count() const
    {
        std::size_t n = 0;
        for (const auto& c : v_) n += c.clamped_count();
        return n;
    }

private:
    std::array<VarianceChain, 4> v_;
    RatioFeature ratio_;
};

} // namespace handuse
