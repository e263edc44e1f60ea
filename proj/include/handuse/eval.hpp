#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "handuse/features.hpp"

namespace handuse {

struct TraceSample {
    double t = 0.0;
    Label predicted = Label::not_in_use;
    Label truth = Label::not_in_use;
    bool valid = true;
};

using PredictionTrace = std::vector<TraceSample>;

// Positive class is in-use.
struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }

    void add(Label predicted, Label truth)
    {
        const bool p = predicted == Label::in_use, y = truth == Label::in_use;
        if (p && y) ++tp;
        else if (p) ++fp;
        else if (y) ++fn;
        else ++tn;
    }
};

// Rates with a zero denominator are absent rather than 0.
struct Scores {
    ConfusionCounts counts;
    std::optional<double> accuracy, sensitivity, specificity;

    static Scores from(const ConfusionCounts& c)
    {
        auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
            if (den == 0) return std::nullopt;
            return static_cast<double>(num) / static_cast<double>(den);
        };
        return {c, ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp)};
    }
};

namespace detail {

inline Scores score_where(const PredictionTrace& trace, const std::function<bool(std::size_t)>& keep)
{
    ConfusionCounts c;
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].valid && keep(i)) c.add(trace[i].predicted, trace[i].truth);
    return Scores::from(c);
}

inline std::vector<std::size_t> valid_indices(const PredictionTrace& trace)
{
    std::vector<std::size_t> idx;
    idx.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].valid) idx.push_back(i);
    return idx;
}

} // namespace detail

inline Scores score(const PredictionTrace& trace)
{
    Scores s = detail::score_where(trace, [](std::size_t) { return true; });
    if (s.counts.total() == 0) throw InputError("trace has no valid samples to score");
    return s;
}

enum class Direction { rise, fall }; // rise: not-in-use -> in-use

// One change of the true label, located at the first valid sample carrying
// the new label.
struct Transition {
    std::size_t index = 0; // into the trace
    double t = 0.0;
    Direction direction = Direction::rise;
    std::optional<double> delay;  // to the first prediction equal to the new label
    std::optional<double> steady; // to the start of a run held for >= t_hold; absent = censored
};

inline std::vector<Transition> find_transitions(const PredictionTrace& trace)
{
    std::vector<Transition> out;
    const auto idx = detail::valid_indices(trace);
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const auto& prev = trace[idx[k - 1]];
        const auto& cur = trace[idx[k]];
        if (prev.truth == cur.truth) continue;
        Transition tr;
        tr.index = idx[k];
        tr.t = cur.t;
        tr.direction = cur.truth == Label::in_use ? Direction::rise : Direction::fall;
        out.push_back(tr);
    }
    return out;
}

struct DirectionStats {
    std::size_t events = 0;
    std::size_t censored = 0;
    std::optional<double> delay;  // mean over uncensored events
    std::optional<double> steady; // mean over uncensored events
};

struct TransientStats {
    double t_hold = 3.0;
    bool has_transitions = false;
    DirectionStats rise, fall;
    std::vector<Transition> transitions;

    const DirectionStats& of(Direction d) const { return d == Direction::rise ? rise : fall; }
};

// Delay and steady-state time after every change of the true label.
// The steady point is the first sample from which the prediction equals the
// new label for at least t_hold seconds without leaving the segment; events
// with no such point are censored and left out of both means.
inline TransientStats transient_analysis(const PredictionTrace& trace, double t_hold = 3.0)
{
    if (!(t_hold >= 0.0)) throw InputError("t_hold must be >= 0");
    TransientStats stats;
    stats.t_hold = t_hold;
    stats.transitions = find_transitions(trace);
    stats.has_transitions = !stats.transitions.empty();

    const auto idx = detail::valid_indices(trace);
    std::size_t cursor = 0; // position in idx
    double sum_delay[2] = {0.0, 0.0}, sum_steady[2] = {0.0, 0.0};
    std::size_t used[2] = {0, 0};

    for (std::size_t e = 0; e < stats.transitions.size(); ++e) {
        auto& tr = stats.transitions[e];
        while (idx[cursor] != tr.index) ++cursor;
        const std::size_t seg_end =
            e + 1 < stats.transitions.size() ? stats.transitions[e + 1].index : trace.size();
        const Label target = trace[tr.index].truth;

        std::size_t run_start = 0;
        bool in_run = false;
        for (std::size_t k = cursor; k < idx.size() && idx[k] < seg_end; ++k) {
            const auto& s = trace[idx[k]];
            if (s.predicted != target) {
                in_run = false;
                continue;
            }
            if (!tr.delay) tr.delay = s.t - tr.t;
            if (!in_run) {
                in_run = true;
                run_start = k;
            }
            if (s.t - trace[idx[run_start]].t >= t_hold) {
                tr.steady = trace[idx[run_start]].t - tr.t;
                break;
            }
        }

        const int d = tr.direction == Direction::rise ? 0 : 1;
        DirectionStats& ds = d == 0 ? stats.rise : stats.fall;
        ++ds.events;
        if (!tr.steady) {
            ++ds.censored;
            continue;
        }
        sum_delay[d] += *tr.delay;
        sum_steady[d] += *tr.steady;
        ++used[d];
    }
    for (int d = 0; d < 2; ++d) {
        if (used[d] == 0) continue;
        DirectionStats& ds = d == 0 ? stats.rise : stats.fall;
        ds.delay = sum_delay[d] / static_cast<double>(used[d]);
        ds.steady = sum_steady[d] / static_cast<double>(used[d]);
    }
    return stats;
}

// Samples in [transition, transition + mean steady time of its direction)
// are dropped before scoring. A direction without a mean steady time drops
// nothing.
inline Scores steady_state_score(const PredictionTrace& trace, const TransientStats& stats)
{
    std::vector<char> excluded(trace.size(), 0);
    for (const auto& tr : stats.transitions) {
        const auto& window = stats.of(tr.direction).steady;
        if (!window) continue;
        const double end = tr.t + *window;
        for (std::size_t i = tr.index; i < trace.size() && trace[i].t < end; ++i) excluded[i] = 1;
    }
    Scores s = detail::score_where(trace, [&](std::size_t i) { return excluded[i] == 0; });
    if (s.counts.total() == 0) throw InputError("steady-state exclusion removed every sample");
    return s;
}

// Interior runs of constant prediction no longer than max_len samples. Runs
// touching either end of the trace have a single neighbour and do not count.
inline std::size_t count_spikes(const PredictionTrace& trace, std::size_t max_len = 12)
{
    if (max_len < 1) throw InputError("spike max_len must be >= 1");
    const auto idx = detail::valid_indices(trace);
    std::size_t spikes = 0;
    std::size_t k = 0;
    bool first_run = true;
    while (k < idx.size()) {
        std::size_t end = k;
        while (end < idx.size() && trace[idx[end]].predicted == trace[idx[k]].predicted) ++end;
        const bool last_run = end == idx.size();
        if (!first_run && !last_run && end - k <= max_len) ++spikes;
        first_run = false;
        k = end;
    }
    return spikes;
}

struct EvalParams {
    double t_hold = 3.0;
    std::size_t spike_max_len = 12;
};

struct EvalReport {
    std::string dataset;
    FeatureMask mask;
    EvalParams params;
    Scores nominal;
    Scores steady;
    TransientStats transients;
    std::size_t spikes = 0;
    std::optional<std::string> error; // set when the row could not be produced
};

inline EvalReport evaluate(const PredictionTrace& trace, FeatureMask mask, const std::string& dataset,
                           const EvalParams& params = {})
{
    EvalReport r;
    r.dataset = dataset;
    r.mask = mask;
    r.params = params;
    r.nominal = score(trace);
    r.transients = transient_analysis(trace, params.t_hold);
    r.steady = r.transients.has_transitions ? steady_state_score(trace, r.transients) : r.nominal;
    r.spikes = count_spikes(trace, params.spike_max_len);
    return r;
}

} // namespace handuse
