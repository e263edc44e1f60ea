#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "handuse/eval.hpp"
#include "handuse/svm.hpp"

namespace handuse {

// A labelled feature stream as produced by the preprocessing step.
struct LabeledStream {
    std::string name;
    std::vector<LabeledFeature> samples;
};

// Valid samples, every `stride`-th one, reduced to `mask`.
inline Dataset make_dataset(const LabeledStream& s, FeatureMask mask, std::size_t stride = 1)
{
    if (stride < 1) stride = 1;
    Dataset d(mask.size());
    std::size_t seen = 0;
    for (const auto& lf : s.samples) {
        if (!lf.x.valid) continue;
        if (seen++ % stride != 0) continue;
        d.add(apply_mask(lf.x, mask), to_int(lf.label));
    }
    return d;
}

inline PredictionTrace predict_trace(const LinearModel& m, const LabeledStream& s)
{
    PredictionTrace trace;
    trace.reserve(s.samples.size());
    for (const auto& lf : s.samples) {
        TraceSample ts;
        ts.t = lf.x.t;
        ts.truth = lf.label;
        ts.valid = lf.x.valid;
        ts.predicted = lf.x.valid ? predict(m, lf.x).label : Label::not_in_use;
        trace.push_back(ts);
    }
    return trace;
}

struct SweepConfig {
    TrainConfig train;
    EvalParams eval;
    std::size_t train_stride = 60; // decimation of the training rows
    unsigned threads = 0;          // 0 = hardware concurrency
};

struct SweepRow {
    FeatureMask mask;
    std::optional<LinearModel> model;
    EvalReport validation;
    EvalReport test;
};

// Sorted by nominal validation accuracy (descending, ties by mask index);
// rows whose training failed sort last.
struct SweepResult {
    std::vector<SweepRow> rows;

    std::vector<EvalReport> reports(bool validation) const
    {
        std::vector<EvalReport> out;
        for (const auto& r : rows) out.push_back(validation ? r.validation : r.test);
        return out;
    }
};

inline double sort_key(const EvalReport& r)
{
    if (r.error || !r.nominal.accuracy) return -1.0;
    return *r.nominal.accuracy;
}

// Filter-approach feature selection: train one classifier per non-empty
// feature subset and score each on the validation and test streams.
inline SweepResult sweep(const LabeledStream& train_set, const LabeledStream& val_set, const LabeledStream& test_set,
                         const SweepConfig& cfg)
{
    const auto masks = enumerate_masks();
    std::vector<SweepRow> rows(masks.size());

    auto run_one = [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.mask = masks[k];
        row.validation.dataset = val_set.name;
        row.validation.mask = row.mask;
        row.validation.params = cfg.eval;
        row.test.dataset = test_set.name;
        row.test.mask = row.mask;
        row.test.params = cfg.eval;
        try {
            row.model = train(make_dataset(train_set, row.mask, cfg.train_stride), cfg.train, row.mask);
            row.validation = evaluate(predict_trace(*row.model, val_set), row.mask, val_set.name, cfg.eval);
            row.test = evaluate(predict_trace(*row.model, test_set), row.mask, test_set.name, cfg.eval);
        } catch (const std::exception& e) {
            row.validation.error = e.what();
            row.test.error = e.what();
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(masks.size()));
    if (threads <= 1) {
        for (std::size_t k = 0; k < masks.size(); ++k) run_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < masks.size(); k = next++) run_one(k);
            });
        for (auto& th : pool) th.join();
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        const double ka = sort_key(a.validation), kb = sort_key(b.validation);
        if (ka != kb) return ka > kb;
        return a.mask < b.mask;
    });
    return {std::move(rows)};
}

} // namespace handuse
