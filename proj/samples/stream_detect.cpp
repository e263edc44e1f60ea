// Train a detector on one synthetic trip, then run another trip through it
// sample by sample and score the result.

#include <cstdio>

#include "handuse/handuse.hpp"

using namespace handuse;

namespace {

LabeledStream features_of(const Trip& trip, const std::string& name)
{
    LabelTrack labels(trip.labels);
    FeaturePipeline pipe;
    LabeledStream s{name, {}};
    for (const auto& x : trip.samples) {
        const FeatureVector f = pipe.push(x);
        s.samples.push_back({f, *labels.at(f.t)});
    }
    return s;
}

} // namespace

int main()
{
    const Trip train_trip = generate_trip(alternating_schedule(20, 60.0, 1));
    const Trip live_trip = generate_trip(alternating_schedule(12, 60.0, 2));

    const FeatureMask mask = FeatureMask::parse("f3,f4");
    const LinearModel model = train(make_dataset(features_of(train_trip, "train"), mask, 60), TrainConfig{}, mask);
    std::printf("trained on %s: %zu epochs, objective %.4f\n", mask.signals().c_str(), model.info.epochs,
                model.info.objective);

    FeaturePipeline pipe;
    LabelTrack truth(live_trip.labels);
    PredictionTrace trace;
    Label last = Label::not_in_use;
    for (const auto& x : live_trip.samples) {
        const FeatureVector f = pipe.push(x);
        if (!f.valid) continue;
        const Prediction p = predict(model, f);
        if (p.label != last) std::printf("t=%7.2f s  %s\n", f.t, p.label == Label::in_use ? "in use" : "put away");
        last = p.label;
        trace.push_back({f.t, p.label, *truth.at(f.t), true});
    }

    const EvalReport r = evaluate(trace, mask, "live");
    std::printf("nominal accuracy %.3f, steady accuracy %.3f, %zu spikes\n", *r.nominal.accuracy,
                *r.steady.accuracy, r.spikes);
}
