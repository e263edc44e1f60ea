// handuse: command-line front end (synth, preprocess, train, evaluate, sweep,
// detect, filters, config).
//
// Exit codes: 0 success, 2 input error, 3 convergence failure, 4 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "handuse/csv_io.hpp"
#include "handuse/handuse.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace handuse;
using handuse::cli::RunConfig;

namespace {

// Flag values given on the command line; they win over the config file.
struct Overrides {
    std::optional<double> fs, band_low, band_high, split_low, split_high, gyro_low_pass, debias, variance_high_pass,
        variance_low_pass, warmup_periods, gap_periods, ratio_epsilon, t_hold, C, tol, segment_seconds;
    std::optional<int> band_order, split_order, gyro_low_pass_order, debias_order, variance_order, max_epochs;
    std::optional<std::size_t> spike_max_len, train_stride, segments;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> mask;
    std::optional<double> usage_accel, usage_gyro, vehicle_accel, vehicle_gyro, holder_attenuation, usage_modulation;
};

void add_config_flags(CLI::App& app, Overrides& o)
{
    const char* g = "Configuration";
    app.add_option("--fs", o.fs, "Sampling rate [Hz]")->group(g);
    app.add_option("--band-low", o.band_low, "Band-pass lower edge [Hz]")->group(g);
    app.add_option("--band-high", o.band_high, "Band-pass upper edge [Hz]")->group(g);
    app.add_option("--band-order", o.band_order, "Band-pass order per edge")->group(g);
    app.add_option("--split-low", o.split_low, "Split chain low-pass cutoff [Hz]")->group(g);
    app.add_option("--split-high", o.split_high, "Split chain high-pass cutoff [Hz]")->group(g);
    app.add_option("--split-order", o.split_order, "Split chain filter order")->group(g);
    app.add_option("--gyro-low-pass", o.gyro_low_pass, "Gyro low-pass cutoff [Hz]")->group(g);
    app.add_option("--gyro-low-pass-order", o.gyro_low_pass_order, "Gyro low-pass order")->group(g);
    app.add_option("--debias", o.debias, "Debias high-pass cutoff [Hz]")->group(g);
    app.add_option("--debias-order", o.debias_order, "Debias high-pass order")->group(g);
    app.add_option("--variance-high-pass", o.variance_high_pass, "Variance chain high-pass [Hz]")->group(g);
    app.add_option("--variance-low-pass", o.variance_low_pass, "Variance chain low-pass [Hz]")->group(g);
    app.add_option("--variance-order", o.variance_order, "Variance chain filter order")->group(g);
    app.add_option("--warmup-periods", o.warmup_periods, "Warm-up length in periods of the lowest cutoff")->group(g);
    app.add_option("--gap-periods", o.gap_periods, "Timestamp gap (sample periods) that breaks the stream")->group(g);
    app.add_option("--ratio-epsilon", o.ratio_epsilon, "Floor of the ratio feature denominator")->group(g);
    app.add_option("--t-hold", o.t_hold, "Hold time defining a steady prediction [s]")->group(g);
    app.add_option("--spike-max-len", o.spike_max_len, "Longest run counted as a spike [samples]")->group(g);
    app.add_option("--C", o.C, "SVM penalty")->group(g);
    app.add_option("--tol", o.tol, "SVM relative duality gap tolerance")->group(g);
    app.add_option("--max-epochs", o.max_epochs, "SVM epoch limit")->group(g);
    app.add_option("--train-stride", o.train_stride, "Use every n-th valid sample for training")->group(g);
    app.add_option("--mask", o.mask, "Feature mask: index 1-31, 'all' or list like f3,f4")->group(g);
    app.add_option("--seed", o.seed, "Random seed")->group(g);
    app.add_option("--threads", o.threads, "Sweep worker threads (0 = all cores)")->group(g);
    app.add_option("--segments", o.segments, "Segments of a generated alternating trip")->group(g);
    app.add_option("--segment-seconds", o.segment_seconds, "Length of generated segments [s]")->group(g);
    app.add_option("--usage-accel", o.usage_accel, "Synthetic usage acceleration RMS [m/s^2]")->group(g);
    app.add_option("--usage-modulation", o.usage_modulation, "Depth of the slow burst envelope on usage content")->group(g);
    app.add_option("--usage-gyro", o.usage_gyro, "Synthetic usage angular rate RMS [rad/s]")->group(g);
    app.add_option("--vehicle-accel", o.vehicle_accel, "Synthetic vehicle acceleration RMS [m/s^2]")->group(g);
    app.add_option("--vehicle-gyro", o.vehicle_gyro, "Synthetic vehicle angular rate RMS [rad/s]")->group(g);
    app.add_option("--holder-attenuation", o.holder_attenuation, "Synthetic phone-holder attenuation")->group(g);
}

template <class T, class U>
void apply(const std::optional<T>& v, U& target)
{
    if (v) target = *v;
}

void apply_overrides(const Overrides& o, RunConfig& c)
{
    auto& p = c.pipeline;
    apply(o.fs, p.fs);
    apply(o.band_low, p.band_low);
    apply(o.band_high, p.band_high);
    apply(o.band_order, p.band_order);
    apply(o.split_low, p.split_low);
    apply(o.split_high, p.split_high);
    apply(o.split_order, p.split_order);
    apply(o.gyro_low_pass, p.gyro_low_pass);
    apply(o.gyro_low_pass_order, p.gyro_low_pass_order);
    apply(o.debias, p.debias);
    apply(o.debias_order, p.debias_order);
    apply(o.variance_high_pass, p.variance_high_pass);
    apply(o.variance_low_pass, p.variance_low_pass);
    apply(o.variance_order, p.variance_order);
    apply(o.warmup_periods, p.warmup_periods);
    apply(o.gap_periods, p.gap_periods);
    apply(o.ratio_epsilon, c.features.ratio_epsilon);
    apply(o.t_hold, c.eval.t_hold);
    apply(o.spike_max_len, c.eval.spike_max_len);
    apply(o.C, c.train.C);
    apply(o.tol, c.train.tol);
    apply(o.max_epochs, c.train.max_epochs);
    apply(o.train_stride, c.train_stride);
    apply(o.mask, c.mask);
    apply(o.seed, c.train.seed);
    apply(o.threads, c.threads);
    apply(o.segments, c.segments);
    apply(o.segment_seconds, c.segment_seconds);
    apply(o.usage_accel, c.amplitudes.usage_accel);
    apply(o.usage_modulation, c.amplitudes.usage_modulation);
    apply(o.usage_gyro, c.amplitudes.usage_gyro);
    apply(o.vehicle_accel, c.amplitudes.vehicle_accel);
    apply(o.vehicle_gyro, c.amplitudes.vehicle_gyro);
    apply(o.holder_attenuation, c.amplitudes.holder_attenuation);
}

// ---- file helpers -----------------------------------------------------------

void ensure_parent(const std::string& path)
{
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path)
{
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path);
    return os;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open " + path);
    return is;
}

void write_text(const std::string& path, const std::string& text)
{
    auto os = open_out(path);
    os << text;
}

void emit_config(const std::string& path, const RunConfig& cfg, const std::string& command)
{
    auto j = cli::to_json(cfg);
    j["command"] = command;
    write_text(path, j.dump(2) + "\n");
}

// ---- label handling ---------------------------------------------------------

// Rows without a label become invalid so they are neither trained on nor scored.
LabeledStream load_labeled(const std::string& name, const std::string& features_path,
                           const std::string& labels_path)
{
    auto is = open_in(features_path);
    bool has_label_col = false;
    auto rows = read_feature_csv(is, &has_label_col);
    std::optional<LabelTrack> track;
    if (!labels_path.empty()) {
        auto ls = open_in(labels_path);
        track = read_labels_csv(ls);
    } else if (!has_label_col) {
        throw InputError(features_path + " has no label column and no label file was given");
    }
    LabeledStream s{name, {}};
    s.samples.reserve(rows.size());
    for (auto& r : rows) {
        const std::optional<Label> label = track ? track->at(r.x.t) : r.label;
        LabeledFeature lf{r.x, label.value_or(Label::not_in_use)};
        if (!label) lf.x.valid = false;
        s.samples.push_back(lf);
    }
    return s;
}

std::string dataset_name(const std::string& path)
{
    std::string stem = fs::path(path).filename().string();
    for (const char* suffix : {".features.csv", ".csv"}) {
        const std::string sfx = suffix;
        if (stem.size() > sfx.size() && stem.compare(stem.size() - sfx.size(), sfx.size(), sfx) == 0) {
            stem.erase(stem.size() - sfx.size());
            break;
        }
    }
    return stem;
}

// ---- synth ------------------------------------------------------------------

// Schedule file: header "start_t,duration,vehicle,phone". Consecutive rows
// with the same vehicle state share one vehicle vibration.
ScenarioSchedule read_schedule(std::istream& is, const RunConfig& cfg, std::uint64_t seed)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        break;
    }
    if (line != "start_t,duration,vehicle,phone")
        throw InputError("schedule: expected header 'start_t,duration,vehicle,phone'");
    ScenarioSchedule s;
    std::uint64_t env_run = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
        if (f.size() != 4) throw InputError("schedule line " + std::to_string(line_no) + ": expected 4 fields");
        ScheduleEntry e;
        double v[2];
        if (!handuse::detail::parse_fields(f[0], &v[0], 1) || !handuse::detail::parse_fields(f[1], &v[1], 1))
            throw InputError("schedule line " + std::to_string(line_no) + ": bad number");
        e.start = v[0];
        e.spec.duration = v[1];
        e.spec.vehicle = parse_vehicle_state(f[2]);
        e.spec.phone = parse_phone_state(f[3]);
        e.spec.fs = cfg.pipeline.fs;
        e.spec.amplitudes = cfg.amplitudes;
        const std::size_t k = s.entries.size();
        if (k > 0 && s.entries.back().spec.vehicle != e.spec.vehicle) ++env_run;
        e.spec.seed = derive_seed(seed, k);
        e.spec.environment_seed = derive_seed(seed, 1000000 + env_run);
        s.entries.push_back(e);
    }
    s.validate();
    return s;
}

int cmd_synth(const RunConfig& cfg, const std::string& schedule_path, const std::string& datasets,
              const std::string& out_dir)
{
    std::vector<std::string> names;
    std::stringstream ss(datasets);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) names.push_back(tok);
    if (names.empty()) throw InputError("--datasets needs at least one name");

    fs::create_directories(out_dir);
    for (std::size_t k = 0; k < names.size(); ++k) {
        const std::uint64_t seed = cfg.train.seed + k; // dataset k uses seed + k
        ScenarioSchedule schedule;
        if (!schedule_path.empty()) {
            auto is = open_in(schedule_path);
            schedule = read_schedule(is, cfg, seed);
        } else {
            schedule = alternating_schedule(cfg.segments, cfg.segment_seconds, seed, cfg.pipeline.fs, cfg.amplitudes);
        }
        const Trip trip = generate_trip(schedule);
        auto imu = open_out((fs::path(out_dir) / (names[k] + ".imu.csv")).string());
        write_imu_csv(imu, trip.samples, cfg.pipeline.fs);
        auto labels = open_out((fs::path(out_dir) / (names[k] + ".labels.csv")).string());
        write_labels_csv(labels, trip.labels);
        std::cout << names[k] << ": " << trip.samples.size() << " samples, " << trip.transitions.size()
                  << " transitions, seed " << seed << '\n';
    }
    emit_config((fs::path(out_dir) / "run_config.json").string(), cfg, "synth");
    return 0;
}

// ---- preprocess -------------------------------------------------------------

int cmd_preprocess(const RunConfig& cfg, const std::string& input, const std::string& labels_path,
                   const std::string& out)
{
    auto is = open_in(input);
    ImuCsvReader reader(is);
    if (reader.declared_fs() && std::abs(*reader.declared_fs() - cfg.pipeline.fs) > 1e-9)
        throw InputError(input + " declares fs = " + handuse::detail::format_number(*reader.declared_fs()) +
                         " Hz, configured fs = " + handuse::detail::format_number(cfg.pipeline.fs) + " Hz");
    std::optional<LabelTrack> track;
    if (!labels_path.empty()) {
        auto ls = open_in(labels_path);
        track = read_labels_csv(ls);
    }

    auto os = open_out(out);
    write_feature_header(os, track.has_value());
    FeaturePipeline pipeline(cfg.pipeline, cfg.features);
    std::size_t rows = 0, valid = 0;
    while (true) {
        std::optional<ImuSample> s;
        try {
            s = reader.next();
        } catch (const InputError& e) {
            throw InputError(input + ": " + e.what());
        }
        if (!s) break;
        FeatureVector v;
        try {
            v = pipeline.push(*s);
        } catch (const InputError& e) {
            throw InputError(input + " line " + std::to_string(reader.line_number()) + ": " + e.what());
        }
        FeatureRow row{v, track ? track->at(v.t) : std::nullopt};
        write_feature_row(os, row, track.has_value());
        ++rows;
        if (v.valid) ++valid;
    }
    emit_config(out + ".config.json", cfg, "preprocess");
    std::cout << rows << " rows (" << valid << " valid), " << pipeline.stream_breaks() << " stream breaks, "
              << pipeline.clamped_variances() << " clamped variance outputs\n";
    return 0;
}

// ---- train / evaluate -------------------------------------------------------

int cmd_train(const RunConfig& cfg, const std::string& features, const std::string& labels, const std::string& model_path)
{
    const FeatureMask mask = FeatureMask::parse(cfg.mask);
    const LabeledStream stream = load_labeled(dataset_name(features), features, labels);
    const Dataset data = make_dataset(stream, mask, cfg.train_stride);
    const LinearModel model = train(data, cfg.train, mask);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (to_int(predict(model, data.row(i)).label) == data.label(i)) ++correct;

    auto os = open_out(model_path);
    save_model(os, model);
    emit_config(model_path + ".config.json", cfg, "train");
    char buf[256];
    std::snprintf(buf, sizeof buf, "mask %s: %zu rows, training accuracy %.4f, objective %.6g, %zu epochs\n",
                  mask.name().c_str(), data.size(), static_cast<double>(correct) / static_cast<double>(data.size()),
                  model.info.objective, model.info.epochs);
    std::cout << buf;
    return 0;
}

LinearModel read_model(const std::string& path)
{
    auto is = open_in(path);
    try {
        return load_model(is);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

int cmd_evaluate(const RunConfig& cfg, const std::string& model_path, const std::string& features,
                 const std::string& labels, const std::string& out_dir, std::string name)
{
    const LinearModel model = read_model(model_path);
    if (name.empty()) name = dataset_name(features);
    const LabeledStream stream = load_labeled(name, features, labels);
    const EvalReport report = evaluate(predict_trace(model, stream), model.mask, name, cfg.eval);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text((dir / "report.csv").string(), table_csv({report}));
    write_text((dir / "report_detailed.csv").string(), detailed_csv({report}));
    const std::string table = render_table({to_table_row(report)});
    write_text((dir / "report.txt").string(), table);
    emit_config((dir / "run_config.json").string(), cfg, "evaluate");
    std::cout << table;
    return 0;
}

// ---- sweep ------------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg, const std::map<std::string, std::string>& files, const std::string& out_dir,
              bool save_models)
{
    const LabeledStream tr = load_labeled("train", files.at("train"), files.at("train_labels"));
    const LabeledStream va = load_labeled("validation", files.at("validation"), files.at("validation_labels"));
    const LabeledStream te = load_labeled("test", files.at("test"), files.at("test_labels"));

    SweepConfig sc;
    sc.train = cfg.train;
    sc.eval = cfg.eval;
    sc.train_stride = cfg.train_stride;
    sc.threads = cfg.threads;
    const SweepResult result = sweep(tr, va, te, sc);

    const auto val = result.reports(true);
    const auto test = result.reports(false);
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text((dir / "sweep_validation.csv").string(), table_csv(val));
    write_text((dir / "sweep_test.csv").string(), table_csv(test));
    std::vector<EvalReport> both = val;
    both.insert(both.end(), test.begin(), test.end());
    write_text((dir / "sweep_detailed.csv").string(), detailed_csv(both));
    write_text((dir / "sweep_plot.csv").string(), plot_csv(both));

    std::vector<TableRow> val_rows, test_rows;
    for (const auto& r : val) val_rows.push_back(to_table_row(r));
    for (const auto& r : test) test_rows.push_back(to_table_row(r));
    const std::string table = render_table(val_rows) + '\n' + render_table(test_rows);
    write_text((dir / "sweep_table.txt").string(), table);
    if (save_models) {
        for (const auto& row : result.rows) {
            if (!row.model) continue;
            char name[32];
            std::snprintf(name, sizeof name, "mask_%02u.model", row.mask.index());
            auto os = open_out((dir / "models" / name).string());
            save_model(os, *row.model);
        }
    }
    emit_config((dir / "run_config.json").string(), cfg, "sweep");
    std::cout << table;

    std::size_t failed = 0;
    for (const auto& r : val)
        if (r.error) ++failed;
    if (failed) std::cerr << failed << " mask(s) failed to train; see sweep_detailed.csv\n";
    return 0;
}

// ---- detect -----------------------------------------------------------------

int cmd_detect(const RunConfig& cfg, const std::string& model_path, const std::string& input, const std::string& out)
{
    const LinearModel model = read_model(model_path);
    std::ifstream file;
    std::istream* is = &std::cin;
    if (input != "-") {
        file = open_in(input);
        is = &file;
    }
    std::ofstream out_file;
    std::ostream* os = &std::cout;
    if (out != "-") {
        out_file = open_out(out);
        os = &out_file;
    }

    ImuCsvReader reader(*is);
    if (reader.declared_fs() && std::abs(*reader.declared_fs() - cfg.pipeline.fs) > 1e-9)
        throw InputError("input declares fs = " + handuse::detail::format_number(*reader.declared_fs()) +
                         " Hz, configured fs = " + handuse::detail::format_number(cfg.pipeline.fs) + " Hz");
    FeaturePipeline pipeline(cfg.pipeline, cfg.features);
    *os << "t,label,margin,valid\n";
    char buf[96];
    while (auto s = reader.next()) {
        const FeatureVector v = pipeline.push(*s);
        const Prediction p = predict(model, v);
        std::snprintf(buf, sizeof buf, "%.10g,%d,%.10g,%d\n", v.t, to_int(p.label), p.margin, v.valid ? 1 : 0);
        *os << buf;
    }
    os->flush();
    if (out != "-") emit_config(out + ".config.json", cfg, "detect");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hand-usage detection from smartphone IMU data"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides ov;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (default: $HANDUSE_CONFIG)");
    add_config_flags(app, ov);

    std::string schedule, datasets = "trip", out, input, labels, features, model, name;
    std::map<std::string, std::string> sweep_files = {{"train_labels", ""}, {"validation_labels", ""},
                                                      {"test_labels", ""}};
    bool save_models = false;

    auto* synth = app.add_subcommand("synth", "Generate synthetic IMU trips with label sidecars");
    synth->add_option("--schedule", schedule, "Schedule CSV (start_t,duration,vehicle,phone)");
    synth->add_option("--datasets", datasets, "Comma-separated dataset names; dataset k uses seed + k");
    synth->add_option("--out", out, "Output directory")->required();

    auto* pre = app.add_subcommand("preprocess", "IMU CSV -> feature CSV");
    pre->add_option("--input", input, "IMU CSV")->required();
    pre->add_option("--labels", labels, "Label intervals; adds a label column");
    pre->add_option("--out", out, "Feature CSV")->required();

    auto* tr = app.add_subcommand("train", "Train a linear SVM on a feature CSV");
    tr->add_option("--features", features, "Feature CSV")->required();
    tr->add_option("--labels", labels, "Label intervals (default: the file's label column)");
    tr->add_option("--model", model, "Output model file")->required();

    auto* ev = app.add_subcommand("evaluate", "Score a model on a labelled feature CSV");
    ev->add_option("--model", model, "Model file")->required();
    ev->add_option("--features", features, "Feature CSV")->required();
    ev->add_option("--labels", labels, "Label intervals (default: the file's label column)");
    ev->add_option("--name", name, "Dataset name in the report");
    ev->add_option("--out", out, "Output directory")->required();

    auto* sw = app.add_subcommand("sweep", "Train and score all 31 feature subsets");
    sw->add_option("--train", sweep_files["train"], "Training feature CSV")->required();
    sw->add_option("--validation", sweep_files["validation"], "Validation feature CSV")->required();
    sw->add_option("--test", sweep_files["test"], "Test feature CSV")->required();
    sw->add_option("--train-labels", sweep_files["train_labels"], "Label intervals for the training file");
    sw->add_option("--validation-labels", sweep_files["validation_labels"], "Label intervals for validation");
    sw->add_option("--test-labels", sweep_files["test_labels"], "Label intervals for test");
    sw->add_option("--out", out, "Output directory")->required();
    sw->add_flag("--save-models", save_models, "Also write one model file per mask");

    auto* det = app.add_subcommand("detect", "Stream IMU samples through a model");
    det->add_option("--model", model, "Model file")->required();
    det->add_option("--input", input, "IMU CSV or '-' for stdin")->required();
    det->add_option("--out", out, "Prediction CSV or '-' for stdout")->default_val("-");

    auto* filt = app.add_subcommand("filters", "List the designed filter coefficients");
    filt->add_option("--out", out, "Output file (default stdout)");

    app.add_subcommand("config", "Print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (config_path.empty())
            if (const char* env = std::getenv("HANDUSE_CONFIG")) config_path = env;
        RunConfig cfg = config_path.empty() ? RunConfig{} : cli::load_config(config_path);
        apply_overrides(ov, cfg);
        cfg.validate();

        if (*synth) return cmd_synth(cfg, schedule, datasets, out);
        if (*pre) return cmd_preprocess(cfg, input, labels, out);
        if (*tr) return cmd_train(cfg, features, labels, model);
        if (*ev) return cmd_evaluate(cfg, model, features, labels, out, name);
        if (*sw) return cmd_sweep(cfg, sweep_files, out, save_models);
        if (*det) return cmd_detect(cfg, model, input, out);
        if (*filt) {
            const std::string text = coefficient_listing(cfg.pipeline);
            if (out.empty()) std::cout << text;
            else write_text(out, text);
            return 0;
        }
        std::cout << cli::to_json(cfg).dump(2) << '\n';
        return 0;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DesignError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
