#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "handuse/eval.hpp"

namespace handuse {

// Columns of the published comparison table, in order.
inline const std::vector<std::string>& table_columns()
{
    static const std::vector<std::string> cols = {
        "Dataset",           "Classifier",          "Features Used",         "Accuracy Nominal",
        "Accuracy Steady",   "Sensitivity Nominal", "Sensitivity Steady",    "Specificity Nominal",
        "Specificity Steady", "Time rise steady [s]", "Time fall steady [s]"};
    return cols;
}

// One row in table form. Rates are percentages; absent values stay empty.
struct TableRow {
    std::string dataset;
    int classifier = 0;
    std::vector<std::string> features;
    std::optional<double> acc_nominal, acc_steady, sens_nominal, sens_steady, spec_nominal, spec_steady;
    std::optional<double> rise_steady, fall_steady;
};

namespace detail {

inline std::string fmt(const std::optional<double>& v, const char* spec = "%.3f")
{
    if (!v) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, *v);
    return buf;
}

inline std::optional<double> pct(const std::optional<double>& v)
{
    if (!v) return std::nullopt;
    return 100.0 * *v;
}

inline std::optional<double> parse_opt(const std::string& s)
{
    if (s.empty() || s == "NA") return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        throw InputError("bad number '" + s + "' in table");
    }
    if (used != s.size()) throw InputError("bad number '" + s + "' in table");
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace detail

inline TableRow to_table_row(const EvalReport& r)
{
    TableRow row;
    row.dataset = r.dataset;
    row.classifier = static_cast<int>(r.mask.index());
    for (std::size_t k = 0; k < kNumFeatures; ++k)
        if (r.mask.has(k)) row.features.emplace_back(kFeatureNames[k]);
    if (r.error) return row;
    row.acc_nominal = detail::pct(r.nominal.accuracy);
    row.acc_steady = detail::pct(r.steady.accuracy);
    row.sens_nominal = detail::pct(r.nominal.sensitivity);
    row.sens_steady = detail::pct(r.steady.sensitivity);
    row.spec_nominal = detail::pct(r.nominal.specificity);
    row.spec_steady = detail::pct(r.steady.specificity);
    row.rise_steady = r.transients.rise.steady;
    row.fall_steady = r.transients.fall.steady;
    return row;
}

inline std::string table_csv_header()
{
    std::string h;
    for (const auto& c : table_columns()) h += (h.empty() ? "" : ",") + c;
    return h + '\n';
}

inline std::string table_csv_line(const TableRow& r)
{
    std::string feats;
    for (const auto& f : r.features) feats += (feats.empty() ? "" : " ") + f;
    std::string line = r.dataset + ',' + std::to_string(r.classifier) + ',' + feats;
    for (const auto* v : {&r.acc_nominal, &r.acc_steady, &r.sens_nominal, &r.sens_steady, &r.spec_nominal,
                          &r.spec_steady, &r.rise_steady, &r.fall_steady})
        line += ',' + detail::fmt(*v);
    return line + '\n';
}

inline std::string table_csv(const std::vector<EvalReport>& reports)
{
    std::string out = table_csv_header();
    for (const auto& r : reports) out += table_csv_line(to_table_row(r));
    return out;
}

// Reads rows written in the table CSV schema (also used by the published fixture).
inline std::vector<TableRow> load_table_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw InputError("empty table file");
    if (line + '\n' != table_csv_header()) throw InputError("table header does not match the report schema");
    std::vector<TableRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != table_columns().size()) throw InputError("table row has wrong column count: " + line);
        TableRow r;
        r.dataset = f[0];
        r.classifier = std::stoi(f[1]);
        std::istringstream fs(f[2]);
        for (std::string tok; fs >> tok;) r.features.push_back(tok);
        r.acc_nominal = detail::parse_opt(f[3]);
        r.acc_steady = detail::parse_opt(f[4]);
        r.sens_nominal = detail::parse_opt(f[5]);
        r.sens_steady = detail::parse_opt(f[6]);
        r.spec_nominal = detail::parse_opt(f[7]);
        r.spec_steady = detail::parse_opt(f[8]);
        r.rise_steady = detail::parse_opt(f[9]);
        r.fall_steady = detail::parse_opt(f[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// Every field of every report, for downstream analysis.
inline std::string detailed_csv(const std::vector<EvalReport>& reports)
{
    std::string out =
        "dataset,mask,features,tp,fp,tn,fn,accuracy_nominal,sensitivity_nominal,specificity_nominal,"
        "accuracy_steady,sensitivity_steady,specificity_steady,delay_rise,steady_rise,rise_events,rise_censored,"
        "delay_fall,steady_fall,fall_events,fall_censored,spikes,t_hold,spike_max_len,error\n";
    using detail::fmt;
    for (const auto& r : reports) {
        const auto& c = r.nominal.counts;
        const auto& tr = r.transients;
        out += r.dataset + ',' + std::to_string(r.mask.index()) + ',' + r.mask.name() + ',' + std::to_string(c.tp) +
               ',' + std::to_string(c.fp) + ',' + std::to_string(c.tn) + ',' + std::to_string(c.fn) + ',' +
               fmt(r.nominal.accuracy, "%.10g") + ',' + fmt(r.nominal.sensitivity, "%.10g") + ',' +
               fmt(r.nominal.specificity, "%.10g") + ',' + fmt(r.steady.accuracy, "%.10g") + ',' +
               fmt(r.steady.sensitivity, "%.10g") + ',' + fmt(r.steady.specificity, "%.10g") + ',' +
               fmt(tr.rise.delay, "%.10g") + ',' + fmt(tr.rise.steady, "%.10g") + ',' +
               std::to_string(tr.rise.events) + ',' + std::to_string(tr.rise.censored) + ',' +
               fmt(tr.fall.delay, "%.10g") + ',' + fmt(tr.fall.steady, "%.10g") + ',' +
               std::to_string(tr.fall.events) + ',' + std::to_string(tr.fall.censored) + ',' +
               std::to_string(r.spikes) + ',' + fmt(r.params.t_hold, "%.10g") + ',' +
               std::to_string(r.params.spike_max_len) + ',' + (r.error ? "\"" + *r.error + "\"" : "") + '\n';
    }
    return out;
}

// Metric per mask index, for plotting.
inline std::string plot_csv(const std::vector<EvalReport>& reports)
{
    std::vector<const EvalReport*> by_mask;
    for (const auto& r : reports) by_mask.push_back(&r);
    std::stable_sort(by_mask.begin(), by_mask.end(),
                     [](const EvalReport* a, const EvalReport* b) { return a->mask < b->mask; });
    std::string out = "mask,dataset,accuracy_nominal,sensitivity_nominal,specificity_nominal,accuracy_steady,"
                      "sensitivity_steady,specificity_steady,steady_rise,steady_fall,spikes\n";
    using detail::fmt;
    for (const auto* r : by_mask)
        out += std::to_string(r->mask.index()) + ',' + r->dataset + ',' + fmt(r->nominal.accuracy, "%.6f") + ',' +
               fmt(r->nominal.sensitivity, "%.6f") + ',' + fmt(r->nominal.specificity, "%.6f") + ',' +
               fmt(r->steady.accuracy, "%.6f") + ',' + fmt(r->steady.sensitivity, "%.6f") + ',' +
               fmt(r->steady.specificity, "%.6f") + ',' + fmt(r->transients.rise.steady, "%.4f") + ',' +
               fmt(r->transients.fall.steady, "%.4f") + ',' + std::to_string(r->spikes) + '\n';
    return out;
}

// Aligned plain-text rendering of the first `top` rows, one feature per line
// as in the published table.
inline std::string render_table(const std::vector<TableRow>& rows, std::size_t top = 5)
{
    const auto& cols = table_columns();
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();

    auto push = [&](std::vector<std::string> line) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
        cells.push_back(std::move(line));
    };
    for (std::size_t i = 0; i < rows.size() && i < top; ++i) {
        const auto& r = rows[i];
        std::vector<std::string> first = {r.dataset, std::to_string(r.classifier),
                                          r.features.empty() ? "" : r.features[0]};
        for (const auto* v : {&r.acc_nominal, &r.acc_steady, &r.sens_nominal, &r.sens_steady, &r.spec_nominal,
                              &r.spec_steady, &r.rise_steady, &r.fall_steady})
            first.push_back(detail::fmt(*v));
        push(std::move(first));
        for (std::size_t f = 1; f < r.features.size(); ++f) {
            std::vector<std::string> more(cols.size());
            more[2] = r.features[f];
            push(std::move(more));
        }
    }

    auto render_line = [&](const std::vector<std::string>& line) {
        std::string s;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::string cell = c < line.size() ? line[c] : "";
            s += (c ? " | " : "") + cell + std::string(width[c] - cell.size(), ' ');
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s + '\n';
    };
    std::string out = render_line(cols);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 3 * (cols.size() - 1), '-') + '\n';
    for (const auto& line : cells) out += render_line(line);
    return out;
}

} // namespace handuse
