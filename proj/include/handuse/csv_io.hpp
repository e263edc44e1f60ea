#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "handuse/features.hpp"
#include "handuse/imu.hpp"
#include "handuse/synth.hpp"

// File formats
//
//   IMU samples   optional "# fs=<Hz>" line, header "t,ax,ay,az,gx,gy,gz",
//                 then one sample per line (SI units, '.' decimal point).
//   labels        header "start_t,end_t,label", one interval per line,
//                 [start_t, end_t), label +1 (in use) or -1.
//   features      header "t,f1,f2,f3,f4,f5,valid[,label]".

namespace handuse {

inline constexpr std::string_view kImuHeader = "t,ax,ay,az,gx,gy,gz";
inline constexpr std::string_view kLabelHeader = "start_t,end_t,label";
inline constexpr std::string_view kFeatureHeader = "t,f1,f2,f3,f4,f5,valid";

namespace detail {

inline void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Parses exactly `n` comma-separated doubles; false on any malformed field.
inline bool parse_fields(std::string_view line, double* out, std::size_t n)
{
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t end = k + 1 < n ? line.find(',', pos) : line.size();
        if (end == std::string_view::npos) return false;
        std::string_view field = line.substr(pos, end - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        if (field.empty()) return false;
        if (field.front() == '+') field.remove_prefix(1);
        const auto res = std::from_chars(field.data(), field.data() + field.size(), out[k]);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return false;
        pos = end + 1;
    }
    return true;
}

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

// Streams samples from an IMU CSV; memory use does not grow with file length.
class ImuCsvReader {
public:
    explicit ImuCsvReader(std::istream& is) : is_(is)
    {
        std::string line;
        while (next_line(line)) {
            if (line.rfind("# fs=", 0) == 0) {
                double fs = 0.0;
                if (!detail::parse_fields(std::string_view(line).substr(5), &fs, 1) || !(fs > 0.0))
                    throw InputError("line " + std::to_string(line_no_) + ": bad fs directive");
                declared_fs_ = fs;
                continue;
            }
            if (!line.empty() && line[0] == '#') continue;
            if (line != kImuHeader)
                throw InputError("line " + std::to_string(line_no_) + ": expected header '" +
                                 std::string(kImuHeader) + "'");
            return;
        }
        throw InputError("IMU file has no header");
    }

    std::optional<double> declared_fs() const { return declared_fs_; }
    std::size_t line_number() const { return line_no_; }

    std::optional<ImuSample> next()
    {
        std::string line;
        while (next_line(line)) {
            if (line.empty()) continue;
            double v[7];
            if (!detail::parse_fields(line, v, 7))
                throw InputError("line " + std::to_string(line_no_) + ": malformed IMU row '" + line + "'");
            ImuSample s{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
            try {
                validate(s);
            } catch (const InputError& e) {
                throw InputError("line " + std::to_string(line_no_) + ": " + e.what());
            }
            return s;
        }
        return std::nullopt;
    }

private:
    bool next_line(std::string& line)
    {
        if (!std::getline(is_, line)) return false;
        ++line_no_;
        detail::strip_cr(line);
        return true;
    }

    std::istream& is_;
    std::size_t line_no_ = 0;
    std::optional<double> declared_fs_;
};

inline std::vector<ImuSample> read_imu_csv(std::istream& is, std::optional<double> expected_fs = std::nullopt)
{
    ImuCsvReader reader(is);
    if (expected_fs && reader.declared_fs() && std::abs(*reader.declared_fs() - *expected_fs) > 1e-9)
        throw InputError("file declares fs = " + detail::format_number(*reader.declared_fs()) +
                         " Hz, configured fs = " + detail::format_number(*expected_fs) + " Hz");
    std::vector<ImuSample> out;
    while (auto s = reader.next()) out.push_back(*s);
    return out;
}

inline void write_imu_header(std::ostream& os, std::optional<double> fs)
{
    if (fs) os << "# fs=" << detail::format_number(*fs) << '\n';
    os << kImuHeader << '\n';
}

inline void write_imu_row(std::ostream& os, const ImuSample& s)
{
    using detail::format_number;
    os << format_number(s.t) << ',' << format_number(s.ax) << ',' << format_number(s.ay) << ','
       << format_number(s.az) << ',' << format_number(s.gx) << ',' << format_number(s.gy) << ','
       << format_number(s.gz) << '\n';
}

inline void write_imu_csv(std::ostream& os, const std::vector<ImuSample>& samples, std::optional<double> fs)
{
    write_imu_header(os, fs);
    for (const auto& s : samples) write_imu_row(os, s);
}

// Ground-truth label intervals.
class LabelTrack {
public:
    LabelTrack() = default;
    explicit LabelTrack(std::vector<LabelInterval> intervals) : intervals_(std::move(intervals))
    {
        std::sort(intervals_.begin(), intervals_.end(),
                  [](const LabelInterval& a, const LabelInterval& b) { return a.start < b.start; });
        for (std::size_t k = 0; k < intervals_.size(); ++k) {
            if (!(intervals_[k].end > intervals_[k].start))
                throw InputError("label interval with end <= start");
            if (k > 0 && intervals_[k].start < intervals_[k - 1].end - 1e-9)
                throw InputError("overlapping label intervals");
        }
    }

    std::optional<Label> at(double t) const
    {
        auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                                   [](double v, const LabelInterval& iv) { return v < iv.start; });
        if (it == intervals_.begin()) return std::nullopt;
        --it;
        if (t < it->end) return it->label;
        return std::nullopt;
    }

    const std::vector<LabelInterval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }

private:
    std::vector<LabelInterval> intervals_;
};

inline LabelTrack read_labels_csv(std::istream& is)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        break;
    }
    if (line != kLabelHeader) throw InputError("label file: expected header '" + std::string(kLabelHeader) + "'");
    std::vector<LabelInterval> out;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        double v[3];
        if (!detail::parse_fields(line, v, 3) || (v[2] != 1.0 && v[2] != -1.0))
            throw InputError("label file line " + std::to_string(line_no) + ": malformed row '" + line + "'");
        out.push_back({v[0], v[1], v[2] > 0 ? Label::in_use : Label::not_in_use});
    }
    return LabelTrack(std::move(out));
}

inline void write_labels_csv(std::ostream& os, const std::vector<LabelInterval>& intervals)
{
    os << kLabelHeader << '\n';
    for (const auto& iv : intervals)
        os << detail::format_number(iv.start) << ',' << detail::format_number(iv.end) << ',' << to_int(iv.label)
           << '\n';
}

struct FeatureRow {
    FeatureVector x;
    std::optional<Label> label;
};

inline void write_feature_header(std::ostream& os, bool with_label)
{
    os << kFeatureHeader << (with_label ? ",label" : "") << '\n';
}

inline void write_feature_row(std::ostream& os, const FeatureRow& r, bool with_label)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", r.x.t);
    os << buf;
    for (double f : r.x.f) {
        std::snprintf(buf, sizeof buf, ",%.17g", f);
        os << buf;
    }
    os << ',' << (r.x.valid ? 1 : 0);
    if (with_label) os << ',' << (r.label ? std::to_string(to_int(*r.label)) : std::string("0"));
    os << '\n';
}

// Label 0 in the file means "unlabelled".
inline std::vector<FeatureRow> read_feature_csv(std::istream& is, bool* has_label_column = nullptr)
{
    std::string line;
    if (!std::getline(is, line)) throw InputError("feature file is empty");
    detail::strip_cr(line);
    bool with_label;
    if (line == kFeatureHeader) with_label = false;
    else if (line == std::string(kFeatureHeader) + ",label") with_label = true;
    else throw InputError("feature file: unexpected header '" + line + "'");
    if (has_label_column) *has_label_column = with_label;

    std::vector<FeatureRow> rows;
    std::size_t line_no = 1;
    const std::size_t n = with_label ? 8 : 7;
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        double v[8];
        if (!detail::parse_fields(line, v, n))
            throw InputError("feature file line " + std::to_string(line_no) + ": malformed row");
        FeatureRow r;
        r.x.t = v[0];
        for (std::size_t k = 0; k < kNumFeatures; ++k) r.x.f[k] = v[1 + k];
        r.x.valid = v[6] != 0.0;
        if (with_label && v[7] != 0.0) r.label = label_from_int(static_cast<int>(v[7]));
        rows.push_back(r);
    }
    return rows;
}

} // namespace handuse
