#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "handuse/features.hpp"

namespace handuse {

// n rows of d features with labels +1 / -1, stored row-major.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim) : dim_(dim) {}

    void add(std::span<const double> row, int label)
    {
        if (row.size() != dim_)
            throw InputError("row has " + std::to_string(row.size()) + " features, dataset expects " +
                             std::to_string(dim_));
        label_from_int(label);
        x_.insert(x_.end(), row.begin(), row.end());
        y_.push_back(label);
    }

    std::size_t size() const { return y_.size(); }
    std::size_t dim() const { return dim_; }
    std::span<const double> row(std::size_t i) const { return {x_.data() + i * dim_, dim_}; }
    int label(std::size_t i) const { return y_[i]; }
    const std::vector<int>& labels() const { return y_; }

    std::size_t count(int label) const { return static_cast<std::size_t>(std::count(y_.begin(), y_.end(), label)); }

    void validate_for_training() const
    {
        if (dim_ < 1 || dim_ > kNumFeatures)
            throw InputError("feature dimension must be in [1, 5], got " + std::to_string(dim_));
        if (size() < 2) throw InputError("training needs at least 2 rows");
        if (count(1) == 0 || count(-1) == 0) throw InputError("training data contains a single class");
        for (double v : x_)
            if (!std::isfinite(v)) throw InputError("training data contains a non-finite value");
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> x_;
    std::vector<int> y_;
};

// Per-feature affine transform x~ = (x - mean) / scale.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

    static Standardizer fit(const Dataset& data)
    {
        const std::size_t d = data.dim(), n = data.size();
        Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) s.mean[k] += data.row(i)[k];
        for (auto& m : s.mean) m /= static_cast<double>(n);
        std::vector<double> ss(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) {
                const double dx = data.row(i)[k] - s.mean[k];
                ss[k] += dx * dx;
            }
        for (std::size_t k = 0; k < d; ++k) {
            const double sd = std::sqrt(ss[k] / static_cast<double>(n));
            s.scale[k] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }

    std::size_t dim() const { return mean.size(); }

    void apply(std::span<const double> x, std::span<double> out) const
    {
        for (std::size_t k = 0; k < mean.size(); ++k) out[k] = (x[k] - mean[k]) / scale[k];
    }

    Dataset apply(const Dataset& data) const
    {
        Dataset out(data.dim());
        std::vector<double> buf(data.dim());
        for (std::size_t i = 0; i < data.size(); ++i) {
            apply(data.row(i), buf);
            out.add(buf, data.label(i));
        }
        return out;
    }
};

enum class SolverInit { zero, random };

struct TrainConfig {
    double C = 1.0;
    double tol = 1e-6;          // relative duality gap
    int max_epochs = 10000;     // one epoch = n pair updates
    std::uint64_t seed = 0;     // only used by SolverInit::random
    bool standardize = true;
    SolverInit init = SolverInit::zero;

    void validate() const
    {
        if (!(C > 0.0) || !std::isfinite(C)) throw InputError("C must be > 0");
        if (!(tol > 0.0)) throw InputError("tol must be > 0");
        if (max_epochs < 1) throw InputError("max_epochs must be >= 1");
    }
};

inline const std::vector<double>& default_c_grid()
{
    static const std::vector<double> grid = {0.01, 0.1, 1.0, 10.0, 100.0};
    return grid;
}

struct TrainInfo {
    std::string solver = "smo-wss2";
    double C = 1.0;
    double tol = 1e-6;
    double objective = 0.0; // primal, at the returned (w, b)
    double dual = 0.0;
    double gap = 0.0;       // objective - dual
    std::size_t epochs = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_history; // best primal value at each epoch boundary
};

struct Prediction {
    Label label = Label::not_in_use;
    double margin = 0.0;
};

struct LinearModel {
    FeatureMask mask = FeatureMask::all();
    Standardizer transform;
    std::vector<double> w;
    double b = 0.0;
    TrainInfo info;

    std::size_t dim() const { return w.size(); }

    // w . x~ + b for a raw (unstandardised) feature row.
    double margin(std::span<const double> x) const
    {
        if (x.size() != w.size())
            throw InputError("feature vector has " + std::to_string(x.size()) + " components, model expects " +
                             std::to_string(w.size()));
        double m = b;
        for (std::size_t k = 0; k < w.size(); ++k) m += w[k] * ((x[k] - transform.mean[k]) / transform.scale[k]);
        return m;
    }
};

// Margin zero breaks the tie towards not-in-use.
inline Prediction predict(const LinearModel& m, std::span<const double> x)
{
    const double margin = m.margin(x);
    return {margin > 0.0 ? Label::in_use : Label::not_in_use, margin};
}

inline Prediction predict(const LinearModel& m, const FeatureVector& v)
{
    return predict(m, apply_mask(v, m.mask));
}

// 1/2 |w|^2 + C sum max(0, 1 - y (w.x + b)), with x taken as given.
inline double objective(std::span<const double> w, double b, const Dataset& data, double C)
{
    double ww = 0.0;
    for (double v : w) ww += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        double z = b;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * x[k];
        hinge += std::max(0.0, 1.0 - data.label(i) * z);
    }
    return 0.5 * ww + C * hinge;
}

// Primal objective of a model on raw data (the model's standardisation is applied).
inline double objective(const LinearModel& m, const Dataset& raw, double C)
{
    return objective(m.w, m.b, m.transform.apply(raw), C);
}

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, LinearModel best)
        : std::runtime_error(what), best_(std::move(best))
    {
    }
    const LinearModel& best() const { return best_; }

private:
    LinearModel best_;
};

namespace detail {

// Exact minimiser over b of the hinge sum for fixed scores z_i = w.x_i.
// Each hinge term has its kink at y_i - z_i and the slope increases by one
// at every kink, so the minimum lies between the n_pos-th and
// (n_pos+1)-th smallest kink. The midpoint of that interval is returned.
inline double optimal_bias(std::span<const double> z, std::span<const int> y)
{
    std::vector<double> kinks(z.size());
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        kinks[i] = y[i] - z[i];
        if (y[i] > 0) ++n_pos;
    }
    std::sort(kinks.begin(), kinks.end());
    return 0.5 * (kinks[n_pos - 1] + kinks[n_pos]);
}

// SMO on the dual  min 1/2 a'Qa - e'a,  y'a = 0,  0 <= a <= C,
// with Q_ij = y_i y_j x_i.x_j. The linear kernel keeps w = sum a_i y_i x_i
// explicit, so the gradient G_i = y_i w.x_i - 1. Working pairs are chosen by
// maximal violation for i and second-order gain for j.
class SmoSolver {
public:
    SmoSolver(const Dataset& data, const TrainConfig& cfg)
        : data_(data), cfg_(cfg), n_(data.size()), d_(data.dim()), alpha_(n_, 0.0), grad_(n_, -1.0), w_(d_, 0.0),
          sqnorm_(n_, 0.0)
    {
        for (std::size_t i = 0; i < n_; ++i) sqnorm_[i] = dot(data_.row(i), data_.row(i));
        if (cfg_.init == SolverInit::random) random_start();
        refresh_gradient();
    }

    LinearModel run()
    {
        TrainInfo info;
        info.C = cfg_.C;
        info.tol = cfg_.tol;
        LinearModel best;
        best.info.objective = std::numeric_limits<double>::infinity();

        double best_gap = std::numeric_limits<double>::infinity();
        for (int epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
            bool optimal = false;
            for (std::size_t it = 0; it < n_; ++it) {
                if (!take_step()) {
                    optimal = true;
                    break;
                }
                ++info.iterations;
            }
            refresh_gradient();
            ++info.epochs;

            const double bias = bias_for_current_w();
            const double primal = objective(w_, bias, data_, cfg_.C);
            const double dual = dual_value();
            if (primal < best.info.objective) {
                best.w = w_;
                best.b = bias;
                best.info.objective = primal;
                best.info.dual = dual;
            }
            best.info.dual = std::max(best.info.dual, dual);
            best_gap = best.info.objective - best.info.dual;
            info.objective_history.push_back(best.info.objective);

            const double scale = std::max(std::abs(best.info.objective), std::numeric_limits<double>::min());
            if (best_gap <= cfg_.tol * scale || optimal) {
                info.converged = true;
                break;
            }
        }

        info.objective = best.info.objective;
        info.dual = best.info.dual;
        info.gap = best_gap;
        best.info = std::move(info);
        if (!best.info.converged) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "SVM did not converge in %d epochs (duality gap %.3g, objective %.6g)",
                          cfg_.max_epochs, best.info.gap, best.info.objective);
            throw ConvergenceError(msg, best);
        }
        return best;
    }

private:
    static double dot(std::span<const double> a, std::span<const double> b)
    {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    }

    bool in_up(std::size_t t) const
    {
        return data_.label(t) > 0 ? alpha_[t] < cfg_.C : alpha_[t] > 0.0;
    }
    bool in_low(std::size_t t) const
    {
        return data_.label(t) > 0 ? alpha_[t] > 0.0 : alpha_[t] < cfg_.C;
    }

    // One pair update; false when no violating pair remains.
    bool take_step()
    {
        constexpr double kTau = 1e-12;
        constexpr double kViolation = 1e-12;

        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_up(t)) continue;
            const double v = -data_.label(t) * grad_[t];
            if (v > gmax) {
                gmax = v;
                i = t;
            }
        }
        if (i == n_) return false;

        double gmin = std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        std::size_t j = n_;
        const auto xi = data_.row(i);
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_low(t)) continue;
            const double v = -data_.label(t) * grad_[t];
            gmin = std::min(gmin, v);
            const double b = gmax - v;
            if (b <= 0.0) continue;
            double a = sqnorm_[i] + sqnorm_[t] - 2.0 * dot(xi, data_.row(t));
            if (a <= 0.0) a = kTau;
            const double gain = -(b * b) / a;
            if (gain < best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (j == n_ || gmax - gmin < kViolation) return false;

        const double old_i = alpha_[i], old_j = alpha_[j];
        const int yi = data_.label(i), yj = data_.label(j);
        const double C = cfg_.C;
        double quad = sqnorm_[i] + sqnorm_[j] - 2.0 * dot(xi, data_.row(j));
        if (quad <= 0.0) quad = kTau;

        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (yi != yj) {
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) { aj = 0.0; ai = diff; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = -diff; }
            }
            if (diff > 0.0) {
                if (ai > C) { ai = C; aj = C - diff; }
            } else {
                if (aj > C) { aj = C; ai = C + diff; }
            }
        } else {
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C) {
                if (ai > C) { ai = C; aj = sum - C; }
            } else {
                if (aj < 0.0) { aj = 0.0; ai = sum; }
            }
            if (sum > C) {
                if (aj > C) { aj = C; ai = sum - C; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = sum; }
            }
        }

        const double di = (ai - old_i) * yi, dj = (aj - old_j) * yj;
        if (di == 0.0 && dj == 0.0) return false;
        std::vector<double>& dw = scratch_;
        dw.assign(d_, 0.0);
        const auto xj = data_.row(j);
        for (std::size_t k = 0; k < d_; ++k) {
            dw[k] = di * xi[k] + dj * xj[k];
            w_[k] += dw[k];
        }
        for (std::size_t t = 0; t < n_; ++t) grad_[t] += data_.label(t) * dot(dw, data_.row(t));
        return true;
    }

    void refresh_gradient()
    {
        std::fill(w_.begin(), w_.end(), 0.0);
        for (std::size_t t = 0; t < n_; ++t) {
            if (alpha_[t] == 0.0) continue;
            const auto x = data_.row(t);
            for (std::size_t k = 0; k < d_; ++k) w_[k] += alpha_[t] * data_.label(t) * x[k];
        }
        for (std::size_t t = 0; t < n_; ++t) grad_[t] = data_.label(t) * dot(w_, data_.row(t)) - 1.0;
    }

    double bias_for_current_w() const
    {
        std::vector<double> z(n_);
        for (std::size_t t = 0; t < n_; ++t) z[t] = dot(w_, data_.row(t));
        return optimal_bias(z, data_.labels());
    }

    double dual_value() const
    {
        double sum = 0.0;
        for (double a : alpha_) sum += a;
        return sum - 0.5 * dot(w_, w_);
    }

    // Feasible random start: uniform alphas, larger class rescaled so y'a = 0.
    void random_start()
    {
        std::mt19937_64 rng(cfg_.seed);
        std::uniform_real_distribution<double> u(0.0, cfg_.C);
        double pos = 0.0, neg = 0.0;
        for (std::size_t t = 0; t < n_; ++t) {
            alpha_[t] = u(rng);
            (data_.label(t) > 0 ? pos : neg) += alpha_[t];
        }
        const bool shrink_pos = pos > neg;
        const double factor = shrink_pos ? neg / pos : pos / neg;
        for (std::size_t t = 0; t < n_; ++t)
            if ((data_.label(t) > 0) == shrink_pos) alpha_[t] *= factor;
    }

    const Dataset& data_;
    const TrainConfig& cfg_;
    std::size_t n_, d_;
    std::vector<double> alpha_, grad_, w_, sqnorm_, scratch_;
};

} // namespace detail

// Soft-margin linear SVM. The returned (w, b) acts on standardised features
// when cfg.standardize is set; the transform is stored in the model.
inline LinearModel train(const Dataset& raw, const TrainConfig& cfg, FeatureMask mask)
{
    cfg.validate();
    raw.validate_for_training();
    if (raw.dim() != mask.size())
        throw InputError("dataset dimension " + std::to_string(raw.dim()) + " does not match mask " + mask.name());
    Standardizer transform = cfg.standardize ? Standardizer::fit(raw) : Standardizer::identity(raw.dim());
    const Dataset data = transform.apply(raw);

    auto finish = [&](LinearModel m) {
        m.mask = mask;
        m.transform = transform;
        return m;
    };
    try {
        return finish(detail::SmoSolver(data, cfg).run());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(e.what(), finish(e.best()));
    }
}

// Mask defaults to "first dim() features".
inline LinearModel train(const Dataset& raw, const TrainConfig& cfg)
{
    if (raw.dim() < 1 || raw.dim() > kNumFeatures) throw InputError("feature dimension must be in [1, 5]");
    return train(raw, cfg, FeatureMask::from_bits((1u << raw.dim()) - 1));
}

// ---- persistence -----------------------------------------------------------

inline constexpr const char* kModelMagic = "handuse-linear-model";
inline constexpr int kModelVersion = 1;

inline void save_model(std::ostream& os, const LinearModel& m)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto vec = [&](const std::vector<double>& v) {
        std::string s;
        for (double x : v) s += ' ' + num(x);
        return s;
    };
    os << kModelMagic << " v" << kModelVersion << '\n'
       << "mask " << m.mask.bits() << '\n'
       << "dim " << m.dim() << '\n'
       << "mean" << vec(m.transform.mean) << '\n'
       << "scale" << vec(m.transform.scale) << '\n'
       << "w" << vec(m.w) << '\n'
       << "b " << num(m.b) << '\n'
       << "C " << num(m.info.C) << '\n'
       << "tol " << num(m.info.tol) << '\n'
       << "objective " << num(m.info.objective) << '\n'
       << "dual " << num(m.info.dual) << '\n'
       << "gap " << num(m.info.gap) << '\n'
       << "epochs " << m.info.epochs << '\n'
       << "iterations " << m.info.iterations << '\n'
       << "converged " << (m.info.converged ? 1 : 0) << '\n'
       << "solver " << m.info.solver << '\n';
}

inline LinearModel load_model(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != std::string(kModelMagic) + " v" + std::to_string(kModelVersion))
        throw InputError("not a version " + std::to_string(kModelVersion) + " model file");

    LinearModel m;
    std::size_t dim = 0;
    bool have_mask = false, have_w = false, have_b = false;
    auto read_vec = [&](std::istringstream& ss, const std::string& key) {
        std::vector<double> v;
        std::string tok;
        while (ss >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
        if (v.size() != dim) throw InputError("model field '" + key + "' has wrong length");
        return v;
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        std::string tok;
        if (key == "mask") {
            unsigned bits = 0;
            ss >> bits;
            m.mask = FeatureMask::from_bits(bits);
            have_mask = true;
        } else if (key == "dim") {
            ss >> dim;
        } else if (key == "mean") {
            m.transform.mean = read_vec(ss, key);
        } else if (key == "scale") {
            m.transform.scale = read_vec(ss, key);
        } else if (key == "w") {
            m.w = read_vec(ss, key);
            have_w = true;
        } else if (key == "solver") {
            ss >> m.info.solver;
        } else if (key == "epochs") {
            ss >> m.info.epochs;
        } else if (key == "iterations") {
            ss >> m.info.iterations;
        } else if (key == "converged") {
            int c = 0;
            ss >> c;
            m.info.converged = c != 0;
        } else {
            ss >> tok;
            const double v = std::strtod(tok.c_str(), nullptr);
            if (key == "b") { m.b = v; have_b = true; }
            else if (key == "C") m.info.C = v;
            else if (key == "tol") m.info.tol = v;
            else if (key == "objective") m.info.objective = v;
            else if (key == "dual") m.info.dual = v;
            else if (key == "gap") m.info.gap = v;
            else throw InputError("unknown model field '" + key + "'");
        }
    }
    if (!have_mask || !have_w || !have_b || m.transform.mean.size() != dim || m.transform.scale.size() != dim)
        throw InputError("model file is incomplete");
    if (m.mask.size() != dim) throw InputError("model mask does not match its dimension");
    for (double s : m.transform.scale)
        if (!(s > 0.0)) throw InputError("model scale components must be > 0");
    return m;
}

} // namespace handuse
