#include "excsim/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "excsim/units.hpp"

namespace excsim {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw FitError("linear_fit: need >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw FitError("linear_fit: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

FixedFreqCosineFit fit_fixed_freq_cosine(std::span<const double> t, std::span<const double> y,
                                         double omega) {
    if (t.size() != y.size() || t.size() < 3)
        throw FitError("fit_fixed_freq_cosine: need >= 3 points");
    Eigen::MatrixXd m(t.size(), 3);
    Eigen::VectorXd rhs(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        m(i, 0) = 1.0;
        m(i, 1) = std::cos(omega * t[i]);
        m(i, 2) = std::sin(omega * t[i]);
        rhs(i) = y[i];
    }
    const Eigen::Vector3d c = m.colPivHouseholderQr().solve(rhs);
    FixedFreqCosineFit f;
    f.offset = c(0);
    f.amplitude = std::hypot(c(1), c(2));
    f.phase = std::atan2(-c(2), c(1));
    return f;
}

namespace {

struct VarProEval {
    double rss = 0.0;
    Eigen::VectorXd coeff;
};

VarProEval varpro_solve(std::span<const double> t, std::span<const double> y, double omega,
                        double lambda, bool with_offset) {
    const int ncol = with_offset ? 3 : 2;
    Eigen::MatrixXd m(t.size(), ncol);
    Eigen::VectorXd rhs(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double env = std::exp(-lambda * t[i]);
        int c = 0;
        if (with_offset) m(i, c++) = env;
        m(i, c++) = env * std::cos(omega * t[i]);
        m(i, c) = env * std::sin(omega * t[i]);
        rhs(i) = y[i];
    }
    VarProEval ev;
    ev.coeff = m.colPivHouseholderQr().solve(rhs);
    ev.rss = (m * ev.coeff - rhs).squaredNorm();
    return ev;
}

// Nelder-Mead on (omega, log lambda).
std::pair<double, double> nelder_mead_2d(const std::function<double(double, double)>& f,
                                         double x0, double y0, double dx, double dy,
                                         int max_iter) {
    struct Pt {
        double x, y, v;
    };
    std::array<Pt, 3> s{Pt{x0, y0, f(x0, y0)}, Pt{x0 + dx, y0, f(x0 + dx, y0)},
                        Pt{x0, y0 + dy, f(x0, y0 + dy)}};
    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
        if (std::abs(s[2].v - s[0].v) < 1e-15 * (1.0 + std::abs(s[0].v))) break;
        const double cx = 0.5 * (s[0].x + s[1].x);
        const double cy = 0.5 * (s[0].y + s[1].y);
        Pt refl{cx + (cx - s[2].x), cy + (cy - s[2].y), 0.0};
        refl.v = f(refl.x, refl.y);
        if (refl.v < s[0].v) {
            Pt exp_{cx + 2.0 * (cx - s[2].x), cy + 2.0 * (cy - s[2].y), 0.0};
            exp_.v = f(exp_.x, exp_.y);
            s[2] = exp_.v < refl.v ? exp_ : refl;
        } else if (refl.v < s[1].v) {
            s[2] = refl;
        } else {
            Pt con{cx + 0.5 * (s[2].x - cx), cy + 0.5 * (s[2].y - cy), 0.0};
            con.v = f(con.x, con.y);
            if (con.v < s[2].v) {
                s[2] = con;
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].x = 0.5 * (s[i].x + s[0].x);
                    s[i].y = 0.5 * (s[i].y + s[0].y);
                    s[i].v = f(s[i].x, s[i].y);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
    return {s[0].x, s[0].y};
}

} // namespace

DampedCosineFit fit_damped_cosine(std::span<const double> t, std::span<const double> y,
                                  bool with_offset) {
    if (t.size() != y.size() || t.size() < 8)
        throw FitError("fit_damped_cosine: need >= 8 points");
    const double span = t.back() - t.front();
    const double dt_min = [&] {
        double d = span;
        for (std::size_t i = 1; i < t.size(); ++i) d = std::min(d, t[i] - t[i - 1]);
        return d;
    }();
    if (!(span > 0.0)) throw FitError("fit_damped_cosine: degenerate time span");

    // Coarse grid over omega and lambda, then local refinement.
    const double w_lo = 2.0 * M_PI / span * 0.5;
    const double w_hi = M_PI / dt_min * 0.9;
    double best_rss = std::numeric_limits<double>::infinity();
    double best_w = w_lo, best_l = 1.0 / span;
    for (int j = 0; j <= 9; ++j) {
        const double lambda = std::pow(2.0, j) / (8.0 * span);
        for (int i = 0; i <= 500; ++i) {
            const double w = w_lo + (w_hi - w_lo) * i / 500.0;
            const double rss = varpro_solve(t, y, w, lambda, with_offset).rss;
            if (rss < best_rss) {
                best_rss = rss;
                best_w = w;
                best_l = lambda;
            }
        }
    }
    const auto obj = [&](double w, double loglam) {
        if (w <= 0.0) return 1e300;
        return varpro_solve(t, y, w, std::exp(loglam), with_offset).rss;
    };
    auto [w_opt, loglam_opt] =
        nelder_mead_2d(obj, best_w, std::log(best_l), (w_hi - w_lo) / 1000.0, 0.05, 400);
    const double lam_opt = std::exp(loglam_opt);
    const auto ev = varpro_solve(t, y, w_opt, lam_opt, with_offset);

    DampedCosineFit f;
    f.omega = w_opt;
    f.lambda = lam_opt;
    int c = 0;
    if (with_offset) f.offset = ev.coeff(c++);
    const double a = ev.coeff(c);
    const double b = ev.coeff(c + 1);
    f.amplitude = std::hypot(a, b);
    f.phase = std::atan2(-b, a);
    f.rss = ev.rss;

    // Standard error of omega from the curvature of the projected rss.
    const double h = std::max(1e-5, 1e-5 * w_opt);
    const double r0 = ev.rss;
    const double rp = varpro_solve(t, y, w_opt + h, lam_opt, with_offset).rss;
    const double rm = varpro_solve(t, y, w_opt - h, lam_opt, with_offset).rss;
    const double curv = (rp - 2.0 * r0 + rm) / (h * h);
    const int dof = static_cast<int>(t.size()) - (with_offset ? 5 : 4);
    if (curv > 0.0 && dof > 0) {
        const double sigma2 = r0 / dof;
        f.omega_stderr = std::sqrt(2.0 * sigma2 / curv);
    }
    return f;
}

namespace {

/// Constant offset plus damped cosine: y = c0 + e^{-lambda t}(a cos + b sin).
/// Used after the radiative envelope has been divided out, where the offset
/// no longer decays but the beat contrast still does.
VarProEval varpro_flat_offset(std::span<const double> t, std::span<const double> y, double omega,
                              double lambda) {
    Eigen::MatrixXd m(t.size(), 3);
    Eigen::VectorXd rhs(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double env = std::exp(-lambda * t[i]);
        m(i, 0) = 1.0;
        m(i, 1) = env * std::cos(omega * t[i]);
        m(i, 2) = env * std::sin(omega * t[i]);
        rhs(i) = y[i];
    }
    VarProEval ev;
    ev.coeff = m.colPivHouseholderQr().solve(rhs);
    ev.rss = (m * ev.coeff - rhs).squaredNorm();
    return ev;
}

} // namespace

SplittingFit fit_splitting(const TimeTrace& trace) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.valid[i]) {
            t.push_back(trace.bin_center(i));
            y.push_back(trace.value[i]);
        }
    }
    if (t.size() < 8) throw FitError("fit_splitting: too few valid bins");

    // Guard bands: the edges of the window carry the detector-response
    // turn-on/truncation transients, which bias the frequency once the
    // envelope is divided out.
    const double window = t.back() - t.front();
    const double t_min = t.front() + 0.08 * window;
    const double t_max = t.back() - 0.08 * window;
    std::vector<double> tt, yy;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_min && t[i] <= t_max) {
            tt.push_back(t[i]);
            yy.push_back(y[i]);
        }
    }
    if (tt.size() < 8) throw FitError("fit_splitting: too few valid bins");

    // Divide out the overall (radiative) envelope so the remaining model is
    // a constant offset plus a damped beat; the raw trace has two different
    // decay constants, which a single-envelope fit cannot represent.
    const auto env = fit_exp_decay(tt, yy);
    std::vector<double> r(yy.size());
    for (std::size_t i = 0; i < yy.size(); ++i)
        r[i] = yy[i] / (env.amplitude * std::exp(-tt[i] / env.time_constant));

    const double span = tt.back() - tt.front();
    const double dt_min = [&] {
        double d = span;
        for (std::size_t i = 1; i < tt.size(); ++i) d = std::min(d, tt[i] - tt[i - 1]);
        return d;
    }();
    const double w_lo = M_PI / span;
    const double w_hi = M_PI / dt_min * 0.9;
    double best_rss = std::numeric_limits<double>::infinity();
    double best_w = w_lo, best_l = 1.0 / span;
    for (int j = 0; j <= 9; ++j) {
        const double lambda = std::pow(2.0, j) / (8.0 * span);
        for (int i = 0; i <= 500; ++i) {
            const double w = w_lo + (w_hi - w_lo) * i / 500.0;
            const double rss = varpro_flat_offset(tt, r, w, lambda).rss;
            if (rss < best_rss) {
                best_rss = rss;
                best_w = w;
                best_l = lambda;
            }
        }
    }
    const auto obj = [&](double w, double loglam) {
        if (w <= 0.0) return 1e300;
        return varpro_flat_offset(tt, r, w, std::exp(loglam)).rss;
    };
    auto [w_opt, loglam_opt] =
        nelder_mead_2d(obj, best_w, std::log(best_l), (w_hi - w_lo) / 1000.0, 0.05, 400);
    const double lam_opt = std::exp(loglam_opt);
    const auto ev = varpro_flat_offset(tt, r, w_opt, lam_opt);

    const double period = 2.0 * M_PI / w_opt;
    if (span < 2.0 * period) throw FitError("fit_splitting: insufficient periods");
    if (!std::isfinite(w_opt) || std::hypot(ev.coeff(1), ev.coeff(2)) <= 0.0)
        throw FitError("fit_splitting: fit did not converge");

    double stderr_w = 0.0;
    const double h = std::max(1e-5, 1e-5 * w_opt);
    const double rp = varpro_flat_offset(tt, r, w_opt + h, lam_opt).rss;
    const double rm = varpro_flat_offset(tt, r, w_opt - h, lam_opt).rss;
    const double curv = (rp - 2.0 * ev.rss + rm) / (h * h);
    const int dof = static_cast<int>(tt.size()) - 5;
    if (curv > 0.0 && dof > 0) stderr_w = std::sqrt(2.0 * ev.rss / dof / curv);
    return {kHbar * w_opt, kHbar * stderr_w};
}

ExpDecayFit fit_exp_decay(std::span<const double> t, std::span<const double> y) {
    std::vector<double> tt, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > 1e-12) {
            tt.push_back(t[i]);
            ly.push_back(std::log(y[i]));
        }
    }
    if (tt.size() < 2) throw FitError("fit_exp_decay: too few positive points");
    const auto lf = linear_fit(tt, ly);
    if (lf.slope >= 0.0) return {std::exp(lf.intercept), std::numeric_limits<double>::infinity()};
    return {std::exp(lf.intercept), -1.0 / lf.slope};
}

} // namespace excsim
