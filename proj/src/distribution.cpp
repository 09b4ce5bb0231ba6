#include "toalab/distribution.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <thread>
#include <tuple>

namespace toalab {

SpectralWeights spectral_weights(const ComplexAmplitude& phi, const Spectrum& s) {
    Eigen::VectorXcd c = s.overlaps(phi);
    SpectralWeights w;
    w.tau = s.eigenvalues;
    w.weight.resize(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        w.weight[n] = std::norm(c(Eigen::Index(n)));
        w.total += w.weight[n];
        w.mean += w.weight[n] * w.tau[n];
    }
    w.mean /= w.total;
    for (std::size_t n = 0; n < s.size(); ++n) w.variance += w.weight[n] * (w.tau[n] - w.mean) * (w.tau[n] - w.mean);
    w.variance /= w.total;
    return w;
}

double arrival_probability_before(const SpectralWeights& w, double tau) {
    double s = 0.0;
    for (std::size_t n = 0; n < w.tau.size() && w.tau[n] <= tau; ++n) s += w.weight[n];
    return s;
}

double arrival_probability_before(const ComplexAmplitude& phi, const Spectrum& s, double tau) {
    return arrival_probability_before(spectral_weights(phi, s), tau);
}

struct CumulativeLaw::Impl {
    std::vector<double> x, y;
    gsl_interp* interp = nullptr;
    gsl_interp_accel* acc = nullptr;
    ~Impl() {
        if (interp) gsl_interp_free(interp);
        if (acc) gsl_interp_accel_free(acc);
    }
};

CumulativeLaw::CumulativeLaw(const SpectralWeights& w) : impl_(new Impl) {
    const std::size_t n = w.tau.size();
    if (n < 4) throw InputError("CumulativeLaw: need at least 4 eigenvalues");
    double F = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        F += w.weight[k];
        double m = 0.5 * (w.tau[k] + w.tau[k + 1]);
        if (!impl_->x.empty() && !(m > impl_->x.back())) continue;  // degenerate gap
        impl_->x.push_back(m);
        impl_->y.push_back(F);
    }
    if (impl_->x.size() < 3) throw NumericalError("CumulativeLaw: too few distinct eigenvalues");
    gsl_set_error_handler_off();
    impl_->interp = gsl_interp_alloc(gsl_interp_steffen, impl_->x.size());
    impl_->acc = gsl_interp_accel_alloc();
    if (gsl_interp_init(impl_->interp, impl_->x.data(), impl_->y.data(), impl_->x.size()) != GSL_SUCCESS)
        throw NumericalError("CumulativeLaw: interpolation setup failed");
}

CumulativeLaw::~CumulativeLaw() { delete impl_; }
CumulativeLaw::CumulativeLaw(CumulativeLaw&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }

double CumulativeLaw::lo() const { return impl_->x.front(); }
double CumulativeLaw::hi() const { return impl_->x.back(); }

double CumulativeLaw::cdf(double tau) const {
    if (tau <= lo()) return tau < lo() ? 0.0 : impl_->y.front();
    if (tau >= hi()) return impl_->y.back();
    return gsl_interp_eval(impl_->interp, impl_->x.data(), impl_->y.data(), tau, impl_->acc);
}

double CumulativeLaw::density(double tau) const {
    if (tau <= lo() || tau >= hi()) return 0.0;
    return std::max(0.0, gsl_interp_eval_deriv(impl_->interp, impl_->x.data(), impl_->y.data(), tau, impl_->acc));
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw InputError("linspace: need at least two points");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
    return v;
}

double l1_distance(const std::vector<double>& grid, const std::vector<double>& a, const std::vector<double>& b) {
    if (grid.size() != a.size() || a.size() != b.size()) throw InputError("l1_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        s += 0.5 * (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1])) * (grid[i + 1] - grid[i]);
    return s;
}

TOADistribution toa_distribution(const ComplexAmplitude& phi, const Spectrum& s, const std::vector<double>& tau_grid) {
    if (tau_grid.size() < 2) throw InputError("toa_distribution: tau grid needs at least two points");
    SpectralWeights w = spectral_weights(phi, s);
    TOADistribution d;
    d.eig_tau = w.tau;
    d.weight = w.weight;
    d.total_weight = w.total;
    d.mean = w.mean;
    d.stddev = std::sqrt(w.variance);
    const std::size_t n = w.tau.size();
    d.raw_density.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double gap = k == 0 ? w.tau[1] - w.tau[0]
                   : k + 1 == n ? w.tau[n - 1] - w.tau[n - 2]
                                : 0.5 * (w.tau[k + 1] - w.tau[k - 1]);
        d.raw_density[k] = w.weight[k] / gap;
    }
    CumulativeLaw law(w);
    d.tau = tau_grid;
    d.density.resize(tau_grid.size());
    d.cdf.resize(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        d.density[i] = law.density(tau_grid[i]);
        d.cdf[i] = law.cdf(tau_grid[i]);
    }
    auto it = std::max_element(d.density.begin(), d.density.end());
    d.peak = *it;
    d.mode = tau_grid[it - d.density.begin()];
    // local eigenvalue spacing at the mean vs requested grid step
    std::size_t k = std::lower_bound(w.tau.begin(), w.tau.end(), w.mean) - w.tau.begin();
    k = std::clamp<std::size_t>(k, 1, n - 2);
    double gap = 0.5 * (w.tau[k + 1] - w.tau[k - 1]);
    double step = tau_grid[1] - tau_grid[0];
    if (gap > step) {
        std::ostringstream os;
        os << "eigenvalue spacing " << gap << " near the mean is coarser than the tau grid step " << step
           << "; density between eigenvalues is interpolated";
        d.warnings.push_back(os.str());
    }
    if (std::abs(w.total - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "total spectral weight " << w.total << " differs from 1 (state not inside the box?)";
        d.warnings.push_back(os.str());
    }
    d.provenance.box = s.box;
    d.provenance.N = int(s.size());
    d.provenance.h = s.h;
    if (phi.spec) d.provenance.state = phi.spec;
    return d;
}

CovarianceResult covariance_check(const WavepacketSpec& s0, const PhysicalParams& p, double t, const Spectrum& s,
                                  int grid_points) {
    if (t < 0) throw InputError("covariance_check: t must be >= 0");
    CovarianceResult r;
    r.t = t;
    ComplexAmplitude phi0 = gaussian(s0, p);
    ComplexAmplitude phit = evolved_gaussian(s0, p, t);
    {
        // |phi_t|^2 is normal with mean c and std sigma_t
        const double mu = p.mu(), g = p.g_eff(), sp = p.hbar * t / (2.0 * mu * s0.sigma2());
        const double sig_t = s0.sigma * std::sqrt(1.0 + sp * sp);
        const double c = s0.q0 + s0.v0 * t - 0.5 * g * t * t;
        const double outside = 0.5 * std::erfc((s.box.hi - c) / (sig_t * std::sqrt(2.0))) +
                               0.5 * std::erfc((c - s.box.lo) / (sig_t * std::sqrt(2.0)));
        if (outside > 1e-8) {
            r.box_escape = true;
            std::ostringstream os;
            os << "evolved packet has probability " << outside << " outside the box [" << s.box.lo << ", "
               << s.box.hi << "] at t = " << t;
            r.warnings.push_back(os.str());
        }
    }
    SpectralWeights w0 = spectral_weights(phi0, s), wt = spectral_weights(phit, s);
    r.mean_shift = (wt.mean + t) - w0.mean;
    CumulativeLaw L0(w0), Lt(wt);
    const double sd = std::sqrt(w0.variance);
    std::vector<double> grid = linspace(w0.mean - 8.0 * sd, w0.mean + 8.0 * sd, grid_points);
    std::vector<double> P0(grid.size()), Pt(grid.size());
    double pmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double tau = grid[i];
        r.ks = std::max(r.ks, std::abs(Lt.cdf(tau - t) - L0.cdf(tau)));
        P0[i] = L0.density(tau);
        Pt[i] = Lt.density(tau - t);
        r.density_sup = std::max(r.density_sup, std::abs(P0[i] - Pt[i]));
        pmax = std::max(pmax, P0[i]);
    }
    r.density_rel = pmax > 0 ? r.density_sup / pmax : 0.0;
    r.density_l1 = l1_distance(grid, P0, Pt);
    return r;
}

std::vector<SweepPoint> sweep_grid(const std::vector<double>& mu, const std::vector<double>& ratio,
                                   const std::vector<double>& v0, const std::vector<double>& sigma2,
                                   const std::vector<double>& q0, double g, double hbar) {
    for (auto* axis : {&mu, &ratio, &v0, &sigma2, &q0})
        if (axis->empty()) throw InputError("sweep: every axis needs at least one value");
    std::vector<SweepPoint> pts;
    for (double m : mu)
        for (double r : ratio)
            for (double v : v0)
                for (double s2 : sigma2)
                    for (double q : q0) {
                        SweepPoint sp;
                        sp.params = PhysicalParams{hbar, g, m, m / r};
                        sp.state = WavepacketSpec::from_sigma2(q, s2, v);
                        pts.push_back(sp);
                    }
    return pts;
}

std::vector<SweepRecord> sweep(const SweepSpec& spec, int threads) {
    if (spec.points.empty()) throw InputError("sweep: empty grid");
    std::vector<SweepRecord> out(spec.points.size());
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        out[i].index = i;
        out[i].point = spec.points[i];
    }
    // semiclassical columns
    for (auto& rec : out) {
        try {
            rec.point.params.validate();
            rec.point.state.validate();
            auto le = leading_expansion(rec.point.state, rec.point.params, spec.side);
            rec.tau0 = le.classical;
            rec.alpha2_hbar2 = le.correction2;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    }
    if (!spec.distributions) return out;
    if (spec.tau_grid.size() < 2) throw InputError("sweep: distributions need a tau grid");

    // the matrix depends only on (mu, g_eff, hbar): one spectrum per distinct triple
    using Key = std::tuple<double, double, double>;
    std::map<Key, std::vector<std::size_t>> groups;
    for (auto& rec : out)
        if (rec.ok) groups[{rec.point.params.mu(), rec.point.params.g_eff(), rec.point.params.hbar}].push_back(rec.index);
    const int N = int(std::lround(spec.box.length() / spec.h));
    for (auto& [key, idx] : groups) {
        try {
            KernelSpec ks{out[idx.front()].point.params, Frame::position};
            Spectrum sp = eigensystem(discretize(ks, spec.box, N, spec.gregory_order, threads));
            for (std::size_t i : idx) {
                try {
                    ComplexAmplitude phi = gaussian(out[i].point.state, out[i].point.params);
                    TOADistribution d = toa_distribution(phi, sp, spec.tau_grid);
                    d.provenance.params = out[i].point.params;
                    d.provenance.gregory_order = spec.gregory_order;
                    out[i].dist = std::move(d);
                } catch (const std::exception& e) {
                    out[i].ok = false;
                    out[i].error = e.what();
                }
            }
        } catch (const std::exception& e) {
            for (std::size_t i : idx) {
                out[i].ok = false;
                out[i].error = e.what();
            }
        }
    }
    return out;
}

}  // namespace toalab
