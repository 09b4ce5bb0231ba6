#include "toalab/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace toalab {

std::vector<double> gregory_band(int order) {
    // Gregory end corrections in forward differences:
    //   +1/12 D - 1/24 D^2 + 19/720 D^3 - 3/160 D^4 + 863/60480 D^5
    static const double coef[] = {1.0 / 12, -1.0 / 24, 19.0 / 720, -3.0 / 160, 863.0 / 60480};
    if (order < 0 || order > 5) throw InputError("gregory order must be in [0, 5]");
    std::vector<double> c(order + 1, 0.0);
    for (int m = 1; m <= order; ++m)
        for (int j = 0; j <= m; ++j) {
            double binom = std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0));
            c[j] += coef[m - 1] * ((m - j) % 2 ? -1.0 : 1.0) * binom;
        }
    std::vector<double> band(order + 1, 1.0);
    for (int j = 1; j <= order; ++j) band[j] = 1.0 + c[j];
    return band;  // band[0] unused (diagonal of the kernel vanishes)
}

double DiscretizedTOA::hermiticity_residual() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }

DiscretizedTOA discretize(const KernelSpec& spec, Box box, int N, int gregory_order, int threads) {
    if (!(box.hi > box.lo)) throw InputError("discretize: empty box");
    if (N < 64) throw InputError("discretize: N must be >= 64");
    spec.params.validate();
    DiscretizedTOA d;
    d.spec = spec;
    d.box = box;
    d.N = N;
    d.h = box.length() / N;
    d.gregory_order = gregory_order;
    d.rule.a = box.lo;
    d.rule.b = box.hi;
    d.rule.nodes.resize(N);
    d.rule.weights.assign(N, d.h);
    for (int i = 0; i < N; ++i) d.rule.nodes[i] = box.lo + d.h * (i + 0.5);

    const double l = box.reach();
    const double hmax = 0.25 * spec.hbar() / (spec.mu() * std::sqrt(spec.g()) * std::pow(l, 1.5));
    if (d.h > hmax) {
        std::ostringstream os;
        os << "discretize: node spacing " << d.h << " exceeds the kernel oscillation scale " << hmax;
        d.warnings.push_back(os.str());
    }

    const std::vector<double> band = gregory_band(gregory_order);
    d.matrix.setZero(N, N);
    auto fill_rows = [&](int t, int nt) {
        for (int i = t; i < N; i += nt) {
            const double qi = d.rule.nodes[i];
            for (int j = i + 1; j < N; ++j) {
                double v = kernel_imag(qi, d.rule.nodes[j], spec) * d.h;
                int off = j - i;
                if (off <= gregory_order) v *= band[off];
                d.matrix(i, j) = cplx(0.0, v);
                d.matrix(j, i) = cplx(0.0, -v);
            }
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        fill_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(fill_rows, t, threads);
        for (auto& th : pool) th.join();
    }
    return d;
}

const char* to_string(Tag t) {
    switch (t) {
        case Tag::nodal: return "nodal";
        case Tag::non_nodal: return "non-nodal";
        case Tag::indeterminate: return "indeterminate";
        default: return "unclassified";
    }
}

GridAmplitude Spectrum::eigenfunction(std::size_t n) const {
    GridAmplitude g;
    g.q = q;
    g.v.resize(q.size());
    const double s = 1.0 / std::sqrt(h);
    for (std::size_t i = 0; i < q.size(); ++i) g.v[i] = vectors(Eigen::Index(i), Eigen::Index(n)) * s;
    return g;
}

std::vector<std::size_t> Spectrum::order_by_magnitude() const {
    std::vector<std::size_t> idx(eigenvalues.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        double ma = std::abs(eigenvalues[a]), mb = std::abs(eigenvalues[b]);
        if (ma != mb) return ma < mb;
        bool na = !tags.empty() && tags[a] == Tag::nodal;
        bool nb = !tags.empty() && tags[b] == Tag::nodal;
        return na && !nb;
    });
    return idx;
}

double Spectrum::orthonormality_residual() const {
    Eigen::MatrixXcd G = vectors.adjoint() * vectors;
    G -= Eigen::MatrixXcd::Identity(G.rows(), G.cols());
    return G.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd Spectrum::overlaps(const ComplexAmplitude& phi) const {
    Eigen::VectorXcd f(q.size());
    const double s = std::sqrt(h);
    for (std::size_t i = 0; i < q.size(); ++i) f(Eigen::Index(i)) = phi(q[i]) * s;
    return vectors.adjoint() * f;
}

std::size_t Spectrum::nearest(double tau) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i] - tau) < std::abs(eigenvalues[best] - tau)) best = i;
    return best;
}

Spectrum eigensystem(const DiscretizedTOA& d) {
    const int N = d.N;
    Eigen::MatrixXcd a = d.matrix;
    Eigen::MatrixXcd z(N, N);
    std::vector<double> w(N);
    std::vector<lapack_int> support(2 * std::size_t(N));
    lapack_int found = 0;
    // MRRR driver; the divide-and-conquer driver (zheevd) loses orthogonality on this matrix class
    lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', N,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), N, 0.0, 0.0, 0, 0, 0.0,
                                     &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), N,
                                     support.data());
    auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os << "eigensystem: " << what << "; max |M| = " << d.matrix.cwiseAbs().maxCoeff()
           << ", hermiticity residual " << d.hermiticity_residual();
        throw NumericalError(os.str());
    };
    if (info != 0 || found != N) fail("zheevr failed (info " + std::to_string(info) + ")");
    // sampled orthogonality check
    const int stride = std::max(1, N / 16);
    for (int j = 0; j < N; j += stride) {
        Eigen::VectorXcd g = z.adjoint() * z.col(j);
        g(j) -= 1.0;
        if (g.cwiseAbs().maxCoeff() > 1e-8) fail("eigenvectors are not orthonormal");
    }
    Spectrum s;
    s.eigenvalues = std::move(w);
    s.vectors = std::move(z);
    s.q = d.rule.nodes;
    s.h = d.h;
    s.box = d.box;
    s.tags.assign(N, Tag::unclassified);
    return s;
}

SpectralMoments spectral_moments(const Spectrum& s, const ComplexAmplitude& phi) {
    Eigen::VectorXcd c = s.overlaps(phi);
    SpectralMoments m;
    for (std::size_t n = 0; n < s.size(); ++n) {
        double wgt = std::norm(c(Eigen::Index(n)));
        m.weight += wgt;
        m.mean += wgt * s.eigenvalues[n];
    }
    m.mean /= m.weight;
    for (std::size_t n = 0; n < s.size(); ++n) {
        double dt = s.eigenvalues[n] - m.mean;
        m.variance += std::norm(c(Eigen::Index(n))) * dt * dt;
    }
    m.variance /= m.weight;
    return m;
}

Tag classify_profile(const std::vector<double>& density, std::size_t c, int window) {
    const std::size_t n = density.size();
    if (n < 7 || c < 1 || c + 1 >= n) return Tag::indeterminate;
    std::vector<double> d(n);
    d[0] = density[0];
    d[n - 1] = density[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (density[i - 1] + density[i] + density[i + 1]) / 3.0;
    const double peak = *std::max_element(d.begin(), d.end());
    if (!(peak > 0)) return Tag::indeterminate;

    const std::size_t lo = c >= std::size_t(window) ? c - window : 0;
    const std::size_t hi = std::min(n - 1, c + window);
    std::size_t wmax = lo;
    for (std::size_t i = lo; i <= hi; ++i)
        if (d[i] > d[wmax]) wmax = i;

    // single dominant maximum at the arrival point
    if (wmax > lo && wmax < hi && d[wmax] >= 0.5 * peak && d[c] >= 0.9 * d[wmax]) return Tag::non_nodal;

    // local minimum at the arrival point between two dominant flanking peaks
    std::size_t l = c, r = c;
    while (l > 0 && d[l - 1] >= d[l]) --l;
    while (r + 1 < n && d[r + 1] >= d[r]) ++r;
    const double flank = std::min(d[l], d[r]);
    if (l < c && r > c && flank >= 0.5 * peak && d[c] <= 0.5 * flank) return Tag::nodal;
    return Tag::indeterminate;
}

namespace {
std::size_t nearest_index(const std::vector<double>& q, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (std::abs(q[i] - x) < std::abs(q[best] - x)) best = i;
    return best;
}
}  // namespace

Tag classify(const Spectrum& s, std::size_t n, const PhysicalParams& p, const ClassifyControl& c) {
    GridAmplitude psi = s.eigenfunction(n);
    GridAmplitude out = evolve_fft(psi, s.eigenvalues[n], p, c.pad);
    std::vector<double> dens(out.v.size());
    for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = std::norm(out.v[i]);
    return classify_profile(dens, nearest_index(out.q, 0.0), c.window);
}

ArrivalMetrics unitary_arrival_metrics(const Spectrum& s, std::size_t n, const PhysicalParams& p,
                                       const std::vector<double>& times, double window, double pad) {
    if (times.size() < 2) throw InputError("unitary_arrival_metrics: need at least two times");
    ArrivalMetrics m;
    m.tau = s.eigenvalues[n];
    m.t = times;
    m.step = times[1] - times[0];
    GridAmplitude psi = s.eigenfunction(n);
    for (double t : times) {
        GridAmplitude out = evolve_fft(psi, t, p, pad);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < out.q.size(); ++i) {
            if (std::abs(out.q[i]) > window) continue;
            double d = std::norm(out.v[i]);
            num += out.q[i] * out.q[i] * d;
            den += d;
        }
        m.metric.push_back(den > 0 ? std::sqrt(num / den) : 0.0);
    }
    std::size_t k = std::min_element(m.metric.begin(), m.metric.end()) - m.metric.begin();
    m.argmin = times[k];
    m.tag = classify(s, n, p);
    return m;
}

}  // namespace toalab
