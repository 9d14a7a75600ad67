#include "cdnozzle/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdnozzle {

namespace {

double pair_weight(double d, double exponent)
{
    return exponent == 0.0 ? 1.0 : std::pow(d, exponent);
}

// sup over node pairs q > p within `window` of w(p,q) |D(p) - D(q)| / |p - q|^alpha
double holder_scan(const std::vector<GridField>& d, const LayerGrid& g, double alpha, double exponent,
                   double window, Exec exec)
{
    const int n1 = g.n1(), n2 = g.n2();
    const double h = g.height();
    auto row = [&](int i) {
        double best = 0.0;
        for (int j = 0; j < n2; ++j) {
            const double dp = std::min(g.y2[j], h - g.y2[j]);
            for (int i2 = i; i2 < n1 && g.y1[i2] - g.y1[i] <= window; ++i2) {
                const double dx = g.y1[i2] - g.y1[i];
                int j2 = (i2 == i) ? j + 1 : 0;
                for (; j2 < n2; ++j2) {
                    const double dy = g.y2[j2] - g.y2[j];
                    if (dy < -window)
                        continue;
                    if (dy > window)
                        break;
                    const double dist = std::sqrt(dx * dx + dy * dy);
                    if (dist > window)
                        continue;
                    const double dq = std::min(g.y2[j2], h - g.y2[j2]);
                    const double w = pair_weight(std::min(dp, dq), exponent) / std::pow(dist, alpha);
                    for (const GridField& f : d)
                        best = std::max(best, w * std::abs(f(i, j) - f(i2, j2)));
                }
            }
        }
        return best;
    };
    double result = 0.0;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 2) reduction(max : result)
        for (int i = 0; i < n1; ++i)
            result = std::max(result, row(i));
    } else {
        for (int i = 0; i < n1; ++i)
            result = std::max(result, row(i));
    }
    return result;
}

}  // namespace

NormTerms profile_holder_norm(const Profile& f, double lo, double hi, int order, double alpha, int samples)
{
    if (samples < 2)
        throw std::invalid_argument("profile_holder_norm: need at least two samples");
    NormTerms t;
    std::vector<double> x(samples), top(samples);
    for (int s = 0; s < samples; ++s)
        x[s] = lo + (hi - lo) * s / (samples - 1);
    for (int k = 0; k <= order; ++k) {
        double m = 0.0;
        for (int s = 0; s < samples; ++s) {
            const double v = f.derivative(x[s], k);
            m = std::max(m, std::abs(v));
            if (k == order)
                top[s] = v;
        }
        t.derivative_terms.push_back(m);
    }
    for (int a = 0; a < samples; ++a)
        for (int b = a + 1; b < samples; ++b)
            t.holder = std::max(t.holder, std::abs(top[a] - top[b]) / std::pow(x[b] - x[a], alpha));
    t.total = t.holder;
    for (double v : t.derivative_terms)
        t.total += v;
    return t;
}

NormTerms discrete_weighted_norm_terms(const GridField& f, const LayerGrid& g, int order, double alpha,
                                       double kappa, Exec exec, double window)
{
    if (order < 0 || order > 2)
        throw std::invalid_argument("discrete_weighted_norm: order must be 0, 1 or 2");
    if (window <= 0.0)
        window = 0.25 * g.length();
    const double h = g.height();
    // derivative families D^beta with |beta| = k
    std::vector<std::vector<GridField>> fam(order + 1);
    fam[0].push_back(f);
    if (order >= 1) {
        fam[1].push_back(d_dy1(f, g));
        fam[1].push_back(d_dy2(f, g));
    }
    if (order >= 2) {
        fam[2].push_back(d_dy1(fam[1][0], g));
        fam[2].push_back(d_dy2(fam[1][0], g));
        fam[2].push_back(d_dy2(fam[1][1], g));
    }
    NormTerms t;
    for (int k = 0; k <= order; ++k) {
        const double e = std::max(k + kappa, 0.0);
        double m = 0.0;
        for (const GridField& d : fam[k])
            for (int i = 0; i < g.n1(); ++i)
                for (int j = 0; j < g.n2(); ++j) {
                    const double delta = std::min(g.y2[j], h - g.y2[j]);
                    m = std::max(m, pair_weight(delta, e) * std::abs(d(i, j)));
                }
        t.derivative_terms.push_back(m);
    }
    t.holder = holder_scan(fam[order], g, alpha, std::max(order + alpha + kappa, 0.0), window, exec);
    t.total = t.holder;
    for (double v : t.derivative_terms)
        t.total += v;
    return t;
}

double discrete_weighted_norm(const GridField& f, const LayerGrid& g, int order, double alpha,
                              double kappa, Exec exec, double window)
{
    return discrete_weighted_norm_terms(f, g, order, alpha, kappa, exec, window).total;
}

NormTerms weighted_norm_1d(const std::vector<double>& x, const std::vector<double>& f, int order,
                           double alpha, double kappa)
{
    if (order < 0 || order > 2)
        throw std::invalid_argument("weighted_norm_1d: order must be 0, 1 or 2");
    const int n = static_cast<int>(x.size());
    const double lo = x.front(), hi = x.back();
    std::vector<std::vector<double>> d(order + 1);
    d[0] = f;
    for (int k = 1; k <= order; ++k)
        d[k] = derivative(x, d[k - 1]);
    NormTerms t;
    for (int k = 0; k <= order; ++k) {
        const double e = std::max(k + kappa, 0.0);
        double m = 0.0;
        for (int s = 0; s < n; ++s)
            m = std::max(m, pair_weight(std::min(x[s] - lo, hi - x[s]), e) * std::abs(d[k][s]));
        t.derivative_terms.push_back(m);
    }
    const double e = std::max(order + alpha + kappa, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double delta = std::min(std::min(x[a] - lo, hi - x[a]), std::min(x[b] - lo, hi - x[b]));
            t.holder = std::max(t.holder, pair_weight(delta, e) * std::abs(d[order][a] - d[order][b]) /
                                              std::pow(x[b] - x[a], alpha));
        }
    t.total = t.holder;
    for (double v : t.derivative_terms)
        t.total += v;
    return t;
}

}  // namespace cdnozzle
