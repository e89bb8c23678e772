#include "netobs/stats/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netobs::stats {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = 1.4142135623730950488;

// Initial guess for erf_inv (Winitzki-style), good to ~1e-2; Newton
// polishes it to machine precision in 2-3 steps.
double erf_inv_guess(double p) {
    const double a = 0.147;
    double ln1m = std::log(1.0 - p * p);
    double t1 = 2.0 / (M_PI * a) + ln1m / 2.0;
    double t2 = ln1m / a;
    double r = std::sqrt(std::sqrt(t1 * t1 - t2) - t1);
    return p < 0 ? -r : r;
}

} // namespace

double erf_inv(double p) {
    if (!(p > -1.0 && p < 1.0)) {
        if (p == 1.0 || p == -1.0)
            return p * std::numeric_limits<double>::infinity();
        throw std::domain_error("erf_inv: argument outside (-1, 1)");
    }
    if (p == 0.0) return 0.0;
    double x = erf_inv_guess(p);
    // Newton: f(x) = erf(x) - p, f'(x) = 2/sqrt(pi) * exp(-x^2)
    for (int i = 0; i < 4; ++i) {
        double err = std::erf(x) - p;
        x -= err * kSqrtPi / 2.0 * std::exp(x * x);
    }
    return x;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p outside (0, 1)");
    return kSqrt2 * erf_inv(2.0 * p - 1.0);
}

namespace {

double log_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-16;
    const double fpmin = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double regularized_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("regularized_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0)
        throw std::domain_error("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // Series representation.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 3e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    // Continued fraction for Q(a, x), then P = 1 - Q.
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    return 1.0 - q;
}

double t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("t_quantile: p outside (0, 1)");
    if (df <= 0.0)
        throw std::domain_error("t_quantile: df must be positive");
    if (p == 0.5) return 0.0;
    // CDF(t) = 1 - I_{df/(df+t^2)}(df/2, 1/2) / 2 for t >= 0.
    auto cdf = [df](double t) {
        double ib = regularized_beta(df / 2.0, 0.5, df / (df + t * t));
        return t >= 0.0 ? 1.0 - ib / 2.0 : ib / 2.0;
    };
    bool flip = p < 0.5;
    double pp = flip ? 1.0 - p : p;
    // Bracket then bisect/Newton-free refine; the normal quantile seeds
    // the bracket for large df, Cauchy for df = 1.
    double hi = df > 2.0 ? normal_quantile(pp) * std::sqrt(df / (df - 2.0)) + 1.0
                         : std::tan(M_PI * (pp - 0.5)) + 1.0;
    if (hi < 1.0) hi = 1.0;
    while (cdf(hi) < pp) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < pp) lo = mid; else hi = mid;
        if (hi - lo < 1e-14 * (1.0 + std::fabs(hi))) break;
    }
    double t = 0.5 * (lo + hi);
    return flip ? -t : t;
}

double chi2_quantile(double p, double df) {
    if (!(p >= 0.0 && p < 1.0))
        throw std::domain_error("chi2_quantile: p outside [0, 1)");
    if (df <= 0.0)
        throw std::domain_error("chi2_quantile: df must be positive");
    if (p == 0.0) return 0.0;
    double a = df / 2.0;
    auto cdf = [a](double x) { return regularized_gamma_p(a, x / 2.0); };
    // Wilson-Hilferty starting point.
    double z = normal_quantile(p);
    double c = 2.0 / (9.0 * df);
    double x = df * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
    if (!(x > 0.0)) x = 1e-8;
    double hi = x;
    while (cdf(hi) < p) hi *= 2.0;
    double lo = 0.0;
    if (cdf(x) < p) lo = x;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) lo = mid; else hi = mid;
        if (hi - lo < 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace netobs::stats
