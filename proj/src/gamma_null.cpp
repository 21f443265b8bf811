#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "leadlag/error.hpp"
#include "leadlag/nullmodels.hpp"

namespace leadlag {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// log of x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

double gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) return sum * std::exp(log_prefactor(a, x));
    }
    std::ostringstream msg;
    msg << "incomplete gamma series did not converge (a=" << a << ", x=" << x << ")";
    throw NumericalError(msg.str());
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return std::exp(log_prefactor(a, x)) * h;
    }
    std::ostringstream msg;
    msg << "incomplete gamma continued fraction did not converge (a=" << a << ", x=" << x << ")";
    throw NumericalError(msg.str());
}

void check_args(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("incomplete gamma needs a > 0");
    if (!(x >= 0.0)) throw InputError("incomplete gamma needs x >= 0");
}

double gamma_density(double a, double z) { return std::exp((a - 1.0) * std::log(z) - z - std::lgamma(a)); }

// Solves P(a, z) = target (upper == false) or Q(a, z) = target (upper == true)
// by Newton steps on the log-probability, safeguarded by a shrinking bracket.
double standard_gamma_quantile(double a, double target, bool upper) {
    auto prob = [&](double z) { return upper ? regularized_gamma_q(a, z) : regularized_gamma_p(a, z); };
    // P increases in z and Q decreases; "below" means z is left of the root.
    auto below = [&](double v) { return upper ? v > target : v < target; };

    double lo = 0.0;
    double hi = std::max(1.0, a);
    while (below(prob(hi))) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("gamma quantile bracket diverged");
    }

    const double log_target = std::log(target);
    double z = 0.5 * (lo + hi);
    for (int iter = 0; iter < 500; ++iter) {
        const double v = prob(z);
        if (v == target) return z;
        if (below(v)) {
            lo = z;
        } else {
            hi = z;
        }
        double next = 0.5 * (lo + hi);
        if (v > 0.0) {
            const double residual = std::log(v) - log_target;
            if (std::abs(residual) < 4.0 * kEps) return z;
            const double slope = (upper ? -1.0 : 1.0) * gamma_density(a, z) / v;
            const double newton = z - residual / slope;
            if (std::isfinite(newton) && newton > lo && newton < hi) next = newton;
        }
        if (std::abs(next - z) <= 2.0 * kEps * z || hi - lo <= 2.0 * kEps * hi) return next;
        z = next;
    }
    std::ostringstream msg;
    msg << "gamma quantile did not converge (alpha=" << a << ", target=" << target << ", upper=" << upper
        << ", bracket=[" << lo << ", " << hi << "])";
    throw NumericalError(msg.str());
}

}  // namespace

GammaNull gamma_null(int qx, int qy, std::size_t N) {
    if (qx < 2 || qy < 2) throw InputError("alphabet sizes must be at least 2");
    if (N < 1) throw InputError("sample size must be at least 1");
    GammaNull g;
    g.alpha = 0.5 * (qx - 1) * (qy - 1);
    g.beta = 1.0 / (static_cast<double>(N) * std::log(2.0));
    g.N = N;
    return g;
}

double regularized_gamma_p(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_continued_fraction(a, x);
}

double gamma_quantile(const GammaNull& g, double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw InputError("quantile probability must lie in (0, 1)");
    const double z = prob <= 0.5 ? standard_gamma_quantile(g.alpha, prob, false)
                                 : standard_gamma_quantile(g.alpha, 1.0 - prob, true);
    return z * g.beta;
}

double gamma_upper_quantile(const GammaNull& g, double tail) {
    if (!(tail > 0.0 && tail < 1.0)) throw InputError("tail probability must lie in (0, 1)");
    const double z = tail >= 0.5 ? standard_gamma_quantile(g.alpha, 1.0 - tail, false)
                                 : standard_gamma_quantile(g.alpha, tail, true);
    return z * g.beta;
}

double mi_pvalue(const GammaNull& g, double observed_mi) {
    if (!(observed_mi >= 0.0)) throw InputError("observed mutual information must be non-negative");
    return regularized_gamma_q(g.alpha, observed_mi / g.beta);
}

}  // namespace leadlag
