#pragma once

// Small independent re-derivations used as test oracles. They deliberately
// avoid the library's operations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Truncated chain {0..n, inf}; inf is encoded as n + 1.
struct Chain {
    int n;
    int inf() const { return n + 1; }
    int plus(int a, int b) const {
        if (a == inf() || b == inf()) return inf();
        return a + b > n ? inf() : a + b;
    }
    int residual(int a, int b) const {
        for (int d = 0; d <= inf(); ++d)
            if (plus(b, d) >= a) return d;
        return inf();
    }
    bool diagonal(int delta, int alpha, int beta) const {
        return plus(alpha, residual(delta, alpha)) == delta && plus(residual(delta, beta), beta) == delta;
    }
};

// sup{|f(x) - f(y)|, |f(x) - g(y)| : |x - y| <= r} on a uniform grid.
inline double grid_sup(const std::function<double(double)>& f, const std::function<double(double)>& g,
                       double x, double r, int points = 20001) {
    double fx = f(x), best = 0.0;
    for (int i = 0; i < points; ++i) {
        double y = points == 1 ? x : x - r + 2.0 * r * i / (points - 1);
        best = std::max({best, std::fabs(fx - f(y)), std::fabs(fx - g(y))});
    }
    return best;
}

} // namespace oracle
