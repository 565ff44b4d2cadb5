#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace dimest::quad {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, integral, error;
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |integral|) or `max_panels`
/// is reached. Nodes are interior, so integrable endpoint singularities are
/// tolerated.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-15,
                 int max_panels = 2000) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, abs_tol, rel_tol, max_panels);
    std::vector<detail::Panel> panels{detail::gk15(f, a, b)};
    for (int iter = 0; iter < max_panels; ++iter) {
        double total_err = 0.0;
        double total = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total_err += panels[i].error;
            total += panels[i].integral;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        if (total_err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
        const detail::Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        panels[worst] = detail::gk15(f, p.a, mid);
        panels.push_back(detail::gk15(f, mid, p.b));
    }
    double sum = 0.0;
    for (const auto& p : panels) sum += p.integral;
    return sum;
}

}  // namespace dimest::quad
