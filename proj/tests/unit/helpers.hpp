#ifndef REBMBO_TEST_HELPERS_HPP
#define REBMBO_TEST_HELPERS_HPP

#include <cmath>
#include <functional>

#include "rebmbo/common.hpp"
#include "rebmbo/net.hpp"

namespace testing {

using rebmbo::Matrix;
using rebmbo::Rng;
using rebmbo::Vector;

inline double rel_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Central difference of f along every entry of *p.
inline Vector central_diff(const std::function<double()>& f, double* p, Eigen::Index n, double h = 1e-6) {
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double up = f();
        p[i] = saved - h;
        const double down = f();
        p[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// Worst relative error between analytic and numeric gradients, measured
// against the larger of the two norms so tiny entries do not dominate.
inline double grad_error(const Vector& analytic, const Vector& numeric) {
    const double scale = std::max({analytic.norm(), numeric.norm(), 1e-8});
    return (analytic - numeric).norm() / scale;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rebmbo::uniform01(rng);
    return m;
}

// Every network parameter against its analytic gradient; returns the worst error.
inline double check_param_grads(rebmbo::net::MlpParams& params, const std::function<double()>& loss,
                                const rebmbo::net::Gradients& grads, double h = 1e-6) {
    double worst = 0.0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const Vector gw = central_diff(loss, layer.weight.data(), layer.weight.size(), h);
        const Vector aw = Eigen::Map<const Vector>(grads.weight[l].data(), grads.weight[l].size());
        worst = std::max(worst, grad_error(aw, gw));
        const Vector gb = central_diff(loss, layer.bias.data(), layer.bias.size(), h);
        worst = std::max(worst, grad_error(grads.bias[l], gb));
    }
    return worst;
}

}  // namespace testing

#endif
