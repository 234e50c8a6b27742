#ifndef SECTORCAST_GRAD_CHECK_UTIL_HPP
#define SECTORCAST_GRAD_CHECK_UTIL_HPP

#include <cmath>
#include <string>
#include <vector>

#include "sectorcast/lstm.hpp"

namespace sectorcast::testutil {

struct GradCheckReport {
    std::size_t checked = 0;
    std::size_t failed = 0;
    double worst_rel_error = 0.0;
};

// Central finite differences against backward() for every parameter
// coordinate. The forward pass is re-seeded identically per evaluation so
// train-mode dropout masks stay fixed while a parameter is perturbed.
inline GradCheckReport check_gradients(const ModelConfig& config, const Eigen::MatrixXd& window,
                                       double target, RunMode mode, std::uint64_t mask_seed,
                                       double step = 1e-5, double rel_tol = 1e-4,
                                       double abs_floor = 1e-8) {
    ModelParams params = init_params(config);

    Rng rng(mask_seed);
    const ForwardResult base = forward(params, window, mode, rng);
    const ModelParams analytic = backward(params, base.cache, target);

    auto loss_at = [&](const ModelParams& p) {
        Rng eval_rng(mask_seed);
        const ForwardResult r = forward(p, window, mode, eval_rng);
        return huber_loss(r.prediction, target, config.huber_delta);
    };

    GradCheckReport report;
    std::vector<double*> coords;
    std::vector<const double*> grads;
    for_each_tensor(
        [&](auto& t, const auto& g) {
            for (Eigen::Index i = 0; i < t.size(); ++i) {
                coords.push_back(t.data() + i);
                grads.push_back(g.data() + i);
            }
        },
        params, analytic);

    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double saved = *coords[i];
        *coords[i] = saved + step;
        const double loss_hi = loss_at(params);
        *coords[i] = saved - step;
        const double loss_lo = loss_at(params);
        *coords[i] = saved;

        const double numeric = (loss_hi - loss_lo) / (2.0 * step);
        const double analytic_g = *grads[i];
        const double diff = std::abs(numeric - analytic_g);
        ++report.checked;
        if (diff <= abs_floor) continue;
        const double rel = diff / std::max(std::abs(numeric), std::abs(analytic_g));
        report.worst_rel_error = std::max(report.worst_rel_error, rel);
        if (rel >= rel_tol) ++report.failed;
    }
    return report;
}

}  // namespace sectorcast::testutil

#endif  // SECTORCAST_GRAD_CHECK_UTIL_HPP
