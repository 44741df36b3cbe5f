// Coarse (phi, gamma t_d) map of N plus the threshold curve, as plain text.

#include "mirrornm/mirrornm.hpp"

#include <cstdio>
#include <thread>

int main() {
    using namespace mirrornm;
    ComputeOptions opts;
    opts.workers = std::max(1u, std::thread::hardware_concurrency());

    const auto phi = linear_axis(0.0, two_pi, 9);
    const auto gtd = log_axis(0.05, 10.0, 8);
    const SweepGrid grid = sweep_measure(phi, gtd, opts);

    std::printf("gtd \\ phi");
    for (double v : phi) {
        std::printf(" %8.3f", v);
    }
    std::printf("\n");
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        std::printf("%9.3f", gtd[r]);
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            std::printf(" %8.5f", grid.at(r, c));
        }
        std::printf("\n");
    }

    ThresholdOptions th;
    th.workers = opts.workers;
    const ThresholdCurve curve = threshold_curve(phi, th);
    std::printf("\nphi       critical gtd  status\n");
    for (std::size_t i = 0; i < phi.size(); ++i) {
        std::printf("%8.3f  %12.4f  %s\n", phi[i], curve.critical_gtd[i], to_string(curve.status[i]));
    }
}
