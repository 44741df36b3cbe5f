// Echo spikes of |eps|^4 at gamma t_d = 20, compared with the large-delay
// approximation that keeps only the last series term.

#include "mirrornm/mirrornm.hpp"

#include <cstdio>

int main() {
    using namespace mirrornm;
    const ModelParams p = ModelParams::rescaled(20.0, 0.0);
    const AmplitudeTrajectory traj = amplitude_mos(p, 100.0);

    std::printf("# t_gamma  |eps|^4  approx\n");
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double prev = volume(traj.value(i - 1));
        const double here = volume(traj.value(i));
        const double next = volume(traj.value(i + 1));
        if (here > prev && here >= next) {
            std::printf("%8.4f  %.6e  %.6e\n", traj.time(i), here,
                        asymptotic_eps4(p, traj.time(i)));
        }
    }
    std::printf("# N = %.6f, large-delay limit %.6f\n", nm_measure(p).measure,
                asymptotic_measure(50).value);
}
