#include "plateswarm/sampling.hpp"

#include <cmath>

namespace plateswarm::sampling {

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 uniform_vec(Rng& rng, double bound) {
    const double a = uniform(rng, -bound, bound);
    const double b = uniform(rng, -bound, bound);
    const double c = uniform(rng, -bound, bound);
    return {a, b, c};
}

Vec3 unit_vec(Rng& rng) {
    std::normal_distribution<double> n;
    Vec3 v;
    do {
        const double a = n(rng);
        const double b = n(rng);
        const double c = n(rng);
        v = Vec3(a, b, c);
    } while (v.norm() < 1e-6);
    return v.normalized();
}

Rotation random_rotation(Rng& rng, double max_angle) {
    const Vec3 axis = unit_vec(rng);
    return geom::axis_angle(axis, uniform(rng, 0.0, max_angle));
}

SystemState random_state(Rng& rng, const StateRanges& r) {
    SystemState s;
    s.o_p = uniform_vec(rng, r.position);
    s.v_p = uniform_vec(rng, r.velocity);
    s.R_p = random_rotation(rng, r.plate_angle);
    s.Omega_p = uniform_vec(rng, r.plate_rate);
    s.r_b = uniform_vec(rng, r.position).head<2>();
    s.rdot_b = uniform_vec(rng, r.velocity).head<2>();
    for (int i = 0; i < kVehicles; ++i) {
        Vec3 q;
        do {
            q = unit_vec(rng);
        } while (q.z() < r.min_tether_z);
        const Vec3 w = uniform_vec(rng, r.tether_rate);
        s.tether[i].q = q;
        s.tether[i].omega = w - w.dot(q) * q;
        s.quad[i].R = random_rotation(rng, r.quad_angle);
        s.quad[i].Omega = uniform_vec(rng, r.quad_rate);
    }
    return s;
}

StateRanges moderate_ranges() {
    StateRanges r;
    r.min_tether_z = 0.5;
    return r;
}

Gains random_gains(Rng& rng) {
    auto log_uniform = [&](double lo, double hi) {
        return std::exp(uniform(rng, std::log(lo), std::log(hi)));
    };
    Gains g;
    for (double* k : {&g.k1, &g.k2, &g.k3, &g.k4, &g.k5, &g.k6, &g.k7, &g.k8, &g.kR, &g.kOmega}) {
        *k = log_uniform(0.1, 100.0);
    }
    g.eps = log_uniform(0.01, 1.0);
    for (double* c : {&g.c0, &g.c1, &g.c2}) *c = log_uniform(1e-3, 0.1);
    return g;
}

}  // namespace plateswarm::sampling
