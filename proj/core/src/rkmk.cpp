#include "plateswarm/rkmk.hpp"

namespace plateswarm::rkmk {

SystemState retract(const SystemState& s0, const Local& y) {
    SystemState s = s0;
    s.o_p += y.segment<3>(0);
    s.v_p += y.segment<3>(3);
    s.R_p = s0.R_p * geom::exp_so3(y.segment<3>(6));
    s.Omega_p += y.segment<3>(9);
    s.r_b += y.segment<2>(12);
    s.rdot_b += y.segment<2>(14);
    for (int i = 0; i < kVehicles; ++i) {
        const int t = kTetherBase + 6 * i;
        s.tether[i].q = geom::exp_so3(y.segment<3>(t)) * s0.tether[i].q;
        s.tether[i].omega += y.segment<3>(t + 3);
        const int q = kQuadBase + 6 * i;
        s.quad[i].R = s0.quad[i].R * geom::exp_so3(y.segment<3>(q));
        s.quad[i].Omega += y.segment<3>(q + 3);
    }
    return s;
}

Local local_rates(const SystemState& s, const Local& y, const Accelerations& acc) {
    Local k;
    k.segment<3>(0) = s.v_p;
    k.segment<3>(3) = acc.a_p;
    k.segment<3>(6) = geom::right_jacobian_inv(y.segment<3>(6)) * s.Omega_p;
    k.segment<3>(9) = acc.dOmega_p;
    k.segment<2>(12) = s.rdot_b;
    k.segment<2>(14) = acc.rddot_b;
    for (int i = 0; i < kVehicles; ++i) {
        const int t = kTetherBase + 6 * i;
        k.segment<3>(t) = geom::left_jacobian_inv(y.segment<3>(t)) * s.tether[i].omega;
        k.segment<3>(t + 3) = acc.domega[i];
        const int q = kQuadBase + 6 * i;
        k.segment<3>(q) = geom::right_jacobian_inv(y.segment<3>(q)) * s.quad[i].Omega;
        k.segment<3>(q + 3) = acc.dOmega_quad[i];
    }
    return k;
}

}  // namespace plateswarm::rkmk
