#pragma once
//
// Shared instance fixtures with pencil-and-paper ground truth.  Each builder
// documents the closed-form quantities tests pin against.
//
#include "tsra/model.hpp"

namespace fixtures {

// One resource, one type; channel c1 earns 1 and consumes 1.
// With L = lo_frac*T, U = up_frac*T the largest uniform lift of the lower
// bound that stays feasible is min(up_frac, 1) - lo_frac.
inline tsra::Instance single_channel(long long T, double lo_frac, double up_frac,
                                     double w1 = 1.0) {
    tsra::Instance inst;
    inst.num_resources = 1;
    inst.num_types = 1;
    inst.horizon = T;
    inst.channel_names = {"null", "c1"};
    inst.probs = {1.0};
    inst.revenue = {{0.0}, {w1}};
    inst.cons = {{{0.0}}, {{1.0}}};
    inst.lower = {lo_frac * static_cast<double>(T)};
    inst.upper = {up_frac * static_cast<double>(T)};
    inst.finalize();
    return inst;
}

// The tight two-channel split: c1 earns 1 and consumes nothing, c2 earns
// nothing and consumes 1, L = T/2, U = T.  Ground truth: feasibility margin
// 1/2; unshifted optimum T/2 (half the rounds must feed the resource floor);
// the sensitivity bound is met with equality at every shift below the margin.
inline tsra::Instance tight_two_channel(long long T) {
    tsra::Instance inst;
    inst.num_resources = 1;
    inst.num_types = 1;
    inst.horizon = T;
    inst.channel_names = {"null", "c1", "c2"};
    inst.probs = {1.0};
    inst.revenue = {{0.0}, {1.0}, {0.0}};
    inst.cons = {{{0.0}}, {{0.0}}, {{1.0}}};
    inst.lower = {0.5 * static_cast<double>(T)};
    inst.upper = {static_cast<double>(T)};
    inst.finalize();
    return inst;
}

// Tiny two-type instance where every realized stream admits a feasible
// assignment (serving any single request through c1 already covers L = 1),
// sized so that full channel-assignment enumeration (3^6 options) is instant.
inline tsra::Instance enumeration_friendly() {
    tsra::Instance inst;
    inst.num_resources = 1;
    inst.num_types = 2;
    inst.horizon = 6;
    inst.channel_names = {"null", "c1", "c2"};
    inst.probs = {0.5, 0.5};
    inst.revenue = {{0.0, 0.0}, {1.0, 0.6}, {0.7, 0.5}};
    inst.cons = {{{0.0}, {0.0}}, {{1.0}, {1.0}}, {{0.5}, {0.5}}};
    inst.lower = {1.0};
    inst.upper = {4.0};
    inst.finalize();
    return inst;
}

// Two resources, two types, two symmetric real channels.  Any full-service
// mix keeps both resources within wide bounds; used for potential/stage tests
// where a healthy margin is wanted (feasibility margin 0.7 at U = 0.85T).
inline tsra::Instance balanced_two_resource(long long T, double up_frac = 0.85,
                                            double lo_frac = 0.10) {
    tsra::Instance inst;
    inst.num_resources = 2;
    inst.num_types = 2;
    inst.horizon = T;
    inst.channel_names = {"null", "c1", "c2"};
    inst.probs = {0.5, 0.5};
    inst.revenue = {{0.0, 0.0}, {1.0, 0.8}, {0.9, 1.0}};
    inst.cons = {
        {{0.0, 0.0}, {0.0, 0.0}},
        {{1.0, 0.6}, {1.0, 0.6}},
        {{0.6, 1.0}, {0.6, 1.0}},
    };
    const double T_ = static_cast<double>(T);
    inst.lower = {lo_frac * T_, lo_frac * T_};
    inst.upper = {up_frac * T_, up_frac * T_};
    inst.finalize();
    return inst;
}

} // namespace fixtures
