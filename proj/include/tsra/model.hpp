#pragma once
//
// Problem data for online allocation with two-sided resource bounds.
//
// An instance has K resources, J request types and a channel set I whose index 0
// is always the "no-pick" channel (zero revenue, zero consumption for every type).
// Requests arrive one at a time, i.i.d. with type distribution p, for T rounds.
// Assigning a request of type j to channel i earns revenue w[i][j] and consumes
// a[i][j][k] units of each resource k.  A completed run must keep the total
// consumption of every resource inside [L[k], U[k]].
//
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace tsra {

struct Instance {
    int num_resources = 0;  // K
    int num_types = 0;      // J
    long long horizon = 0;  // T

    std::vector<std::string> channel_names;              // size I, index 0 = no-pick
    std::vector<double> probs;                           // size J
    std::vector<std::vector<double>> revenue;            // [I][J]
    std::vector<std::vector<std::vector<double>>> cons;  // [I][J][K]
    std::vector<double> lower;                           // size K
    std::vector<double> upper;                           // size K

    // Derived quantities; call finalize() after editing the fields above.
    std::vector<double> a_bar;  // max consumption per resource over (i, j)
    double w_bar = 0.0;         // max revenue over (i, j)

    int num_channels() const { return static_cast<int>(channel_names.size()); }
    double w(int i, int j) const { return revenue[i][j]; }
    double a(int i, int j, int k) const { return cons[i][j][k]; }

    void finalize() {
        a_bar.assign(num_resources, 0.0);
        w_bar = 0.0;
        for (int i = 0; i < num_channels(); ++i) {
            for (int j = 0; j < num_types; ++j) {
                w_bar = std::max(w_bar, revenue[i][j]);
                for (int k = 0; k < num_resources; ++k)
                    a_bar[k] = std::max(a_bar[k], cons[i][j][k]);
            }
        }
    }
};

// A realized request sequence: types[t] is the type of the request in round t.
struct RequestStream {
    std::vector<int> types;
    std::uint64_t seed = 0;  // seed it was drawn with; also seeds any rounding coins
};

// Result of scoring a full decision vector against an instance.
struct AllocationOutcome {
    double revenue = 0.0;
    std::vector<double> consumption;  // size K
    std::vector<bool> lower_ok;       // consumption[k] >= L[k]
    std::vector<bool> upper_ok;       // consumption[k] <= U[k]
    bool feasible = false;            // all bounds hold
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;

    void fail(std::string msg) {
        ok = false;
        problems.push_back(std::move(msg));
    }
};

// Structural and numeric sanity checks.  Collects every problem found rather
// than stopping at the first; `ok` is false iff `problems` is nonempty.
inline ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    const int K = inst.num_resources, J = inst.num_types, I = inst.num_channels();

    if (K < 1) rep.fail("need at least one resource");
    if (J < 1) rep.fail("need at least one request type");
    if (inst.horizon < 1) rep.fail("horizon must be positive");
    if (I < 1) rep.fail("need the no-pick channel at index 0");

    if (static_cast<int>(inst.probs.size()) != J)
        rep.fail("probability vector has wrong length");
    if (static_cast<int>(inst.revenue.size()) != I ||
        static_cast<int>(inst.cons.size()) != I)
        rep.fail("revenue/consumption tables have wrong channel count");
    if (static_cast<int>(inst.lower.size()) != K ||
        static_cast<int>(inst.upper.size()) != K)
        rep.fail("bound vectors have wrong length");
    if (!rep.ok) return rep;  // shapes broken; element checks would be UB

    for (int i = 0; i < I; ++i) {
        if (static_cast<int>(inst.revenue[i].size()) != J ||
            static_cast<int>(inst.cons[i].size()) != J) {
            rep.fail("revenue/consumption tables have wrong type count");
            return rep;
        }
        for (int j = 0; j < J; ++j) {
            if (static_cast<int>(inst.cons[i][j].size()) != K) {
                rep.fail("consumption table has wrong resource count");
                return rep;
            }
        }
    }

    double psum = 0.0;
    for (int j = 0; j < J; ++j) {
        if (!(inst.probs[j] >= 0.0) || !std::isfinite(inst.probs[j]))
            rep.fail("probability for type " + std::to_string(j) + " is negative or non-finite");
        psum += inst.probs[j];
    }
    if (std::abs(psum - 1.0) > 1e-9)
        rep.fail("probabilities do not sum to 1 (sum = " + std::to_string(psum) + ")");

    for (int j = 0; j < J; ++j) {
        if (inst.revenue[0][j] != 0.0)
            rep.fail("channel 0 must earn zero revenue (type " + std::to_string(j) + ")");
        for (int k = 0; k < K; ++k)
            if (inst.cons[0][j][k] != 0.0)
                rep.fail("channel 0 must consume nothing (type " + std::to_string(j) +
                         ", k=" + std::to_string(k) + ")");
    }
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) {
            if (!(inst.revenue[i][j] >= 0.0) || !std::isfinite(inst.revenue[i][j]))
                rep.fail("revenue must be finite and nonnegative (channel " +
                         std::to_string(i) + ", type " + std::to_string(j) + ")");
            for (int k = 0; k < K; ++k)
                if (!(inst.cons[i][j][k] >= 0.0) || !std::isfinite(inst.cons[i][j][k]))
                    rep.fail("consumption must be finite and nonnegative (channel " +
                             std::to_string(i) + ", type " + std::to_string(j) +
                             ", k=" + std::to_string(k) + ")");
        }

    for (int k = 0; k < K; ++k) {
        if (!(inst.lower[k] >= 0.0) || !std::isfinite(inst.lower[k]))
            rep.fail("lower bound must be finite and nonnegative for k=" + std::to_string(k));
        if (!std::isfinite(inst.upper[k]))
            rep.fail("upper bound must be finite for k=" + std::to_string(k));
        if (inst.lower[k] > inst.upper[k])
            rep.fail("L exceeds U for k=" + std::to_string(k));
    }
    return rep;
}

// Draw a T-round request stream.  Types come from the inverse CDF of p
// (renormalized to sum exactly to 1 first); draw t is a pure function of
// (seed, t), so streams are reproducible and order-independent.
inline RequestStream sample_stream(const Instance& inst, std::uint64_t seed) {
    const int J = inst.num_types;
    double psum = std::accumulate(inst.probs.begin(), inst.probs.end(), 0.0);
    if (!(psum > 0.0)) throw std::invalid_argument("probabilities sum to zero");

    std::vector<double> cdf(J);
    double acc = 0.0;
    for (int j = 0; j < J; ++j) {
        acc += inst.probs[j] / psum;
        cdf[j] = acc;
    }
    cdf[J - 1] = 1.0;  // guard against rounding shortfall

    RequestStream stream;
    stream.seed = seed;
    stream.types.resize(static_cast<std::size_t>(inst.horizon));
    for (long long t = 0; t < inst.horizon; ++t) {
        double u = rng_uniform(seed, RngDomain::stream, static_cast<std::uint64_t>(t));
        int j = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        stream.types[static_cast<std::size_t>(t)] = std::min(j, J - 1);
    }
    return stream;
}

// Score a complete decision vector: total revenue, per-resource consumption and
// whether both bounds hold.  Comparisons against L/U are exact (no tolerance):
// the flags answer "did this realized run satisfy the bounds", nothing softer.
inline AllocationOutcome evaluate_outcome(const Instance& inst,
                                          const RequestStream& stream,
                                          const std::vector<int>& decisions) {
    const int K = inst.num_resources, I = inst.num_channels();
    if (decisions.size() != stream.types.size())
        throw std::invalid_argument("decision length != T");

    AllocationOutcome out;
    out.consumption.assign(K, 0.0);
    for (std::size_t t = 0; t < decisions.size(); ++t) {
        int i = decisions[t];
        if (i < 0 || i >= I) throw std::invalid_argument("unknown channel index");
        int j = stream.types[t];
        if (j < 0 || j >= inst.num_types) throw std::invalid_argument("unknown type index");
        out.revenue += inst.revenue[i][j];
        for (int k = 0; k < K; ++k) out.consumption[k] += inst.cons[i][j][k];
    }

    out.lower_ok.assign(K, false);
    out.upper_ok.assign(K, false);
    out.feasible = true;
    for (int k = 0; k < K; ++k) {
        out.lower_ok[k] = out.consumption[k] >= inst.lower[k];
        out.upper_ok[k] = out.consumption[k] <= inst.upper[k];
        if (!out.lower_ok[k] || !out.upper_ok[k]) out.feasible = false;
    }
    return out;
}

// ─── Random instance generator ──────────────────────────────────────────────
//
// Construction works backwards from feasibility: draw an interior policy x
// first, compute its expected consumption C_k, then place the bounds around it
// (L_k at margin_low·T·ā_k below, U_k at margin_high·T·ā_k above).  The policy
// witnesses that shifting the lower bounds up by ξ·T·ā_k stays feasible for
// every ξ ≤ min_k min(margin_low, C_k/(T·ā_k)), i.e. the instance has a known
// positive feasibility margin by construction.

struct GeneratorParams {
    int num_resources = 2;
    int num_types = 3;
    int num_real_channels = 2;  // channels besides the no-pick channel
    long long horizon = 1000;
    double margin_low = 0.25;   // slack below the witness consumption, in T·ā_k units
    double margin_high = 0.25;  // slack above it
    std::uint64_t seed = 1;
};

inline Instance generate_instance(const GeneratorParams& gp) {
    if (gp.num_resources < 1 || gp.num_types < 1 || gp.num_real_channels < 1 ||
        gp.horizon < 1 || gp.margin_low <= 0.0 || gp.margin_high <= 0.0)
        throw std::invalid_argument("generator parameters out of range");

    CounterRng rng(gp.seed, RngDomain::generator);
    const int K = gp.num_resources, J = gp.num_types, I = gp.num_real_channels + 1;
    const double T = static_cast<double>(gp.horizon);

    Instance inst;
    inst.num_resources = K;
    inst.num_types = J;
    inst.horizon = gp.horizon;
    inst.channel_names.resize(I);
    inst.channel_names[0] = "null";
    for (int i = 1; i < I; ++i) inst.channel_names[i] = "c" + std::to_string(i);

    inst.probs.resize(J);
    double psum = 0.0;
    for (int j = 0; j < J; ++j) {
        inst.probs[j] = rng.uniform(0.2, 1.0);  // bounded away from 0: streams hit every type
        psum += inst.probs[j];
    }
    for (int j = 0; j < J; ++j) inst.probs[j] /= psum;

    inst.revenue.assign(I, std::vector<double>(J, 0.0));
    inst.cons.assign(I, std::vector<std::vector<double>>(J, std::vector<double>(K, 0.0)));
    for (int i = 1; i < I; ++i)
        for (int j = 0; j < J; ++j) {
            inst.revenue[i][j] = rng.uniform(0.1, 1.0);
            for (int k = 0; k < K; ++k) inst.cons[i][j][k] = rng.uniform(0.1, 1.0);
        }
    inst.finalize();

    // Interior witness policy: per type, real channels share a total mass in
    // [0.6, 0.9]; the rest stays on the no-pick channel.
    std::vector<std::vector<double>> x(I, std::vector<double>(J, 0.0));
    for (int j = 0; j < J; ++j) {
        double total = rng.uniform(0.6, 0.9);
        std::vector<double> raw(I, 0.0);
        double rsum = 0.0;
        for (int i = 1; i < I; ++i) {
            raw[i] = rng.uniform(0.2, 1.0);
            rsum += raw[i];
        }
        for (int i = 1; i < I; ++i) x[i][j] = total * raw[i] / rsum;
    }

    inst.lower.assign(K, 0.0);
    inst.upper.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        double ck = 0.0;
        for (int i = 1; i < I; ++i)
            for (int j = 0; j < J; ++j) ck += T * inst.probs[j] * inst.cons[i][j][k] * x[i][j];
        inst.lower[k] = std::max(0.0, ck - gp.margin_low * T * inst.a_bar[k]);
        inst.upper[k] = ck + gp.margin_high * T * inst.a_bar[k];
    }
    return inst;
}

} // namespace tsra
