#pragma once
//
// Instance serialization.
//
// Instances travel as JSON with the shape
//
//   {
//     "K": 2, "J": 3, "T": 1000,
//     "channels": ["null", "c1", "c2"],
//     "p": [J], "w": [I][J], "a": [I][J][K],
//     "L": [K], "U": [K]
//   }
//
// Channel 0 is always the no-pick channel.  Derived quantities (per-resource
// consumption ceilings, the revenue ceiling) are recomputed on load and never
// read from the file.  Loading validates the instance and throws with the
// full list of problems on failure.
//
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "model.hpp"

namespace tsra {

using nlohmann::json;

inline json instance_to_json(const Instance& inst) {
    json j;
    j["K"] = inst.num_resources;
    j["J"] = inst.num_types;
    j["T"] = inst.horizon;
    j["channels"] = inst.channel_names;
    j["p"] = inst.probs;
    j["w"] = inst.revenue;
    j["a"] = inst.cons;
    j["L"] = inst.lower;
    j["U"] = inst.upper;
    return j;
}

inline Instance instance_from_json(const json& j) {
    Instance inst;
    try {
        inst.num_resources = j.at("K").get<int>();
        inst.num_types = j.at("J").get<int>();
        inst.horizon = j.at("T").get<long long>();
        inst.channel_names = j.at("channels").get<std::vector<std::string>>();
        inst.probs = j.at("p").get<std::vector<double>>();
        inst.revenue = j.at("w").get<std::vector<std::vector<double>>>();
        inst.cons = j.at("a").get<std::vector<std::vector<std::vector<double>>>>();
        inst.lower = j.at("L").get<std::vector<double>>();
        inst.upper = j.at("U").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed instance JSON: ") + e.what());
    }
    inst.finalize();
    auto rep = validate_instance(inst);
    if (!rep.ok) {
        std::ostringstream os;
        os << "invalid instance:";
        for (const auto& p : rep.problems) os << "\n  - " << p;
        throw std::runtime_error(os.str());
    }
    return inst;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse " + path + ": " + e.what());
    }
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

inline Instance load_instance(const std::string& path) {
    return instance_from_json(load_json_file(path));
}

// Generator parameters, all optional in the JSON except none:
//   {"K": 2, "J": 4, "channels": 3, "T": 10000, "seed": 7,
//    "margin_low": 0.25, "margin_high": 0.25}
inline GeneratorParams generator_from_json(const json& j) {
    GeneratorParams gp;
    try {
        if (j.contains("K")) gp.num_resources = j.at("K").get<int>();
        if (j.contains("J")) gp.num_types = j.at("J").get<int>();
        if (j.contains("channels")) gp.num_real_channels = j.at("channels").get<int>();
        if (j.contains("T")) gp.horizon = j.at("T").get<long long>();
        if (j.contains("seed")) gp.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("margin_low")) gp.margin_low = j.at("margin_low").get<double>();
        if (j.contains("margin_high")) gp.margin_high = j.at("margin_high").get<double>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed generator JSON: ") + e.what());
    }
    return gp;
}

inline json generator_to_json(const GeneratorParams& gp) {
    json j;
    j["K"] = gp.num_resources;
    j["J"] = gp.num_types;
    j["channels"] = gp.num_real_channels;
    j["T"] = gp.horizon;
    j["seed"] = gp.seed;
    j["margin_low"] = gp.margin_low;
    j["margin_high"] = gp.margin_high;
    return j;
}

} // namespace tsra
