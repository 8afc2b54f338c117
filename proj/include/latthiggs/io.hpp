#pragma once

// Config parsing (TOML or JSON, one schema), JSON views of forms, chains and
// summaries, and small file helpers for the CLI.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "latthiggs/asymptotics.hpp"
#include "latthiggs/clusters.hpp"
#include "latthiggs/gauge_model.hpp"
#include "latthiggs/mc.hpp"

namespace latthiggs {

using nlohmann::json;

struct ExperimentSpec {
    std::string name = "custom";
    ModelParams model;
    std::vector<double> betas, kappas;
    std::vector<int> lengths;
    std::vector<std::string> methods;
    Phase phase = Phase::Higgs;  // for the decay method
    ClusterCutoffs cut{6, 6};
    McConfig mc;
    double tolerance_scale = 1.0;
    std::string out_dir = "results";

    // Throws std::invalid_argument on empty grids or unknown methods.
    void validate() const;
};

// Methods accepted in ExperimentSpec::methods.
const std::vector<std::string>& known_methods();

ModelParams model_from_json(const json& j);
json to_json(const ModelParams& p);

// Missing grids default to the single point of the model block; an explicitly
// empty grid is kept so validate() can reject it.
ExperimentSpec spec_from_json(const json& j);
json to_json(const ExperimentSpec& s);

// Reads a .toml or .json file into the common JSON tree.
json load_config_tree(const std::filesystem::path& path);
ExperimentSpec load_spec(const std::filesystem::path& path);

// {degree, q, entries: [{anchor, axes, value}]} over positive cells with nonzero value.
json form_to_json(const BoxGeometry& g, const Form& f);
Form form_from_json(const BoxGeometry& g, const json& j);
// Same layout without q.
json chain_to_json(const BoxGeometry& g, const Chain& c);
Chain chain_from_json(const BoxGeometry& g, const json& j);

json to_json(const DecaySummary& s);
json to_json(const PerimeterFit& f);
json to_json(const McResult& r);

// One JSON object per line: {phase, polymers, n, norm1, norm2_or_gamma, ursell, psi}.
// Returns the number of clusters written.
std::size_t dump_clusters(std::ostream& os, Phase phase, const ModelParams& p, const Chain& gamma,
                          ClusterCutoffs cut);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& s);

// Shortest round-trip decimal form of a double.
std::string fmt_double(double v);

}  // namespace latthiggs
