#ifndef STOSUB_IO_HPP
#define STOSUB_IO_HPP

#include <optional>
#include <string>
#include <utility>

#include "json.hpp"
#include "stosub/bounds.hpp"
#include "stosub/matroid.hpp"
#include "stosub/policies.hpp"
#include "stosub/types.hpp"

namespace stosub {

/// Instance file layout:
///   {"universe_size": int,
///    "objective": {"kind": "coverage" | "concave_sum" | "table", ...},
///    "elements": [{"id": int, "support": [{"payload": ..., "prob": f}]}],
///    "matroid": {...}}            (matroid block optional)
/// Payload encodings: coverage -> sorted int arrays, concave_sum ->
/// floats, table -> ints. The loader rejects NaN or negative
/// probabilities and unsorted or duplicate element ids.
struct LoadedInstance {
    Instance instance;
    std::optional<Matroid> matroid;
};

nlohmann::ordered_json instance_to_json(const Instance& inst, const Matroid* m = nullptr);
LoadedInstance instance_from_json(const nlohmann::json& doc);

LoadedInstance load_instance_file(const std::string& path);
void save_instance_file(const std::string& path, const Instance& inst, const Matroid* m = nullptr);

/// Matroid block: {"kind": "uniform", "k": int}
///              | {"kind": "partition", "parts": [int per element],
///                 "capacities": [int per part]}
///              | {"kind": "explicit", "independent_sets": [[int]]}.
nlohmann::ordered_json matroid_to_json(const Matroid& m);
Matroid matroid_from_json(const nlohmann::json& doc, int num_elements);

/// One JSON object per line, one line per policy step.
std::string trace_to_json_lines(const PolicyTrace& trace);

/// Bound-chain certificate as emitted by the `bound` subcommand:
/// {A, U, M, N, y_star, links: [{name, lhs, rhs, ok}]}.
nlohmann::ordered_json certificate_to_json(const GapChainCertificate& cert);

/// Reads a whole file (IoError on failure).
std::string read_text_file(const std::string& path);
/// Writes a whole file (IoError on failure).
void write_text_file(const std::string& path, const std::string& content);

}  // namespace stosub

#endif
