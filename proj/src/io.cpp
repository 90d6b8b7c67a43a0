#include "stosub/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "stosub/errors.hpp"

namespace stosub {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json payload_to_json(const OutcomePayload& payload) {
    if (const auto* subset = std::get_if<SubsetOutcome>(&payload)) {
        return subset->items;
    }
    if (const auto* scalar = std::get_if<ScalarOutcome>(&payload)) {
        return scalar->value;
    }
    return std::get<IndexOutcome>(payload).index;
}

OutcomePayload payload_from_json(const json& doc, const std::string& objective_kind) {
    if (objective_kind == "coverage") {
        if (!doc.is_array()) {
            throw InvalidInputError("coverage payloads must be sorted arrays of item ids");
        }
        SubsetOutcome subset;
        for (const json& item : doc) {
            if (!item.is_number_integer()) {
                throw InvalidInputError("coverage payload items must be integers");
            }
            subset.items.push_back(item.get<int>());
        }
        return subset;
    }
    if (objective_kind == "concave_sum") {
        if (!doc.is_number()) {
            throw InvalidInputError("concave_sum payloads must be numbers");
        }
        return ScalarOutcome{doc.get<double>()};
    }
    if (!doc.is_number_integer()) {
        throw InvalidInputError("table payloads must be integer support indices");
    }
    return IndexOutcome{doc.get<int>()};
}

double checked_prob(const json& doc) {
    if (!doc.is_number()) {
        throw InvalidInputError("probabilities must be numbers");
    }
    const double p = doc.get<double>();
    if (std::isnan(p)) throw InvalidInputError("probabilities must not be NaN");
    if (p < 0.0) throw InvalidInputError("probabilities must be nonnegative");
    return p;
}

const json& require_field(const json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw InvalidInputError(std::string("missing required field '") + name + "'");
    }
    return *it;
}

}  // namespace

ordered_json instance_to_json(const Instance& inst, const Matroid* m) {
    ordered_json doc;
    doc["universe_size"] = inst.universe_size();

    ordered_json objective;
    if (const auto* coverage = std::get_if<CoverageObjective>(&inst.objective())) {
        objective["kind"] = "coverage";
        if (!coverage->weights.empty()) objective["weights"] = coverage->weights;
    } else if (const auto* concave = std::get_if<ConcaveOfSumObjective>(&inst.objective())) {
        objective["kind"] = "concave_sum";
        ordered_json breakpoints = ordered_json::array();
        for (const auto& [x, u] : concave->breakpoints) {
            breakpoints.push_back(ordered_json::array({x, u}));
        }
        objective["breakpoints"] = std::move(breakpoints);
    } else {
        objective["kind"] = "table";
        objective["values"] = std::get<TableObjective>(inst.objective()).values;
    }
    doc["objective"] = std::move(objective);

    ordered_json elements = ordered_json::array();
    for (const StochasticElement& element : inst.elements()) {
        ordered_json support = ordered_json::array();
        for (const WeightedOutcome& outcome : element.dist.support()) {
            ordered_json entry;
            entry["payload"] = payload_to_json(outcome.payload);
            entry["prob"] = outcome.prob;
            support.push_back(std::move(entry));
        }
        ordered_json one;
        one["id"] = element.id;
        one["support"] = std::move(support);
        elements.push_back(std::move(one));
    }
    doc["elements"] = std::move(elements);

    if (m != nullptr) doc["matroid"] = matroid_to_json(*m);
    return doc;
}

LoadedInstance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw InvalidInputError("instance document must be a JSON object");
    const json& objective_doc = require_field(doc, "objective");
    const std::string kind = require_field(objective_doc, "kind").get<std::string>();
    if (kind != "coverage" && kind != "concave_sum" && kind != "table") {
        throw InvalidInputError("unknown objective kind '" + kind + "'");
    }

    const json& elements_doc = require_field(doc, "elements");
    if (!elements_doc.is_array()) throw InvalidInputError("'elements' must be an array");
    std::vector<StochasticElement> elements;
    int previous_id = -1;
    for (const json& element_doc : elements_doc) {
        const int id = require_field(element_doc, "id").get<int>();
        if (id <= previous_id) {
            throw InvalidInputError("element ids must be strictly increasing (saw " +
                                    std::to_string(id) + " after " +
                                    std::to_string(previous_id) + ")");
        }
        previous_id = id;
        const json& support_doc = require_field(element_doc, "support");
        if (!support_doc.is_array()) throw InvalidInputError("'support' must be an array");
        std::vector<WeightedOutcome> support;
        for (const json& outcome_doc : support_doc) {
            WeightedOutcome outcome;
            outcome.payload = payload_from_json(require_field(outcome_doc, "payload"), kind);
            outcome.prob = checked_prob(require_field(outcome_doc, "prob"));
            support.push_back(std::move(outcome));
        }
        elements.push_back(StochasticElement{id, DiscreteDistribution(std::move(support))});
    }

    ObjectiveSpec objective;
    if (kind == "coverage") {
        CoverageObjective coverage;
        coverage.universe_size = require_field(doc, "universe_size").get<int>();
        if (const auto it = objective_doc.find("weights"); it != objective_doc.end()) {
            coverage.weights = it->get<std::vector<double>>();
        }
        objective = std::move(coverage);
    } else if (kind == "concave_sum") {
        ConcaveOfSumObjective concave;
        for (const json& pair_doc : require_field(objective_doc, "breakpoints")) {
            if (!pair_doc.is_array() || pair_doc.size() != 2) {
                throw InvalidInputError("breakpoints must be [x, u] pairs");
            }
            concave.breakpoints.emplace_back(pair_doc[0].get<double>(),
                                             pair_doc[1].get<double>());
        }
        objective = std::move(concave);
    } else {
        TableObjective table;
        table.values = require_field(objective_doc, "values").get<std::vector<double>>();
        objective = std::move(table);
    }

    LoadedInstance loaded{Instance(std::move(elements), std::move(objective)), std::nullopt};
    if (const auto it = doc.find("matroid"); it != doc.end()) {
        loaded.matroid = matroid_from_json(*it, loaded.instance.num_elements());
    }
    return loaded;
}

LoadedInstance load_instance_file(const std::string& path) {
    const std::string text = read_text_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInputError("failed to parse '" + path + "': " + e.what());
    }
    return instance_from_json(doc);
}

void save_instance_file(const std::string& path, const Instance& inst, const Matroid* m) {
    write_text_file(path, instance_to_json(inst, m).dump(2) + "\n");
}

ordered_json matroid_to_json(const Matroid& m) {
    ordered_json doc;
    switch (m.kind()) {
        case MatroidKind::Uniform:
            doc["kind"] = "uniform";
            doc["k"] = m.uniform_k();
            break;
        case MatroidKind::Partition:
            doc["kind"] = "partition";
            doc["parts"] = m.part_assignment();
            doc["capacities"] = m.capacities();
            break;
        case MatroidKind::Explicit: {
            doc["kind"] = "explicit";
            ordered_json sets = ordered_json::array();
            for (std::uint32_t mask : m.independent_masks()) {
                ordered_json set = ordered_json::array();
                for (int i = 0; i < m.num_elements(); ++i) {
                    if (mask & (1u << i)) set.push_back(i);
                }
                sets.push_back(std::move(set));
            }
            doc["independent_sets"] = std::move(sets);
            break;
        }
    }
    return doc;
}

Matroid matroid_from_json(const json& doc, int num_elements) {
    if (!doc.is_object()) throw InvalidInputError("matroid block must be a JSON object");
    const std::string kind = require_field(doc, "kind").get<std::string>();
    if (kind == "uniform") {
        return Matroid::uniform(num_elements, require_field(doc, "k").get<int>());
    }
    if (kind == "partition") {
        const auto parts = require_field(doc, "parts").get<std::vector<int>>();
        if (static_cast<int>(parts.size()) != num_elements) {
            throw InvalidInputError("'parts' must assign a part to each of the " +
                                    std::to_string(num_elements) + " elements");
        }
        return Matroid::partition(parts, require_field(doc, "capacities").get<std::vector<int>>());
    }
    if (kind == "explicit") {
        const auto sets =
            require_field(doc, "independent_sets").get<std::vector<std::vector<ElementId>>>();
        return Matroid::explicit_family(num_elements, sets);
    }
    throw InvalidInputError("unknown matroid kind '" + kind + "'");
}

std::string trace_to_json_lines(const PolicyTrace& trace) {
    std::string out;
    for (const PolicyStep& step : trace.steps) {
        ordered_json line;
        line["element"] = step.element;
        line["accepted"] = step.accepted;
        if (step.accepted) line["outcome_index"] = step.outcome_index;
        line["conditional_marginal"] = step.conditional_marginal;
        out += line.dump();
        out += '\n';
    }
    ordered_json summary;
    summary["final_value"] = trace.final_value;
    summary["chosen"] = trace.chosen;
    summary["discarded"] = trace.discarded;
    out += summary.dump();
    out += '\n';
    return out;
}

ordered_json certificate_to_json(const GapChainCertificate& cert) {
    ordered_json doc;
    doc["A"] = cert.adaptive_value;
    doc["U"] = cert.upper_bound;
    doc["M"] = cert.multilinear_at_y_star;
    doc["N"] = cert.nonadaptive_value;
    doc["y_star"] = cert.y_star;
    doc["rounded_set"] = cert.rounded_set;
    doc["rounded_value"] = cert.rounded_value;
    ordered_json links = ordered_json::array();
    for (const GapChainLink& link : cert.links) {
        ordered_json one;
        one["name"] = link.name;
        one["lhs"] = link.lhs;
        one["rhs"] = link.rhs;
        one["ok"] = link.ok;
        links.push_back(std::move(one));
    }
    doc["links"] = std::move(links);
    doc["ok"] = cert.ok;
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading '" + path + "'");
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace stosub
