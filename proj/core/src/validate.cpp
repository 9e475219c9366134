#include "flowmut/validate.hpp"

#include <set>
#include <stdexcept>

namespace flowmut {

namespace {

std::string cap_kind(TransformationKind k) {
    std::string n = kind_name(k);
    if (!n.empty()) n[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(n[0])));
    return n;
}

bool udf_matches(const Udf& u, const std::vector<ValueType>& params, std::string* error) {
    if (u.lambda.param_types.size() != params.size()) {
        if (error) *error = "udf expects " + std::to_string(params.size()) + " parameter(s)";
        return false;
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (u.lambda.param_types[i] != params[i]) {
            if (error)
                *error = "udf parameter " + std::to_string(i + 1) + " has type " +
                         u.lambda.param_types[i].to_string() + ", expected " +
                         params[i].to_string();
            return false;
        }
    }
    return true;
}

}  // namespace

std::optional<ValueType> infer_output_type(TransformationKind kind,
                                           const std::vector<ValueType>& input_elems,
                                           const std::vector<Udf>& udfs,
                                           std::string* error) {
    auto fail = [&](const std::string& msg) -> std::optional<ValueType> {
        if (error) *error = msg;
        return std::nullopt;
    };

    std::size_t arity = is_binary(kind) ? 2 : 1;
    if (input_elems.size() != arity)
        return fail(cap_kind(kind) + " takes " + std::to_string(arity) + " input dataset(s)");
    if (static_cast<int>(udfs.size()) != udf_count(kind))
        return fail(cap_kind(kind) + " takes " + std::to_string(udf_count(kind)) + " udf(s)");

    const ValueType& in0 = input_elems[0];

    switch (kind) {
    case TransformationKind::Map: {
        if (!udf_matches(udfs[0], {in0}, error)) return std::nullopt;
        return udfs[0].lambda.result_type;
    }
    case TransformationKind::FlatMap: {
        if (!udf_matches(udfs[0], {in0}, error)) return std::nullopt;
        const ValueType& r = udfs[0].lambda.result_type;
        if (!r.is_list()) return fail("FlatMap udf must return a list");
        return r.elem();
    }
    case TransformationKind::Filter: {
        if (!udf_matches(udfs[0], {in0}, error)) return std::nullopt;
        if (udfs[0].lambda.result_type.kind() != ValueType::Kind::Bool)
            return fail("Filter predicate must return Bool");
        return in0;
    }
    case TransformationKind::Distinct:
        return in0;
    case TransformationKind::SortBy: {
        if (!udf_matches(udfs[0], {in0}, error)) return std::nullopt;
        if (!udfs[0].lambda.result_type.is_orderable())
            return fail("SortBy key must be an orderable type (int, float, string, bool)");
        return in0;
    }
    case TransformationKind::SortByKey: {
        if (!in0.is_pair()) return fail("SortByKey requires Pair element type");
        if (!in0.key().is_orderable())
            return fail("SortByKey key must be an orderable type (int, float, string, bool)");
        return in0;
    }
    case TransformationKind::GroupByKey: {
        if (!in0.is_pair()) return fail("GroupByKey requires Pair element type");
        return ValueType::pair_type(in0.key(), ValueType::list_type(in0.value()));
    }
    case TransformationKind::ReduceByKey: {
        if (!in0.is_pair()) return fail("ReduceByKey requires Pair element type");
        const ValueType& v = in0.value();
        if (!udf_matches(udfs[0], {v, v}, error)) return std::nullopt;
        if (udfs[0].lambda.result_type != v)
            return fail("ReduceByKey udf must return the pair's value type " + v.to_string());
        return in0;
    }
    case TransformationKind::Union:
    case TransformationKind::Intersection:
    case TransformationKind::Subtract: {
        if (input_elems[0] != input_elems[1])
            return fail(cap_kind(kind) + " requires both inputs to share one element type");
        return in0;
    }
    case TransformationKind::Join:
    case TransformationKind::LeftOuterJoin:
    case TransformationKind::RightOuterJoin:
    case TransformationKind::FullOuterJoin: {
        const ValueType& l = input_elems[0];
        const ValueType& r = input_elems[1];
        if (!l.is_pair() || !r.is_pair())
            return fail(cap_kind(kind) + " requires Pair element type on both inputs");
        if (l.key() != r.key())
            return fail(cap_kind(kind) + " requires both inputs to share the key type");
        return ValueType::pair_type(l.key(), ValueType::pair_type(l.value(), r.value()));
    }
    }
    return fail("unknown transformation kind");
}

ValidationResult validate(const ProgramGraph& graph) {
    ValidationResult res;
    auto report = [&](int site, const std::string& msg) {
        res.diagnostics.push_back({site, msg});
    };

    // dataset table sanity
    std::set<int> dataset_ids;
    std::set<std::string> dataset_names;
    for (const auto& d : graph.datasets) {
        if (!dataset_ids.insert(d.id).second)
            report(-1, "duplicate dataset id " + std::to_string(d.id));
        if (d.name.empty())
            report(-1, "dataset " + std::to_string(d.id) + " has an empty name");
        else if (!dataset_names.insert(d.name).second)
            report(-1, "duplicate dataset name '" + d.name + "'");
    }
    for (int id : graph.input_ids)
        if (!dataset_ids.count(id)) report(-1, "input references unknown dataset " + std::to_string(id));

    // site numbering: ids enumerate 0..n-1 with no gaps
    for (std::size_t i = 0; i < graph.transformations.size(); ++i) {
        if (graph.transformations[i].id != static_cast<int>(i))
            report(static_cast<int>(i),
                   "transformation id " + std::to_string(graph.transformations[i].id) +
                       " does not equal its position " + std::to_string(i));
    }

    // producer rules: inputs produced by nothing, everything else exactly once
    std::set<int> produced;
    std::set<int> available(graph.input_ids.begin(), graph.input_ids.end());
    for (const auto& t : graph.transformations) {
        if (!dataset_ids.count(t.output)) {
            report(t.id, "output references unknown dataset " + std::to_string(t.output));
            continue;
        }
        if (graph.is_input(t.output))
            report(t.id, "transformation writes to input dataset '" + graph.dataset(t.output).name + "'");
        if (!produced.insert(t.output).second)
            report(t.id, "dataset '" + graph.dataset(t.output).name + "' is produced more than once");
        for (int in : t.inputs) {
            if (!dataset_ids.count(in)) {
                report(t.id, "input references unknown dataset " + std::to_string(in));
            } else if (!available.count(in)) {
                // consuming a dataset produced later (or never) would form a
                // cycle or a dangling edge
                report(t.id, "dataset '" + graph.dataset(in).name +
                                 "' is not available before site " + std::to_string(t.id));
            }
        }
        available.insert(t.output);
    }
    for (const auto& d : graph.datasets) {
        if (!graph.is_input(d.id) && !produced.count(d.id))
            report(-1, "dataset '" + d.name + "' is never produced");
    }

    if (graph.outputs.empty()) report(-1, "program has no outputs");
    std::set<std::string> output_names;
    for (const auto& o : graph.outputs) {
        if (!dataset_ids.count(o.dataset))
            report(-1, "output '" + o.name + "' references unknown dataset " + std::to_string(o.dataset));
        if (!output_names.insert(o.name).second)
            report(-1, "duplicate output name '" + o.name + "'");
    }

    if (!res.ok()) return res;  // structural problems make type checks unreliable

    // signature rules, checked against the declared dataset element types
    for (const auto& t : graph.transformations) {
        std::vector<ValueType> ins;
        ins.reserve(t.inputs.size());
        for (int in : t.inputs) ins.push_back(graph.dataset(in).elem);
        std::string err;
        auto out = infer_output_type(t.kind, ins, t.udfs, &err);
        if (!out) {
            report(t.id, err + " at site " + std::to_string(t.id));
            continue;
        }
        const ValueType& declared = graph.dataset(t.output).elem;
        if (*out != declared)
            report(t.id, "declared element type " + declared.to_string() + " of '" +
                             graph.dataset(t.output).name + "' does not match computed type " +
                             out->to_string() + " at site " + std::to_string(t.id));
    }
    return res;
}

Signature signature(const Transformation& t, const ProgramGraph& graph) {
    Signature s;
    for (int in : t.inputs) s.input_elems.push_back(graph.dataset(in).elem);
    s.output_elem = graph.dataset(t.output).elem;
    return s;
}

Signature signature(int site, const ProgramGraph& graph) {
    if (site < 0 || site >= static_cast<int>(graph.transformations.size()))
        throw std::out_of_range("unknown transformation id " + std::to_string(site));
    return signature(graph.transformations[site], graph);
}

}  // namespace flowmut
