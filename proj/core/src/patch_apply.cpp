#include <stdexcept>

#include "flowmut/mutation.hpp"
#include "flowmut/validate.hpp"

namespace flowmut {

namespace {

void renumber_sites(ProgramGraph& g) {
    for (std::size_t i = 0; i < g.transformations.size(); ++i)
        g.transformations[i].id = static_cast<int>(i);
}

void rewire_dataset(ProgramGraph& g, int from, int to, int skip_site) {
    for (auto& t : g.transformations) {
        if (t.id == skip_site) continue;
        for (int& in : t.inputs)
            if (in == from) in = to;
    }
    for (auto& o : g.outputs)
        if (o.dataset == from) o.dataset = to;
}

void check_site(const ProgramGraph& g, int site) {
    if (site < 0 || site >= static_cast<int>(g.transformations.size()))
        throw std::logic_error("patch references invalid site " + std::to_string(site));
}

int insert_after(ProgramGraph& g, int site, TransformationKind kind, std::vector<Udf> udfs,
                 const std::string& name_suffix, ValueType out_elem) {
    const Transformation& t = g.transformations[site];
    int staged = t.output;

    DatasetNode d;
    d.id = g.next_dataset_id();
    d.name = g.dataset(staged).name + name_suffix;  // '$' keeps it clear of DSL identifiers
    d.elem = std::move(out_elem);
    int new_id = d.id;
    g.datasets.push_back(std::move(d));

    Transformation inserted;
    inserted.kind = kind;
    inserted.udfs = std::move(udfs);
    inserted.inputs = {staged};
    inserted.output = new_id;
    inserted.span = t.span;

    g.transformations.insert(g.transformations.begin() + site + 1, std::move(inserted));
    renumber_sites(g);
    rewire_dataset(g, staged, new_id, /*skip_site=*/site + 1);
    return new_id;
}

}  // namespace

ProgramGraph apply_patch(const ProgramGraph& graph, const GraphPatch& patch) {
    ProgramGraph g = graph;
    switch (patch.kind) {
    case GraphPatch::Kind::ReplaceSite: {
        check_site(g, patch.site);
        Transformation r = patch.replacement;
        r.id = patch.site;
        g.transformations[patch.site] = std::move(r);
        break;
    }
    case GraphPatch::Kind::DeleteSite: {
        check_site(g, patch.site);
        const Transformation t = g.transformations[patch.site];
        if (patch.keep_input < 0 || patch.keep_input >= static_cast<int>(t.inputs.size()))
            throw std::logic_error("delete patch keeps an input the site does not have");
        int kept = t.inputs[patch.keep_input];
        int removed = t.output;
        g.transformations.erase(g.transformations.begin() + patch.site);
        renumber_sites(g);
        rewire_dataset(g, removed, kept, /*skip_site=*/-1);
        for (auto it = g.datasets.begin(); it != g.datasets.end(); ++it) {
            if (it->id == removed) {
                g.datasets.erase(it);
                break;
            }
        }
        break;
    }
    case GraphPatch::Kind::SwapSites: {
        check_site(g, patch.site);
        check_site(g, patch.other_site);
        Transformation& a = g.transformations[patch.site];
        Transformation& b = g.transformations[patch.other_site];
        std::swap(a.kind, b.kind);
        std::swap(a.udfs, b.udfs);
        std::swap(a.ascending, b.ascending);
        break;
    }
    case GraphPatch::Kind::InsertAfter: {
        check_site(g, patch.site);
        if (patch.replacement.kind != TransformationKind::Distinct)
            throw std::logic_error("only distinct insertions are supported");
        ValueType elem = g.dataset(g.transformations[patch.site].output).elem;
        insert_after(g, patch.site, TransformationKind::Distinct, {}, "$distinct",
                     std::move(elem));
        break;
    }
    case GraphPatch::Kind::WrapUdf: {
        check_site(g, patch.site);
        Transformation& t = g.transformations[patch.site];
        if (patch.udf_index < 0 || patch.udf_index >= static_cast<int>(t.udfs.size()))
            throw std::logic_error("wrap patch references a udf the site does not have");
        t.udfs[patch.udf_index].wrapper = patch.wrapper;
        break;
    }
    case GraphPatch::Kind::ReplaceJoinWithAdjustment: {
        check_site(g, patch.site);
        Transformation& t = g.transformations[patch.site];
        if (!is_join(t.kind)) throw std::logic_error("join patch applied to a non-join site");
        t.kind = patch.new_join_kind;
        Udf adjust;
        adjust.lambda = patch.adjustment;
        ValueType elem = patch.adjustment.result_type;
        insert_after(g, patch.site, TransformationKind::Map, {std::move(adjust)}, "$adjust",
                     std::move(elem));
        break;
    }
    }

    ValidationResult v = validate(g);
    if (!v.ok()) {
        std::string msg = "patched graph fails validation:";
        for (const auto& d : v.diagnostics) msg += " " + d.message + ";";
        throw std::logic_error(msg);
    }
    return g;
}

MetaMutant build_meta_mutant(const ProgramGraph& graph, std::vector<Mutant> mutants) {
    for (const auto& m : mutants) {
        try {
            apply_patch(graph, m.patch);
        } catch (const std::logic_error& e) {
            throw std::logic_error("mutant " + std::to_string(m.id) + " (" +
                                   operator_name(m.op) + "): " + e.what());
        }
    }
    return MetaMutant{graph, std::move(mutants)};
}

ExecutionOutcome execute_meta(const MetaMutant& meta, const InputBindings& inputs,
                              std::optional<int> active_id) {
    if (!active_id.has_value()) return execute(meta.original, inputs);
    const Mutant* m = meta.find(*active_id);
    if (!m) throw std::out_of_range("unknown mutant id " + std::to_string(*active_id));
    return execute_with_patch(meta.original, inputs, &m->patch);
}

}  // namespace flowmut
