#include "flowmut/mutation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "flowmut/parser.hpp"
#include "flowmut/validate.hpp"

namespace flowmut {

std::string operator_name(MutationOperatorId op) {
    switch (op) {
    case MutationOperatorId::UTS: return "UTS";
    case MutationOperatorId::BTS: return "BTS";
    case MutationOperatorId::UTR: return "UTR";
    case MutationOperatorId::BTR: return "BTR";
    case MutationOperatorId::UTD: return "UTD";
    case MutationOperatorId::MTR: return "MTR";
    case MutationOperatorId::FTD: return "FTD";
    case MutationOperatorId::NFTP: return "NFTP";
    case MutationOperatorId::STR: return "STR";
    case MutationOperatorId::DTI: return "DTI";
    case MutationOperatorId::DTD: return "DTD";
    case MutationOperatorId::ATR: return "ATR";
    case MutationOperatorId::JTR: return "JTR";
    case MutationOperatorId::OTD: return "OTD";
    case MutationOperatorId::OTI: return "OTI";
    }
    return "?";
}

std::optional<MutationOperatorId> operator_from_name(const std::string& name) {
    for (auto op : all_operators())
        if (operator_name(op) == name) return op;
    return std::nullopt;
}

std::vector<MutationOperatorId> all_operators() {
    std::vector<MutationOperatorId> ops;
    for (int i = 0; i < kOperatorCount; ++i) ops.push_back(static_cast<MutationOperatorId>(i));
    return ops;
}

std::string rule_name(ReductionRuleId r) {
    switch (r) {
    case ReductionRuleId::UTDE: return "UTDE";
    case ReductionRuleId::FTDS: return "FTDS";
    case ReductionRuleId::OTDS: return "OTDS";
    case ReductionRuleId::MTRR: return "MTRR";
    case ReductionRuleId::DTIE: return "DTIE";
    case ReductionRuleId::ATRC: return "ATRC";
    }
    return "?";
}

std::optional<ReductionRuleId> rule_from_name(const std::string& name) {
    for (auto r : all_rules())
        if (rule_name(r) == name) return r;
    return std::nullopt;
}

std::vector<ReductionRuleId> all_rules() {
    return {ReductionRuleId::UTDE, ReductionRuleId::FTDS, ReductionRuleId::OTDS,
            ReductionRuleId::MTRR, ReductionRuleId::DTIE, ReductionRuleId::ATRC};
}

std::string status_name(MutantStatus s) {
    switch (s) {
    case MutantStatus::Generated: return "generated";
    case MutantStatus::Removed: return "removed";
    case MutantStatus::Killed: return "killed";
    case MutantStatus::Survived: return "survived";
    case MutantStatus::Equivalent: return "equivalent";
    }
    return "?";
}

const Mutant* MetaMutant::find(int id) const {
    for (const auto& m : mutants)
        if (m.id == id) return &m;
    return nullptr;
}

namespace {

// ---- generation ---------------------------------------------------------

struct Generator {
    const ProgramGraph& graph;
    std::vector<Mutant> out;
    int next_id = 1;

    void emit(MutationOperatorId op, std::vector<int> sites, GraphPatch patch,
              std::string variant, std::string description) {
        Mutant m;
        m.id = next_id++;
        m.op = op;
        m.site_kind = graph.transformations.at(sites[0]).kind;
        m.sites = std::move(sites);
        m.patch = std::move(patch);
        m.variant = std::move(variant);
        m.description = std::move(description);
        out.push_back(std::move(m));
    }

    std::string site_label(int site) const {
        return kind_name(graph.transformations[site].kind) + " at site " + std::to_string(site);
    }

    bool same_unary_signature(const Transformation& a, const Transformation& b) const {
        if (!is_unary(a.kind) || !is_unary(b.kind)) return false;
        Signature sa = signature(a, graph), sb = signature(b, graph);
        return sa.input_elems[0] == sb.input_elems[0] && sa.output_elem == sb.output_elem;
    }

    bool same_binary_signature(const Transformation& a, const Transformation& b) const {
        if (!is_binary(a.kind) || !is_binary(b.kind)) return false;
        Signature sa = signature(a, graph), sb = signature(b, graph);
        return sa.input_elems == sb.input_elems && sa.output_elem == sb.output_elem;
    }

    GraphPatch swap_patch(int a, int b) const {
        GraphPatch p;
        p.kind = GraphPatch::Kind::SwapSites;
        p.site = a;
        p.other_site = b;
        return p;
    }

    GraphPatch delete_patch(int site, int keep) const {
        GraphPatch p;
        p.kind = GraphPatch::Kind::DeleteSite;
        p.site = site;
        p.keep_input = keep;
        return p;
    }

    GraphPatch replace_patch(int site, Transformation replacement) const {
        GraphPatch p;
        p.kind = GraphPatch::Kind::ReplaceSite;
        p.site = site;
        p.replacement = std::move(replacement);
        return p;
    }

    GraphPatch wrap_patch(int site, UdfWrapper w) const {
        GraphPatch p;
        p.kind = GraphPatch::Kind::WrapUdf;
        p.site = site;
        p.udf_index = 0;
        p.wrapper = std::move(w);
        return p;
    }

    // swap and replacement mutants over unary / binary sites

    void gen_swaps(MutationOperatorId op, bool binary) {
        for (std::size_t i = 0; i < graph.transformations.size(); ++i) {
            for (std::size_t j = i + 1; j < graph.transformations.size(); ++j) {
                const auto& a = graph.transformations[i];
                const auto& b = graph.transformations[j];
                bool match = binary ? same_binary_signature(a, b) : same_unary_signature(a, b);
                if (!match) continue;
                emit(op, {a.id, b.id}, swap_patch(a.id, b.id), "-",
                     "swap " + site_label(a.id) + " with " + site_label(b.id));
            }
        }
    }

    void gen_replacements(MutationOperatorId op, bool binary) {
        for (const auto& a : graph.transformations) {
            for (const auto& b : graph.transformations) {
                if (a.id == b.id) continue;
                bool match = binary ? same_binary_signature(a, b) : same_unary_signature(a, b);
                if (!match) continue;
                Transformation r = b;  // copy of b's operation...
                r.id = a.id;           // ...installed at a's place in the flow
                r.inputs = a.inputs;
                r.output = a.output;
                r.span = a.span;
                emit(op, {a.id}, replace_patch(a.id, std::move(r)),
                     "from_site_" + std::to_string(b.id),
                     "replace " + site_label(a.id) + " with the " + site_label(b.id));
            }
        }
    }

    void gen_uts() { gen_swaps(MutationOperatorId::UTS, false); }
    void gen_bts() { gen_swaps(MutationOperatorId::BTS, true); }
    void gen_utr() { gen_replacements(MutationOperatorId::UTR, false); }
    void gen_btr() { gen_replacements(MutationOperatorId::BTR, true); }

    void gen_utd() {
        for (const auto& t : graph.transformations) {
            if (!is_unary(t.kind)) continue;
            Signature s = signature(t, graph);
            if (!(s.input_elems[0] == s.output_elem)) continue;
            emit(MutationOperatorId::UTD, {t.id}, delete_patch(t.id, 0), "-",
                 "delete " + site_label(t.id));
        }
    }

    // mapping values applicable to a result type, in canonical order
    static std::vector<MappingValue> applicable_mappings(const ValueType& t) {
        std::vector<MappingValue> ms;
        switch (t.kind()) {
        case ValueType::Kind::Int:
        case ValueType::Kind::Float:
            for (auto id : {MappingValueId::Num0, MappingValueId::Num1, MappingValueId::NumMax,
                            MappingValueId::NumMin, MappingValueId::NumNegate})
                ms.push_back({id, nullptr});
            break;
        case ValueType::Kind::Bool:
            for (auto id : {MappingValueId::BoolTrue, MappingValueId::BoolFalse,
                            MappingValueId::BoolNegate})
                ms.push_back({id, nullptr});
            break;
        case ValueType::Kind::Str:
            ms.push_back({MappingValueId::StrEmpty, nullptr});
            break;
        case ValueType::Kind::List:
            for (auto id : {MappingValueId::ListHead, MappingValueId::ListTail,
                            MappingValueId::ListReverse, MappingValueId::ListNil})
                ms.push_back({id, nullptr});
            break;
        case ValueType::Kind::Pair: {
            for (const auto& inner : applicable_mappings(t.key()))
                ms.push_back({MappingValueId::TupleKeyMod,
                              std::make_shared<const MappingValue>(inner)});
            for (const auto& inner : applicable_mappings(t.value()))
                ms.push_back({MappingValueId::TupleValueMod,
                              std::make_shared<const MappingValue>(inner)});
            break;
        }
        }
        // types with no specific rule map to null; unreachable for the
        // closed type grammar but kept as the table's general row
        if (ms.empty()) ms.push_back({MappingValueId::NullValue, nullptr});
        return ms;
    }

    static Value constant_for(const MappingValue& m, const ValueType& t) {
        bool is_int = t.kind() == ValueType::Kind::Int;
        switch (m.id) {
        case MappingValueId::Num0: return is_int ? Value::of_int(0) : Value::of_float(0.0);
        case MappingValueId::Num1: return is_int ? Value::of_int(1) : Value::of_float(1.0);
        case MappingValueId::NumMax:
            return is_int ? Value::of_int(std::numeric_limits<std::int64_t>::max())
                          : Value::of_float(std::numeric_limits<double>::max());
        case MappingValueId::NumMin:
            return is_int ? Value::of_int(std::numeric_limits<std::int64_t>::min())
                          : Value::of_float(std::numeric_limits<double>::lowest());
        case MappingValueId::BoolTrue: return Value::of_bool(true);
        case MappingValueId::BoolFalse: return Value::of_bool(false);
        case MappingValueId::StrEmpty: return Value::of_str("");
        case MappingValueId::ListNil: return Value::list({});
        case MappingValueId::NullValue: return Value::null();
        default: throw std::logic_error("mapping value is not a constant");
        }
    }

    void gen_mtr() {
        for (const auto& t : graph.transformations) {
            if (!is_mapping(t.kind)) continue;
            // for flatMap the mutated value is the list the udf returns
            const ValueType& result = t.udfs[0].lambda.result_type;
            for (const auto& m : applicable_mappings(result)) {
                UdfWrapper w;
                w.mapping = m;
                if (m.is_constant()) {
                    w.kind = UdfWrapper::Kind::ConstResult;
                    w.const_value = constant_for(m, result);
                } else {
                    w.kind = UdfWrapper::Kind::MapResult;
                }
                emit(MutationOperatorId::MTR, {t.id}, wrap_patch(t.id, std::move(w)), m.token(),
                     "replace " + kind_name(t.kind) + " result with " + m.render() +
                         " at site " + std::to_string(t.id));
            }
        }
    }

    void gen_ftd() {
        for (const auto& t : graph.transformations)
            if (t.kind == TransformationKind::Filter)
                emit(MutationOperatorId::FTD, {t.id}, delete_patch(t.id, 0), "-",
                     "delete filter at site " + std::to_string(t.id));
    }

    void gen_nftp() {
        for (const auto& t : graph.transformations) {
            if (t.kind != TransformationKind::Filter) continue;
            UdfWrapper w;
            w.kind = UdfWrapper::Kind::NegatePredicate;
            emit(MutationOperatorId::NFTP, {t.id}, wrap_patch(t.id, std::move(w)), "-",
                 "negate filter predicate at site " + std::to_string(t.id));
        }
    }

    void gen_str() {
        for (const auto& t : graph.transformations) {
            if (!is_set_op(t.kind)) continue;
            for (auto target : {TransformationKind::Union, TransformationKind::Intersection,
                                TransformationKind::Subtract}) {
                if (target == t.kind) continue;
                Transformation r = t;
                r.kind = target;
                emit(MutationOperatorId::STR, {t.id}, replace_patch(t.id, std::move(r)),
                     "to_" + kind_name(target),
                     "replace " + kind_name(t.kind) + " with " + kind_name(target) +
                         " at site " + std::to_string(t.id));
            }
            emit(MutationOperatorId::STR, {t.id}, delete_patch(t.id, 0), "keep_left",
                 "replace " + kind_name(t.kind) + " with its left input at site " +
                     std::to_string(t.id));
            emit(MutationOperatorId::STR, {t.id}, delete_patch(t.id, 1), "keep_right",
                 "replace " + kind_name(t.kind) + " with its right input at site " +
                     std::to_string(t.id));
            if (t.kind == TransformationKind::Subtract) {
                // union and intersection are commutative; the operand swap
                // only matters for subtract
                Transformation r = t;
                std::swap(r.inputs[0], r.inputs[1]);
                emit(MutationOperatorId::STR, {t.id}, replace_patch(t.id, std::move(r)),
                     "swap_operands", "swap subtract operands at site " + std::to_string(t.id));
            }
        }
    }

    void gen_dti() {
        for (const auto& t : graph.transformations) {
            if (t.kind == TransformationKind::Distinct) continue;
            GraphPatch p;
            p.kind = GraphPatch::Kind::InsertAfter;
            p.site = t.id;
            p.replacement.kind = TransformationKind::Distinct;
            emit(MutationOperatorId::DTI, {t.id}, std::move(p), "-",
                 "insert distinct after " + site_label(t.id));
        }
    }

    void gen_dtd() {
        for (const auto& t : graph.transformations)
            if (t.kind == TransformationKind::Distinct)
                emit(MutationOperatorId::DTD, {t.id}, delete_patch(t.id, 0), "-",
                     "delete distinct at site " + std::to_string(t.id));
    }

    void gen_atr() {
        for (const auto& t : graph.transformations) {
            if (t.kind != TransformationKind::ReduceByKey) continue;
            for (auto agg : {AggReplaceKind::FirstArg, AggReplaceKind::SecondArg,
                             AggReplaceKind::DupFirst, AggReplaceKind::DupSecond,
                             AggReplaceKind::Swapped}) {
                UdfWrapper w;
                w.kind = UdfWrapper::Kind::AggReplace;
                w.agg = agg;
                emit(MutationOperatorId::ATR, {t.id}, wrap_patch(t.id, std::move(w)),
                     agg_replace_token(agg),
                     "replace aggregation function with " + agg_replace_render(agg) +
                         " at site " + std::to_string(t.id));
            }
        }
    }

    // identity adjustment inserted after the new join so the mutant keeps
    // the original output shape, mirroring the paper's type-restoring map
    Lambda join_adjustment(const Transformation& t) const {
        const ValueType out_elem = graph.dataset(t.output).elem;
        Lambda l;
        l.params = {"x"};
        l.param_types = {out_elem};
        l.result_type = out_elem;

        auto param = std::make_shared<UdfExpr>();
        param->node = UdfExpr::Node::Param;
        param->param_index = 0;
        param->param_name = "x";
        param->result_type = out_elem;

        auto proj = [&](ExprPtr base, bool key_side) {
            auto e = std::make_shared<UdfExpr>();
            e->node = key_side ? UdfExpr::Node::ProjKey : UdfExpr::Node::ProjValue;
            e->a = base;
            e->result_type = key_side ? base->result_type.key() : base->result_type.value();
            return ExprPtr(e);
        };
        auto pair_of = [&](ExprPtr k, ExprPtr v) {
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::PairCtor;
            e->a = k;
            e->b = v;
            e->result_type = ValueType::pair_type(k->result_type, v->result_type);
            return ExprPtr(e);
        };
        ExprPtr value = proj(param, false);
        l.body = pair_of(proj(param, true), pair_of(proj(value, true), proj(value, false)));
        return l;
    }

    void gen_jtr() {
        for (const auto& t : graph.transformations) {
            if (!is_join(t.kind)) continue;
            for (auto target : {TransformationKind::Join, TransformationKind::LeftOuterJoin,
                                TransformationKind::RightOuterJoin,
                                TransformationKind::FullOuterJoin}) {
                if (target == t.kind) continue;
                GraphPatch p;
                p.kind = GraphPatch::Kind::ReplaceJoinWithAdjustment;
                p.site = t.id;
                p.new_join_kind = target;
                p.adjustment = join_adjustment(t);
                emit(MutationOperatorId::JTR, {t.id}, std::move(p), "to_" + kind_name(target),
                     "replace " + kind_name(t.kind) + " with " + kind_name(target) +
                         " at site " + std::to_string(t.id));
            }
        }
    }

    void gen_otd() {
        for (const auto& t : graph.transformations)
            if (is_sort(t.kind))
                emit(MutationOperatorId::OTD, {t.id}, delete_patch(t.id, 0), "-",
                     "delete " + site_label(t.id));
    }

    void gen_oti() {
        for (const auto& t : graph.transformations) {
            if (!is_sort(t.kind)) continue;
            Transformation r = t;
            r.ascending = !t.ascending;
            emit(MutationOperatorId::OTI, {t.id}, replace_patch(t.id, std::move(r)),
                 "invert_order",
                 "invert " + kind_name(t.kind) + " order to " +
                     (t.ascending ? "descending" : "ascending") + " at site " +
                     std::to_string(t.id));
        }
    }
};

}  // namespace

std::vector<Mutant> generate_mutants(const ProgramGraph& graph, const OperatorSet& operators) {
    Generator gen{graph, {}, 1};
    for (auto op : all_operators()) {
        if (!operators.count(op)) continue;
        switch (op) {
        case MutationOperatorId::UTS: gen.gen_uts(); break;
        case MutationOperatorId::BTS: gen.gen_bts(); break;
        case MutationOperatorId::UTR: gen.gen_utr(); break;
        case MutationOperatorId::BTR: gen.gen_btr(); break;
        case MutationOperatorId::UTD: gen.gen_utd(); break;
        case MutationOperatorId::MTR: gen.gen_mtr(); break;
        case MutationOperatorId::FTD: gen.gen_ftd(); break;
        case MutationOperatorId::NFTP: gen.gen_nftp(); break;
        case MutationOperatorId::STR: gen.gen_str(); break;
        case MutationOperatorId::DTI: gen.gen_dti(); break;
        case MutationOperatorId::DTD: gen.gen_dtd(); break;
        case MutationOperatorId::ATR: gen.gen_atr(); break;
        case MutationOperatorId::JTR: gen.gen_jtr(); break;
        case MutationOperatorId::OTD: gen.gen_otd(); break;
        case MutationOperatorId::OTI: gen.gen_oti(); break;
        }
    }
    return std::move(gen.out);
}

std::vector<Mutant> reduce_mutants(std::vector<Mutant> mutants, const RuleSet& rules,
                                   const OperatorSet& enabled_ops) {
    auto remove = [](Mutant& m, ReductionRuleId rule) {
        if (m.status != MutantStatus::Generated) return;
        m.status = MutantStatus::Removed;
        m.removed_by = rule;
    };
    bool utd = enabled_ops.count(MutationOperatorId::UTD) > 0;
    bool ftd = enabled_ops.count(MutationOperatorId::FTD) > 0;
    bool otd = enabled_ops.count(MutationOperatorId::OTD) > 0;

    for (auto& m : mutants) {
        if (rules.count(ReductionRuleId::UTDE) && utd &&
            (m.op == MutationOperatorId::FTD || m.op == MutationOperatorId::DTD ||
             m.op == MutationOperatorId::OTD))
            remove(m, ReductionRuleId::UTDE);
        if (rules.count(ReductionRuleId::FTDS) && (ftd || utd) && m.op == MutationOperatorId::NFTP)
            remove(m, ReductionRuleId::FTDS);
        if (rules.count(ReductionRuleId::OTDS) && (otd || utd) && m.op == MutationOperatorId::OTI)
            remove(m, ReductionRuleId::OTDS);
        if (rules.count(ReductionRuleId::MTRR) && m.op == MutationOperatorId::MTR &&
            m.patch.wrapper.mapping.mtrr_trivial())
            remove(m, ReductionRuleId::MTRR);
        if (rules.count(ReductionRuleId::DTIE) && m.op == MutationOperatorId::DTI &&
            is_grouping_or_aggregation(m.site_kind))
            remove(m, ReductionRuleId::DTIE);
        if (rules.count(ReductionRuleId::ATRC) && m.op == MutationOperatorId::ATR &&
            m.patch.wrapper.kind == UdfWrapper::Kind::AggReplace &&
            m.patch.wrapper.agg == AggReplaceKind::Swapped)
            remove(m, ReductionRuleId::ATRC);
    }
    return mutants;
}

}  // namespace flowmut
