#include "flowmut/graph.hpp"

#include <stdexcept>

namespace flowmut {

bool is_binary(TransformationKind k) {
    switch (k) {
    case TransformationKind::Union:
    case TransformationKind::Intersection:
    case TransformationKind::Subtract:
    case TransformationKind::Join:
    case TransformationKind::LeftOuterJoin:
    case TransformationKind::RightOuterJoin:
    case TransformationKind::FullOuterJoin:
        return true;
    default:
        return false;
    }
}

bool is_set_op(TransformationKind k) {
    return k == TransformationKind::Union || k == TransformationKind::Intersection ||
           k == TransformationKind::Subtract;
}

bool is_join(TransformationKind k) {
    return k == TransformationKind::Join || k == TransformationKind::LeftOuterJoin ||
           k == TransformationKind::RightOuterJoin || k == TransformationKind::FullOuterJoin;
}

bool is_sort(TransformationKind k) {
    return k == TransformationKind::SortBy || k == TransformationKind::SortByKey;
}

bool is_mapping(TransformationKind k) {
    return k == TransformationKind::Map || k == TransformationKind::FlatMap;
}

bool is_grouping_or_aggregation(TransformationKind k) {
    return k == TransformationKind::GroupByKey || k == TransformationKind::ReduceByKey;
}

int udf_count(TransformationKind k) {
    switch (k) {
    case TransformationKind::Map:
    case TransformationKind::FlatMap:
    case TransformationKind::Filter:
    case TransformationKind::SortBy:
    case TransformationKind::ReduceByKey:
        return 1;
    default:
        return 0;
    }
}

std::string kind_name(TransformationKind k) {
    switch (k) {
    case TransformationKind::Map: return "map";
    case TransformationKind::FlatMap: return "flatMap";
    case TransformationKind::Filter: return "filter";
    case TransformationKind::Distinct: return "distinct";
    case TransformationKind::SortBy: return "sortBy";
    case TransformationKind::SortByKey: return "sortByKey";
    case TransformationKind::GroupByKey: return "groupByKey";
    case TransformationKind::ReduceByKey: return "reduceByKey";
    case TransformationKind::Union: return "union";
    case TransformationKind::Intersection: return "intersection";
    case TransformationKind::Subtract: return "subtract";
    case TransformationKind::Join: return "join";
    case TransformationKind::LeftOuterJoin: return "leftOuterJoin";
    case TransformationKind::RightOuterJoin: return "rightOuterJoin";
    case TransformationKind::FullOuterJoin: return "fullOuterJoin";
    }
    return "?";
}

std::string MappingValue::token() const {
    switch (id) {
    case MappingValueId::Num0: return "num_0";
    case MappingValueId::Num1: return "num_1";
    case MappingValueId::NumMax: return "num_max";
    case MappingValueId::NumMin: return "num_min";
    case MappingValueId::NumNegate: return "num_negate";
    case MappingValueId::BoolTrue: return "bool_true";
    case MappingValueId::BoolFalse: return "bool_false";
    case MappingValueId::BoolNegate: return "bool_negate";
    case MappingValueId::StrEmpty: return "str_empty";
    case MappingValueId::ListHead: return "list_head";
    case MappingValueId::ListTail: return "list_tail";
    case MappingValueId::ListReverse: return "list_reverse";
    case MappingValueId::ListNil: return "list_nil";
    case MappingValueId::TupleKeyMod: return "tuple_key(" + inner->token() + ")";
    case MappingValueId::TupleValueMod: return "tuple_value(" + inner->token() + ")";
    case MappingValueId::NullValue: return "null";
    }
    return "?";
}

namespace {

std::string render_with(const MappingValue& m, const std::string& var) {
    switch (m.id) {
    case MappingValueId::Num0: return "0";
    case MappingValueId::Num1: return "1";
    case MappingValueId::NumMax: return "MAX";
    case MappingValueId::NumMin: return "MIN";
    case MappingValueId::NumNegate: return "-" + var;
    case MappingValueId::BoolTrue: return "true";
    case MappingValueId::BoolFalse: return "false";
    case MappingValueId::BoolNegate: return "!" + var;
    case MappingValueId::StrEmpty: return "\"\"";
    case MappingValueId::ListHead: return "list(head(" + var + "))";
    case MappingValueId::ListTail: return "tail(" + var + ")";
    case MappingValueId::ListReverse: return "reverse(" + var + ")";
    case MappingValueId::ListNil: return "[]";
    case MappingValueId::TupleKeyMod: return "(" + render_with(*m.inner, "k") + ", v)";
    case MappingValueId::TupleValueMod: return "(k, " + render_with(*m.inner, "v") + ")";
    case MappingValueId::NullValue: return "null";
    }
    return "?";
}

}  // namespace

std::string MappingValue::render() const { return render_with(*this, "x"); }

bool MappingValue::is_constant() const {
    switch (id) {
    case MappingValueId::Num0:
    case MappingValueId::Num1:
    case MappingValueId::NumMax:
    case MappingValueId::NumMin:
    case MappingValueId::BoolTrue:
    case MappingValueId::BoolFalse:
    case MappingValueId::StrEmpty:
    case MappingValueId::ListNil:
    case MappingValueId::NullValue:
        return true;
    default:
        return false;
    }
}

bool MappingValue::mtrr_trivial() const {
    switch (id) {
    case MappingValueId::NumMax:
    case MappingValueId::NumMin:
    case MappingValueId::StrEmpty:
    case MappingValueId::ListReverse:
    case MappingValueId::NullValue:
        return true;
    case MappingValueId::TupleKeyMod:
    case MappingValueId::TupleValueMod:
        return inner->mtrr_trivial();
    default:
        return false;
    }
}

std::string agg_replace_token(AggReplaceKind k) {
    switch (k) {
    case AggReplaceKind::FirstArg: return "first_arg";
    case AggReplaceKind::SecondArg: return "second_arg";
    case AggReplaceKind::DupFirst: return "dup_first";
    case AggReplaceKind::DupSecond: return "dup_second";
    case AggReplaceKind::Swapped: return "swapped";
    }
    return "?";
}

std::string agg_replace_render(AggReplaceKind k) {
    switch (k) {
    case AggReplaceKind::FirstArg: return "x";
    case AggReplaceKind::SecondArg: return "y";
    case AggReplaceKind::DupFirst: return "f(x, x)";
    case AggReplaceKind::DupSecond: return "f(y, y)";
    case AggReplaceKind::Swapped: return "f(y, x)";
    }
    return "?";
}

const DatasetNode& ProgramGraph::dataset(int id) const {
    const DatasetNode* d = find_dataset(id);
    if (!d) throw std::out_of_range("unknown dataset id " + std::to_string(id));
    return *d;
}

const DatasetNode* ProgramGraph::find_dataset(int id) const {
    for (const auto& d : datasets)
        if (d.id == id) return &d;
    return nullptr;
}

const DatasetNode* ProgramGraph::find_dataset_by_name(const std::string& name) const {
    for (const auto& d : datasets)
        if (d.name == name) return &d;
    return nullptr;
}

bool ProgramGraph::is_input(int dataset_id) const {
    for (int id : input_ids)
        if (id == dataset_id) return true;
    return false;
}

const Transformation* ProgramGraph::producer(int dataset_id) const {
    for (const auto& t : transformations)
        if (t.output == dataset_id) return &t;
    return nullptr;
}

int ProgramGraph::next_dataset_id() const {
    int m = 0;
    for (const auto& d : datasets)
        if (d.id >= m) m = d.id + 1;
    return m;
}

}  // namespace flowmut
