#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowmut/diagnostics.hpp"
#include "flowmut/types.hpp"

namespace flowmut {

enum class TransformationKind {
    Map,
    FlatMap,
    Filter,
    Distinct,
    SortBy,
    SortByKey,
    GroupByKey,
    ReduceByKey,
    Union,
    Intersection,
    Subtract,
    Join,
    LeftOuterJoin,
    RightOuterJoin,
    FullOuterJoin,
};

bool is_binary(TransformationKind k);
inline bool is_unary(TransformationKind k) { return !is_binary(k); }
bool is_set_op(TransformationKind k);    // union, intersection, subtract
bool is_join(TransformationKind k);      // the four join variants
bool is_sort(TransformationKind k);      // sortBy, sortByKey
bool is_mapping(TransformationKind k);   // map, flatMap
bool is_grouping_or_aggregation(TransformationKind k);  // groupByKey, reduceByKey
int udf_count(TransformationKind k);     // 1 for map/flatMap/filter/sortBy/reduceByKey
/// DSL spelling, e.g. "flatMap", "reduceByKey".
std::string kind_name(TransformationKind k);

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Neg, Not };

enum class Builtin {
    Split,
    Concat,
    Contains,
    StartsWith,
    EndsWith,
    Lower,
    Upper,
    Len,
    Head,
    Tail,
    Reverse,
    Length,
};

struct UdfExpr;
using ExprPtr = std::shared_ptr<const UdfExpr>;

/// Typed expression tree of the UDF language. Every node carries its
/// inferred result type; inference is total or parsing fails.
struct UdfExpr {
    enum class Node {
        IntLit,
        FloatLit,
        BoolLit,
        StrLit,
        Param,
        PairCtor,
        ProjKey,
        ProjValue,
        Binary,
        Unary,
        Call,
        EmptyList,
        If,
    };

    Node node = Node::IntLit;
    ValueType result_type;
    SourceSpan span;

    std::int64_t int_val = 0;
    double float_val = 0.0;
    bool bool_val = false;
    std::string str_val;

    int param_index = 0;
    std::string param_name;

    BinaryOp bin_op = BinaryOp::Add;
    UnaryOp un_op = UnaryOp::Neg;
    Builtin builtin = Builtin::Split;

    ExprPtr a, b, c;                // operands / condition-then-else
    std::vector<ExprPtr> args;      // builtin call arguments
};

/// One row instantiation of the mapping-value table. Tuple mods carry the
/// mapping applied to the key or value component.
struct MappingValue;
using MappingValuePtr = std::shared_ptr<const MappingValue>;

enum class MappingValueId {
    Num0,
    Num1,
    NumMax,
    NumMin,
    NumNegate,
    BoolTrue,
    BoolFalse,
    BoolNegate,
    StrEmpty,
    ListHead,
    ListTail,
    ListReverse,
    ListNil,
    TupleKeyMod,
    TupleValueMod,
    NullValue,
};

struct MappingValue {
    MappingValueId id = MappingValueId::Num0;
    MappingValuePtr inner;  // TupleKeyMod / TupleValueMod only

    /// Stable token, e.g. "num_0", "tuple_value(num_max)".
    std::string token() const;
    /// Rendering with x/k/v placeholders, e.g. "-x", "(k, 0)".
    std::string render() const;
    /// True when the mapped value is a constant that never consults the
    /// original function result.
    bool is_constant() const;
    /// True when this mapping, or a nested one, is in the MTRR trivial set.
    bool mtrr_trivial() const;
};

enum class AggReplaceKind { FirstArg, SecondArg, DupFirst, DupSecond, Swapped };

std::string agg_replace_token(AggReplaceKind k);
std::string agg_replace_render(AggReplaceKind k);  // e.g. "f(y, x)"

/// Mutant-only decoration applied on top of a parsed lambda. The wrapper
/// preserves the declared result type of the UDF.
struct UdfWrapper {
    enum class Kind { None, NegatePredicate, ConstResult, MapResult, AggReplace };

    Kind kind = Kind::None;
    Value const_value;          // ConstResult
    MappingValue mapping;       // ConstResult (bookkeeping) and MapResult
    AggReplaceKind agg = AggReplaceKind::FirstArg;
};

struct Lambda {
    std::vector<std::string> params;
    std::vector<ValueType> param_types;
    ExprPtr body;
    ValueType result_type;
};

struct Udf {
    Lambda lambda;
    UdfWrapper wrapper;
};

struct Transformation {
    int id = 0;  // site ordinal; equals index in the program's ordered list
    TransformationKind kind = TransformationKind::Map;
    std::vector<Udf> udfs;
    bool ascending = true;  // sortBy / sortByKey
    std::vector<int> inputs;  // 1 or 2 dataset ids
    int output = 0;
    SourceSpan span;
};

struct DatasetNode {
    int id = 0;
    std::string name;
    ValueType elem;
};

struct ProgramOutput {
    std::string name;
    int dataset = 0;
};

/// Immutable DAG of typed datasets and transformations; the unit under
/// test. Dataset ids are unique but not necessarily dense.
struct ProgramGraph {
    std::string name;
    std::vector<DatasetNode> datasets;
    std::vector<int> input_ids;  // declaration order
    std::vector<Transformation> transformations;
    std::vector<ProgramOutput> outputs;

    const DatasetNode& dataset(int id) const;
    const DatasetNode* find_dataset(int id) const;
    const DatasetNode* find_dataset_by_name(const std::string& name) const;
    bool is_input(int dataset_id) const;
    /// Producing transformation of a dataset, or nullptr for inputs.
    const Transformation* producer(int dataset_id) const;
    int next_dataset_id() const;
};

}  // namespace flowmut
