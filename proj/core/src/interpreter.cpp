#include "flowmut/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace flowmut {

namespace {

// two's-complement wraparound keeps integer arithmetic total and deterministic
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}
std::int64_t wrap_neg(std::int64_t a) { return wrap_sub(0, a); }

[[noreturn]] void fail(const std::string& msg) { throw EvalError{msg}; }

void require_not_null(const Value& v, const std::string& what) {
    if (v.is_null()) fail(what + " applied to null");
}

bool value_less(const Value& a, const Value& b) {
    switch (a.tag()) {
    case Value::Tag::Int: return a.as_int() < b.as_int();
    case Value::Tag::Float: return a.as_float() < b.as_float();
    case Value::Tag::Bool: return a.as_bool() < b.as_bool();
    case Value::Tag::Str: return a.as_str() < b.as_str();
    default: fail("value is not orderable");
    }
}

void require_orderable_key(const Value& v) {
    if (v.is_null()) fail("null where an ordering is required");
    if (v.tag() == Value::Tag::Float && std::isnan(v.as_float()))
        fail("NaN where an ordering is required");
    switch (v.tag()) {
    case Value::Tag::Int:
    case Value::Tag::Float:
    case Value::Tag::Bool:
    case Value::Tag::Str:
        return;
    default:
        fail("value is not orderable");
    }
}

std::vector<std::string> split_string(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    if (sep.empty()) {
        for (char c : s) out.emplace_back(1, c);
        return out;
    }
    std::size_t pos = 0;
    for (;;) {
        std::size_t idx = s.find(sep, pos);
        if (idx == std::string::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, idx - pos));
        pos = idx + sep.size();
    }
}

Value eval_expr(const UdfExpr& e, std::span<const Value> args);

Value eval_binary(const UdfExpr& e, std::span<const Value> args) {
    Value a = eval_expr(*e.a, args);
    // short-circuit boolean operators
    if (e.bin_op == BinaryOp::And || e.bin_op == BinaryOp::Or) {
        require_not_null(a, "boolean operator");
        bool av = a.as_bool();
        if (e.bin_op == BinaryOp::And && !av) return Value::of_bool(false);
        if (e.bin_op == BinaryOp::Or && av) return Value::of_bool(true);
        Value b = eval_expr(*e.b, args);
        require_not_null(b, "boolean operator");
        return Value::of_bool(b.as_bool());
    }
    Value b = eval_expr(*e.b, args);
    switch (e.bin_op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: {
        require_not_null(a, "arithmetic operator");
        require_not_null(b, "arithmetic operator");
        if (a.tag() == Value::Tag::Int) {
            std::int64_t x = a.as_int(), y = b.as_int();
            switch (e.bin_op) {
            case BinaryOp::Add: return Value::of_int(wrap_add(x, y));
            case BinaryOp::Sub: return Value::of_int(wrap_sub(x, y));
            case BinaryOp::Mul: return Value::of_int(wrap_mul(x, y));
            case BinaryOp::Div:
                if (y == 0) fail("division by zero");
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1)
                    return Value::of_int(x);
                return Value::of_int(x / y);
            case BinaryOp::Mod:
                if (y == 0) fail("modulo by zero");
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1)
                    return Value::of_int(0);
                return Value::of_int(x % y);
            default: break;
            }
        }
        double x = a.as_float(), y = b.as_float();
        switch (e.bin_op) {
        case BinaryOp::Add: return Value::of_float(x + y);
        case BinaryOp::Sub: return Value::of_float(x - y);
        case BinaryOp::Mul: return Value::of_float(x * y);
        case BinaryOp::Div:
            if (y == 0.0) fail("division by zero");
            return Value::of_float(x / y);
        case BinaryOp::Mod:
            if (y == 0.0) fail("modulo by zero");
            return Value::of_float(std::fmod(x, y));
        default: break;
        }
        fail("bad arithmetic operator");
    }
    case BinaryOp::Eq:
    case BinaryOp::Ne: {
        require_not_null(a, "comparison");
        require_not_null(b, "comparison");
        bool eq = a == b;
        return Value::of_bool(e.bin_op == BinaryOp::Eq ? eq : !eq);
    }
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
        require_not_null(a, "comparison");
        require_not_null(b, "comparison");
        if (a.tag() == Value::Tag::Float &&
            (std::isnan(a.as_float()) || std::isnan(b.as_float())))
            fail("NaN where an ordering is required");
        bool lt = value_less(a, b);
        bool gt = value_less(b, a);
        switch (e.bin_op) {
        case BinaryOp::Lt: return Value::of_bool(lt);
        case BinaryOp::Le: return Value::of_bool(!gt);
        case BinaryOp::Gt: return Value::of_bool(gt);
        case BinaryOp::Ge: return Value::of_bool(!lt);
        default: break;
        }
    }
    default:
        break;
    }
    fail("bad binary operator");
}

Value eval_call(const UdfExpr& e, std::span<const Value> args) {
    std::vector<Value> vs;
    vs.reserve(e.args.size());
    for (const auto& a : e.args) {
        vs.push_back(eval_expr(*a, args));
    }
    auto name = [&]() {
        switch (e.builtin) {
        case Builtin::Split: return "split";
        case Builtin::Concat: return "concat";
        case Builtin::Contains: return "contains";
        case Builtin::StartsWith: return "startsWith";
        case Builtin::EndsWith: return "endsWith";
        case Builtin::Lower: return "lower";
        case Builtin::Upper: return "upper";
        case Builtin::Len: return "len";
        case Builtin::Head: return "head";
        case Builtin::Tail: return "tail";
        case Builtin::Reverse: return "reverse";
        case Builtin::Length: return "length";
        }
        return "?";
    };
    for (const auto& v : vs) require_not_null(v, name());

    switch (e.builtin) {
    case Builtin::Split: {
        auto parts = split_string(vs[0].as_str(), vs[1].as_str());
        std::vector<Value> out;
        out.reserve(parts.size());
        for (auto& p : parts) out.push_back(Value::of_str(std::move(p)));
        return Value::list(std::move(out));
    }
    case Builtin::Concat: return Value::of_str(vs[0].as_str() + vs[1].as_str());
    case Builtin::Contains:
        return Value::of_bool(vs[0].as_str().find(vs[1].as_str()) != std::string::npos);
    case Builtin::StartsWith:
        return Value::of_bool(vs[0].as_str().rfind(vs[1].as_str(), 0) == 0);
    case Builtin::EndsWith: {
        const auto& s = vs[0].as_str();
        const auto& suf = vs[1].as_str();
        return Value::of_bool(s.size() >= suf.size() &&
                              s.compare(s.size() - suf.size(), suf.size(), suf) == 0);
    }
    case Builtin::Lower:
    case Builtin::Upper: {
        std::string s = vs[0].as_str();
        for (char& c : s)
            c = e.builtin == Builtin::Lower
                    ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                    : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return Value::of_str(std::move(s));
    }
    case Builtin::Len: return Value::of_int(static_cast<std::int64_t>(vs[0].as_str().size()));
    case Builtin::Head:
        if (vs[0].elems().empty()) fail("head of empty list");
        return vs[0].elems().front();
    case Builtin::Tail: {
        const auto& xs = vs[0].elems();
        if (xs.empty()) fail("tail of empty list");
        return Value::list(std::vector<Value>(xs.begin() + 1, xs.end()));
    }
    case Builtin::Reverse: {
        std::vector<Value> xs(vs[0].elems());
        std::reverse(xs.begin(), xs.end());
        return Value::list(std::move(xs));
    }
    case Builtin::Length:
        return Value::of_int(static_cast<std::int64_t>(vs[0].elems().size()));
    }
    fail("bad builtin");
}

Value eval_expr(const UdfExpr& e, std::span<const Value> args) {
    switch (e.node) {
    case UdfExpr::Node::IntLit: return Value::of_int(e.int_val);
    case UdfExpr::Node::FloatLit: return Value::of_float(e.float_val);
    case UdfExpr::Node::BoolLit: return Value::of_bool(e.bool_val);
    case UdfExpr::Node::StrLit: return Value::of_str(e.str_val);
    case UdfExpr::Node::Param: return args[e.param_index];
    case UdfExpr::Node::PairCtor:
        return Value::pair(eval_expr(*e.a, args), eval_expr(*e.b, args));
    case UdfExpr::Node::ProjKey: {
        Value v = eval_expr(*e.a, args);
        require_not_null(v, "projection .key");
        return v.key();
    }
    case UdfExpr::Node::ProjValue: {
        Value v = eval_expr(*e.a, args);
        require_not_null(v, "projection .value");
        return v.value();
    }
    case UdfExpr::Node::Binary: return eval_binary(e, args);
    case UdfExpr::Node::Unary: {
        Value v = eval_expr(*e.a, args);
        if (e.un_op == UnaryOp::Not) {
            require_not_null(v, "negation");
            return Value::of_bool(!v.as_bool());
        }
        require_not_null(v, "negation");
        if (v.tag() == Value::Tag::Int) return Value::of_int(wrap_neg(v.as_int()));
        return Value::of_float(-v.as_float());
    }
    case UdfExpr::Node::Call: return eval_call(e, args);
    case UdfExpr::Node::EmptyList: return Value::list({});
    case UdfExpr::Node::If: {
        Value c = eval_expr(*e.a, args);
        require_not_null(c, "condition");
        return c.as_bool() ? eval_expr(*e.b, args) : eval_expr(*e.c, args);
    }
    }
    fail("bad expression node");
}

Value apply_mapping(const MappingValue& m, const ValueType& type, const Value* orig) {
    bool is_int = type.kind() == ValueType::Kind::Int;
    switch (m.id) {
    case MappingValueId::Num0: return is_int ? Value::of_int(0) : Value::of_float(0.0);
    case MappingValueId::Num1: return is_int ? Value::of_int(1) : Value::of_float(1.0);
    case MappingValueId::NumMax:
        return is_int ? Value::of_int(std::numeric_limits<std::int64_t>::max())
                      : Value::of_float(std::numeric_limits<double>::max());
    case MappingValueId::NumMin:
        return is_int ? Value::of_int(std::numeric_limits<std::int64_t>::min())
                      : Value::of_float(std::numeric_limits<double>::lowest());
    case MappingValueId::NumNegate:
        require_not_null(*orig, "negation");
        if (orig->tag() == Value::Tag::Int) return Value::of_int(wrap_neg(orig->as_int()));
        return Value::of_float(-orig->as_float());
    case MappingValueId::BoolTrue: return Value::of_bool(true);
    case MappingValueId::BoolFalse: return Value::of_bool(false);
    case MappingValueId::BoolNegate:
        require_not_null(*orig, "negation");
        return Value::of_bool(!orig->as_bool());
    case MappingValueId::StrEmpty: return Value::of_str("");
    case MappingValueId::ListHead: {
        require_not_null(*orig, "head");
        if (orig->elems().empty()) fail("head of empty list");
        return Value::list({orig->elems().front()});
    }
    case MappingValueId::ListTail: {
        require_not_null(*orig, "tail");
        const auto& xs = orig->elems();
        if (xs.empty()) fail("tail of empty list");
        return Value::list(std::vector<Value>(xs.begin() + 1, xs.end()));
    }
    case MappingValueId::ListReverse: {
        require_not_null(*orig, "reverse");
        std::vector<Value> xs(orig->elems());
        std::reverse(xs.begin(), xs.end());
        return Value::list(std::move(xs));
    }
    case MappingValueId::ListNil: return Value::list({});
    case MappingValueId::TupleKeyMod: {
        require_not_null(*orig, "tuple mapping");
        Value k = orig->key();
        return Value::pair(apply_mapping(*m.inner, type.key(), &k), orig->value());
    }
    case MappingValueId::TupleValueMod: {
        require_not_null(*orig, "tuple mapping");
        Value v = orig->value();
        return Value::pair(orig->key(), apply_mapping(*m.inner, type.value(), &v));
    }
    case MappingValueId::NullValue: return Value::null();
    }
    fail("bad mapping value");
}

}  // namespace

Value eval_udf(const Udf& udf, std::span<const Value> args) {
    switch (udf.wrapper.kind) {
    case UdfWrapper::Kind::None:
        return eval_expr(*udf.lambda.body, args);
    case UdfWrapper::Kind::NegatePredicate: {
        Value v = eval_expr(*udf.lambda.body, args);
        require_not_null(v, "negation");
        return Value::of_bool(!v.as_bool());
    }
    case UdfWrapper::Kind::ConstResult:
        // constant mapping: never consults the original function
        return udf.wrapper.const_value;
    case UdfWrapper::Kind::MapResult: {
        Value v = eval_expr(*udf.lambda.body, args);
        return apply_mapping(udf.wrapper.mapping, udf.lambda.result_type, &v);
    }
    case UdfWrapper::Kind::AggReplace: {
        switch (udf.wrapper.agg) {
        case AggReplaceKind::FirstArg: return args[0];
        case AggReplaceKind::SecondArg: return args[1];
        case AggReplaceKind::DupFirst: {
            const Value dup[2] = {args[0], args[0]};
            return eval_expr(*udf.lambda.body, dup);
        }
        case AggReplaceKind::DupSecond: {
            const Value dup[2] = {args[1], args[1]};
            return eval_expr(*udf.lambda.body, dup);
        }
        case AggReplaceKind::Swapped: {
            const Value sw[2] = {args[1], args[0]};
            return eval_expr(*udf.lambda.body, sw);
        }
        }
        fail("bad aggregation replacement");
    }
    }
    fail("bad udf wrapper");
}

namespace {

class Engine {
public:
    Engine(const ProgramGraph& graph, const GraphPatch* patch) : graph_(graph), patch_(patch) {}

    ExecutionOutcome run(const InputBindings& inputs) {
        bind_inputs(inputs);
        ExecutionOutcome outcome;
        for (const auto& t : graph_.transformations) {
            current_site_ = t.id;
            try {
                run_site(t);
            } catch (const EvalError& e) {
                outcome.error = RuntimeError{current_site_, e.message};
                return outcome;
            }
        }
        for (const auto& o : graph_.outputs) outcome.outputs[o.name] = store_.at(o.dataset);
        return outcome;
    }

private:
    void bind_inputs(const InputBindings& inputs) {
        for (int id : graph_.input_ids) {
            const DatasetNode& d = graph_.dataset(id);
            auto it = inputs.find(d.name);
            if (it == inputs.end())
                throw std::invalid_argument("missing input dataset '" + d.name + "'");
            if (!(it->second.elem == d.elem))
                throw std::invalid_argument("input dataset '" + d.name + "' has element type " +
                                            it->second.elem.to_string() + ", expected " +
                                            d.elem.to_string());
            for (const auto& v : it->second.elements)
                if (!v.conforms_to(d.elem))
                    throw std::invalid_argument("input dataset '" + d.name +
                                                "' carries a value outside its element type");
            store_[id] = it->second;
        }
    }

    void run_site(const Transformation& t) {
        if (patch_) {
            switch (patch_->kind) {
            case GraphPatch::Kind::DeleteSite:
                if (patch_->site == t.id) {
                    store_[t.output] = store_.at(t.inputs[patch_->keep_input]);
                    return;
                }
                break;
            case GraphPatch::Kind::ReplaceSite:
                if (patch_->site == t.id) {
                    const Transformation& r = patch_->replacement;
                    store_[t.output] = apply_kind(r.kind, r.udfs, r.ascending, r.inputs);
                    return;
                }
                break;
            case GraphPatch::Kind::SwapSites:
                if (patch_->site == t.id || patch_->other_site == t.id) {
                    const Transformation& other = graph_.transformations.at(
                        patch_->site == t.id ? patch_->other_site : patch_->site);
                    store_[t.output] = apply_kind(other.kind, other.udfs, other.ascending, t.inputs);
                    return;
                }
                break;
            case GraphPatch::Kind::WrapUdf:
                if (patch_->site == t.id) {
                    std::vector<Udf> udfs = t.udfs;
                    udfs.at(patch_->udf_index).wrapper = patch_->wrapper;
                    store_[t.output] = apply_kind(t.kind, udfs, t.ascending, t.inputs);
                    return;
                }
                break;
            case GraphPatch::Kind::InsertAfter:
                if (patch_->site == t.id) {
                    store_[t.output] = apply_kind(t.kind, t.udfs, t.ascending, t.inputs);
                    DatasetInstance staged = store_.at(t.output);
                    store_[t.output] = apply_inserted(patch_->replacement, staged);
                    return;
                }
                break;
            case GraphPatch::Kind::ReplaceJoinWithAdjustment:
                if (patch_->site == t.id) {
                    DatasetInstance joined =
                        apply_kind(patch_->new_join_kind, t.udfs, t.ascending, t.inputs);
                    Udf adjust;
                    adjust.lambda = patch_->adjustment;
                    DatasetInstance adjusted;
                    adjusted.elem = adjust.lambda.result_type;
                    adjusted.elements.reserve(joined.elements.size());
                    for (const auto& v : joined.elements) {
                        const Value one[1] = {v};
                        adjusted.elements.push_back(eval_udf(adjust, one));
                    }
                    store_[t.output] = std::move(adjusted);
                    return;
                }
                break;
            }
        }
        store_[t.output] = apply_kind(t.kind, t.udfs, t.ascending, t.inputs);
    }

    DatasetInstance apply_inserted(const Transformation& inserted, const DatasetInstance& in) {
        // currently only distinct insertions exist
        if (inserted.kind != TransformationKind::Distinct)
            throw std::logic_error("unsupported inserted transformation");
        return distinct(in);
    }

    DatasetInstance apply_kind(TransformationKind kind, const std::vector<Udf>& udfs,
                               bool ascending, const std::vector<int>& input_ids) {
        const DatasetInstance& a = store_.at(input_ids[0]);
        switch (kind) {
        case TransformationKind::Map: {
            DatasetInstance out;
            out.elem = udfs[0].lambda.result_type;
            out.elements.reserve(a.elements.size());
            for (const auto& v : a.elements) {
                const Value one[1] = {v};
                out.elements.push_back(eval_udf(udfs[0], one));
            }
            return out;
        }
        case TransformationKind::FlatMap: {
            DatasetInstance out;
            out.elem = udfs[0].lambda.result_type.elem();
            for (const auto& v : a.elements) {
                const Value one[1] = {v};
                Value r = eval_udf(udfs[0], one);
                if (r.is_null()) fail("flatMap udf returned null");
                for (const auto& x : r.elems()) out.elements.push_back(x);
            }
            return out;
        }
        case TransformationKind::Filter: {
            DatasetInstance out;
            out.elem = a.elem;
            for (const auto& v : a.elements) {
                const Value one[1] = {v};
                Value keep = eval_udf(udfs[0], one);
                if (keep.is_null()) fail("filter predicate returned null");
                if (keep.as_bool()) out.elements.push_back(v);
            }
            return out;
        }
        case TransformationKind::Distinct:
            return distinct(a);
        case TransformationKind::SortBy: {
            std::vector<Value> keys;
            keys.reserve(a.elements.size());
            for (const auto& v : a.elements) {
                const Value one[1] = {v};
                keys.push_back(eval_udf(udfs[0], one));
            }
            return sort_by_keys(a, keys, ascending);
        }
        case TransformationKind::SortByKey: {
            std::vector<Value> keys;
            keys.reserve(a.elements.size());
            for (const auto& v : a.elements) {
                require_not_null(v, "sortByKey");
                keys.push_back(v.key());
            }
            return sort_by_keys(a, keys, ascending);
        }
        case TransformationKind::GroupByKey: {
            auto groups = group_by_key(a);
            DatasetInstance out;
            out.elem = ValueType::pair_type(a.elem.key(), ValueType::list_type(a.elem.value()));
            for (auto& [k, vs] : groups) out.elements.push_back(Value::pair(k, Value::list(vs)));
            return out;
        }
        case TransformationKind::ReduceByKey: {
            auto groups = group_by_key(a);
            DatasetInstance out;
            out.elem = a.elem;
            for (auto& [k, vs] : groups) {
                // left fold in input order: f(...f(f(v1, v2), v3)...)
                Value acc = vs[0];
                for (std::size_t i = 1; i < vs.size(); ++i) {
                    const Value two[2] = {acc, vs[i]};
                    acc = eval_udf(udfs[0], two);
                }
                out.elements.push_back(Value::pair(k, acc));
            }
            return out;
        }
        case TransformationKind::Union: {
            const DatasetInstance& b = store_.at(input_ids[1]);
            DatasetInstance out;
            out.elem = a.elem;
            out.elements = a.elements;
            out.elements.insert(out.elements.end(), b.elements.begin(), b.elements.end());
            return out;
        }
        case TransformationKind::Intersection: {
            const DatasetInstance& b = store_.at(input_ids[1]);
            DatasetInstance out;
            out.elem = a.elem;
            for (const auto& v : a.elements) {
                if (contains(out.elements, v)) continue;  // distinct result
                if (contains(b.elements, v)) out.elements.push_back(v);
            }
            return out;
        }
        case TransformationKind::Subtract: {
            const DatasetInstance& b = store_.at(input_ids[1]);
            DatasetInstance out;
            out.elem = a.elem;
            for (const auto& v : a.elements)
                if (!contains(b.elements, v)) out.elements.push_back(v);
            return out;
        }
        case TransformationKind::Join:
        case TransformationKind::LeftOuterJoin:
        case TransformationKind::RightOuterJoin:
        case TransformationKind::FullOuterJoin:
            return join(kind, a, store_.at(input_ids[1]));
        }
        throw std::logic_error("bad transformation kind");
    }

    static bool contains(const std::vector<Value>& xs, const Value& v) {
        for (const auto& x : xs)
            if (x == v) return true;
        return false;
    }

    DatasetInstance distinct(const DatasetInstance& a) {
        DatasetInstance out;
        out.elem = a.elem;
        for (const auto& v : a.elements)
            if (!contains(out.elements, v)) out.elements.push_back(v);
        return out;
    }

    DatasetInstance sort_by_keys(const DatasetInstance& a, const std::vector<Value>& keys,
                                 bool ascending) {
        for (const auto& k : keys) require_orderable_key(k);
        std::vector<std::size_t> order(a.elements.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return ascending ? value_less(keys[i], keys[j]) : value_less(keys[j], keys[i]);
        });
        DatasetInstance out;
        out.elem = a.elem;
        out.elements.reserve(a.elements.size());
        for (std::size_t i : order) out.elements.push_back(a.elements[i]);
        return out;
    }

    // groups ordered by first key occurrence, values in input order
    std::vector<std::pair<Value, std::vector<Value>>> group_by_key(const DatasetInstance& a) {
        std::vector<std::pair<Value, std::vector<Value>>> groups;
        for (const auto& v : a.elements) {
            require_not_null(v, "grouping");
            const Value& k = v.key();
            bool found = false;
            for (auto& g : groups) {
                if (g.first == k) {
                    g.second.push_back(v.value());
                    found = true;
                    break;
                }
            }
            if (!found) groups.push_back({k, {v.value()}});
        }
        return groups;
    }

    DatasetInstance join(TransformationKind kind, const DatasetInstance& a,
                         const DatasetInstance& b) {
        const ValueType& left_value = a.elem.value();
        const ValueType& right_value = b.elem.value();
        DatasetInstance out;
        out.elem = ValueType::pair_type(a.elem.key(),
                                        ValueType::pair_type(left_value, right_value));
        auto emit = [&](const Value& k, const Value& lv, const Value& rv) {
            out.elements.push_back(Value::pair(k, Value::pair(lv, rv)));
        };
        for (const auto& v : a.elements) require_not_null(v, "join");
        for (const auto& v : b.elements) require_not_null(v, "join");

        // every variant enumerates left elements in order, matching right
        // elements in order; unmatched right rows are appended afterwards
        for (const auto& l : a.elements) {
            bool matched = false;
            for (const auto& r : b.elements) {
                if (l.key() == r.key()) {
                    emit(l.key(), l.value(), r.value());
                    matched = true;
                }
            }
            if (!matched && (kind == TransformationKind::LeftOuterJoin ||
                             kind == TransformationKind::FullOuterJoin))
                emit(l.key(), l.value(), default_value(right_value));
        }
        if (kind == TransformationKind::RightOuterJoin ||
            kind == TransformationKind::FullOuterJoin) {
            for (const auto& r : b.elements) {
                bool matched = false;
                for (const auto& l : a.elements)
                    if (l.key() == r.key()) matched = true;
                if (!matched) emit(r.key(), default_value(left_value), r.value());
            }
        }
        return out;
    }

    const ProgramGraph& graph_;
    const GraphPatch* patch_;
    std::map<int, DatasetInstance> store_;
    int current_site_ = -1;
};

}  // namespace

ExecutionOutcome execute(const ProgramGraph& graph, const InputBindings& inputs) {
    return Engine(graph, nullptr).run(inputs);
}

ExecutionOutcome execute_with_patch(const ProgramGraph& graph, const InputBindings& inputs,
                                    const GraphPatch* active) {
    return Engine(graph, active).run(inputs);
}

}  // namespace flowmut
