#include "flowmut/parser.hpp"

namespace flowmut {

namespace {

// precedence ladder; higher binds tighter
int node_prec(const UdfExpr& e) {
    switch (e.node) {
    case UdfExpr::Node::If: return 0;
    case UdfExpr::Node::Binary:
        switch (e.bin_op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 6;
        }
        return 6;
    case UdfExpr::Node::Unary: return 7;
    default: return 8;
    }
}

std::string bin_op_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    }
    return "?";
}

std::string builtin_name(Builtin b) {
    switch (b) {
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
}

std::string float_literal(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string fmt(const UdfExpr& e);

std::string fmt_child(const UdfExpr& child, int min_prec) {
    std::string s = fmt(child);
    if (node_prec(child) < min_prec) return "(" + s + ")";
    return s;
}

std::string fmt(const UdfExpr& e) {
    switch (e.node) {
    case UdfExpr::Node::IntLit: return std::to_string(e.int_val);
    case UdfExpr::Node::FloatLit: return float_literal(e.float_val);
    case UdfExpr::Node::BoolLit: return e.bool_val ? "true" : "false";
    case UdfExpr::Node::StrLit: return escape_string_literal(e.str_val);
    case UdfExpr::Node::Param: return e.param_name;
    case UdfExpr::Node::PairCtor: return "(" + fmt(*e.a) + ", " + fmt(*e.b) + ")";
    case UdfExpr::Node::ProjKey: return fmt_child(*e.a, 8) + ".key";
    case UdfExpr::Node::ProjValue: return fmt_child(*e.a, 8) + ".value";
    case UdfExpr::Node::Binary: {
        int p = node_prec(e);
        return fmt_child(*e.a, p) + " " + bin_op_text(e.bin_op) + " " + fmt_child(*e.b, p + 1);
    }
    case UdfExpr::Node::Unary:
        return (e.un_op == UnaryOp::Not ? "!(" : "-(") + fmt(*e.a) + ")";
    case UdfExpr::Node::Call: {
        std::string out = builtin_name(e.builtin) + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            out += fmt(*e.args[i]);
        }
        return out + ")";
    }
    case UdfExpr::Node::EmptyList:
        return "emptyList<" + e.result_type.elem().to_string() + ">()";
    case UdfExpr::Node::If:
        return "if " + fmt(*e.a) + " then " + fmt(*e.b) + " else " + fmt(*e.c);
    }
    return "?";
}

ExprPtr subst_params(const ExprPtr& e, const std::vector<ExprPtr>& repl) {
    if (e->node == UdfExpr::Node::Param) {
        if (e->param_index >= 0 && e->param_index < static_cast<int>(repl.size()))
            return repl[e->param_index];
        return e;
    }
    auto copy = std::make_shared<UdfExpr>(*e);
    if (e->a) copy->a = subst_params(e->a, repl);
    if (e->b) copy->b = subst_params(e->b, repl);
    if (e->c) copy->c = subst_params(e->c, repl);
    for (auto& arg : copy->args) arg = subst_params(arg, repl);
    return copy;
}

ExprPtr param_ref(const Lambda& l, int index) {
    auto e = std::make_shared<UdfExpr>();
    e->node = UdfExpr::Node::Param;
    e->param_index = index;
    e->param_name = l.params[index];
    e->result_type = l.param_types[index];
    return e;
}

std::string param_list(const Lambda& l) {
    if (l.params.size() == 1) return l.params[0];
    std::string out = "(";
    for (std::size_t i = 0; i < l.params.size(); ++i) {
        if (i) out += ", ";
        out += l.params[i];
    }
    return out + ")";
}

std::string mapping_body(const MappingValue& m, const std::string& original);

std::string fmt_udf(const Udf& u) {
    const Lambda& l = u.lambda;
    switch (u.wrapper.kind) {
    case UdfWrapper::Kind::None:
        return param_list(l) + " -> " + fmt(*l.body);
    case UdfWrapper::Kind::NegatePredicate:
        return param_list(l) + " -> !(" + fmt(*l.body) + ")";
    case UdfWrapper::Kind::ConstResult:
        return param_list(l) + " -> " + u.wrapper.const_value.to_string();
    case UdfWrapper::Kind::MapResult:
        return param_list(l) + " -> " + mapping_body(u.wrapper.mapping, "originalValue");
    case UdfWrapper::Kind::AggReplace: {
        ExprPtr a = param_ref(l, 0);
        ExprPtr b = param_ref(l, 1);
        ExprPtr body;
        switch (u.wrapper.agg) {
        case AggReplaceKind::FirstArg: body = a; break;
        case AggReplaceKind::SecondArg: body = b; break;
        case AggReplaceKind::DupFirst: body = subst_params(l.body, {a, a}); break;
        case AggReplaceKind::DupSecond: body = subst_params(l.body, {b, b}); break;
        case AggReplaceKind::Swapped: body = subst_params(l.body, {b, a}); break;
        }
        return param_list(l) + " -> " + fmt(*body);
    }
    }
    return "?";
}

// Paper-style presentation: `originalValue` stands for the result of the
// original mapping function.
std::string mapping_body(const MappingValue& m, const std::string& original) {
    switch (m.id) {
    case MappingValueId::NumNegate: return "-(" + original + ")";
    case MappingValueId::BoolNegate: return "!(" + original + ")";
    case MappingValueId::ListHead: return "list(head(" + original + "))";
    case MappingValueId::ListTail: return "tail(" + original + ")";
    case MappingValueId::ListReverse: return "reverse(" + original + ")";
    case MappingValueId::TupleKeyMod:
        return "(" + mapping_body(*m.inner, original + ".key") + ", " + original + ".value)";
    case MappingValueId::TupleValueMod:
        return "(" + original + ".key, " + mapping_body(*m.inner, original + ".value") + ")";
    case MappingValueId::Num0: return "0";
    case MappingValueId::Num1: return "1";
    case MappingValueId::NumMax: return "MAX";
    case MappingValueId::NumMin: return "MIN";
    case MappingValueId::BoolTrue: return "true";
    case MappingValueId::BoolFalse: return "false";
    case MappingValueId::StrEmpty: return "\"\"";
    case MappingValueId::ListNil: return "[]";
    case MappingValueId::NullValue: return "null";
    }
    return "?";
}

}  // namespace

std::string format_expr(const UdfExpr& e) { return fmt(e); }

std::string format_lambda(const Lambda& l) { return param_list(l) + " -> " + fmt(*l.body); }

std::string format_transformation(const Transformation& t, const ProgramGraph& graph) {
    std::string out = graph.dataset(t.output).name + " = " + graph.dataset(t.inputs[0]).name +
                      "." + kind_name(t.kind) + "(";
    if (is_binary(t.kind)) {
        out += graph.dataset(t.inputs[1]).name;
    } else if (t.kind == TransformationKind::SortBy) {
        out += fmt_udf(t.udfs[0]) + ", " + (t.ascending ? "asc" : "desc");
    } else if (t.kind == TransformationKind::SortByKey) {
        out += t.ascending ? "asc" : "desc";
    } else if (!t.udfs.empty()) {
        out += fmt_udf(t.udfs[0]);
    }
    return out + ")";
}

std::string format_program(const ProgramGraph& graph) {
    std::string out = "program " + graph.name + "\n";
    for (int id : graph.input_ids) {
        const DatasetNode& d = graph.dataset(id);
        out += "input " + d.name + ": list<" + d.elem.to_string() + ">\n";
    }
    for (const auto& t : graph.transformations) out += format_transformation(t, graph) + "\n";
    out += "output ";
    for (std::size_t i = 0; i < graph.outputs.size(); ++i) {
        if (i) out += ", ";
        out += graph.outputs[i].name;
    }
    out += "\n";
    return out;
}

}  // namespace flowmut
