#include "flowmut/types.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace flowmut {

ValueType ValueType::pair_type(ValueType key, ValueType value) {
    ValueType t(Kind::Pair);
    t.first_ = std::make_shared<const ValueType>(std::move(key));
    t.second_ = std::make_shared<const ValueType>(std::move(value));
    return t;
}

ValueType ValueType::list_type(ValueType elem) {
    ValueType t(Kind::List);
    t.first_ = std::make_shared<const ValueType>(std::move(elem));
    return t;
}

bool ValueType::operator==(const ValueType& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
    case Kind::Pair:
        return key() == other.key() && value() == other.value();
    case Kind::List:
        return elem() == other.elem();
    default:
        return true;
    }
}

std::string ValueType::to_string() const {
    switch (kind_) {
    case Kind::Int: return "int";
    case Kind::Float: return "float";
    case Kind::Bool: return "bool";
    case Kind::Str: return "string";
    case Kind::Pair: return "(" + key().to_string() + ", " + value().to_string() + ")";
    case Kind::List: return "list<" + elem().to_string() + ">";
    }
    return "?";
}

Value Value::pair(Value key, Value value) {
    Value v;
    v.v_ = std::make_shared<const PairBox>(PairBox{std::move(key), std::move(value)});
    return v;
}

Value Value::list(std::vector<Value> elems) {
    Value v;
    v.v_ = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

const Value& Value::key() const {
    return std::get<std::shared_ptr<const PairBox>>(v_)->key;
}

const Value& Value::value() const {
    return std::get<std::shared_ptr<const PairBox>>(v_)->value;
}

const std::vector<Value>& Value::elems() const {
    return *std::get<std::shared_ptr<const std::vector<Value>>>(v_);
}

bool Value::operator==(const Value& other) const {
    if (tag() != other.tag()) return false;
    switch (tag()) {
    case Tag::Null: return true;
    case Tag::Int: return as_int() == other.as_int();
    case Tag::Float: {
        double a = as_float(), b = other.as_float();
        if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
        return a == b;
    }
    case Tag::Bool: return as_bool() == other.as_bool();
    case Tag::Str: return as_str() == other.as_str();
    case Tag::Pair: return key() == other.key() && value() == other.value();
    case Tag::List: {
        const auto& xs = elems();
        const auto& ys = other.elems();
        if (xs.size() != ys.size()) return false;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!(xs[i] == ys[i])) return false;
        return true;
    }
    }
    return false;
}

bool Value::conforms_to(const ValueType& t) const {
    switch (tag()) {
    case Tag::Null: return true;
    case Tag::Int: return t.kind() == ValueType::Kind::Int;
    case Tag::Float: return t.kind() == ValueType::Kind::Float;
    case Tag::Bool: return t.kind() == ValueType::Kind::Bool;
    case Tag::Str: return t.kind() == ValueType::Kind::Str;
    case Tag::Pair:
        return t.is_pair() && key().conforms_to(t.key()) && value().conforms_to(t.value());
    case Tag::List: {
        if (!t.is_list()) return false;
        for (const auto& e : elems())
            if (!e.conforms_to(t.elem())) return false;
        return true;
    }
    }
    return false;
}

namespace {

std::string float_repr(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    std::string s(buf);
    // keep a float marker so the rendering never reads as an int
    if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

std::string Value::to_string() const {
    switch (tag()) {
    case Tag::Null: return "null";
    case Tag::Int: return std::to_string(as_int());
    case Tag::Float: return float_repr(as_float());
    case Tag::Bool: return as_bool() ? "true" : "false";
    case Tag::Str: return escape_string_literal(as_str());
    case Tag::Pair: return "(" + key().to_string() + ", " + value().to_string() + ")";
    case Tag::List: {
        std::string out = "[";
        const auto& xs = elems();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ", ";
            out += xs[i].to_string();
        }
        return out + "]";
    }
    }
    return "?";
}

int compare_total(const Value& a, const Value& b) {
    if (a.tag() != b.tag())
        return static_cast<int>(a.tag()) < static_cast<int>(b.tag()) ? -1 : 1;
    switch (a.tag()) {
    case Value::Tag::Null: return 0;
    case Value::Tag::Int: {
        auto x = a.as_int(), y = b.as_int();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case Value::Tag::Float: {
        double x = a.as_float(), y = b.as_float();
        bool nx = std::isnan(x), ny = std::isnan(y);
        if (nx || ny) return nx == ny ? 0 : (nx ? 1 : -1);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case Value::Tag::Bool: return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
    case Value::Tag::Str: return a.as_str().compare(b.as_str()) < 0 ? -1 : (a.as_str() == b.as_str() ? 0 : 1);
    case Value::Tag::Pair: {
        int c = compare_total(a.key(), b.key());
        if (c != 0) return c;
        return compare_total(a.value(), b.value());
    }
    case Value::Tag::List: {
        const auto& xs = a.elems();
        const auto& ys = b.elems();
        std::size_t n = xs.size() < ys.size() ? xs.size() : ys.size();
        for (std::size_t i = 0; i < n; ++i) {
            int c = compare_total(xs[i], ys[i]);
            if (c != 0) return c;
        }
        if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
        return 0;
    }
    }
    return 0;
}

bool approx_equal(const Value& a, const Value& b, double tolerance) {
    if (a.tag() != b.tag()) return false;
    switch (a.tag()) {
    case Value::Tag::Float: {
        double x = a.as_float(), y = b.as_float();
        if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
        return std::fabs(x - y) <= tolerance;
    }
    case Value::Tag::Pair:
        return approx_equal(a.key(), b.key(), tolerance) &&
               approx_equal(a.value(), b.value(), tolerance);
    case Value::Tag::List: {
        const auto& xs = a.elems();
        const auto& ys = b.elems();
        if (xs.size() != ys.size()) return false;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!approx_equal(xs[i], ys[i], tolerance)) return false;
        return true;
    }
    default:
        return a == b;
    }
}

Value default_value(const ValueType& t) {
    switch (t.kind()) {
    case ValueType::Kind::Int: return Value::of_int(0);
    case ValueType::Kind::Float: return Value::of_float(0.0);
    case ValueType::Kind::Bool: return Value::of_bool(false);
    case ValueType::Kind::Str: return Value::of_str("");
    case ValueType::Kind::List: return Value::list({});
    case ValueType::Kind::Pair:
        return Value::pair(default_value(t.key()), default_value(t.value()));
    }
    throw std::logic_error("default_value: bad type");
}

std::string escape_string_literal(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c; break;
        }
    }
    return out + "\"";
}

}  // namespace flowmut
