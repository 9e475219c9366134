#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace flowmut {

/// Element type of a dataset or expression. Pair and List nest arbitrarily;
/// there are no other composite forms.
class ValueType {
public:
    enum class Kind { Int, Float, Bool, Str, Pair, List };

    ValueType() : kind_(Kind::Int) {}

    static ValueType int_type() { return ValueType(Kind::Int); }
    static ValueType float_type() { return ValueType(Kind::Float); }
    static ValueType bool_type() { return ValueType(Kind::Bool); }
    static ValueType str_type() { return ValueType(Kind::Str); }
    static ValueType pair_type(ValueType key, ValueType value);
    static ValueType list_type(ValueType elem);

    Kind kind() const { return kind_; }
    bool is_pair() const { return kind_ == Kind::Pair; }
    bool is_list() const { return kind_ == Kind::List; }
    bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Float; }
    /// Orderable types: int, float, string (lexicographic), bool (false < true).
    bool is_orderable() const {
        return kind_ == Kind::Int || kind_ == Kind::Float || kind_ == Kind::Bool ||
               kind_ == Kind::Str;
    }

    const ValueType& key() const { return *first_; }    // Pair
    const ValueType& value() const { return *second_; } // Pair
    const ValueType& elem() const { return *first_; }   // List

    bool operator==(const ValueType& other) const;
    bool operator!=(const ValueType& other) const { return !(*this == other); }

    /// DSL spelling: int, float, bool, string, (k, v), list<t>.
    std::string to_string() const;

private:
    explicit ValueType(Kind k) : kind_(k) {}

    Kind kind_;
    std::shared_ptr<const ValueType> first_;   // pair key / list elem
    std::shared_ptr<const ValueType> second_;  // pair value
};

/// Runtime value. Null conforms to any type; it is only ever produced by
/// mutants, never by user programs.
class Value {
public:
    enum class Tag { Null, Int, Float, Bool, Str, Pair, List };

    Value() : v_(std::monostate{}) {}

    static Value null() { return Value(); }
    static Value of_int(std::int64_t i) { return Value(i); }
    static Value of_float(double d) { return Value(d); }
    static Value of_bool(bool b) { return Value(b); }
    static Value of_str(std::string s) { return Value(std::move(s)); }
    static Value pair(Value key, Value value);
    static Value list(std::vector<Value> elems);

    Tag tag() const { return static_cast<Tag>(v_.index()); }
    bool is_null() const { return tag() == Tag::Null; }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_float() const { return std::get<double>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_str() const { return std::get<std::string>(v_); }
    const Value& key() const;
    const Value& value() const;
    const std::vector<Value>& elems() const;

    /// Structural equality. Null equals only Null; Int and Float never
    /// compare equal across tags. NaN equals NaN so equality stays total.
    bool operator==(const Value& other) const;
    bool operator!=(const Value& other) const { return !(*this == other); }

    bool conforms_to(const ValueType& t) const;

    /// Rendering used in reports and the exec command, e.g. ("a", 1).
    std::string to_string() const;

private:
    struct PairBox;

    explicit Value(std::int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(std::string s) : v_(std::move(s)) {}

    std::variant<std::monostate, std::int64_t, double, bool, std::string,
                 std::shared_ptr<const PairBox>,
                 std::shared_ptr<const std::vector<Value>>>
        v_;
};

struct Value::PairBox {
    Value key;
    Value value;
};

/// Total order over values, used to canonicalize multisets before
/// comparison. Ordering across tags is by tag rank; NaN sorts after all
/// other floats and ties with itself.
int compare_total(const Value& a, const Value& b);

/// Structural comparison with an absolute tolerance on float leaves.
bool approx_equal(const Value& a, const Value& b, double tolerance);

/// Default fill-ins used by the outer joins: 0, 0.0, false, "", empty
/// list, pair of defaults.
Value default_value(const ValueType& t);

std::string escape_string_literal(const std::string& s);

}  // namespace flowmut
