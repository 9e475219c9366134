#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include "flowmut/harness.hpp"
#include "flowmut/parser.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(FLOWMUT_FIXTURES_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline flowmut::ProgramGraph load_fixture_program(const std::string& file) {
    auto res = flowmut::parse_source(read_file(fixture_path(file)), file);
    if (!res.ok() || res.programs.size() != 1) {
        std::string msg = "fixture " + file + " failed to parse:";
        for (const auto& d : res.diagnostics) msg += "\n  " + flowmut::to_string(d);
        throw std::runtime_error(msg);
    }
    return res.programs[0];
}

inline flowmut::TestSuite load_fixture_suite(const std::string& file,
                                             const flowmut::ProgramGraph& graph) {
    return flowmut::load_test_suite(read_file(fixture_path(file)), graph, file);
}

inline flowmut::ProgramGraph parse_one(const std::string& source) {
    auto res = flowmut::parse_source(source, "<test>");
    if (!res.ok() || res.programs.size() != 1) {
        std::string msg = "test program failed to parse:";
        for (const auto& d : res.diagnostics) msg += "\n  " + flowmut::to_string(d);
        throw std::runtime_error(msg);
    }
    return res.programs[0];
}

/// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("flowmut_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Deterministic random values conforming to a type; strings may contain
/// spaces so flatMap/split pipelines see interesting shapes.
inline flowmut::Value random_value(const flowmut::ValueType& t, std::mt19937_64& rng) {
    using flowmut::Value;
    using Kind = flowmut::ValueType::Kind;
    switch (t.kind()) {
    case Kind::Int:
        return Value::of_int(static_cast<std::int64_t>(rng() % 11) - 5);
    case Kind::Float:
        return Value::of_float(0.5 * (static_cast<double>(rng() % 17) - 8.0));
    case Kind::Bool:
        return Value::of_bool(rng() % 2 == 0);
    case Kind::Str: {
        static const char alphabet[] = {'a', 'b', 'c', ' '};
        std::size_t len = rng() % 6;
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % 4];
        return Value::of_str(std::move(s));
    }
    case Kind::Pair:
        return Value::pair(random_value(t.key(), rng), random_value(t.value(), rng));
    case Kind::List: {
        std::size_t len = rng() % 4;
        std::vector<Value> xs;
        for (std::size_t i = 0; i < len; ++i) xs.push_back(random_value(t.elem(), rng));
        return Value::list(std::move(xs));
    }
    }
    throw std::logic_error("bad type");
}

inline flowmut::InputBindings random_inputs(const flowmut::ProgramGraph& graph,
                                            std::mt19937_64& rng) {
    flowmut::InputBindings inputs;
    for (int id : graph.input_ids) {
        const auto& d = graph.dataset(id);
        flowmut::DatasetInstance inst;
        inst.elem = d.elem;
        std::size_t len = rng() % 7;
        for (std::size_t i = 0; i < len; ++i) inst.elements.push_back(random_value(d.elem, rng));
        inputs[d.name] = std::move(inst);
    }
    return inputs;
}

inline bool outcomes_equivalent(const flowmut::ExecutionOutcome& a,
                                const flowmut::ExecutionOutcome& b) {
    if (a.ok() != b.ok()) return false;
    if (!a.ok()) return a.error->message == b.error->message;  // sites renumber under patches
    if (a.outputs.size() != b.outputs.size()) return false;
    for (const auto& [name, data] : a.outputs) {
        auto it = b.outputs.find(name);
        if (it == b.outputs.end()) return false;
        if (!(data.elem == it->second.elem)) return false;
        if (data.elements.size() != it->second.elements.size()) return false;
        for (std::size_t i = 0; i < data.elements.size(); ++i)
            if (!(data.elements[i] == it->second.elements[i])) return false;
    }
    return true;
}

}  // namespace testsupport
