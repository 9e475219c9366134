#include "flowmut/report.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "flowmut/parser.hpp"
#include "flowmut/version.hpp"

namespace flowmut {

using ordered_json = nlohmann::ordered_json;

Rational make_rational(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

MutationScore compute_score(const std::vector<Mutant>& mutants) {
    MutationScore s;
    for (const auto& m : mutants) {
        switch (m.status) {
        case MutantStatus::Removed:
            ++s.removed;
            break;
        case MutantStatus::Killed:
            ++s.killed;
            ++s.total;
            break;
        case MutantStatus::Equivalent:
            ++s.equivalent;
            ++s.total;
            break;
        case MutantStatus::Survived:
        case MutantStatus::Generated:
            ++s.total;
            break;
        }
    }
    if (s.total == 0) return s;  // ms stays absent
    if (s.total == s.equivalent) {
        s.ms = make_rational(1, 1);  // vacuously adequate
    } else {
        s.ms = make_rational(s.killed, s.total - s.equivalent);
    }
    return s;
}

std::vector<OperatorStats> compute_operator_stats(const KillMatrix& matrix,
                                                  const std::vector<Mutant>& mutants) {
    std::vector<OperatorStats> stats;
    for (auto op : all_operators()) {
        OperatorStats st;
        st.op = op;
        long long kills = 0, executions = 0;
        for (const auto& m : mutants) {
            if (m.op != op) continue;
            ++st.generated;
            if (m.status == MutantStatus::Removed) ++st.removed;
            if (m.status == MutantStatus::Equivalent) {
                ++st.equivalent;
                continue;  // equivalent mutants have no legitimate kills
            }
            const MutantRow* row = matrix.row(m.id);
            if (row && row->executed_any) {
                kills += row->killing_tests;
                executions += row->executed_tests;
            }
        }
        if (executions > 0)
            st.killed_ratio = 100.0 * static_cast<double>(kills) / static_cast<double>(executions);
        stats.push_back(st);
    }
    return stats;
}

namespace {

std::string render_site(const ProgramGraph& graph, int site) {
    return format_transformation(graph.transformations.at(site), graph);
}

std::string original_render(const ProgramGraph& graph, const Mutant& m) {
    std::string out;
    for (std::size_t i = 0; i < m.sites.size(); ++i) {
        if (i) out += "\n";
        out += render_site(graph, m.sites[i]);
    }
    return out;
}

std::string mutated_render(const ProgramGraph& graph, const Mutant& m) {
    const GraphPatch& p = m.patch;
    switch (p.kind) {
    case GraphPatch::Kind::ReplaceSite:
        return format_transformation(p.replacement, graph);
    case GraphPatch::Kind::DeleteSite: {
        const Transformation& t = graph.transformations.at(p.site);
        return graph.dataset(t.output).name + " = " +
               graph.dataset(t.inputs[p.keep_input]).name;
    }
    case GraphPatch::Kind::SwapSites: {
        const Transformation& a = graph.transformations.at(p.site);
        const Transformation& b = graph.transformations.at(p.other_site);
        Transformation a2 = a, b2 = b;
        a2.kind = b.kind;
        a2.udfs = b.udfs;
        a2.ascending = b.ascending;
        b2.kind = a.kind;
        b2.udfs = a.udfs;
        b2.ascending = a.ascending;
        return format_transformation(a2, graph) + "\n" + format_transformation(b2, graph);
    }
    case GraphPatch::Kind::InsertAfter:
        return render_site(graph, p.site) + ".distinct()";
    case GraphPatch::Kind::WrapUdf: {
        Transformation t = graph.transformations.at(p.site);
        t.udfs.at(p.udf_index).wrapper = p.wrapper;
        return format_transformation(t, graph);
    }
    case GraphPatch::Kind::ReplaceJoinWithAdjustment: {
        Transformation t = graph.transformations.at(p.site);
        t.kind = p.new_join_kind;
        return format_transformation(t, graph) + ".map(" + format_lambda(p.adjustment) + ")";
    }
    }
    return "?";
}

}  // namespace

MutationReport build_report(const ProgramGraph& graph, const std::vector<Mutant>& mutants,
                            const KillMatrix& matrix, const std::string& source_hash,
                            const Timings& timings) {
    MutationReport r;
    r.tool_version = kToolVersion;
    r.source_hash = source_hash;
    r.program = graph.name;
    r.score = compute_score(mutants);
    r.operators = compute_operator_stats(matrix, mutants);
    for (const auto& m : mutants) {
        MutantRecord rec;
        rec.id = m.id;
        rec.op = m.op;
        rec.sites = m.sites;
        rec.description = m.description;
        rec.original_render = original_render(graph, m);
        rec.mutated_render = mutated_render(graph, m);
        rec.status = m.status;
        rec.removed_by = m.removed_by;
        const MutantRow* row = matrix.row(m.id);
        if (row) rec.killed_by = row->killed_by;
        r.mutants.push_back(std::move(rec));
    }
    std::sort(r.mutants.begin(), r.mutants.end(),
              [](const MutantRecord& a, const MutantRecord& b) { return a.id < b.id; });
    r.timings = timings;
    return r;
}

std::string report_json(const MutationReport& report) {
    ordered_json doc;
    doc["tool_version"] = report.tool_version;
    doc["source_hash"] = report.source_hash;
    doc["program"] = report.program;

    ordered_json score;
    score["killed"] = report.score.killed;
    score["total"] = report.score.total;
    score["equivalent"] = report.score.equivalent;
    score["removed"] = report.score.removed;
    if (report.score.ms.has_value())
        score["ms"] = report.score.ms->to_double();
    else
        score["ms"] = nullptr;
    doc["mutation_score"] = std::move(score);

    ordered_json ops = ordered_json::array();
    for (const auto& st : report.operators) {
        ordered_json o;
        o["operator"] = operator_name(st.op);
        o["generated"] = st.generated;
        o["equivalent"] = st.equivalent;
        o["removed"] = st.removed;
        if (st.killed_ratio.has_value())
            o["killed_ratio"] = *st.killed_ratio;
        else
            o["killed_ratio"] = nullptr;
        ops.push_back(std::move(o));
    }
    doc["operators"] = std::move(ops);

    ordered_json ms = ordered_json::array();
    for (const auto& m : report.mutants) {
        ordered_json o;
        o["id"] = m.id;
        o["operator"] = operator_name(m.op);
        o["sites"] = m.sites;
        o["description"] = m.description;
        o["status"] = status_name(m.status);
        o["killed_by"] = m.killed_by;
        ms.push_back(std::move(o));
    }
    doc["mutants"] = std::move(ms);

    ordered_json t;
    t["generation_s"] = report.timings.generation_s;
    t["execution_s"] = report.timings.execution_s;
    t["total_s"] = report.timings.total_s;
    doc["timings"] = std::move(t);

    return doc.dump(2) + "\n";
}

namespace {

std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c; break;
        }
    }
    return out;
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

std::string report_html(const MutationReport& report) {
    std::string h;
    h += "<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>flowmut report: " +
         html_escape(report.program) + "</title>\n";
    h += "<style>\n"
         "body { font-family: sans-serif; margin: 2em; color: #222; }\n"
         "table { border-collapse: collapse; margin: 1em 0; }\n"
         "th, td { border: 1px solid #bbb; padding: 4px 10px; text-align: left; }\n"
         "th { background: #eee; }\n"
         "pre { background: #f6f6f6; padding: 6px 10px; margin: 2px 0; }\n"
         ".killed { color: #07700f; }\n"
         ".survived { color: #a30000; font-weight: bold; }\n"
         ".equivalent { color: #555; }\n"
         ".removed { color: #888; }\n"
         "</style>\n</head>\n<body>\n";
    h += "<h1>Mutation report: " + html_escape(report.program) + "</h1>\n";

    h += "<table>\n";
    h += "<tr><th>tool version</th><td>" + html_escape(report.tool_version) + "</td></tr>\n";
    h += "<tr><th>source hash</th><td>" + html_escape(report.source_hash) + "</td></tr>\n";
    h += "<tr><th>mutants (active)</th><td>" + std::to_string(report.score.total) + "</td></tr>\n";
    h += "<tr><th>killed</th><td>" + std::to_string(report.score.killed) + "</td></tr>\n";
    int survived = report.score.total - report.score.killed - report.score.equivalent;
    h += "<tr><th>survived</th><td>" + std::to_string(survived) + "</td></tr>\n";
    h += "<tr><th>equivalent</th><td>" + std::to_string(report.score.equivalent) + "</td></tr>\n";
    h += "<tr><th>removed</th><td>" + std::to_string(report.score.removed) + "</td></tr>\n";
    h += "<tr><th>mutation score</th><td>" +
         (report.score.ms ? two_decimals(report.score.ms->to_double()) : std::string("&mdash;")) +
         "</td></tr>\n";
    h += "<tr><th>total time (s)</th><td>" + two_decimals(report.timings.total_s) + "</td></tr>\n";
    h += "</table>\n";

    if (report.mutants.empty()) {
        h += "<p>No mutants were generated for this program.</p>\n</body>\n</html>\n";
        return h;
    }

    h += "<h2>Operators</h2>\n<table>\n"
         "<tr><th>operator</th><th>generated</th><th>equivalent</th><th>removed</th>"
         "<th>killed ratio (%)</th></tr>\n";
    for (const auto& st : report.operators) {
        h += "<tr><td>" + operator_name(st.op) + "</td><td>" + std::to_string(st.generated) +
             "</td><td>" + std::to_string(st.equivalent) + "</td><td>" +
             std::to_string(st.removed) + "</td><td>" +
             (st.killed_ratio ? one_decimal(*st.killed_ratio) : std::string("&mdash;")) +
             "</td></tr>\n";
    }
    h += "</table>\n";

    h += "<h2>Mutants</h2>\n<table>\n"
         "<tr><th>id</th><th>operator</th><th>sites</th><th>description</th><th>status</th>"
         "<th>killed by</th></tr>\n";
    for (const auto& m : report.mutants) {
        std::string sites;
        for (std::size_t i = 0; i < m.sites.size(); ++i) {
            if (i) sites += ", ";
            sites += std::to_string(m.sites[i]);
        }
        std::string status = status_name(m.status);
        if (m.removed_by) status += " (" + rule_name(*m.removed_by) + ")";
        std::string killers;
        for (std::size_t i = 0; i < m.killed_by.size(); ++i) {
            if (i) killers += ", ";
            killers += html_escape(m.killed_by[i]);
        }
        h += "<tr><td>" + std::to_string(m.id) + "</td><td>" + operator_name(m.op) +
             "</td><td>" + sites + "</td><td>" + html_escape(m.description) +
             "</td><td class=\"" + status_name(m.status) + "\">" + html_escape(status) +
             "</td><td>" + killers + "</td></tr>\n";
    }
    h += "</table>\n";

    h += "<h2>Details</h2>\n";
    for (const auto& m : report.mutants) {
        h += "<h3>Mutant " + std::to_string(m.id) + " &mdash; " + operator_name(m.op) + ", " +
             html_escape(status_name(m.status)) + "</h3>\n";
        h += "<p>" + html_escape(m.description) + "</p>\n";
        h += "<pre>original: " + html_escape(m.original_render) + "</pre>\n";
        h += "<pre>mutant:   " + html_escape(m.mutated_render) + "</pre>\n";
    }
    h += "</body>\n</html>\n";
    return h;
}

void emit_reports(const MutationReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::filesystem::path p = std::filesystem::path(out_dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    };
    write("report.json", report_json(report));
    write("report.html", report_html(report));
}

std::string state_json(const RunState& state) {
    ordered_json doc;
    doc["source_hash"] = state.source_hash;
    doc["program"] = state.program;
    ordered_json ms = ordered_json::array();
    for (const auto& [id, r] : state.results) {
        ordered_json o;
        o["id"] = id;
        o["status"] = status_name(r.status);
        o["killed_by"] = r.killed_by;
        o["executed_tests"] = r.executed_tests;
        o["killing_tests"] = r.killing_tests;
        ms.push_back(std::move(o));
    }
    doc["mutants"] = std::move(ms);
    return doc.dump(2) + "\n";
}

RunState parse_state_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid state file: ") + e.what());
    }
    RunState state;
    try {
        state.source_hash = doc.at("source_hash").get<std::string>();
        state.program = doc.at("program").get<std::string>();
        for (const auto& o : doc.at("mutants")) {
            PriorResult r;
            std::string status = o.at("status").get<std::string>();
            if (status == "killed") r.status = MutantStatus::Killed;
            else if (status == "survived") r.status = MutantStatus::Survived;
            else if (status == "equivalent") r.status = MutantStatus::Equivalent;
            else if (status == "removed") r.status = MutantStatus::Removed;
            else r.status = MutantStatus::Generated;
            r.killed_by = o.at("killed_by").get<std::vector<std::string>>();
            r.executed_tests = o.at("executed_tests").get<int>();
            r.killing_tests = o.at("killing_tests").get<int>();
            state.results[o.at("id").get<int>()] = std::move(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid state file: ") + e.what());
    }
    return state;
}

}  // namespace flowmut
