#pragma once

#include <optional>

#include "flowmut/graph.hpp"

namespace flowmut {

/// One mutation expressed as a graph rewrite. Every patch, applied alone
/// to the original graph, yields a graph that passes validate.
struct GraphPatch {
    enum class Kind {
        ReplaceSite,
        DeleteSite,
        SwapSites,
        InsertAfter,
        WrapUdf,
        ReplaceJoinWithAdjustment,
    };

    Kind kind = Kind::ReplaceSite;
    int site = 0;

    // ReplaceSite / InsertAfter: the transformation to install. For
    // ReplaceSite it carries the site's dataset wiring (possibly with the
    // operands swapped); for InsertAfter only its kind matters.
    Transformation replacement;

    // DeleteSite: which input dataset the consumers are rewired to
    // (index into the deleted site's inputs; binary keep-left/keep-right).
    int keep_input = 0;

    // SwapSites: the second site. The operations are exchanged, each
    // site keeps its own input/output datasets.
    int other_site = 0;

    // WrapUdf
    int udf_index = 0;
    UdfWrapper wrapper;

    // ReplaceJoinWithAdjustment: the new join kind plus the type-restoring
    // map inserted after it (identity here, since the outer-join kinds
    // substitute defaults for missing sides themselves).
    TransformationKind new_join_kind = TransformationKind::Join;
    Lambda adjustment;
};

}  // namespace flowmut
