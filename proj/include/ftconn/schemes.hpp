#pragma once

#include <memory>
#include <variant>

#include "rand_scheme.hpp"
#include "simple_scheme.hpp"
#include "sqrt_scheme.hpp"

namespace ftconn {

struct BuildOptions {
    SchemeId scheme = SchemeId::simple;
    std::uint32_t f = 1;
    HierarchyMode mode = HierarchyMode::heuristic;
    std::uint64_t seed = 1;
};

struct BuildResult {
    LabelFile file;
    std::string warning; // empty unless the request was adjusted
};

inline BuildResult build_labels(const Graph& g, const BuildOptions& opt)
{
    if (opt.f < 1) throw Error(ErrorKind::incompatible, "f must be at least 1");
    BuildResult r;
    switch (opt.scheme) {
    case SchemeId::simple: {
        EdgeLevelAssignment levels = build_edge_hierarchy(g, opt.mode, opt.seed);
        EulerFrame fr = build_frame(g, levels);
        r.file = build_simple_labels(g, levels, fr, opt.f);
        break;
    }
    case SchemeId::sqrt:
        r.file = build_sqrt_labels_any(g, opt.f, opt.mode, opt.seed);
        break;
    case SchemeId::rand_long:
    case SchemeId::rand_short: {
        bool rerouted = false;
        r.file = build_rand_labels(g, opt.f, opt.seed, opt.scheme == SchemeId::rand_short, false, &rerouted);
        if (rerouted)
            r.warning = "scheme 4 needs f >= 2 log^2 n = " +
                        std::to_string(2 * std::uint64_t(std::max(1u, ceil_log2(g.n()))) * std::max(1u, ceil_log2(g.n()))) +
                        "; built scheme 3 instead";
        break;
    }
    }
    return r;
}

/// Answers queries from a label file and the failed edges' labels only.
class LabelQuery {
public:
    LabelQuery(const LabelFile& lf, const std::vector<EdgeId>& faults) : file_(&lf)
    {
        std::vector<EdgeId> s = faults;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= lf.edge.size()) throw Error(ErrorKind::invalid, "fault id " + std::to_string(s[i]) + " out of range");
            if (i && s[i] == s[i - 1]) throw Error(ErrorKind::invalid, "duplicate fault id " + std::to_string(s[i]));
        }
        if (faults.size() > lf.f)
            throw Error(ErrorKind::too_many_faults,
                        std::to_string(faults.size()) + " faults exceed f = " + std::to_string(lf.f));
        switch (lf.scheme) {
        case SchemeId::simple: {
            det_ = DetParams::from_file(lf);
            std::vector<SimpleEdgeLabel> labels;
            for (EdgeId e : faults) labels.push_back(decode_simple_edge(det_, lf.edge[e]));
            q_ = std::make_unique<SimpleQuery>(det_, labels);
            break;
        }
        case SchemeId::sqrt: {
            SqrtParams sp = SqrtParams::from_file(lf);
            det_ = sp.base;
            std::vector<SqrtEdgeLabel> labels;
            for (EdgeId e : faults) labels.push_back(decode_sqrt_edge(sp, lf.edge[e]));
            q_ = std::make_unique<SqrtQuery>(sp, labels);
            break;
        }
        case SchemeId::rand_long:
        case SchemeId::rand_short: {
            rp_ = RandParams::from_file(lf);
            std::vector<RandEdgeLabel> labels;
            for (EdgeId e : faults) labels.push_back(decode_rand_edge(rp_, lf.edge[e]));
            q_ = std::make_unique<RandQuery>(rp_, labels);
            break;
        }
        }
    }

    bool connected(Vertex s, Vertex t) const
    {
        std::uint32_t a = position(s), b = position(t);
        return std::visit([&](const auto& q) { return q->connected(a, b); }, q_);
    }

    std::size_t component_count() const
    {
        return std::visit([](const auto& q) { return q->component_count(); }, q_);
    }

private:
    std::uint32_t position(Vertex v) const
    {
        if (v >= file_->vertex.size()) throw Error(ErrorKind::invalid, "vertex " + std::to_string(v) + " out of range");
        if (file_->scheme == SchemeId::rand_long || file_->scheme == SchemeId::rand_short)
            return decode_rand_vertex(rp_, file_->vertex[v]).first;
        return decode_det_vertex(det_, file_->vertex[v]);
    }

    const LabelFile* file_;
    DetParams det_;
    RandParams rp_;
    std::variant<std::unique_ptr<SimpleQuery>, std::unique_ptr<SqrtQuery>, std::unique_ptr<RandQuery>> q_;
};

} // namespace ftconn
