#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "ftconn/schemes.hpp"

using namespace ftconn;

namespace {

constexpr int exit_mismatch = 5;

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::size_cap: return 2;
    case ErrorKind::incompatible: return 3;
    case ErrorKind::too_many_faults: return 4;
    default: return 1;
    }
}

Graph read_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::parse, "cannot open " + path);
    return load_graph(in);
}

std::vector<std::uint64_t> parse_list(const std::string& text, const char* what)
{
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos || item.find('-') != std::string::npos)
            throw Error(ErrorKind::parse, std::string("bad ") + what + " entry \"" + item + "\"");
        out.push_back(v);
    }
    return out;
}

SchemeId scheme_of(int id)
{
    if (id < 1 || id > 4) throw Error(ErrorKind::incompatible, "scheme must be 1, 2, 3 or 4");
    return SchemeId(id);
}

HierarchyMode mode_of(const std::string& s) { return s == "exact" ? HierarchyMode::exact : HierarchyMode::heuristic; }

void print_sizes(const LabelFile& lf)
{
    LabelBits b = label_bits(lf);
    std::cout << "scheme=" << int(lf.scheme) << " n=" << lf.n << " m=" << lf.m << " f=" << lf.f;
    if (lf.scheme == SchemeId::simple || lf.scheme == SchemeId::sqrt) {
        DetParams p = lf.scheme == SchemeId::sqrt ? SqrtParams::from_file(lf).base : DetParams::from_file(lf);
        std::cout << " h=" << lf.h << " phi=" << lf.phi.num << '/' << lf.phi.den
                  << (p.certified ? " certified" : " uncertified");
    }
    std::cout << " max_bits=" << b.max_bits << " mean_bits=" << b.mean_bits << '\n';
}

std::vector<std::filesystem::path> corpus_files(const std::string& dir)
{
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::parse, dir + " is not a directory");
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw Error(ErrorKind::parse, dir + " holds no graph files");
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fault-tolerant connectivity labels"};
    app.require_subcommand(1);

    std::string graph_path, label_path, out_path, phi_mode = "heuristic", fail_list, corpus, f_range = "16,64,256,1024";
    int scheme = 1;
    std::uint32_t f = 1;
    std::uint64_t seed = 1, trials = 1000;
    std::vector<std::string> pairs;
    bool count = false;
    double threshold = 1e-3;

    auto* build = app.add_subcommand("build", "Build labels for a graph");
    build->add_option("graph", graph_path, "Graph file (\"n m\" then m lines \"u v\")")->required();
    build->add_option("--scheme", scheme, "1 simple, 2 sqrt, 3 randomized long, 4 randomized short")->required();
    build->add_option("--f", f, "Fault budget")->required();
    build->add_option("--phi-mode", phi_mode, "Hierarchy construction")->check(CLI::IsMember({"exact", "heuristic"}));
    build->add_option("--seed", seed, "Seed for heuristics and randomized schemes");
    build->add_option("-o", out_path, "Output label file")->required();

    auto* query = app.add_subcommand("query", "Answer queries from a label file alone");
    query->add_option("labels", label_path, "Label file")->required();
    query->add_option("--fail", fail_list, "Failed edge ids, comma separated");
    auto* pair_opt = query->add_option("--pair", pairs, "Vertex pair \"s,t\"; repeatable");
    auto* count_opt = query->add_flag("--count", count, "Print the number of components");
    pair_opt->excludes(count_opt);

    auto* verify = app.add_subcommand("verify", "Compare label answers with the oracle on sampled faults");
    verify->add_option("graph", graph_path, "Graph file")->required();
    verify->add_option("labels", label_path, "Label file")->required();
    verify->add_option("--trials", trials, "Sampled (F, s, t) triples");
    verify->add_option("--seed", seed, "Sampling seed");
    verify->add_option("--threshold", threshold, "Allowed mismatch rate for schemes 3 and 4");

    auto* stats = app.add_subcommand("stats", "Label sizes over a graph corpus, as CSV");
    stats->add_option("corpus", corpus, "Directory of graph files")->required();
    stats->add_option("--scheme", scheme, "Scheme id")->required();
    stats->add_option("--f-range", f_range, "Comma separated f values");
    stats->add_option("--phi-mode", phi_mode, "Hierarchy construction")->check(CLI::IsMember({"exact", "heuristic"}));
    stats->add_option("--seed", seed, "Seed");

    auto* hier = app.add_subcommand("hierarchy", "Print the edge expander hierarchy");
    hier->add_option("graph", graph_path, "Graph file")->required();
    hier->add_option("--phi-mode", phi_mode, "Hierarchy construction")->check(CLI::IsMember({"exact", "heuristic"}));
    hier->add_option("--seed", seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*build) {
            Graph g = read_graph(graph_path);
            BuildResult r = build_labels(g, {scheme_of(scheme), f, mode_of(phi_mode), seed});
            if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
            save_label_file(out_path, r.file);
            print_sizes(r.file);
        } else if (*query) {
            LabelFile lf = load_label_file(label_path);
            std::vector<EdgeId> faults;
            for (auto e : parse_list(fail_list, "fault")) faults.push_back(EdgeId(e));
            LabelQuery q(lf, faults);
            if (count || pairs.empty()) std::cout << q.component_count() << '\n';
            for (const auto& p : pairs) {
                auto st = parse_list(p, "pair");
                if (st.size() != 2) throw Error(ErrorKind::parse, "a pair needs two vertices: \"" + p + "\"");
                std::cout << (q.connected(Vertex(st[0]), Vertex(st[1])) ? "connected" : "disconnected") << '\n';
            }
        } else if (*verify) {
            Graph g = read_graph(graph_path);
            LabelFile lf = load_label_file(label_path);
            if (lf.n != g.n() || lf.m != g.m()) throw Error(ErrorKind::incompatible, "label file does not match the graph");
            std::mt19937_64 rng(seed);
            std::uint64_t mismatches = 0;
            for (std::uint64_t i = 0; i < trials; ++i) {
                std::vector<EdgeId> all(g.m());
                std::iota(all.begin(), all.end(), EdgeId{0});
                std::shuffle(all.begin(), all.end(), rng);
                all.resize(std::min<std::size_t>(g.m(), rng() % (std::uint64_t(lf.f) + 1)));
                Vertex s = Vertex(rng() % g.n()), t = Vertex(rng() % g.n());
                LabelQuery q(lf, all);
                mismatches += q.connected(s, t) != oracle_components(g, FaultSet(g, all)).connected(s, t);
            }
            double rate = trials ? double(mismatches) / double(trials) : 0.0;
            std::cout << "trials=" << trials << " mismatches=" << mismatches << " rate=" << rate << '\n';
            bool randomized = lf.scheme == SchemeId::rand_long || lf.scheme == SchemeId::rand_short;
            if (randomized ? rate > threshold : mismatches > 0) return exit_mismatch;
        } else if (*stats) {
            SchemeId id = scheme_of(scheme);
            auto fs = parse_list(f_range, "f");
            auto files = corpus_files(corpus);
            std::vector<Graph> graphs;
            for (const auto& p : files) graphs.push_back(read_graph(p.string()));
            std::cout << "f,scheme,max_bits,mean_bits\n";
            for (auto fv : fs) {
                std::size_t max_bits = 0;
                double mean = 0;
                int reported = int(id);
                for (const Graph& g : graphs) {
                    BuildResult r = build_labels(g, {id, std::uint32_t(fv), mode_of(phi_mode), seed});
                    if (!r.warning.empty()) std::cerr << "warning: f=" << fv << ": " << r.warning << '\n';
                    reported = int(r.file.scheme);
                    LabelBits b = label_bits(r.file);
                    max_bits = std::max(max_bits, b.max_bits);
                    mean += b.mean_bits / double(graphs.size());
                }
                std::cout << fv << ',' << reported << ',' << max_bits << ',' << mean << '\n';
            }
        } else if (*hier) {
            Graph g = read_graph(graph_path);
            export_hierarchy(std::cout, build_edge_hierarchy(g, mode_of(phi_mode), seed));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    return 0;
}
