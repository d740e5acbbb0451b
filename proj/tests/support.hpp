#pragma once

#include "acsplit/acsplit.hpp"
#include "acsplit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace acs::testing {

inline std::string corpus_path(const std::string& name)
{
    return std::string(ACS_CORPUS_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name)
{
    return std::string(ACS_GOLDEN_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_corpus(const std::string& name)
{
    return slurp(corpus_path(name));
}

/// Replaces the single occurrence of `from`; throws if it is absent.
inline std::string replace_once(std::string text, const std::string& from, const std::string& to)
{
    const auto pos = text.find(from);
    if (pos == std::string::npos) {
        throw std::runtime_error("text to replace not found: " + from);
    }
    text.replace(pos, from.size(), to);
    return text;
}

inline ParseResult parse_corpus_case(const std::string& name)
{
    return parse_case(read_corpus(name), name);
}

inline AssuranceCase load_case(const std::string& name)
{
    auto r = parse_corpus_case(name);
    if (!r.ok()) {
        throw std::runtime_error("corpus file does not parse: " + name);
    }
    return *r.assurance_case;
}

/// Loader over in-memory files; falls back to the corpus directory.
inline FileLoader overlay_loader(std::map<std::string, std::string> files)
{
    return [files = std::move(files)](const std::string& path) -> std::optional<std::string> {
        if (auto it = files.find(path); it != files.end()) {
            return it->second;
        }
        return cli::read_file(path);
    };
}

inline BundleParseResult parse_corpus_bundle(const std::string& name, std::map<std::string, std::string> overrides = {})
{
    std::map<std::string, std::string> files;
    for (auto& [k, v] : overrides) {
        files[corpus_path(k)] = v;
    }
    return parse_bundle(read_corpus(name), corpus_path(name), overlay_loader(std::move(files)));
}

inline Bundle load_bundle(const std::string& name)
{
    auto r = parse_corpus_bundle(name);
    if (!r.bundle) {
        throw std::runtime_error("corpus bundle does not parse: " + name);
    }
    return *r.bundle;
}

inline ResolvedBundle load_resolved(const std::string& name)
{
    auto l = resolve_links(load_bundle(name));
    if (!l.resolved) {
        throw std::runtime_error("corpus bundle does not resolve: " + name);
    }
    return *l.resolved;
}

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliRun run_cli(std::vector<std::string> args, cli::Environment env = {})
{
    args.insert(args.begin(), "acsplit");
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.code = cli::run(args, out, err, env);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// ---------------------------------------------------------------- oracles

/// Allowed supportedBy pairs, written out as a table.
inline bool oracle_supported_by_allowed(ElementKind s, ElementKind t)
{
    using K = ElementKind;
    static const std::set<std::pair<K, K>> allowed{
        {K::Claim, K::Claim}, {K::Claim, K::Strategy}, {K::Claim, K::Evidence}, {K::Strategy, K::Claim}};
    return allowed.contains({s, t});
}

/// Allowed inContextOf pairs, written out as a table.
inline bool oracle_in_context_of_allowed(ElementKind s, ElementKind t)
{
    using K = ElementKind;
    static const std::set<std::pair<K, K>> allowed{
        {K::Claim, K::Context},       {K::Claim, K::Assumption},       {K::Claim, K::Justification},
        {K::Strategy, K::Context},    {K::Strategy, K::Assumption},    {K::Strategy, K::Justification}};
    return allowed.contains({s, t});
}

/// Boolean transitive closure (Warshall) over node indices.
inline std::vector<std::vector<bool>> closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (auto [a, b] : edges) {
        r[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!r[i][k]) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (r[k][j]) {
                    r[i][j] = true;
                }
            }
        }
    }
    return r;
}

/// Number of strongly connected regions that contain a cycle.
inline int oracle_cyclic_regions(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    const auto r = closure(n, edges);
    std::vector<bool> done(n, false);
    int regions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i] || !r[i][i]) {
            continue;
        }
        ++regions;
        for (std::size_t j = 0; j < n; ++j) {
            if (r[i][j] && r[j][i]) {
                done[j] = true;
            }
        }
    }
    return regions;
}

/// Impact by closure over the explicit union graph of a bundle: an edge
/// u -> v means "a change to u calls v into question".
inline std::map<CaseId, std::set<ElementId>> oracle_impact(const ResolvedBundle& rb, const std::set<ElementRef>& changed)
{
    std::vector<ElementRef> nodes;
    std::map<ElementRef, std::size_t> index;
    std::vector<const AssuranceCase*> cases{&rb.bundle.tac};
    for (const auto& c : rb.bundle.cacs) {
        cases.push_back(&c);
    }
    for (const auto* c : cases) {
        for (const auto& e : c->elements) {
            index[{c->id, e.id}] = nodes.size();
            nodes.push_back({c->id, e.id});
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> up;
    for (const auto* c : cases) {
        for (const auto& e : c->edges) {
            up.emplace_back(index.at({c->id, e.target}), index.at({c->id, e.source}));
        }
    }
    for (const auto& [away, target] : rb.resolutions) {
        up.emplace_back(index.at(target), index.at(away));
    }
    const auto r = closure(nodes.size(), up);
    std::map<CaseId, std::set<ElementId>> out;
    for (const auto* c : cases) {
        out[c->id];
    }
    for (const auto& ch : changed) {
        const auto i = index.at(ch);
        out[ch.case_id].insert(ch.element_id);
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (r[i][j]) {
                out[nodes[j].case_id].insert(nodes[j].element_id);
            }
        }
    }
    return out;
}

// ------------------------------------------------------------- generators

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p)
{
    return std::bernoulli_distribution(p)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items)
{
    return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

inline std::string random_id(Rng& rng)
{
    static const std::vector<std::string> tricky{"claim", "root", "supportedBy", "inContextOf", "case",
                                                 "kind",  "provides", "associates", "unit", "module"};
    if (chance(rng, 0.1)) {
        return pick(rng, tricky);
    }
    static const std::string first = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    static const std::string rest = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-";
    std::string id(1, first[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(first.size()) - 1))]);
    const int len = uniform(rng, 0, 6);
    for (int i = 0; i < len; ++i) {
        id += rest[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(rest.size()) - 1))];
    }
    return id;
}

inline std::string random_statement(Rng& rng)
{
    static const std::vector<std::string> pieces{"a",  "Z", " ", "  ", "\"", "\\", "\\\"", "{", "}", "[", "]",
                                                 ",", ".", ";", "//", "0.5", "°", "◇", "µs", "case", "\t", "'"};
    std::string s;
    const int n = uniform(rng, 0, 12);
    for (int i = 0; i < n; ++i) {
        s += pick(rng, pieces);
    }
    return s;
}

inline Decimal random_decimal(Rng& rng, int max_mantissa = 100000, int min_exp = -3, int max_exp = 2)
{
    std::int64_t m = uniform(rng, -max_mantissa, max_mantissa);
    int e = uniform(rng, min_exp, max_exp);
    std::string text = std::to_string(m < 0 ? -m : m);
    if (e < 0) {
        while (static_cast<int>(text.size()) <= -e) {
            text.insert(text.begin(), '0');
        }
        text.insert(text.end() + e, '.');
    } else {
        text.append(static_cast<std::size_t>(e), '0');
    }
    if (m < 0) {
        text.insert(text.begin(), '-');
    }
    return *Decimal::parse(text);
}

/// A case that parses cleanly (no P-rule errors); graph rules may fail.
inline AssuranceCase random_parseable_case(Rng& rng)
{
    AssuranceCase ac;
    ac.id = random_id(rng);
    ac.kind = pick(rng, std::vector<CaseKind>{CaseKind::Monolithic, CaseKind::Technological, CaseKind::Clinical});
    if (ac.kind == CaseKind::Clinical) {
        ac.associated_tac = random_id(rng);
    }
    static const std::vector<std::string> unit_symbols{"W",  "mW", "kW", "J",  "kJ", "s",  "ms", "min",
                                                       "Hz", "kHz", "MHz", "m", "mm", "cm", "degC", "W_per_cm2"};
    if (ac.kind != CaseKind::Monolithic) {
        const int caps = uniform(rng, 0, 4);
        for (int i = 0; i < caps; ++i) {
            Capability c;
            c.name = random_id(rng);
            c.direction = ac.kind == CaseKind::Technological ? Direction::Provided : Direction::Required;
            c.unit = pick(rng, unit_symbols);
            auto a = random_decimal(rng);
            auto b = random_decimal(rng);
            c.low = std::min(a, b);
            c.high = std::max(a, b);
            ac.capabilities.push_back(c);
        }
    }
    std::set<ElementId> used;
    const int n = uniform(rng, 0, 12);
    for (int i = 0; i < n; ++i) {
        Element e;
        do {
            e.id = random_id(rng);
        } while (!used.insert(e.id).second);
        e.kind = pick(rng, std::vector<ElementKind>(std::begin(kAllElementKinds), std::end(kAllElementKinds)));
        e.statement = random_statement(rng);
        e.is_public = chance(rng, 0.3);
        if (chance(rng, 0.3)) {
            e.concern = chance(rng, 0.5) ? ConcernKind::Safety : ConcernKind::Effectiveness;
        }
        if (e.kind == ElementKind::Claim) {
            e.is_root = chance(rng, 0.2);
            e.is_undeveloped = chance(rng, 0.3);
            e.is_module = chance(rng, 0.2);
            if (e.is_undeveloped && chance(rng, 0.5)) {
                e.away_ref = ElementRef{random_id(rng), random_id(rng)};
            }
        }
        ac.elements.push_back(e);
    }
    if (!ac.elements.empty()) {
        const int m = uniform(rng, 0, 2 * n);
        for (int i = 0; i < m; ++i) {
            Edge e;
            e.source = pick(rng, ac.elements).id;
            e.target = pick(rng, ac.elements).id;
            e.kind = chance(rng, 0.6) ? EdgeKind::SupportedBy : EdgeKind::InContextOf;
            ac.edges.push_back(e);
        }
    }
    return ac;
}

/// A bundle with zero Error diagnostics under validate_all, at most
/// `max_elements` elements in total.
inline Bundle random_valid_bundle(Rng& rng, int max_elements = 30)
{
    Bundle b;
    b.id = "B" + std::to_string(uniform(rng, 0, 9999));
    const int cac_count = uniform(rng, 1, 3);
    int budget = max_elements;
    const int tac_budget = uniform(rng, 3, std::max(3, budget - 3 * cac_count));
    budget -= tac_budget;

    // Grows a valid tree rooted at C0 with `size` elements, plus a few
    // forward supportedBy edges that keep it acyclic.
    auto grow = [&](AssuranceCase& ac, int size, const std::string& prefix) {
        auto add = [&](ElementKind k) -> Element& {
            Element e;
            e.id = prefix + std::to_string(ac.elements.size());
            e.kind = k;
            e.statement = "statement of " + e.id;
            ac.elements.push_back(e);
            return ac.elements.back();
        };
        add(ElementKind::Claim).is_root = true;
        while (static_cast<int>(ac.elements.size()) < size) {
            std::vector<std::size_t> parents;
            for (std::size_t i = 0; i < ac.elements.size(); ++i) {
                auto k = ac.elements[i].kind;
                if (k == ElementKind::Claim || k == ElementKind::Strategy) {
                    parents.push_back(i);
                }
            }
            const auto parent = ac.elements[pick(rng, parents)];
            const int room = size - static_cast<int>(ac.elements.size());
            ElementKind kind;
            EdgeKind edge = EdgeKind::SupportedBy;
            if (parent.kind == ElementKind::Strategy) {
                kind = ElementKind::Claim;
            } else {
                const int r = uniform(rng, 0, 5);
                kind = r <= 1 ? ElementKind::Claim
                       : r == 2 && room >= 2 ? ElementKind::Strategy
                       : r == 3 ? ElementKind::Evidence
                       : r == 4 ? ElementKind::Context
                                : ElementKind::Assumption;
            }
            if (kind == ElementKind::Context || kind == ElementKind::Assumption) {
                edge = EdgeKind::InContextOf;
            }
            const auto id = add(kind).id;
            ac.edges.push_back({parent.id, id, edge, {}});
            if (kind == ElementKind::Strategy) {
                const auto child = add(ElementKind::Claim).id;
                ac.edges.push_back({id, child, EdgeKind::SupportedBy, {}});
            }
        }
        const int extra = uniform(rng, 0, 3);
        for (int i = 0; i < extra; ++i) {
            const auto a = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ac.elements.size()) - 1));
            const auto c = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ac.elements.size()) - 1));
            const auto lo = std::min(a, c);
            const auto hi = std::max(a, c);
            if (lo != hi && oracle_supported_by_allowed(ac.elements[lo].kind, ac.elements[hi].kind)) {
                ac.edges.push_back({ac.elements[lo].id, ac.elements[hi].id, EdgeKind::SupportedBy, {}});
            }
        }
    };
    auto settle_leaves = [](AssuranceCase& ac) {
        for (auto& e : ac.elements) {
            if (rules::is_leaf_claim(ac, e) && !rules::has_evidence(ac, e)) {
                e.is_undeveloped = true;
            }
        }
    };

    b.tac.id = "T";
    b.tac.kind = CaseKind::Technological;
    grow(b.tac, tac_budget, "t");
    settle_leaves(b.tac);
    std::vector<const Element*> targets;
    for (auto& e : b.tac.elements) {
        if (e.kind == ElementKind::Claim && chance(rng, 0.5)) {
            e.is_public = true;
        }
    }
    for (const auto& e : b.tac.elements) {
        if (e.is_public) {
            targets.push_back(&e);
        }
    }

    for (int c = 0; c < cac_count; ++c) {
        AssuranceCase cac;
        cac.id = "K" + std::to_string(c);
        cac.kind = CaseKind::Clinical;
        cac.associated_tac = b.tac.id;
        const int size = c + 1 == cac_count ? std::max(1, budget) : uniform(rng, 1, std::max(1, budget - 3 * (cac_count - c - 1)));
        budget -= size;
        grow(cac, std::max(1, size - 2), "k");
        // Away claims under random claim parents, each with a documenting context.
        int away = uniform(rng, 0, 2);
        while (away-- > 0 && !targets.empty() && static_cast<int>(cac.elements.size()) + 2 <= size) {
            std::vector<ElementId> parents;
            for (const auto& e : cac.elements) {
                if (e.kind == ElementKind::Claim || e.kind == ElementKind::Strategy) {
                    parents.push_back(e.id);
                }
            }
            const auto parent = pick(rng, parents);
            const auto* target = pick(rng, targets);
            Element a;
            a.id = "a" + std::to_string(cac.elements.size());
            a.kind = ElementKind::Claim;
            a.statement = target->statement;
            a.is_undeveloped = true;
            a.away_ref = ElementRef{b.tac.id, target->id};
            Element x;
            x.id = "x" + std::to_string(cac.elements.size());
            x.kind = ElementKind::Context;
            x.statement = "needs of " + a.id;
            cac.edges.push_back({parent, a.id, EdgeKind::SupportedBy, {}});
            cac.edges.push_back({a.id, x.id, EdgeKind::InContextOf, {}});
            cac.elements.push_back(a);
            cac.elements.push_back(x);
        }
        settle_leaves(cac);
        b.cacs.push_back(std::move(cac));
    }
    return b;
}

} // namespace acs::testing
