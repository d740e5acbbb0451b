#pragma once

#include "acsplit/analyze.hpp"
#include "acsplit/dot.hpp"
#include "acsplit/link.hpp"
#include "acsplit/parse.hpp"
#include "acsplit/print.hpp"
#include "acsplit/report.hpp"
#include "acsplit/validate.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace acs::cli {

enum ExitCode : int { kOk = 0, kErrors = 1, kFailure = 2 };

/// Process-level inputs, injectable for tests.
struct Environment {
    std::optional<std::string> units_file; // value of AC_UNITS
};

inline Environment environment_from_process()
{
    Environment env;
    if (const char* v = std::getenv("AC_UNITS"); v != nullptr && *v != '\0') {
        env.units_file = v;
    }
    return env;
}

inline std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        return std::nullopt;
    }
    return ss.str();
}

/// Raised for usage and I/O failures; maps to exit code 2.
struct Failure {
    std::string message;
};

namespace detail {

struct Loaded {
    std::optional<AssuranceCase> single;
    std::optional<Bundle> bundle;
    Diagnostics diagnostics;
    bool io_failure = false;
};

inline bool is_bundle_path(const std::string& path)
{
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".acb") == 0;
}

inline Loaded load(const std::string& path, const UnitTable& units)
{
    auto text = read_file(path);
    if (!text) {
        throw Failure{"cannot read '" + path + "'"};
    }
    Loaded out;
    if (is_bundle_path(path)) {
        auto r = parse_bundle(*text, path, read_file, units);
        out.bundle = std::move(r.bundle);
        out.diagnostics = std::move(r.diagnostics);
        out.io_failure = std::ranges::any_of(out.diagnostics, [](const Diagnostic& d) { return d.rule_id == "P6"; });
    } else {
        auto r = parse_case(*text, path, units);
        if (r.ok()) {
            out.single = std::move(r.assurance_case);
        }
        out.diagnostics = std::move(r.diagnostics);
    }
    return out;
}

inline std::vector<ElementRef> parse_refs(const std::vector<std::string>& items, const std::string& flag)
{
    std::vector<ElementRef> out;
    for (const auto& raw : items) {
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) {
                continue;
            }
            const auto dot = item.find('.');
            if (dot == std::string::npos || !is_valid_id(item.substr(0, dot)) || !is_valid_id(item.substr(dot + 1))) {
                throw Failure{flag + ": expected CASE.ID, got '" + item + "'"};
            }
            out.push_back({item.substr(0, dot), item.substr(dot + 1)});
        }
    }
    return out;
}

inline void write_output(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw Failure{"cannot write '" + path + "'"};
    }
}

inline std::string format_ratio(double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    return std::string(buf, end);
}

inline std::string metrics_table(const Metrics& m)
{
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"case", "kind", "claim", "strategy", "context", "assumption", "justification", "evidence",
                    "supportedBy", "inContextOf", "depth", "undeveloped", "coverage", "safety", "effectiveness"});
    auto add = [&](const CaseMetrics& c, const std::string& name) {
        std::vector<std::string> row{name, std::string(keyword(c.kind))};
        for (auto k : kAllElementKinds) {
            row.push_back(std::to_string(c.elements.at(k)));
        }
        for (auto k : kAllEdgeKinds) {
            row.push_back(std::to_string(c.edges.at(k)));
        }
        row.push_back(std::to_string(c.depth));
        row.push_back(std::to_string(c.undeveloped));
        row.push_back(format_ratio(c.evidence_coverage()));
        row.push_back(std::to_string(c.concerns.at(ConcernKind::Safety)));
        row.push_back(std::to_string(c.concerns.at(ConcernKind::Effectiveness)));
        rows.push_back(std::move(row));
    };
    for (const auto& c : m.cases) {
        add(c, c.id);
    }
    if (m.totals) {
        add(*m.totals, "total");
        rows.back()[1] = "bundle";
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            width[i] = std::max(width[i], r[i].size());
        }
    }
    std::ostringstream os;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::string cell = r[i];
            if (i + 1 < r.size()) {
                cell.append(width[i] - cell.size() + 2, ' ');
            }
            line += cell;
        }
        os << line << '\n';
    }
    if (m.cross_links) {
        os << "cross-links: " << *m.cross_links << '\n';
    }
    return os.str();
}

/// Best-effort resolution for rendering: keeps every away reference whose
/// target exists in the TAC, even if the bundle has rule errors.
inline ResolvedBundle partial_resolution(const Bundle& b)
{
    ResolvedBundle rb{b, {}};
    for (const auto& cac : b.cacs) {
        for (const auto& e : cac.elements) {
            if (e.away_ref && e.away_ref->case_id == b.tac.id && b.tac.contains(e.away_ref->element_id)) {
                rb.resolutions.emplace(ElementRef{cac.id, e.id}, *e.away_ref);
            }
        }
    }
    return rb;
}

inline std::vector<CapabilityReport> capability_reports(const Bundle& b, const UnitTable& units)
{
    std::vector<Capability> provided;
    for (const auto& c : b.tac.capabilities) {
        if (c.direction == Direction::Provided) {
            provided.push_back(c);
        }
    }
    std::vector<CapabilityReport> out;
    for (const auto& cac : b.cacs) {
        std::vector<Capability> required;
        for (const auto& c : cac.capabilities) {
            if (c.direction == Direction::Required) {
                required.push_back(c);
            }
        }
        out.push_back({cac.id, match_capabilities(required, provided, units)});
    }
    return out;
}

} // namespace detail

/// Runs one command line (`args[0]` is the program name). Artifacts go to
/// `out`, diagnostics and usage text to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const Environment& env = {})
{
    CLI::App app{"Checks, links and renders technological/clinical assurance cases", "acsplit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string file;
    bool json = false;
    bool strict = false;
    bool check = false;
    std::vector<std::string> changed_items;
    std::vector<std::string> highlight_items;
    std::string cac_id;
    std::string output;
    bool no_contexts = false;
    bool collapse_modules = false;
    double rank_sep = 0.6;

    auto* validate = app.add_subcommand("validate", "Parse and check a case (.acd) or bundle (.acb)");
    validate->add_option("file", file, "Case or bundle file")->required();
    validate->add_flag("--json", json, "Write a JSON report to stdout");
    validate->add_flag("--strict", strict, "Treat warnings as errors");

    auto* link = app.add_subcommand("link", "Resolve away references and print the resolution table");
    link->add_option("file", file, "Bundle manifest")->required();
    link->add_flag("--strict", strict, "Treat warnings as errors");

    auto* impact_cmd = app.add_subcommand("impact", "Elements affected by a change");
    impact_cmd->add_option("file", file, "Bundle manifest")->required();
    impact_cmd->add_option("--changed", changed_items, "Changed elements as CASE.ID[,CASE.ID...]")
        ->required()
        ->allow_extra_args(false);
    impact_cmd->add_flag("--json", json, "Write a JSON report to stdout");
    impact_cmd->add_flag("--strict", strict, "Treat warnings as errors");

    auto* inline_cmd = app.add_subcommand("inline", "Print the monolithic view of one clinical case");
    inline_cmd->add_option("file", file, "Bundle manifest")->required();
    inline_cmd->add_option("--cac", cac_id, "Clinical case id")->required();
    inline_cmd->add_option("-o,--output", output, "Write to a file instead of stdout");
    inline_cmd->add_flag("--strict", strict, "Treat warnings as errors");

    auto* render = app.add_subcommand("render", "Emit a GSN diagram as DOT");
    render->add_option("file", file, "Case or bundle file")->required();
    render->add_option("--highlight", highlight_items, "Elements to fill, CASE.ID[,CASE.ID...]")
        ->allow_extra_args(false);
    render->add_option("-o,--output", output, "Write to a file instead of stdout");
    render->add_flag("--no-contexts", no_contexts, "Omit context, assumption and justification nodes");
    render->add_flag("--collapse-modules", collapse_modules, "Hide the contents of module claims");
    render->add_option("--rank-sep", rank_sep, "Graphviz rank separation")->check(CLI::PositiveNumber);

    auto* metrics_cmd = app.add_subcommand("metrics", "Structural metrics");
    metrics_cmd->add_option("file", file, "Case or bundle file")->required();
    metrics_cmd->add_flag("--json", json, "Write a JSON report to stdout");

    auto* fmt = app.add_subcommand("fmt", "Pretty-print a case file canonically");
    fmt->add_option("file", file, "Case file")->required();
    fmt->add_flag("--check", check, "Exit 1 if the file is not already formatted");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kFailure;
    }

    Diagnostics diags;
    bool io_failure = false;
    auto finish = [&](bool extra_error = false) {
        for (const auto& d : diags) {
            err << d.to_line() << '\n';
        }
        if (io_failure) {
            return static_cast<int>(kFailure);
        }
        const bool fails = extra_error || has_errors(diags) || (strict && !diags.empty());
        return static_cast<int>(fails ? kErrors : kOk);
    };

    try {
        UnitTable units = UnitTable::builtin();
        if (env.units_file) {
            auto text = read_file(*env.units_file);
            if (!text) {
                throw Failure{"cannot read units file '" + *env.units_file + "'"};
            }
            try {
                units.load(*text);
            } catch (const UnitError& e) {
                throw Failure{*env.units_file + ": " + e.what()};
            }
        }

        if (validate->parsed()) {
            auto loaded = detail::load(file, units);
            diags = loaded.diagnostics;
            io_failure = loaded.io_failure;
            std::optional<std::vector<CapabilityReport>> caps;
            if (loaded.single) {
                auto d = validate_case(*loaded.single);
                diags.insert(diags.end(), d.begin(), d.end());
            } else if (loaded.bundle) {
                auto d = validate_all(*loaded.bundle, units);
                diags.insert(diags.end(), d.begin(), d.end());
                caps = detail::capability_reports(*loaded.bundle, units);
            }
            sort_diagnostics(diags);
            if (json) {
                out << report_json({diags, caps, std::nullopt, std::nullopt});
            }
            return finish();
        }

        if (fmt->parsed()) {
            if (detail::is_bundle_path(file)) {
                throw Failure{"fmt expects a case file (.acd)"};
            }
            auto text = read_file(file);
            if (!text) {
                throw Failure{"cannot read '" + file + "'"};
            }
            auto parsed = parse_case(*text, file, units);
            diags = parsed.diagnostics;
            if (!parsed.ok()) {
                return finish(true);
            }
            const auto pretty = print_case(*parsed.assurance_case);
            if (check) {
                if (pretty != *text) {
                    err << file << ": not canonically formatted\n";
                    return finish(true);
                }
                return finish();
            }
            out << pretty;
            return finish();
        }

        if (metrics_cmd->parsed()) {
            auto loaded = detail::load(file, units);
            diags = loaded.diagnostics;
            io_failure = loaded.io_failure;
            std::optional<Metrics> m;
            if (loaded.single) {
                m = metrics(*loaded.single);
            } else if (loaded.bundle) {
                auto linked = resolve_links(*loaded.bundle);
                m = linked.resolved ? metrics(*linked.resolved) : metrics(*loaded.bundle);
            }
            if (!m) {
                return finish(true);
            }
            if (json) {
                out << report_json({std::nullopt, std::nullopt, m, std::nullopt});
            } else {
                out << detail::metrics_table(*m);
            }
            return finish();
        }

        if (render->parsed()) {
            RenderOptions opt;
            opt.show_contexts = !no_contexts;
            opt.collapse_modules = collapse_modules;
            opt.rank_sep = rank_sep;
            for (const auto& r : detail::parse_refs(highlight_items, "--highlight")) {
                opt.highlight.insert(r);
            }
            auto loaded = detail::load(file, units);
            diags = loaded.diagnostics;
            io_failure = loaded.io_failure;
            if (loaded.single) {
                detail::write_output(to_dot(*loaded.single, opt), output, out);
            } else if (loaded.bundle) {
                detail::write_output(to_dot(detail::partial_resolution(*loaded.bundle), opt), output, out);
            } else {
                return finish(true);
            }
            return finish();
        }

        // The remaining subcommands need a resolvable bundle.
        auto resolve = [&]() -> std::optional<ResolvedBundle> {
            if (!detail::is_bundle_path(file)) {
                throw Failure{"'" + file + "' is not a bundle manifest (.acb)"};
            }
            auto loaded = detail::load(file, units);
            diags = loaded.diagnostics;
            io_failure = loaded.io_failure;
            if (!loaded.bundle) {
                return std::nullopt;
            }
            auto linked = resolve_links(*loaded.bundle);
            diags.insert(diags.end(), linked.diagnostics.begin(), linked.diagnostics.end());
            sort_diagnostics(diags);
            return linked.resolved;
        };

        if (link->parsed()) {
            auto rb = resolve();
            if (!rb) {
                return finish(true);
            }
            std::size_t width = std::string("away-claim").size();
            for (const auto& [from, to] : rb->resolutions) {
                width = std::max(width, from.to_string().size());
            }
            out << std::left << std::setw(static_cast<int>(width + 2)) << "away-claim" << "target\n";
            for (const auto& [from, to] : rb->resolutions) {
                out << std::left << std::setw(static_cast<int>(width + 2)) << from.to_string() << to.to_string() << '\n';
            }
            return finish();
        }

        if (impact_cmd->parsed()) {
            const auto refs = detail::parse_refs(changed_items, "--changed");
            auto rb = resolve();
            if (!rb) {
                return finish(true);
            }
            ImpactReport report;
            try {
                report = impact(*rb, std::set<ElementRef>(refs.begin(), refs.end()));
            } catch (const LookupError& e) {
                throw Failure{std::string("--changed: ") + e.what()};
            }
            if (json) {
                out << report_json({std::nullopt, std::nullopt, std::nullopt, report});
            } else {
                out << "changed:";
                for (const auto& r : report.changed) {
                    out << ' ' << r.to_string();
                }
                out << '\n';
                for (const auto& [c, ids] : report.affected) {
                    out << c << ':';
                    for (const auto& id : ids) {
                        out << ' ' << id;
                    }
                    out << '\n';
                }
                out << "affected cacs:";
                for (const auto& c : report.affected_cacs) {
                    out << ' ' << c;
                }
                out << '\n';
            }
            return finish();
        }

        if (inline_cmd->parsed()) {
            auto rb = resolve();
            if (!rb) {
                return finish(true);
            }
            auto full = validate_all(rb->bundle, units);
            diags.insert(diags.end(), full.begin(), full.end());
            sort_diagnostics(diags);
            diags.erase(std::unique(diags.begin(), diags.end()), diags.end());
            if (has_errors(diags)) {
                return finish(true);
            }
            AssuranceCase mono;
            try {
                mono = inline_bundle(*rb, cac_id);
            } catch (const LookupError& e) {
                throw Failure{std::string("--cac: ") + e.what()};
            }
            detail::write_output(print_case(mono), output, out);
            return finish();
        }
    } catch (const Failure& f) {
        for (const auto& d : diags) {
            err << d.to_line() << '\n';
        }
        err << "error: " << f.message << '\n';
        return kFailure;
    }
    err << app.help();
    return kFailure;
}

} // namespace acs::cli
