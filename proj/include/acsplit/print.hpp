#pragma once

#include "acsplit/model.hpp"

#include <sstream>
#include <string>

namespace acs {

/// Pretty-prints a case as DSL text in the layout `fmt` produces: header,
/// association, capabilities, elements, edges, each group in model order and
/// separated by a blank line. The output reparses to a canonically equal case.
inline std::string print_case(const AssuranceCase& ac)
{
    std::ostringstream os;
    os << "case " << ac.id << " kind " << keyword(ac.kind) << " {\n";
    bool group_open = false;
    auto begin_group = [&] {
        if (group_open) {
            os << '\n';
        }
        group_open = true;
    };

    if (ac.associated_tac || !ac.capabilities.empty()) {
        begin_group();
        if (ac.associated_tac) {
            os << "  associates " << *ac.associated_tac << '\n';
        }
        for (const auto& c : ac.capabilities) {
            os << "  " << (c.direction == Direction::Provided ? "provides" : "requires") << " capability " << c.name
               << " unit " << c.unit << " range [" << c.low.to_string() << ", " << c.high.to_string() << "]\n";
        }
    }
    if (!ac.elements.empty()) {
        begin_group();
        for (const auto& e : ac.elements) {
            os << "  " << keyword(e.kind) << ' ' << e.id << ' ' << quote(e.statement);
            if (auto flags = flag_text(e); !flags.empty()) {
                os << ' ' << flags;
            }
            os << '\n';
        }
    }
    if (!ac.edges.empty()) {
        begin_group();
        for (const auto& e : ac.edges) {
            os << "  " << e.source << ' ' << keyword(e.kind) << ' ' << e.target << '\n';
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace acs
