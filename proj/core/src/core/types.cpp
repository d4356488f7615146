#include "psc/core/types.hpp"

#include <algorithm>
#include <tuple>

namespace psc {

bool diagnostic_less(const SmellDiagnostic& a, const SmellDiagnostic& b) {
    auto key = [](const SmellDiagnostic& d) {
        return std::tie(d.start_line, d.start_col, d.rule_id, d.sample_id, d.end_line, d.end_col,
                        d.symbol, d.message);
    };
    return key(a) < key(b);
}

void sort_diagnostics(std::vector<SmellDiagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), diagnostic_less);
}

std::string_view to_string(SeverityLabel s) noexcept {
    return s == SeverityLabel::high ? "high" : "low";
}

}  // namespace psc
