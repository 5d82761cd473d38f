#include "vaep/benchmark.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "vaep/csv.hpp"

namespace vaep {

namespace {

double pct_change(double value, double baseline) {
    if (baseline == 0.0) return value == 0.0 ? 0.0 : std::copysign(INFINITY, value);
    return 100.0 * (value - baseline) / baseline;
}

std::string describe_change(const std::optional<double>& pct) {
    if (!pct) return "-";
    char buf[32];
    const char* dir = *pct > 0 ? "Up" : (*pct < 0 ? "Down" : "Flat");
    std::snprintf(buf, sizeof(buf), "%s %.1f%%", dir, std::abs(*pct));
    return buf;
}

} // namespace

void compute_changes(std::vector<BenchmarkRow>& rows, const std::string& baseline_label) {
    for (auto& row : rows) {
        row.mae_change_pct.reset();
        row.medae_change_pct.reset();
        if (row.label == baseline_label) continue;
        for (const auto& base : rows) {
            if (base.label == baseline_label && base.model == row.model &&
                base.dataset == row.dataset) {
                row.mae_change_pct = pct_change(row.mae, base.mae);
                row.medae_change_pct = pct_change(row.medae, base.medae);
                break;
            }
        }
    }
}

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows) {
    out << "model,dataset,label,mae,mae_change_pct,medae,medae_change_pct\n";
    for (const auto& r : rows) {
        out << r.model << ',' << r.dataset << ',' << r.label << ',' << csv::format_double(r.mae)
            << ',' << csv::format_optional(r.mae_change_pct) << ','
            << csv::format_double(r.medae) << ',' << csv::format_optional(r.medae_change_pct)
            << '\n';
    }
}

std::string format_benchmark_table(std::span<const BenchmarkRow> rows) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-8s %-8s %-6s %9s %-12s %9s %-12s\n", "Model", "Dataset",
                  "Label", "MAE", "Change %", "MedAE", "Change %");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-8s %-8s %-6s %9.5f %-12s %9.5f %-12s\n", r.model.c_str(),
                      r.dataset.c_str(), r.label.c_str(), r.mae,
                      describe_change(r.mae_change_pct).c_str(), r.medae,
                      describe_change(r.medae_change_pct).c_str());
        out += buf;
    }
    return out;
}

} // namespace vaep
