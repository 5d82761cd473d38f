#pragma once

// Comparison table for the two labeling schemes: one row per
// (model variant, dataset, label scheme) with error changes relative to the
// next-k baseline of the same model and dataset.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vaep {

struct BenchmarkRow {
    std::string model;    ///< "I-VAEP" / "O-VAEP"
    std::string dataset;  ///< "Train" / "Test"
    std::string label;    ///< scheme token, e.g. "k10" / "eq1"
    double mae = 0.0;
    double medae = 0.0;
    /// Percent change versus the baseline row; empty on baseline rows.
    std::optional<double> mae_change_pct;
    std::optional<double> medae_change_pct;
};

/// Fills the change columns, using rows labeled `baseline_label` as reference.
void compute_changes(std::vector<BenchmarkRow>& rows, const std::string& baseline_label = "k10");

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows);

/// Fixed-width text table ("Up 2.5%" / "Down 5.2%" style change columns).
std::string format_benchmark_table(std::span<const BenchmarkRow> rows);

} // namespace vaep
