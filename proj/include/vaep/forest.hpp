#pragma once

// Bagged CART regression forest with exact split search.
//
// Splits minimise the summed squared error of the two children over every
// feature and every midpoint between consecutive distinct sorted values.
// Ties go to the lower feature index, then the lower threshold. Samples with
// x <= threshold go left.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vaep/matrix.hpp"

namespace vaep {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t min_samples_split = 50;
    bool bootstrap = true;
    /// Features considered per split; 0 means all of them.
    std::size_t max_features = 0;
    std::uint64_t seed = 0;
    /// Worker threads for training; 0 picks the hardware concurrency. The
    /// fitted forest does not depend on this value.
    std::size_t threads = 0;

    bool operator==(const ForestConfig&) const = default;
};

struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    /// Mean training target of the node.
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes);

    double predict(std::span<const double> row) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t leaf_count() const;
    std::size_t depth() const;

    bool operator==(const RegressionTree&) const = default;

private:
    std::vector<TreeNode> nodes_;
};

/// Sorted row order of every column; shared by all trees of one fit.
struct PresortedColumns {
    std::vector<std::vector<std::uint32_t>> order;

    static PresortedColumns build(const FeatureMatrix& x);
};

/// Fits one tree on `sample_rows` (row indices into `x`, duplicates allowed).
RegressionTree fit_tree(const FeatureMatrix& x, std::span<const double> y,
                        std::span<const std::uint32_t> sample_rows, const PresortedColumns& presorted,
                        std::size_t min_samples_split, std::size_t max_features,
                        std::uint64_t seed);

class RegressionForest {
public:
    /// Throws ValidationError on empty or mismatched input, non-finite
    /// values, n_trees < 1 or min_samples_split < 2.
    static RegressionForest fit(const FeatureMatrix& x, std::span<const double> y,
                                const ForestConfig& config, std::string variant = {});

    /// Throws ValidationError when `x` does not carry the training manifest.
    std::vector<double> predict(const FeatureMatrix& x) const;
    double predict_row(std::span<const double> row) const;

    const std::vector<RegressionTree>& trees() const { return trees_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::string& variant() const { return variant_; }
    const ForestConfig& config() const { return config_; }

    void save(std::ostream& out) const;
    static RegressionForest load(std::istream& in);

    bool operator==(const RegressionForest&) const = default;

private:
    std::vector<RegressionTree> trees_;
    std::vector<std::string> columns_;
    std::string variant_;
    ForestConfig config_;
};

/// Seed of tree `index` derived from the forest seed (splitmix64).
std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t index);

struct EvalReport {
    double mae = 0.0;
    double medae = 0.0;
    std::string dataset;
    std::string scheme;
};

/// Mean and median absolute error. Throws ValidationError on empty or
/// mismatched input.
EvalReport evaluate(std::span<const double> predictions, std::span<const double> labels,
                    std::string dataset = {}, std::string scheme = {});

} // namespace vaep
