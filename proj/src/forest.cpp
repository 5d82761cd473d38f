#include "vaep/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "vaep/error.hpp"
#include "vaep/stats.hpp"

namespace vaep {

namespace {

constexpr std::string_view kModelFormat = "vaep-regression-forest";
constexpr int kModelVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct SplitCandidate {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::size_t left_count = 0;
    double score = -1.0;
};

// Grows one tree over contiguous segments of per-feature sorted sample lists.
// Every node owns the same [begin, end) segment in each list; splitting a node
// stably partitions all lists so that children stay contiguous and sorted.
class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& x, std::span<const double> y,
                std::span<const std::uint32_t> sample_rows, const PresortedColumns& presorted,
                std::size_t min_samples_split, std::size_t max_features, std::uint64_t seed)
        : x_(x), min_samples_split_(min_samples_split), rng_(seed) {
        const std::size_t n = sample_rows.size();
        const std::size_t cols = x.cols();
        max_features_ = (max_features == 0 || max_features > cols) ? cols : max_features;

        // Samples are regrouped by row so that the presorted row order maps
        // directly to a sorted sample order.
        std::vector<std::uint32_t> counts(x.rows, 0);
        for (auto r : sample_rows) ++counts[r];
        std::vector<std::uint32_t> start(x.rows + 1, 0);
        for (std::size_t r = 0; r < x.rows; ++r) start[r + 1] = start[r] + counts[r];

        sample_row_.resize(n);
        target_.resize(n);
        for (std::size_t r = 0; r < x.rows; ++r) {
            for (std::uint32_t k = start[r]; k < start[r + 1]; ++k) {
                sample_row_[k] = static_cast<std::uint32_t>(r);
                target_[k] = y[r];
            }
        }

        sorted_.assign(cols, std::vector<std::uint32_t>());
        for (std::size_t f = 0; f < cols; ++f) {
            auto& list = sorted_[f];
            list.reserve(n);
            for (auto r : presorted.order[f]) {
                for (std::uint32_t k = start[r]; k < start[r + 1]; ++k) list.push_back(k);
            }
        }
        goes_left_.assign(n, 0);
        scratch_.resize(n);
        features_.resize(cols);
        std::iota(features_.begin(), features_.end(), 0u);
    }

    std::vector<TreeNode> build() {
        std::vector<TreeNode> nodes;
        const std::size_t n = sample_row_.size();
        if (n == 0) {
            nodes.push_back(TreeNode{});
            return nodes;
        }
        struct Pending {
            std::size_t node;
            std::size_t begin;
            std::size_t end;
        };
        nodes.push_back(TreeNode{});
        std::vector<Pending> stack{{0, 0, n}};
        while (!stack.empty()) {
            const Pending p = stack.back();
            stack.pop_back();
            const auto& any = sorted_[0];

            double sum = 0.0;
            double lo = target_[any[p.begin]];
            double hi = lo;
            for (std::size_t k = p.begin; k < p.end; ++k) {
                const double t = target_[any[k]];
                sum += t;
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            const std::size_t count = p.end - p.begin;
            nodes[p.node].value = (lo == hi) ? lo : sum / static_cast<double>(count);

            if (count < min_samples_split_ || lo == hi) {
                continue;
            }
            const SplitCandidate best = find_split(p.begin, p.end, sum);
            if (best.feature < 0) {
                continue;
            }
            partition(p.begin, p.end, best);

            const std::size_t mid = p.begin + best.left_count;
            const std::size_t left = nodes.size();
            nodes.push_back(TreeNode{});
            nodes.push_back(TreeNode{});
            nodes[p.node].feature = best.feature;
            nodes[p.node].threshold = best.threshold;
            nodes[p.node].left = static_cast<std::int32_t>(left);
            nodes[p.node].right = static_cast<std::int32_t>(left + 1);
            // Right child is pushed first so the left subtree is grown first.
            stack.push_back({left + 1, mid, p.end});
            stack.push_back({left, p.begin, mid});
        }
        return nodes;
    }

private:
    double feature_value(std::uint32_t sample, std::size_t f) const {
        return x_.at(sample_row_[sample], f);
    }

    SplitCandidate find_split(std::size_t begin, std::size_t end, double total) {
        const std::size_t cols = x_.cols();
        std::vector<std::uint32_t> candidates;
        if (max_features_ >= cols) {
            candidates = features_;
        } else {
            // Partial Fisher-Yates draw, then ascending order so ties still
            // resolve to the lower feature index.
            std::vector<std::uint32_t> pool = features_;
            for (std::size_t i = 0; i < max_features_; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng_() % (cols - i));
                std::swap(pool[i], pool[j]);
            }
            candidates.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(max_features_));
            std::sort(candidates.begin(), candidates.end());
        }

        SplitCandidate best;
        const std::size_t count = end - begin;
        for (auto f : candidates) {
            const auto& list = sorted_[f];
            if (feature_value(list[begin], f) == feature_value(list[end - 1], f)) {
                continue;
            }
            double left_sum = 0.0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                left_sum += target_[list[k]];
                const double v = feature_value(list[k], f);
                const double next = feature_value(list[k + 1], f);
                if (!(next > v)) {
                    continue;
                }
                const std::size_t n_left = k + 1 - begin;
                const std::size_t n_right = count - n_left;
                const double right_sum = total - left_sum;
                // Maximising this proxy minimises the children's summed SSE.
                const double score = left_sum * left_sum / static_cast<double>(n_left) +
                                     right_sum * right_sum / static_cast<double>(n_right);
                if (score > best.score) {
                    double threshold = 0.5 * (v + next);
                    if (!(threshold < next)) threshold = v;
                    best = {static_cast<std::int32_t>(f), threshold, n_left, score};
                }
            }
        }
        return best;
    }

    void partition(std::size_t begin, std::size_t end, const SplitCandidate& split) {
        const auto& chosen = sorted_[static_cast<std::size_t>(split.feature)];
        for (std::size_t k = begin; k < end; ++k) {
            goes_left_[chosen[k]] = (k < begin + split.left_count) ? 1 : 0;
        }
        for (std::size_t f = 0; f < sorted_.size(); ++f) {
            if (static_cast<std::int32_t>(f) == split.feature) continue;
            auto& list = sorted_[f];
            std::size_t l = begin;
            std::size_t r = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const auto s = list[k];
                if (goes_left_[s]) {
                    list[l++] = s;
                } else {
                    scratch_[r++] = s;
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r),
                      list.begin() + static_cast<std::ptrdiff_t>(l));
        }
    }

    const FeatureMatrix& x_;
    std::size_t min_samples_split_;
    std::size_t max_features_ = 0;
    std::mt19937_64 rng_;
    std::vector<std::uint32_t> sample_row_;
    std::vector<double> target_;
    std::vector<std::vector<std::uint32_t>> sorted_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::uint32_t> scratch_;
    std::vector<std::uint32_t> features_;
};

void check_finite(const FeatureMatrix& x, std::span<const double> y) {
    for (double v : x.values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw ValidationError("non-finite label value");
    }
}

} // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
        throw ValidationError("a tree needs at least one node");
    }
    const auto n = static_cast<std::int32_t>(nodes_.size());
    for (const auto& node : nodes_) {
        if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n)) {
            throw ValidationError("tree node references a child outside the tree");
        }
    }
}

double RegressionTree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                         ? node.left
                                         : node.right);
    }
    return nodes_[i].value;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

PresortedColumns PresortedColumns::build(const FeatureMatrix& x) {
    PresortedColumns p;
    p.order.resize(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& order = p.order[f];
        order.resize(x.rows);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return x.at(a, f) < x.at(b, f);
        });
    }
    return p;
}

RegressionTree fit_tree(const FeatureMatrix& x, std::span<const double> y,
                        std::span<const std::uint32_t> sample_rows, const PresortedColumns& presorted,
                        std::size_t min_samples_split, std::size_t max_features,
                        std::uint64_t seed) {
    TreeBuilder builder(x, y, sample_rows, presorted, min_samples_split, max_features, seed);
    return RegressionTree(builder.build());
}

std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t index) {
    return splitmix64(splitmix64(forest_seed) + static_cast<std::uint64_t>(index));
}

RegressionForest RegressionForest::fit(const FeatureMatrix& x, std::span<const double> y,
                                       const ForestConfig& config, std::string variant) {
    if (x.rows == 0 || y.empty()) {
        throw ValidationError("cannot fit a forest on an empty dataset");
    }
    if (x.rows != y.size()) {
        throw ValidationError("feature rows and label count differ");
    }
    if (x.rows > std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("dataset too large");
    }
    if (config.n_trees < 1) {
        throw ValidationError("n_trees must be at least 1");
    }
    if (config.min_samples_split < 2) {
        throw ValidationError("min_samples_split must be at least 2");
    }
    check_finite(x, y);

    const PresortedColumns presorted = PresortedColumns::build(x);
    const std::size_t n = x.rows;

    RegressionForest forest;
    forest.columns_ = x.columns;
    forest.variant_ = std::move(variant);
    forest.config_ = config;
    forest.trees_.resize(config.n_trees);

    auto grow = [&](std::size_t t) {
        const std::uint64_t seed = tree_seed(config.seed, t);
        std::mt19937_64 rng(seed);
        std::vector<std::uint32_t> rows(n);
        if (config.bootstrap) {
            for (auto& r : rows) r = static_cast<std::uint32_t>(rng() % n);
        } else {
            std::iota(rows.begin(), rows.end(), 0u);
        }
        forest.trees_[t] = fit_tree(x, y, rows, presorted, config.min_samples_split,
                                    config.max_features, rng());
    };

    std::size_t workers = config.threads ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, config.n_trees);
    if (workers == 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) grow(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < config.n_trees; t = next++) grow(t);
            });
        }
    }
    return forest;
}

double RegressionForest::predict_row(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(row);
    return sum / static_cast<double>(trees_.size());
}

std::vector<double> RegressionForest::predict(const FeatureMatrix& x) const {
    if (x.columns != columns_) {
        throw ValidationError("feature manifest does not match the training manifest");
    }
    std::vector<double> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
}

void RegressionForest::save(std::ostream& out) const {
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["manifest"] = {{"variant", variant_}, {"columns", columns_}};
    j["config"] = {{"n_trees", config_.n_trees},
                   {"min_samples_split", config_.min_samples_split},
                   {"bootstrap", config_.bootstrap},
                   {"max_features", config_.max_features},
                   {"seed", config_.seed}};
    auto trees = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) {
        std::vector<std::int32_t> feature, left, right;
        std::vector<double> threshold, value;
        for (const auto& node : tree.nodes()) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            value.push_back(node.value);
        }
        trees.push_back({{"feature", feature},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"value", value}});
    }
    j["trees"] = std::move(trees);
    out << j.dump() << '\n';
}

RegressionForest RegressionForest::load(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw SchemaError(std::string("model file is not valid JSON: ") + err.what());
    }
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw SchemaError("not a regression forest model file");
        }
        if (j.at("version").get<int>() != kModelVersion) {
            throw SchemaError("unsupported model version " + std::to_string(j.at("version").get<int>()));
        }
        RegressionForest forest;
        forest.variant_ = j.at("manifest").at("variant").get<std::string>();
        forest.columns_ = j.at("manifest").at("columns").get<std::vector<std::string>>();
        const auto& c = j.at("config");
        forest.config_.n_trees = c.at("n_trees").get<std::size_t>();
        forest.config_.min_samples_split = c.at("min_samples_split").get<std::size_t>();
        forest.config_.bootstrap = c.at("bootstrap").get<bool>();
        forest.config_.max_features = c.at("max_features").get<std::size_t>();
        forest.config_.seed = c.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees")) {
            const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
            const auto threshold = t.at("threshold").get<std::vector<double>>();
            const auto left = t.at("left").get<std::vector<std::int32_t>>();
            const auto right = t.at("right").get<std::vector<std::int32_t>>();
            const auto value = t.at("value").get<std::vector<double>>();
            const std::size_t n = feature.size();
            if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
                throw SchemaError("tree arrays have inconsistent lengths");
            }
            std::vector<TreeNode> nodes(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (feature[i] >= static_cast<std::int32_t>(forest.columns_.size())) {
                    throw SchemaError("tree node references an unknown feature");
                }
                nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
            }
            forest.trees_.emplace_back(std::move(nodes));
        }
        if (forest.trees_.empty()) {
            throw SchemaError("model file contains no trees");
        }
        return forest;
    } catch (const nlohmann::json::exception& err) {
        throw SchemaError(std::string("malformed model file: ") + err.what());
    }
}

EvalReport evaluate(std::span<const double> predictions, std::span<const double> labels,
                    std::string dataset, std::string scheme) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw ValidationError("evaluate needs equal-length, non-empty inputs");
    }
    std::vector<double> abs_err(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        abs_err[i] = std::abs(predictions[i] - labels[i]);
    }
    EvalReport report;
    report.mae = stats::mean(abs_err);
    report.medae = stats::median(abs_err);
    report.dataset = std::move(dataset);
    report.scheme = std::move(scheme);
    return report;
}

} // namespace vaep
