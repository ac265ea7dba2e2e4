#pragma once

// Multi-task datasets: the (task x class) layout, sample storage, synthetic
// Gaussian mixtures, per-task standardisation and label expansion.
//
// Indices are 0-based throughout the C++ API. Tasks and classes are 1-based
// only in files and on the command line.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mtlspca {

// k tasks, each an m-class problem, in dimension p. Groups (task, class) are
// numbered task-major: group(t, j) = t * m + j.
class TaskLayout {
public:
    TaskLayout() = default;
    // `counts` has k*m entries in group order; every entry must be >= 2.
    TaskLayout(int dimension, int tasks, int classes, std::vector<int> counts);

    int dimension() const { return dimension_; }
    int tasks() const { return tasks_; }
    int classes() const { return classes_; }
    int groups() const { return tasks_ * classes_; }
    int total() const { return total_; }

    int group(int task, int cls) const { return task * classes_ + cls; }
    int count(int group) const { return counts_[static_cast<std::size_t>(group)]; }
    int count(int task, int cls) const { return count(group(task, cls)); }
    // First sample column of a group / of a task.
    int offset(int group) const { return offsets_[static_cast<std::size_t>(group)]; }
    int task_offset(int task) const { return offset(group(task, 0)); }
    int task_total(int task) const;
    const std::vector<int>& counts() const { return counts_; }

    void check_task(int task) const;
    void check_class(int cls) const;

    bool operator==(const TaskLayout& other) const {
        return dimension_ == other.dimension_ && tasks_ == other.tasks_ &&
               classes_ == other.classes_ && counts_ == other.counts_;
    }

private:
    int dimension_ = 0;
    int tasks_ = 0;
    int classes_ = 0;
    int total_ = 0;
    std::vector<int> counts_;
    std::vector<int> offsets_;
};

// p x n samples stored group-contiguously in task-major, class-minor order,
// so the expansion y = J ytilde is pure index arithmetic.
class TaskDataset {
public:
    TaskDataset() = default;
    TaskDataset(TaskLayout layout, Eigen::MatrixXd samples);

    const TaskLayout& layout() const { return layout_; }
    const Eigen::MatrixXd& samples() const { return samples_; }

    auto group_block(int group) const {
        return samples_.middleCols(layout_.offset(group), layout_.count(group));
    }
    auto task_block(int task) const {
        return samples_.middleCols(layout_.task_offset(task), layout_.task_total(task));
    }

    // Dataset restricted to one task (layout with k = 1).
    TaskDataset task_subset(int task) const;
    // Dataset restricted to the first `tasks` tasks.
    TaskDataset leading_tasks(int tasks) const;

private:
    TaskLayout layout_;
    Eigen::MatrixXd samples_;
};

// Ground truth for synthetic data: x ~ N(mu_tj, I_p).
struct MixtureSpec {
    TaskLayout layout;
    Eigen::MatrixXd means;  // p x (k*m), column g is the mean of group g

    void validate() const;
};

// Per-task relatedness family: mu_tj = beta_t * base_j + sqrt(1 - beta_t^2) * perp_j.
struct SyntheticConfig {
    int dimension = 0;
    int tasks = 0;
    int classes = 0;
    std::vector<int> counts;
    Eigen::MatrixXd base;  // p x m
    Eigen::MatrixXd perp;  // p x m, perp_j orthogonal to base_j
    std::vector<double> betas;
    std::optional<std::uint64_t> seed;

    void validate() const;
    MixtureSpec mixture() const;
};

// Column (t, j, l) is drawn from the sub-stream derive_seed(seed, group), so a
// group's samples do not depend on how many other groups exist.
TaskDataset synth_gaussian(const MixtureSpec& spec, std::uint64_t seed);

// Fresh samples for one task: `per_class` draws from each class of `task`,
// returned as a one-task dataset.
TaskDataset synth_task_samples(const MixtureSpec& spec, int task, int per_class,
                               std::uint64_t seed);

// x -> (x - center) ./ scale
struct AffineMap {
    Eigen::VectorXd center;
    Eigen::VectorXd scale;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& x) const;
};

struct ZScoreResult {
    TaskDataset data;
    std::vector<AffineMap> maps;  // one per task
    // (task, feature) pairs whose standard deviation was zero; those rows are
    // centred but not scaled.
    std::vector<std::pair<int, int>> constant_features;
    bool warning() const { return !constant_features.empty(); }
};

// Standardise every feature within each task (mean 0, population variance 1
// over that task's columns).
ZScoreResult zscore_per_task(const TaskDataset& x);

// y = J ytilde: per-sample label rows (n x r) from per-group rows (k*m x r).
Eigen::MatrixXd expand_labels(const TaskLayout& layout, const Eigen::MatrixXd& ytilde);

// Binary regrouping for one-versus-all: within every task, class `cls` becomes
// class 0 and the other m-1 classes, concatenated in order, become class 1.
TaskDataset one_vs_all_view(const TaskDataset& x, int cls);

// CSV: header `task,class,f0,...,f{p-1}`, one sample per row, 1-based ids.
// Rows may appear in any order; they are regrouped on load.
TaskDataset load_csv(const std::filesystem::path& path);
TaskDataset parse_csv(std::istream& in, const std::string& source);
void save_csv(const TaskDataset& x, const std::filesystem::path& path);
void write_csv(const TaskDataset& x, std::ostream& out);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace mtlspca
