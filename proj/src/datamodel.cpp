#include "mtlspca/datamodel.hpp"

#include <cmath>
#include <string>

#include "mtlspca/errors.hpp"
#include "mtlspca/random.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TaskDataset::TaskDataset(TaskLayout layout, MatrixXd samples)
    : layout_(std::move(layout)), samples_(std::move(samples)) {
    if (samples_.rows() != layout_.dimension()) {
        throw InputError("dataset: sample dimension " + std::to_string(samples_.rows()) +
                         " does not match layout dimension " +
                         std::to_string(layout_.dimension()));
    }
    if (samples_.cols() != layout_.total()) {
        throw InputError("dataset: " + std::to_string(samples_.cols()) +
                         " columns but layout counts sum to " + std::to_string(layout_.total()));
    }
    if (!samples_.allFinite()) throw InputError("dataset: non-finite sample values");
}

TaskDataset TaskDataset::task_subset(int task) const {
    layout_.check_task(task);
    std::vector<int> counts;
    for (int j = 0; j < layout_.classes(); ++j) counts.push_back(layout_.count(task, j));
    TaskLayout sub(layout_.dimension(), 1, layout_.classes(), std::move(counts));
    return TaskDataset(std::move(sub), MatrixXd(task_block(task)));
}

TaskDataset TaskDataset::leading_tasks(int tasks) const {
    if (tasks < 1 || tasks > layout_.tasks()) throw InputError("leading_tasks: bad task count");
    std::vector<int> counts(layout_.counts().begin(),
                            layout_.counts().begin() + tasks * layout_.classes());
    TaskLayout sub(layout_.dimension(), tasks, layout_.classes(), std::move(counts));
    const int cols = sub.total();
    return TaskDataset(std::move(sub), MatrixXd(samples_.leftCols(cols)));
}

void MixtureSpec::validate() const {
    if (means.rows() != layout.dimension() || means.cols() != layout.groups()) {
        throw InputError("mixture: means must be p x (k*m)");
    }
    if (!means.allFinite()) throw InputError("mixture: non-finite means");
}

void SyntheticConfig::validate() const {
    // Builds the layout for its validation side effect.
    TaskLayout layout(dimension, tasks, classes, counts);
    if (base.rows() != dimension || base.cols() != classes || perp.rows() != dimension ||
        perp.cols() != classes) {
        throw InputError("synthetic config: base and perp means must be p x m");
    }
    if (betas.size() != static_cast<std::size_t>(tasks)) {
        throw InputError("synthetic config: need one beta per task");
    }
    for (double b : betas) {
        if (!(b >= 0.0 && b <= 1.0)) throw InputError("synthetic config: beta must lie in [0, 1]");
    }
    for (int j = 0; j < classes; ++j) {
        const double dot = base.col(j).dot(perp.col(j));
        if (std::abs(dot) > 1e-10) {
            throw InputError("synthetic config: perp mean of class " + std::to_string(j + 1) +
                             " is not orthogonal to its base mean");
        }
    }
}

MixtureSpec SyntheticConfig::mixture() const {
    validate();
    MixtureSpec spec{TaskLayout(dimension, tasks, classes, counts),
                     MatrixXd(dimension, tasks * classes)};
    for (int t = 0; t < tasks; ++t) {
        const double b = betas[static_cast<std::size_t>(t)];
        const double s = std::sqrt(std::max(0.0, 1.0 - b * b));
        for (int j = 0; j < classes; ++j) {
            // beta = 1 gives base_j exactly, so fully related tasks share identical means.
            spec.means.col(t * classes + j) = b == 1.0 ? VectorXd(base.col(j))
                                                       : VectorXd(b * base.col(j) + s * perp.col(j));
        }
    }
    return spec;
}

namespace {

void fill_group(Eigen::Ref<MatrixXd> block, const VectorXd& mean, std::uint64_t seed) {
    Rng rng(seed);
    rng.fill_normal(block);
    block.colwise() += mean;
}

}  // namespace

TaskDataset synth_gaussian(const MixtureSpec& spec, std::uint64_t seed) {
    spec.validate();
    const TaskLayout& layout = spec.layout;
    MatrixXd samples(layout.dimension(), layout.total());
    for (int g = 0; g < layout.groups(); ++g) {
        fill_group(samples.middleCols(layout.offset(g), layout.count(g)), spec.means.col(g),
                   derive_seed(seed, static_cast<std::uint64_t>(g)));
    }
    return TaskDataset(layout, std::move(samples));
}

TaskDataset synth_task_samples(const MixtureSpec& spec, int task, int per_class,
                               std::uint64_t seed) {
    spec.validate();
    spec.layout.check_task(task);
    const int m = spec.layout.classes();
    TaskLayout layout(spec.layout.dimension(), 1, m, std::vector<int>(m, per_class));
    MatrixXd samples(layout.dimension(), layout.total());
    const std::uint64_t base = derive_seed(seed, 0x7e57ULL);
    for (int j = 0; j < m; ++j) {
        const int g = spec.layout.group(task, j);
        fill_group(samples.middleCols(layout.offset(j), per_class), spec.means.col(g),
                   derive_seed(base, static_cast<std::uint64_t>(g)));
    }
    return TaskDataset(std::move(layout), std::move(samples));
}

VectorXd AffineMap::apply(const VectorXd& x) const {
    if (x.size() != center.size()) throw InputError("affine map: dimension mismatch");
    return (x - center).cwiseQuotient(scale);
}

MatrixXd AffineMap::apply_columns(const MatrixXd& x) const {
    if (x.rows() != center.size()) throw InputError("affine map: dimension mismatch");
    MatrixXd out = x.colwise() - center;
    out.array().colwise() /= scale.array();
    return out;
}

ZScoreResult zscore_per_task(const TaskDataset& x) {
    const TaskLayout& layout = x.layout();
    MatrixXd out = x.samples();
    ZScoreResult result;
    for (int t = 0; t < layout.tasks(); ++t) {
        auto block = out.middleCols(layout.task_offset(t), layout.task_total(t));
        const double count = static_cast<double>(block.cols());
        AffineMap map;
        map.center = block.rowwise().sum() / count;
        block.colwise() -= map.center;
        map.scale = (block.array().square().rowwise().sum() / count).sqrt().matrix();
        for (Eigen::Index i = 0; i < map.scale.size(); ++i) {
            if (!(map.scale(i) > 1e-12 * (1.0 + std::abs(map.center(i))))) {
                map.scale(i) = 1.0;
                block.row(i).setZero();
                result.constant_features.emplace_back(t, static_cast<int>(i));
            }
        }
        block.array().colwise() /= map.scale.array();
        result.maps.push_back(std::move(map));
    }
    result.data = TaskDataset(layout, std::move(out));
    return result;
}

MatrixXd expand_labels(const TaskLayout& layout, const MatrixXd& ytilde) {
    if (ytilde.rows() != layout.groups()) {
        throw InputError("expand_labels: label matrix has " + std::to_string(ytilde.rows()) +
                         " rows, layout has " + std::to_string(layout.groups()) + " groups");
    }
    MatrixXd y(layout.total(), ytilde.cols());
    for (int g = 0; g < layout.groups(); ++g) {
        y.middleRows(layout.offset(g), layout.count(g)).rowwise() = ytilde.row(g);
    }
    return y;
}

TaskDataset one_vs_all_view(const TaskDataset& x, int cls) {
    const TaskLayout& layout = x.layout();
    if (layout.classes() < 2) throw InputError("one_vs_all_view: need at least two classes");
    layout.check_class(cls);
    std::vector<int> counts;
    MatrixXd samples(layout.dimension(), layout.total());
    Eigen::Index col = 0;
    for (int t = 0; t < layout.tasks(); ++t) {
        const int g = layout.group(t, cls);
        samples.middleCols(col, layout.count(g)) = x.group_block(g);
        col += layout.count(g);
        int rest = 0;
        for (int j = 0; j < layout.classes(); ++j) {
            if (j == cls) continue;
            const int h = layout.group(t, j);
            samples.middleCols(col, layout.count(h)) = x.group_block(h);
            col += layout.count(h);
            rest += layout.count(h);
        }
        counts.push_back(layout.count(g));
        counts.push_back(rest);
    }
    return TaskDataset(TaskLayout(layout.dimension(), layout.tasks(), 2, std::move(counts)),
                       std::move(samples));
}

}  // namespace mtlspca
