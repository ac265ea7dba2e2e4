#include <numeric>
#include <string>

#include "mtlspca/datamodel.hpp"
#include "mtlspca/errors.hpp"

namespace mtlspca {

TaskLayout::TaskLayout(int dimension, int tasks, int classes, std::vector<int> counts)
    : dimension_(dimension), tasks_(tasks), classes_(classes), counts_(std::move(counts)) {
    if (dimension_ < 1) throw InputError("layout: dimension must be positive");
    if (tasks_ < 1 || classes_ < 1) throw InputError("layout: need at least one task and class");
    if (counts_.size() != static_cast<std::size_t>(tasks_ * classes_)) {
        throw InputError("layout: expected " + std::to_string(tasks_ * classes_) +
                         " counts, got " + std::to_string(counts_.size()));
    }
    offsets_.resize(counts_.size());
    total_ = 0;
    for (std::size_t g = 0; g < counts_.size(); ++g) {
        if (counts_[g] < 2) {
            throw InputError("layout: group " + std::to_string(g) + " has " +
                             std::to_string(counts_[g]) + " samples; at least 2 required");
        }
        offsets_[g] = total_;
        total_ += counts_[g];
    }
}

int TaskLayout::task_total(int task) const {
    int total = 0;
    for (int j = 0; j < classes_; ++j) total += count(task, j);
    return total;
}

void TaskLayout::check_task(int task) const {
    if (task < 0 || task >= tasks_) {
        throw InputError("task index " + std::to_string(task) + " out of range [0, " +
                         std::to_string(tasks_) + ")");
    }
}

void TaskLayout::check_class(int cls) const {
    if (cls < 0 || cls >= classes_) {
        throw InputError("class index " + std::to_string(cls) + " out of range [0, " +
                         std::to_string(classes_) + ")");
    }
}

}  // namespace mtlspca
