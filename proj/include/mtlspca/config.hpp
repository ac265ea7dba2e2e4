#pragma once

// Key-value configuration files:
//
//   # comment
//   dimension = 100
//   counts    = 1000, 1000, 50, 50
//
// Keys are case-sensitive; a key may appear once.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtlspca/datamodel.hpp"

namespace mtlspca {

class KeyValueConfig {
public:
    static KeyValueConfig load(const std::filesystem::path& path);
    static KeyValueConfig parse(std::istream& in, const std::string& source);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::vector<std::string> keys() const;

    std::string get_string(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    int get_int(const std::string& key, int fallback) const {
        return has(key) ? get_int(key) : fallback;
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

private:
    struct Entry {
        std::string value;
        long line;
    };
    const Entry& entry(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
};

// Synthetic mixture keys:
//   dimension, tasks, classes   integers
//   counts                      k*m integers in task-major order, or one value for all
//   betas                       k values in [0, 1], or one value for all
//   mean.<j>, perp.<j>          sparse vectors "index:value, ..." with 1-based
//                               feature indices, one pair of keys per class j
//   seed                        optional
SyntheticConfig synthetic_config_from(const KeyValueConfig& cfg);

// Parse "3:1.5, 10:-2" into a dense p-vector.
Eigen::VectorXd parse_sparse_vector(const std::string& text, int dimension);

}  // namespace mtlspca
