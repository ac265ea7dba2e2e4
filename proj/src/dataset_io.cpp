#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mtlspca/datamodel.hpp"
#include "mtlspca/errors.hpp"

namespace mtlspca {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

int parse_id(std::string_view text, const std::string& source, long line, const char* what) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value < 1) {
        throw ParseError(source, line,
                         std::string("invalid ") + what + " id '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

TaskDataset parse_csv(std::istream& in, const std::string& source) {
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_commas(line);
    if (header.size() < 3 || header[0] != "task" || header[1] != "class") {
        throw ParseError(source, lineno, "header must be task,class,f0,...");
    }
    const int p = static_cast<int>(header.size()) - 2;
    for (int i = 0; i < p; ++i) {
        if (header[static_cast<std::size_t>(i) + 2] != "f" + std::to_string(i)) {
            throw ParseError(source, lineno, "expected column f" + std::to_string(i));
        }
    }

    struct Row {
        int task;
        int cls;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    int tasks = 0;
    int classes = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (static_cast<int>(fields.size()) != p + 2) {
            throw ParseError(source, lineno,
                             "expected " + std::to_string(p + 2) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        Row row{parse_id(fields[0], source, lineno, "task"),
                parse_id(fields[1], source, lineno, "class"), {}};
        row.values.reserve(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            try {
                row.values.push_back(parse_double(fields[static_cast<std::size_t>(i) + 2]));
            } catch (const InputError& e) {
                throw ParseError(source, lineno, e.what());
            }
            if (!std::isfinite(row.values.back())) {
                throw ParseError(source, lineno, "non-finite feature value");
            }
        }
        tasks = std::max(tasks, row.task);
        classes = std::max(classes, row.cls);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, lineno, "no samples");

    std::vector<int> counts(static_cast<std::size_t>(tasks * classes), 0);
    for (const Row& r : rows) ++counts[static_cast<std::size_t>((r.task - 1) * classes + r.cls - 1)];
    for (int t = 0; t < tasks; ++t) {
        for (int j = 0; j < classes; ++j) {
            const int c = counts[static_cast<std::size_t>(t * classes + j)];
            if (c < 2) {
                throw ParseError(source, 0,
                                 "task " + std::to_string(t + 1) + " class " +
                                     std::to_string(j + 1) + " has " + std::to_string(c) +
                                     " samples; every (task, class) needs at least 2");
            }
        }
    }
    TaskLayout layout(p, tasks, classes, counts);
    Eigen::MatrixXd samples(p, layout.total());
    std::vector<int> cursor(counts.size(), 0);
    for (const Row& r : rows) {
        const int g = layout.group(r.task - 1, r.cls - 1);
        const int col = layout.offset(g) + cursor[static_cast<std::size_t>(g)]++;
        for (int i = 0; i < p; ++i) samples(i, col) = r.values[static_cast<std::size_t>(i)];
    }
    return TaskDataset(std::move(layout), std::move(samples));
}

TaskDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_csv(in, path.string());
}

void write_csv(const TaskDataset& x, std::ostream& out) {
    const TaskLayout& layout = x.layout();
    out << "task,class";
    for (int i = 0; i < layout.dimension(); ++i) out << ",f" << i;
    out << '\n';
    for (int t = 0; t < layout.tasks(); ++t) {
        for (int j = 0; j < layout.classes(); ++j) {
            const int g = layout.group(t, j);
            for (int c = 0; c < layout.count(g); ++c) {
                out << t + 1 << ',' << j + 1;
                const auto col = x.samples().col(layout.offset(g) + c);
                for (int i = 0; i < layout.dimension(); ++i) out << ',' << format_double(col(i));
                out << '\n';
            }
        }
    }
}

void save_csv(const TaskDataset& x, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_csv(x, out);
    if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace mtlspca
