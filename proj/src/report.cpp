#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mtlspca/errors.hpp"
#include "mtlspca/harness.hpp"

namespace mtlspca {

namespace {

constexpr const char* kColumns = "sweep_value,method,theory_error,empirical_error,stderr,seconds";

bool in_unit_interval(double v) { return std::isnan(v) || (v >= 0.0 && v <= 1.0); }

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> ExperimentReport::methods() const {
    std::vector<std::string> out;
    for (const ReportRow& r : rows)
        if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
    return out;
}

std::vector<ReportRow> ExperimentReport::curve(const std::string& method) const {
    std::vector<ReportRow> out;
    for (const ReportRow& r : rows)
        if (r.method == method) out.push_back(r);
    return out;
}

const ReportRow& ExperimentReport::at(const std::string& method, double sweep_value) const {
    for (const ReportRow& r : rows)
        if (r.method == method && r.sweep_value == sweep_value) return r;
    throw InputError("report has no row for " + method + " at " + format_double(sweep_value));
}

std::string ExperimentReport::meta(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return {};
}

void ExperimentReport::validate() const {
    for (const std::string& m : methods()) {
        const auto c = curve(m);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!in_unit_interval(c[i].theory_error) || !in_unit_interval(c[i].empirical_error)) {
                throw InputError("report: error rate outside [0, 1] for " + m);
            }
            if (i > 0 && !(c[i].sweep_value > c[i - 1].sweep_value)) {
                throw InputError("report: grid of " + m + " is not strictly increasing");
            }
        }
    }
}

void write_report(const ExperimentReport& report, std::ostream& out) {
    out << "# experiment: " << report.experiment << '\n';
    out << "# sweep: " << report.sweep_variable << '\n';
    for (const auto& [k, v] : report.metadata) out << "# " << k << ": " << v << '\n';
    out << kColumns << '\n';
    for (const ReportRow& r : report.rows) {
        out << format_double(r.sweep_value) << ',' << r.method << ',' << format_double(r.theory_error)
            << ',' << format_double(r.empirical_error) << ',' << format_double(r.std_error) << ','
            << format_double(r.seconds) << '\n';
    }
}

ExperimentReport parse_report(std::istream& in, const std::string& source) {
    ExperimentReport report;
    std::string line;
    long lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (header) throw ParseError(source, lineno, "metadata after the column header");
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw ParseError(source, lineno, "metadata needs 'key: value'");
            const std::string key = trim(line.substr(1, colon - 1));
            const std::string value = trim(line.substr(colon + 1));
            if (key == "experiment") {
                report.experiment = value;
            } else if (key == "sweep") {
                report.sweep_variable = value;
            } else {
                report.metadata.emplace_back(key, value);
            }
            continue;
        }
        if (!header) {
            if (line != kColumns) throw ParseError(source, lineno, std::string("expected header ") + kColumns);
            header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 6) throw ParseError(source, lineno, "expected 6 fields");
        ReportRow r;
        try {
            r.sweep_value = parse_double(fields[0]);
            r.method = fields[1];
            r.theory_error = parse_double(fields[2]);
            r.empirical_error = parse_double(fields[3]);
            r.std_error = parse_double(fields[4]);
            r.seconds = parse_double(fields[5]);
        } catch (const InputError& e) {
            throw ParseError(source, lineno, e.what());
        }
        report.rows.push_back(std::move(r));
    }
    if (!header) throw ParseError(source, lineno, "missing column header");
    return report;
}

void save_report(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_report(report, out);
    if (!out) throw InputError("write failed for " + path.string());
}

ExperimentReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    return parse_report(in, path.string());
}

}  // namespace mtlspca
