#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtlspca/classify.hpp"
#include "mtlspca/errors.hpp"

namespace mtlspca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr const char* kHeader = "mtlspca-model";
constexpr int kVersion = 1;

void put_vector(std::ostream& out, const char* key, const VectorXd& v) {
    out << key << ' ' << v.size();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v(i));
    out << '\n';
}

void put_matrix(std::ostream& out, const char* key, const MatrixXd& a) {
    out << "matrix " << key << ' ' << a.rows() << ' ' << a.cols() << '\n';
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (c) out << ' ';
            out << format_double(a(r, c));
        }
        out << '\n';
    }
}

class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next non-empty line split on whitespace; the first token must equal `key`.
    std::vector<std::string> expect(const std::string& key) {
        std::vector<std::string> tokens = next();
        if (tokens.empty() || tokens.front() != key) fail("expected '" + key + "'");
        return tokens;
    }

    std::vector<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            last_ = line;
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return tokens;
        }
        fail("unexpected end of file");
    }

    const std::string& last_line() const { return last_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, lineno_, what); }

    double number(const std::string& text) {
        try {
            return parse_double(text);
        } catch (const InputError& e) {
            fail(e.what());
        }
    }

    long integer(const std::string& text) {
        try {
            std::size_t used = 0;
            const long v = std::stol(text, &used);
            if (used != text.size()) fail("not an integer: '" + text + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("not an integer: '" + text + "'");
        }
    }

    void arity(const std::vector<std::string>& tokens, std::size_t n) {
        if (tokens.size() != n) fail("wrong number of fields");
    }

    VectorXd vector(const std::string& key) {
        const auto tokens = expect(key);
        if (tokens.size() < 2) fail("missing length");
        const long n = integer(tokens[1]);
        if (n < 0) fail("negative length");
        arity(tokens, static_cast<std::size_t>(n) + 2);
        VectorXd v(n);
        for (long i = 0; i < n; ++i) v(i) = number(tokens[static_cast<std::size_t>(i) + 2]);
        return v;
    }

    MatrixXd matrix(const std::string& key) {
        const auto tokens = expect("matrix");
        arity(tokens, 4);
        if (tokens[1] != key) fail("expected matrix '" + key + "'");
        const long rows = integer(tokens[2]);
        const long cols = integer(tokens[3]);
        if (rows < 0 || cols < 0) fail("negative matrix size");
        MatrixXd a(rows, cols);
        for (long r = 0; r < rows; ++r) {
            const auto row = next();
            arity(row, static_cast<std::size_t>(cols));
            for (long c = 0; c < cols; ++c) a(r, c) = number(row[static_cast<std::size_t>(c)]);
        }
        return a;
    }

private:
    std::istream& in_;
    std::string source_;
    long lineno_ = 0;
    std::string last_;
};

}  // namespace

void write_model(const FittedModel& model, std::ostream& out) {
    const TaskLayout& layout = model.layout;
    out << kHeader << ' ' << kVersion << '\n';
    out << "method " << method_name(model.method) << '\n';
    out << "layout " << layout.dimension() << ' ' << layout.tasks() << ' ' << layout.classes();
    for (int n : layout.counts()) out << ' ' << n;
    out << '\n';
    out << "target " << model.target << '\n';
    out << "threshold " << format_double(model.threshold) << '\n';
    out << "predicted_error " << format_double(model.predicted_error) << '\n';
    out << "input_map " << (model.input_map ? 1 : 0) << '\n';
    if (model.input_map) {
        put_vector(out, "center", model.input_map->center);
        put_vector(out, "scale", model.input_map->scale);
    }
    put_matrix(out, "basis", model.basis);
    put_matrix(out, "centroids", model.centroids);
    put_matrix(out, "empirical_centroids", model.empirical_centroids);
    out << "heads " << model.heads.size() << '\n';
    for (const ScoreHead& h : model.heads) {
        out << "head " << format_double(h.normalizer) << ' ' << format_double(h.mean_target) << ' '
            << format_double(h.mean_rest) << '\n';
        put_vector(out, "labels", h.labels);
    }
    out << "stats " << model.stats.size() << '\n';
    for (const SufficientStats& s : model.stats) {
        out << "stat " << s.tasks << ' ' << s.classes << ' ' << format_double(s.c0) << ' '
            << format_double(s.clipped_mass) << '\n';
        put_vector(out, "proportions", s.proportions);
        put_matrix(out, "gram", s.gram);
        put_matrix(out, "calM", s.calM);
    }
    out << "warnings " << model.warnings.size() << '\n';
    for (const std::string& w : model.warnings) out << "warning " << w << '\n';
    out << "end\n";
}

FittedModel read_model(std::istream& in, const std::string& source) {
    Reader r(in, source);
    FittedModel model;

    auto head = r.expect(kHeader);
    r.arity(head, 2);
    if (r.integer(head[1]) != kVersion) r.fail("unsupported model version " + head[1]);

    auto t = r.expect("method");
    r.arity(t, 2);
    try {
        model.method = parse_method(t[1]);
    } catch (const InputError& e) {
        r.fail(e.what());
    }

    t = r.expect("layout");
    if (t.size() < 4) r.fail("layout needs dimension, tasks and classes");
    const int p = static_cast<int>(r.integer(t[1]));
    const int k = static_cast<int>(r.integer(t[2]));
    const int m = static_cast<int>(r.integer(t[3]));
    std::vector<int> counts;
    for (std::size_t i = 4; i < t.size(); ++i) counts.push_back(static_cast<int>(r.integer(t[i])));
    try {
        model.layout = TaskLayout(p, k, m, counts);
    } catch (const InputError& e) {
        r.fail(e.what());
    }

    t = r.expect("target");
    r.arity(t, 2);
    model.target = static_cast<int>(r.integer(t[1]));
    if (model.target < 0 || model.target >= k) r.fail("target task out of range");
    t = r.expect("threshold");
    r.arity(t, 2);
    model.threshold = r.number(t[1]);
    t = r.expect("predicted_error");
    r.arity(t, 2);
    model.predicted_error = r.number(t[1]);

    t = r.expect("input_map");
    r.arity(t, 2);
    if (r.integer(t[1]) != 0) {
        AffineMap map;
        map.center = r.vector("center");
        map.scale = r.vector("scale");
        if (map.center.size() != p || map.scale.size() != p) r.fail("input map has the wrong dimension");
        model.input_map = std::move(map);
    }

    model.basis = r.matrix("basis");
    if (model.basis.rows() != p) r.fail("basis has the wrong dimension");
    model.centroids = r.matrix("centroids");
    model.empirical_centroids = r.matrix("empirical_centroids");

    t = r.expect("heads");
    r.arity(t, 2);
    const long nheads = r.integer(t[1]);
    for (long i = 0; i < nheads; ++i) {
        auto h = r.expect("head");
        r.arity(h, 4);
        ScoreHead sh;
        sh.normalizer = r.number(h[1]);
        sh.mean_target = r.number(h[2]);
        sh.mean_rest = r.number(h[3]);
        sh.labels = r.vector("labels");
        model.heads.push_back(std::move(sh));
    }

    t = r.expect("stats");
    r.arity(t, 2);
    const long nstats = r.integer(t[1]);
    for (long i = 0; i < nstats; ++i) {
        auto s = r.expect("stat");
        r.arity(s, 5);
        SufficientStats st;
        st.tasks = static_cast<int>(r.integer(s[1]));
        st.classes = static_cast<int>(r.integer(s[2]));
        st.c0 = r.number(s[3]);
        st.clipped_mass = r.number(s[4]);
        st.proportions = r.vector("proportions");
        st.gram = r.matrix("gram");
        st.calM = r.matrix("calM");
        model.stats.push_back(std::move(st));
    }

    t = r.expect("warnings");
    r.arity(t, 2);
    const long nwarn = r.integer(t[1]);
    for (long i = 0; i < nwarn; ++i) {
        r.expect("warning");
        const std::string& line = r.last_line();
        const auto pos = line.find("warning");
        std::string text = line.substr(pos + 7);
        if (!text.empty() && text.front() == ' ') text.erase(0, 1);
        model.warnings.push_back(text);
    }
    r.expect("end");

    const bool linear = model.method != Method::pca;
    if (linear && static_cast<long>(model.basis.cols()) != nheads) {
        r.fail("one basis column per head required");
    }
    if (model.method == Method::pca && model.centroids.cols() != model.basis.cols()) {
        r.fail("centroid width differs from basis width");
    }
    return model;
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_model(model, out);
    if (!out) throw InputError("write failed for " + path.string());
}

FittedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    return read_model(in, path.string());
}

}  // namespace mtlspca
