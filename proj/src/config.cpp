#include "mtlspca/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mtlspca/errors.hpp"

namespace mtlspca {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
bool parse_integer(const std::string& s, T& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ParseError(source, lineno, "empty key");
        if (cfg.entries_.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
        cfg.entries_[key] = {value, lineno};
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse(in, path.string());
}

std::vector<std::string> KeyValueConfig::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw InputError(source_ + ": missing key '" + key + "'");
    return it->second;
}

void KeyValueConfig::fail(const std::string& key, const std::string& what) const {
    throw ParseError(source_, entry(key).line, key + ": " + what);
}

std::string KeyValueConfig::get_string(const std::string& key) const { return entry(key).value; }

int KeyValueConfig::get_int(const std::string& key) const {
    int v = 0;
    if (!parse_integer(entry(key).value, v)) fail(key, "expected an integer");
    return v;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
    std::uint64_t v = 0;
    if (!parse_integer(entry(key).value, v)) fail(key, "expected a non-negative integer");
    return v;
}

double KeyValueConfig::get_double(const std::string& key) const {
    try {
        return parse_double(entry(key).value);
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& e) {
        fail(key, e.what());
    }
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key) const {
    std::vector<int> out;
    for (const auto& item : split_list(entry(key).value)) {
        int v = 0;
        if (!parse_integer(item, v)) fail(key, "expected a list of integers");
        out.push_back(v);
    }
    return out;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(entry(key).value)) {
        try {
            out.push_back(parse_double(item));
        } catch (const InputError& e) {
            fail(key, e.what());
        }
    }
    return out;
}

Eigen::VectorXd parse_sparse_vector(const std::string& text, int dimension) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension);
    for (const auto& item : split_list(text)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("sparse entry '" + item + "' lacks ':'");
        int index = 0;
        const std::string idx = trim(std::string_view(item).substr(0, colon));
        if (!parse_integer(idx, index) || index < 1 || index > dimension) {
            throw InputError("sparse index '" + idx + "' outside 1.." + std::to_string(dimension));
        }
        v(index - 1) = parse_double(std::string_view(item).substr(colon + 1));
    }
    return v;
}

SyntheticConfig synthetic_config_from(const KeyValueConfig& cfg) {
    SyntheticConfig sc;
    sc.dimension = cfg.get_int("dimension");
    sc.tasks = cfg.get_int("tasks");
    sc.classes = cfg.get_int("classes");
    if (sc.dimension < 1 || sc.tasks < 1 || sc.classes < 1) {
        throw InputError("synthetic config: dimension, tasks and classes must be positive");
    }
    const std::size_t groups = static_cast<std::size_t>(sc.tasks * sc.classes);
    sc.counts = cfg.get_ints("counts");
    if (sc.counts.size() == 1) sc.counts.assign(groups, sc.counts.front());
    sc.betas = cfg.has("betas") ? cfg.get_doubles("betas") : std::vector<double>{1.0};
    if (sc.betas.size() == 1) sc.betas.assign(static_cast<std::size_t>(sc.tasks), sc.betas.front());
    sc.base = Eigen::MatrixXd::Zero(sc.dimension, sc.classes);
    sc.perp = Eigen::MatrixXd::Zero(sc.dimension, sc.classes);
    for (int j = 0; j < sc.classes; ++j) {
        const std::string mk = "mean." + std::to_string(j + 1);
        const std::string pk = "perp." + std::to_string(j + 1);
        try {
            if (cfg.has(mk)) sc.base.col(j) = parse_sparse_vector(cfg.get_string(mk), sc.dimension);
            if (cfg.has(pk)) sc.perp.col(j) = parse_sparse_vector(cfg.get_string(pk), sc.dimension);
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw InputError(std::string("synthetic config: ") + e.what());
        }
    }
    if (cfg.has("seed")) sc.seed = cfg.get_u64("seed");
    sc.validate();
    return sc;
}

}  // namespace mtlspca
