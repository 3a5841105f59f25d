#include "divprune/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "divprune/errors.hpp"
#include "divprune/rng.hpp"

namespace divprune {

void Dataset::validate() const {
    if (n_features == 0 && !labels.empty())
        throw DataError("dataset '" + name + "' has no feature columns");
    if (features.size() != labels.size() * n_features)
        throw DataError("dataset '" + name + "' feature matrix is not rectangular");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw DataError("dataset '" + name + "' label at row " + std::to_string(i) +
                            " is not -1/+1");
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.n_features = n_features;
    out.name = name;
    out.features.reserve(indices.size() * n_features);
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    const auto header = split_line(line);
    if (header.empty()) throw DataError("'" + path + "' has an empty header row");

    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (trim(header[j]) == label_column) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == header.size()) {
        // fall back to a numeric column index
        std::size_t idx = 0;
        const std::string t = trim(label_column);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
        if (ec == std::errc() && ptr == t.data() + t.size() && idx < header.size())
            label_idx = idx;
    }
    if (label_idx == header.size())
        throw DataError("label column '" + label_column + "' not found in '" + path + "'");

    Dataset d;
    d.name = path;
    d.n_features = header.size() - 1;
    if (d.n_features == 0) throw DataError("'" + path + "' has no feature columns");

    std::vector<std::string> raw_labels;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(row_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_idx) {
                const std::string v = trim(cells[j]);
                if (v.empty())
                    throw DataError(path + ":" + std::to_string(row_no) +
                                    ": missing label value");
                raw_labels.push_back(v);
                continue;
            }
            double value = 0.0;
            if (trim(cells[j]).empty())
                throw DataError(path + ":" + std::to_string(row_no) + ": missing value in column '" +
                                trim(header[j]) + "'");
            if (!parse_double(cells[j], value))
                throw DataError(path + ":" + std::to_string(row_no) + ": non-numeric value '" +
                                trim(cells[j]) + "' in column '" + trim(header[j]) + "'");
            d.features.push_back(value);
        }
    }
    if (raw_labels.empty()) throw DataError("'" + path + "' has no data rows");

    std::vector<std::string> distinct;
    for (const auto& v : raw_labels)
        if (std::find(distinct.begin(), distinct.end(), v) == distinct.end())
            distinct.push_back(v);
    if (distinct.size() != 2)
        throw DataError("'" + path + "' has " + std::to_string(distinct.size()) +
                        " distinct label values, expected exactly 2");
    if (std::find(distinct.begin(), distinct.end(), positive_label) == distinct.end())
        throw DataError("positive label '" + positive_label + "' does not occur in '" + path +
                        "' (values: '" + distinct[0] + "', '" + distinct[1] + "')");

    d.labels.reserve(raw_labels.size());
    for (const auto& v : raw_labels)
        d.labels.push_back(v == positive_label ? std::int8_t{1} : std::int8_t{-1});
    d.validate();
    return d;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    for (std::size_t j = 0; j < d.n_features; ++j) out << "f" << j << ",";
    out << "label\n";
    out.precision(17);
    for (std::size_t i = 0; i < d.n_instances(); ++i) {
        const auto r = d.row(i);
        for (double v : r) out << v << ",";
        out << int(d.labels[i]) << "\n";
    }
}

FoldPlan split_kfold(const Dataset& d, int k, std::uint64_t seed) {
    const std::size_t n = d.n_instances();
    if (k < 2 || static_cast<std::size_t>(k) > n)
        throw DataError("k=" + std::to_string(k) + " is out of range for " + std::to_string(n) +
                        " instances");

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(n, 0);

    // Deal each class's shuffled indices round-robin, continuing the fold
    // cursor across classes so total fold sizes stay within one.
    std::size_t cursor = 0;
    int class_tag = 0;
    for (int cls : {-1, +1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (d.labels[i] == cls) idx.push_back(i);
        Rng rng(derive_seed(seed, 0x6f6c64ULL, static_cast<std::uint64_t>(class_tag)));
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            plan.assignments[idx[i]] = static_cast<int>((cursor + i) % static_cast<std::size_t>(k));
        cursor = (cursor + idx.size()) % static_cast<std::size_t>(k);
        ++class_tag;
    }
    return plan;
}

std::vector<std::size_t> bootstrap_sample(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.n_instances();
    if (n == 0) throw DataError("cannot bootstrap an empty dataset");
    Rng rng(derive_seed(seed, 0x626f6f74ULL));
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.uniform_index(n);
    return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const FoldPlan& plan,
                                             int test_fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < d.n_instances(); ++i) {
        if (plan.assignments[i] == test_fold)
            test.push_back(i);
        else
            train.push_back(i);
    }
    return {d.subset(train), d.subset(test)};
}

}  // namespace divprune
