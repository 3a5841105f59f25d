#include "divprune/model_io.hpp"

#include <fstream>

#include "divprune/errors.hpp"

#include <nlohmann/json.hpp>

namespace divprune {

namespace {

using json = nlohmann::ordered_json;

json classifier_to_json(const Classifier& c) {
    json j;
    j["descriptor"] = c.descriptor();
    if (std::holds_alternative<Stump>(c.model())) {
        const Stump& s = std::get<Stump>(c.model());
        j["kind"] = "stump";
        j["feature"] = s.feature;
        j["threshold"] = s.threshold;
        j["polarity"] = s.polarity;
    } else {
        const Tree& t = std::get<Tree>(c.model());
        j["kind"] = "tree";
        j["max_depth"] = t.max_depth;
        json nodes = json::array();
        for (const TreeNode& n : t.nodes) {
            json nj;
            nj["leaf"] = n.is_leaf;
            if (n.is_leaf) {
                nj["label"] = static_cast<int>(n.leaf_label);
            } else {
                nj["feature"] = n.feature;
                nj["threshold"] = n.threshold;
                nj["left"] = n.left;
                nj["right"] = n.right;
            }
            nodes.push_back(nj);
        }
        j["nodes"] = nodes;
    }
    return j;
}

Classifier classifier_from_json(const json& j) {
    const std::string kind = j.at("kind");
    const std::string descriptor = j.value("descriptor", "");
    if (kind == "stump") {
        Stump s;
        s.feature = j.at("feature");
        s.threshold = j.at("threshold");
        s.polarity = j.at("polarity");
        if (s.polarity != 1 && s.polarity != -1) throw DataError("stump polarity must be +/-1");
        return Classifier(s, descriptor);
    }
    if (kind == "tree") {
        Tree t;
        t.max_depth = j.at("max_depth");
        for (const auto& nj : j.at("nodes")) {
            TreeNode n;
            n.is_leaf = nj.at("leaf");
            if (n.is_leaf) {
                const int label = nj.at("label");
                if (label != 1 && label != -1) throw DataError("leaf label must be +/-1");
                n.leaf_label = static_cast<std::int8_t>(label);
            } else {
                n.feature = nj.at("feature");
                n.threshold = nj.at("threshold");
                n.left = nj.at("left");
                n.right = nj.at("right");
            }
            t.nodes.push_back(n);
        }
        if (t.nodes.empty()) throw DataError("tree model has no nodes");
        return Classifier(std::move(t), descriptor);
    }
    throw DataError("unknown classifier kind '" + kind + "'");
}

}  // namespace

std::string ensemble_to_json(const Ensemble& e) {
    e.check();
    json j;
    j["version"] = kModelVersion;
    j["weights"] = e.weights;
    json members = json::array();
    for (const auto& m : e.members) members.push_back(classifier_to_json(m));
    j["members"] = members;
    return j.dump(2);
}

Ensemble ensemble_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw DataError(std::string("model JSON parse error: ") + ex.what());
    }
    try {
        if (j.at("version") != kModelVersion)
            throw DataError("unsupported model version '" +
                            j.at("version").get<std::string>() + "'");
        Ensemble e;
        e.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& mj : j.at("members")) e.members.push_back(classifier_from_json(mj));
        try {
            e.check();
        } catch (const InternalConsistencyError& ex) {
            throw DataError(std::string("model violates ensemble invariants: ") + ex.what());
        }
        return e;
    } catch (const json::exception& ex) {
        throw DataError(std::string("malformed model document: ") + ex.what());
    }
}

void save_ensemble(const Ensemble& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << ensemble_to_json(e) << "\n";
}

Ensemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ensemble_from_json(text);
}

}  // namespace divprune
