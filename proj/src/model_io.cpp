#include "histoctx/model_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "histoctx/cell_features.hpp"
#include "histoctx/region_features.hpp"

namespace histoctx {

using nlohmann::json;

std::string schema_hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string expected_schema_hash(const std::string& task, bool uses_context) {
    if (task == "region") return schema_hash_hex(region_schema_hash());
    if (task == "cell") return schema_hash_hex(cell_schema_hash(uses_context));
    throw InvalidArgument("unknown model task: " + task);
}

void save_model(const std::string& path, const ModelBundle& bundle) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["task"] = bundle.task;
    doc["classes"] = bundle.svm.classes;
    doc["feature_schema_hash"] = bundle.feature_schema_hash;
    doc["standardization"] = {{"means", bundle.svm.standardization.means},
                              {"sds", bundle.svm.standardization.sds}};
    doc["gamma"] = bundle.svm.gamma;
    doc["C"] = bundle.svm.C;
    doc["class_weights"] = bundle.svm.class_weights;
    json machines = json::array();
    for (const auto& m : bundle.svm.machines) {
        machines.push_back({{"pair", {m.class_a, m.class_b}},
                            {"support_vectors", m.support_vectors},
                            {"alphas", m.coeffs},
                            {"bias", m.bias},
                            {"platt_A", m.platt_a},
                            {"platt_B", m.platt_b}});
    }
    doc["machines"] = std::move(machines);
    if (bundle.stain_target) {
        doc["stain_target_stats"] = {
            {"mean_l", bundle.stain_target->mean[0]},
            {"mean_alpha", bundle.stain_target->mean[1]},
            {"mean_beta", bundle.stain_target->mean[2]},
            {"sd_l", bundle.stain_target->sd[0]},
            {"sd_alpha", bundle.stain_target->sd[1]},
            {"sd_beta", bundle.stain_target->sd[2]},
        };
    }
    json counts = json::object();
    for (const auto& [name, count] : bundle.class_counts) counts[name] = count;
    doc["training_metadata"] = {{"seed", bundle.seed},
                                {"counts", counts},
                                {"uses_context", bundle.uses_context}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(1) << "\n";
    if (!out) throw IoError("short write: " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("corrupt model bundle " + path + ": " + e.what());
    }

    ModelBundle bundle;
    try {
        std::string version = doc.at("format_version").get<std::string>();
        if (version != kModelFormatVersion)
            throw IncompatibleModel("unknown model format_version " + version);
        bundle.task = doc.at("task").get<std::string>();
        bundle.svm.classes = doc.at("classes").get<std::vector<std::string>>();
        bundle.feature_schema_hash = doc.at("feature_schema_hash").get<std::string>();
        bundle.svm.standardization.means =
            doc.at("standardization").at("means").get<std::vector<double>>();
        bundle.svm.standardization.sds =
            doc.at("standardization").at("sds").get<std::vector<double>>();
        bundle.svm.gamma = doc.at("gamma").get<double>();
        bundle.svm.C = doc.at("C").get<double>();
        bundle.svm.class_weights = doc.at("class_weights").get<std::vector<double>>();
        for (const auto& jm : doc.at("machines")) {
            BinarySvm m;
            m.class_a = jm.at("pair").at(0).get<int>();
            m.class_b = jm.at("pair").at(1).get<int>();
            m.support_vectors = jm.at("support_vectors").get<Matrix>();
            m.coeffs = jm.at("alphas").get<std::vector<double>>();
            m.bias = jm.at("bias").get<double>();
            m.platt_a = jm.at("platt_A").get<double>();
            m.platt_b = jm.at("platt_B").get<double>();
            bundle.svm.machines.push_back(std::move(m));
        }
        if (doc.contains("stain_target_stats")) {
            const auto& st = doc.at("stain_target_stats");
            ChannelStats stats;
            stats.mean = {st.at("mean_l").get<double>(), st.at("mean_alpha").get<double>(),
                          st.at("mean_beta").get<double>()};
            stats.sd = {st.at("sd_l").get<double>(), st.at("sd_alpha").get<double>(),
                        st.at("sd_beta").get<double>()};
            bundle.stain_target = stats;
        }
        const auto& meta = doc.at("training_metadata");
        bundle.seed = meta.at("seed").get<std::uint64_t>();
        bundle.uses_context = meta.value("uses_context", false);
        if (meta.contains("counts"))
            for (const auto& [name, count] : meta.at("counts").items())
                bundle.class_counts[name] = count.get<std::int64_t>();
    } catch (const json::exception& e) {
        throw ParseError("corrupt model bundle " + path + ": " + e.what());
    }

    std::string expected = expected_schema_hash(bundle.task, bundle.uses_context);
    if (bundle.feature_schema_hash != expected)
        throw IncompatibleModel("feature schema hash mismatch in " + path + ": bundle " +
                                bundle.feature_schema_hash + " vs current " + expected);
    return bundle;
}

} // namespace histoctx
