#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "noqe/errors.h"
#include "noqe/shadows.h"

namespace noqe {

namespace {

constexpr const char *kFormatTag = "noqe-shadow-dataset";

struct Fnv1a {
    uint64_t h = 0xCBF29CE484222325ULL;
    void update(std::string_view s) {
        for (unsigned char c : s) {
            h = (h ^ c) * 0x100000001B3ULL;
        }
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

std::string record_line(const Snapshot &s, int n) {
    std::string line = "{\"t\":\"";
    line += tableau_to_hex(s.tableau);
    line += "\",\"s\":\"";
    line += signs_to_hex(s.tableau);
    line += "\",\"b\":\"";
    line += index_to_bitstring(s.outcome, n);
    line += "\"}";
    return line;
}

}  // namespace

std::string serialize_dataset(const ShadowDataset &ds) {
    std::string body;
    Fnv1a sum;
    for (const auto &s : ds.snapshots) {
        if (s.tableau.num_qubits() != ds.num_qubits) {
            throw ContractError("serialize_dataset: snapshot width differs from dataset width");
        }
        std::string line = record_line(s, ds.num_qubits);
        sum.update(line);
        sum.update("\n");
        body += line;
        body += '\n';
    }
    nlohmann::json header = {
        {"format", kFormatTag},
        {"version", 1},
        {"label", ds.label},
        {"N", ds.num_qubits},
        {"n", ds.snapshots.size()},
        {"seed", ds.metadata.seed},
        {"seed_scheme", ds.metadata.seed_scheme},
        {"noise", ds.metadata.noise ? noise_model_to_json(*ds.metadata.noise) : nlohmann::json(nullptr)},
        {"circuit_hash", ds.metadata.circuit_hash},
        {"creator", ds.metadata.creator},
        {"checksum", sum.hex()},
    };
    return header.dump() + "\n" + body;
}

ShadowDataset parse_dataset(std::string_view text) {
    size_t pos = text.find('\n');
    if (pos == std::string_view::npos) {
        throw FormatError("dataset: missing header line");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text.substr(0, pos));
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("dataset header: ") + e.what());
    }
    ShadowDataset ds;
    uint64_t n = 0;
    std::string checksum;
    try {
        if (header.at("format").get<std::string>() != kFormatTag) {
            throw FormatError("dataset header: unknown format tag");
        }
        ds.label = header.at("label").get<std::string>();
        ds.num_qubits = header.at("N").get<int>();
        n = header.at("n").get<uint64_t>();
        ds.metadata.seed = header.at("seed").get<uint64_t>();
        ds.metadata.seed_scheme = header.at("seed_scheme").get<std::string>();
        ds.metadata.circuit_hash = header.at("circuit_hash").get<std::string>();
        ds.metadata.creator = header.at("creator").get<std::string>();
        checksum = header.at("checksum").get<std::string>();
        if (!header.at("noise").is_null()) {
            ds.metadata.noise = noise_model_from_json(header["noise"]);
        }
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("dataset header: ") + e.what());
    } catch (const ParseError &e) {
        throw FormatError(std::string("dataset header: ") + e.what());
    }
    if (ds.num_qubits < 1 || ds.num_qubits > kMaxTableauQubits) {
        throw FormatError("dataset header: N out of range");
    }
    int nq = ds.num_qubits;
    ds.snapshots.reserve(n);
    Fnv1a sum;
    size_t cursor = pos + 1;
    for (uint64_t k = 0; k < n; k++) {
        std::string where = "dataset record " + std::to_string(k);
        if (cursor >= text.size()) {
            throw FormatError(where + ": file ends after " + std::to_string(k) + " of " + std::to_string(n) +
                              " records (truncated)");
        }
        size_t end = text.find('\n', cursor);
        if (end == std::string_view::npos) {
            throw FormatError(where + ": unterminated line (truncated)");
        }
        std::string_view line = text.substr(cursor, end - cursor);
        cursor = end + 1;
        sum.update(line);
        sum.update("\n");
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw FormatError(where + ": malformed JSON");
        }
        if (!rec.is_object() || !rec.contains("t") || !rec.contains("s") || !rec.contains("b") ||
            !rec["t"].is_string() || !rec["s"].is_string() || !rec["b"].is_string()) {
            throw FormatError(where + ": expected string fields t, s, b");
        }
        auto b = rec["b"].get<std::string>();
        if (static_cast<int>(b.size()) != nq) {
            throw FormatError(where + ": outcome has " + std::to_string(b.size()) + " bits but the dataset is N = " +
                              std::to_string(nq));
        }
        try {
            Snapshot s{tableau_from_hex(nq, rec["t"].get<std::string>(), rec["s"].get<std::string>()),
                       bitstring_to_index(b)};
            ds.snapshots.push_back(s);
        } catch (const ContractError &e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    if (text.substr(cursor).find_first_not_of(" \r\n\t") != std::string_view::npos) {
        throw FormatError("dataset record " + std::to_string(n) + ": more records than the declared n = " +
                          std::to_string(n));
    }
    if (sum.hex() != checksum) {
        throw FormatError("dataset: checksum mismatch over records 0.." + std::to_string(n) +
                          " (header " + checksum + ", computed " + sum.hex() + ")");
    }
    return ds;
}

void save_dataset(const ShadowDataset &ds, const std::string &path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw FormatError("dataset: cannot write " + tmp);
        }
        out << serialize_dataset(ds);
        if (!out) {
            throw FormatError("dataset: write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

ShadowDataset load_dataset(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("dataset: cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

}  // namespace noqe
