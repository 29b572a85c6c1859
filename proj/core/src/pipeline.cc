#include "noqe/pipeline.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "noqe/errors.h"
#include "noqe/resources.h"
#include "noqe/rng.h"
#include "noqe/version.h"

namespace noqe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kDatasetStream = 0x5EED;
constexpr uint64_t kBootstrapStream = 0xB007;
constexpr uint64_t kHadamardStream = 0x4ADA;
constexpr uint64_t kZneStream = 0x2E00;

std::string element_name(const std::string &q, int i, int j) {
    return q + std::to_string(i + 1) + std::to_string(j + 1);
}

[[noreturn]] void bad_field(const std::string &field, const std::string &what) {
    throw ParseError("config field \"" + field + "\": " + what);
}

std::string resolve(const std::string &base, const std::string &path) {
    fs::path p(path);
    if (p.is_absolute() || base.empty()) {
        return p.string();
    }
    return (fs::path(base) / p).lexically_normal().string();
}

Method parse_method(const json &v, const std::string &field) {
    if (!v.is_string()) {
        bad_field(field, "expected \"shadow\" or \"hadamard\"");
    }
    auto s = v.get<std::string>();
    if (s == "shadow") {
        return Method::Shadow;
    }
    if (s == "hadamard") {
        return Method::Hadamard;
    }
    bad_field(field, "unknown method \"" + s + "\"");
}

}  // namespace

std::string method_name(Method m) {
    return m == Method::Shadow ? "shadow" : "hadamard";
}

ExperimentConfig parse_config(std::string_view text, const std::string &base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    ExperimentConfig c;
    c.raw = j;
    c.base_dir = base_dir;

    auto get_string = [&](const char *key, bool required) -> std::string {
        if (!j.contains(key)) {
            if (required) {
                bad_field(key, "missing");
            }
            return {};
        }
        if (!j[key].is_string()) {
            bad_field(key, "expected a string");
        }
        return j[key].get<std::string>();
    };
    auto get_uint = [&](const json &obj, const char *key, uint64_t &dst, uint64_t min) {
        if (!obj.contains(key)) {
            return;
        }
        const auto &v = obj[key];
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)) {
            bad_field(key, "expected a non-negative integer");
        }
        dst = v.get<uint64_t>();
        if (dst < min) {
            bad_field(key, "must be at least " + std::to_string(min));
        }
    };
    auto get_bool = [&](const char *key, bool &dst) {
        if (j.contains(key)) {
            if (!j[key].is_boolean()) {
                bad_field(key, "expected true or false");
            }
            dst = j[key].get<bool>();
        }
    };
    auto get_double = [&](const char *key, double &dst) {
        if (j.contains(key)) {
            if (!j[key].is_number()) {
                bad_field(key, "expected a number");
            }
            dst = j[key].get<double>();
        }
    };

    c.hamiltonian = get_string("hamiltonian", true);
    if (!j.contains("references") || !j["references"].is_array() || j["references"].empty()) {
        bad_field("references", "expected a non-empty array");
    }
    for (size_t k = 0; k < j["references"].size(); k++) {
        const auto &r = j["references"][k];
        std::string field = "references[" + std::to_string(k) + "]";
        if (!r.is_object() || !r.contains("circuit") || !r["circuit"].is_string()) {
            bad_field(field, "expected {\"label\", \"circuit\"}");
        }
        ReferenceEntry e;
        e.label = r.contains("label") && r["label"].is_string() ? r["label"].get<std::string>()
                                                                : "ref" + std::to_string(k + 1);
        e.circuit = r["circuit"].get<std::string>();
        if (r.contains("hf_occupation")) {
            if (!r["hf_occupation"].is_string()) {
                bad_field(field + ".hf_occupation", "expected a bitstring");
            }
            e.hf_occupation = r["hf_occupation"].get<std::string>();
        }
        c.references.push_back(e);
    }
    if (j.contains("method")) {
        c.method = parse_method(j["method"], "method");
    }
    get_uint(j, "budget", c.budget, 1);
    if (j.contains("estimator_m")) {
        if (!j["estimator_m"].is_number_integer() || j["estimator_m"].get<int>() < 1 || j["estimator_m"].get<int>() > 3) {
            bad_field("estimator_m", "expected 1, 2 or 3");
        }
        c.estimator_m = j["estimator_m"].get<int>();
    }
    get_bool("distill", c.distill);
    if (j.contains("noise") && !j["noise"].is_null()) {
        try {
            c.noise = noise_model_from_json(j["noise"]);
        } catch (const ParseError &e) {
            bad_field("noise", e.what());
        }
    }
    get_double("s_min", c.s_min);
    if (!(c.s_min > 0 && c.s_min < 1)) {
        bad_field("s_min", "must lie in (0, 1)");
    }
    get_uint(j, "seed", c.seed, 0);
    if (j.contains("zne") && !j["zne"].is_null()) {
        const auto &z = j["zne"];
        if (!z.is_object()) {
            bad_field("zne", "expected an object");
        }
        ZneConfig zc;
        if (z.contains("scales")) {
            if (!z["scales"].is_array()) {
                bad_field("zne.scales", "expected an array of numbers");
            }
            zc.scales.clear();
            for (const auto &s : z["scales"]) {
                if (!s.is_number()) {
                    bad_field("zne.scales", "expected an array of numbers");
                }
                zc.scales.push_back(s.get<double>());
            }
        }
        get_uint(z, "shots_per_scale", zc.shots_per_scale, 1);
        try {
            zc.validate();
        } catch (const ContractError &e) {
            bad_field("zne", e.what());
        }
        c.zne = zc;
    }
    if (j.contains("bootstrap")) {
        if (!j["bootstrap"].is_number_integer() || j["bootstrap"].get<int>() < 0) {
            bad_field("bootstrap", "expected a non-negative integer");
        }
        c.bootstrap = j["bootstrap"].get<int>();
    }
    get_double("overlap_floor", c.overlap_floor);
    get_bool("grouping", c.grouping);
    get_bool("measure_imaginary", c.measure_imaginary);
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 1) {
            bad_field("threads", "expected a positive integer");
        }
        c.threads = j["threads"].get<int>();
    }
    c.datasets = get_string("datasets", false);
    if (j.contains("sweep")) {
        const auto &s = j["sweep"];
        if (!s.is_object()) {
            bad_field("sweep", "expected an object");
        }
        if (s.contains("lambdas")) {
            c.sweep_lambdas.clear();
            for (const auto &v : s["lambdas"]) {
                if (!v.is_number() || v.get<double>() < 0) {
                    bad_field("sweep.lambdas", "expected non-negative numbers");
                }
                c.sweep_lambdas.push_back(v.get<double>());
            }
        }
        if (s.contains("methods")) {
            c.sweep_methods.clear();
            for (const auto &v : s["methods"]) {
                c.sweep_methods.push_back(parse_method(v, "sweep.methods"));
            }
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::path(path).parent_path().string());
}

Problem load_problem(const ExperimentConfig &config) {
    Problem p;
    p.hamiltonian = load_hamiltonian(resolve(config.base_dir, config.hamiltonian));
    for (const auto &r : config.references) {
        ReferenceSpec spec;
        spec.label = r.label;
        spec.ansatz = load_circuit(resolve(config.base_dir, r.circuit));
        spec.num_qubits = spec.ansatz.num_qubits;
        spec.hf_occupation = r.hf_occupation;
        if (spec.num_qubits != p.hamiltonian.num_qubits()) {
            throw ParseError("reference '" + r.label + "' acts on " + std::to_string(spec.num_qubits) +
                             " qubits but the Hamiltonian has " + std::to_string(p.hamiltonian.num_qubits()));
        }
        try {
            validate_reference(spec);
        } catch (const ContractError &e) {
            throw ParseError(e.what());
        }
        p.references.push_back(std::move(spec));
    }
    return p;
}

OracleMatrices oracle_matrices(const Problem &problem) {
    OracleMatrices o;
    auto m = static_cast<Eigen::Index>(problem.references.size());
    o.s.resize(m, m);
    o.h.resize(m, m);
    for (const auto &r : problem.references) {
        o.states.push_back(run_circuit(build_reference_circuit(r), Statevector(r.num_qubits)));
    }
    for (Eigen::Index i = 0; i < m; i++) {
        for (Eigen::Index j = 0; j < m; j++) {
            const auto &a = o.states[static_cast<size_t>(i)];
            const auto &b = o.states[static_cast<size_t>(j)];
            o.s(i, j) = inner_product(a, b);
            o.h(i, j) = matrix_element(problem.hamiltonian, a, b);
        }
    }
    return o;
}

double exact_noqe_energy(const Problem &problem, double s_min) {
    auto o = oracle_matrices(problem);
    return solve_gevp(o.h, o.s, s_min).energies[0];
}

const ElementEstimate *MatrixElementEstimates::find(const std::string &quantity, int i, int j) const {
    for (const auto &e : elements) {
        if (e.quantity == quantity && e.i == i && e.j == j) {
            return &e;
        }
    }
    return nullptr;
}

// ---- Shadow path ----

uint64_t dataset_seed(uint64_t master, size_t reference, DatasetKind kind) {
    return derive_seed(master, kDatasetStream, 3 * reference + static_cast<size_t>(kind));
}

std::string dataset_label(const ReferenceSpec &spec, DatasetKind kind) {
    switch (kind) {
        case DatasetKind::R:
            return spec.label + "_R";
        case DatasetKind::I:
            return spec.label + "_I";
        default:
            return spec.label;
    }
}

Circuit dataset_circuit(const ReferenceSpec &spec, DatasetKind kind) {
    switch (kind) {
        case DatasetKind::R:
            return build_auxiliary_circuit(spec, AuxKind::R);
        case DatasetKind::I:
            return build_auxiliary_circuit(spec, AuxKind::I);
        default:
            return build_reference_circuit(spec);
    }
}

ShadowData acquire_shadow_data(const Problem &problem, uint64_t n, const std::optional<NoiseModel> &noise,
                               uint64_t seed, int threads) {
    ShadowData data;
    for (size_t r = 0; r < problem.references.size(); r++) {
        std::array<ShadowDataset, 3> sets;
        for (int k = 0; k < 3; k++) {
            auto kind = static_cast<DatasetKind>(k);
            AcquireOptions opt;
            opt.noise = noise;
            opt.seed = dataset_seed(seed, r, kind);
            opt.label = dataset_label(problem.references[r], kind);
            opt.threads = threads;
            sets[static_cast<size_t>(k)] = acquire(dataset_circuit(problem.references[r], kind), n, opt);
        }
        data.per_ref.push_back(std::move(sets));
    }
    return data;
}

ShadowEstimates estimate_shadow_data(const ShadowData &data, int m) {
    ShadowEstimates out;
    for (const auto &sets : data.per_ref) {
        std::array<ShadowEstimate, 3> e;
        for (size_t k = 0; k < 3; k++) {
            e[k] = u_estimate(sets[k], m);
        }
        out.push_back(std::move(e));
    }
    return out;
}

namespace {

struct ShadowMatrices {
    Eigen::MatrixXcd s, h, residual;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> unreliable;
};

ShadowMatrices shadow_matrices(const Eigen::MatrixXcd &hd, const ShadowEstimates &est, double floor) {
    auto m = static_cast<Eigen::Index>(est.size());
    ShadowMatrices out;
    out.s = Eigen::MatrixXcd::Identity(m, m);
    out.h = Eigen::MatrixXcd::Zero(m, m);
    out.residual = Eigen::MatrixXcd::Zero(m, m);
    out.unreliable.setConstant(m, m, false);
    for (Eigen::Index i = 0; i < m; i++) {
        const auto &ei = est[static_cast<size_t>(i)];
        out.h(i, i) = trace_product(hd, ei[0].matrix).real();
        for (Eigen::Index j = i + 1; j < m; j++) {
            const auto &ej = est[static_cast<size_t>(j)];
            auto ov = reconstruct_overlap(ei[0], ei[1], ei[2], ej[0], ej[1]);
            out.s(i, j) = ov.value;
            out.s(j, i) = std::conj(ov.value);
            out.residual(i, j) = ov.consistency_residual;
            cplx hij;
            try {
                hij = reconstruct_hamiltonian_element(ei[0], ej[0], hd, ov.value, floor);
            } catch (const UnreliableDivision &u) {
                out.unreliable(i, j) = true;
                hij = std::abs(u.overlap) > 0 ? u.numerator / std::conj(u.overlap) : cplx(0, 0);
            }
            out.h(i, j) = hij;
            out.h(j, i) = std::conj(hij);
        }
    }
    return out;
}

ShadowEstimates distill_all(const ShadowEstimates &est) {
    ShadowEstimates out = est;
    for (auto &e : out) {
        for (auto &x : e) {
            x = distill(x);
        }
    }
    return out;
}

void fill_elements(MatrixElementEstimates &out, const ShadowMatrices &mats, const ShadowMatrices *raw,
                   const Eigen::MatrixXd *se_s_re, const Eigen::MatrixXd *se_s_im, const Eigen::MatrixXd *se_h_re,
                   const Eigen::MatrixXd *se_h_im, uint64_t n, int m_order, bool distilled) {
    auto m = mats.s.rows();
    auto se = [](const Eigen::MatrixXd *a, const Eigen::MatrixXd *b, Eigen::Index i, Eigen::Index j) {
        return a ? cplx((*a)(i, j), (*b)(i, j)) : cplx(0, 0);
    };
    for (Eigen::Index i = 0; i < m; i++) {
        for (Eigen::Index j = i; j < m; j++) {
            if (i != j) {
                ElementEstimate e;
                e.quantity = "S";
                e.i = static_cast<int>(i);
                e.j = static_cast<int>(j);
                e.value = mats.s(i, j);
                e.se = se(se_s_re, se_s_im, i, j);
                if (raw) {
                    e.raw_value = raw->s(i, j);
                }
                e.residual = mats.residual(i, j).real();
                e.n = n;
                e.m = m_order;
                e.distilled = distilled;
                out.elements.push_back(e);
            }
            ElementEstimate e;
            e.quantity = "H";
            e.i = static_cast<int>(i);
            e.j = static_cast<int>(j);
            e.value = mats.h(i, j);
            e.se = se(se_h_re, se_h_im, i, j);
            if (raw) {
                e.raw_value = raw->h(i, j);
            }
            e.unreliable = mats.unreliable(i, j);
            e.n = n;
            e.m = m_order;
            e.distilled = distilled;
            if (e.unreliable) {
                out.flags.push_back("H" + std::to_string(i + 1) + std::to_string(j + 1) + ": overlap below floor");
            }
            out.elements.push_back(e);
        }
    }
}

}  // namespace

MatrixElementEstimates assemble_from_estimates(const Problem &problem, const ShadowEstimates &est,
                                               const ShadowOptions &options, uint64_t n) {
    if (est.size() != problem.references.size()) {
        throw ContractError("assemble_from_estimates: one estimate triple per reference required");
    }
    Eigen::MatrixXcd hd = materialize(problem.hamiltonian);
    auto raw = shadow_matrices(hd, est, options.overlap_floor);
    MatrixElementEstimates out;
    out.method = Method::Shadow;
    out.total_shots = 3 * n * est.size();
    if (options.distill) {
        auto mats = shadow_matrices(hd, distill_all(est), options.overlap_floor);
        out.s = mats.s;
        out.h = mats.h;
        fill_elements(out, mats, &raw, nullptr, nullptr, nullptr, nullptr, n, options.m, true);
    } else {
        out.s = raw.s;
        out.h = raw.h;
        fill_elements(out, raw, nullptr, nullptr, nullptr, nullptr, nullptr, n, options.m, false);
    }
    return out;
}

MatrixElementEstimates assemble_shadow(const Problem &problem, const ShadowData &data, const ShadowOptions &options) {
    auto est = estimate_shadow_data(data, options.m);
    uint64_t n = data.per_ref.empty() ? 0 : data.per_ref[0][0].size();
    auto out = assemble_from_estimates(problem, est, options, n);
    if (options.bootstrap <= 0) {
        return out;
    }
    // Replicate estimates per dataset, one dataset in memory at a time.
    auto b_count = static_cast<size_t>(options.bootstrap);
    std::vector<ShadowEstimates> reps(b_count, ShadowEstimates(est.size()));
    for (size_t r = 0; r < data.per_ref.size(); r++) {
        for (size_t k = 0; k < 3; k++) {
            const auto &ds = data.per_ref[r][k];
            Eigen::MatrixXcd v = pullback_states(ds);
            auto size = static_cast<uint64_t>(v.cols());
            Eigen::VectorXd w(v.cols());
            for (size_t b = 0; b < b_count; b++) {
                SplitMix64 rng(derive_seed(options.seed, kBootstrapStream + 3 * r + k, b));
                w.setZero();
                for (uint64_t t = 0; t < size; t++) {
                    w[static_cast<Eigen::Index>(uniform_below(rng, size))] += 1.0;
                }
                reps[b][r][k] = estimate_from_moments(shadow_moments(v, &w, options.m), options.m);
            }
        }
    }
    Eigen::MatrixXcd hd = materialize(problem.hamiltonian);
    auto m = out.s.rows();
    Eigen::MatrixXd sum_s_re = Eigen::MatrixXd::Zero(m, m), sum_s_im = sum_s_re, sum_h_re = sum_s_re,
                    sum_h_im = sum_s_re;
    Eigen::MatrixXd sq_s_re = sum_s_re, sq_s_im = sum_s_re, sq_h_re = sum_s_re, sq_h_im = sum_s_re;
    size_t ok = 0;
    for (size_t b = 0; b < b_count; b++) {
        ShadowMatrices mats;
        try {
            mats = shadow_matrices(hd, options.distill ? distill_all(reps[b]) : reps[b], options.overlap_floor);
        } catch (const DegenerateError &) {
            continue;
        }
        ok++;
        sum_s_re += mats.s.real();
        sum_s_im += mats.s.imag();
        sum_h_re += mats.h.real();
        sum_h_im += mats.h.imag();
        sq_s_re += mats.s.real().cwiseAbs2();
        sq_s_im += mats.s.imag().cwiseAbs2();
        sq_h_re += mats.h.real().cwiseAbs2();
        sq_h_im += mats.h.imag().cwiseAbs2();
    }
    if (ok < 2) {
        out.flags.push_back("bootstrap: fewer than two usable replicates");
        return out;
    }
    double k = static_cast<double>(ok);
    auto sd = [&](const Eigen::MatrixXd &sum, const Eigen::MatrixXd &sq) -> Eigen::MatrixXd {
        Eigen::MatrixXd mean = sum / k;
        return ((sq / k - mean.cwiseAbs2()) * (k / (k - 1))).cwiseMax(0.0).cwiseSqrt();
    };
    Eigen::MatrixXd se_s_re = sd(sum_s_re, sq_s_re), se_s_im = sd(sum_s_im, sq_s_im);
    Eigen::MatrixXd se_h_re = sd(sum_h_re, sq_h_re), se_h_im = sd(sum_h_im, sq_h_im);
    for (auto &e : out.elements) {
        auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
        e.se = e.quantity == "S" ? cplx(se_s_re(i, j), se_s_im(i, j)) : cplx(se_h_re(i, j), se_h_im(i, j));
    }
    return out;
}

// ---- Hadamard path ----

HadamardSuite build_hadamard_suite(const Problem &problem, const HadamardOptions &options) {
    HadamardSuite suite;
    int m = static_cast<int>(problem.references.size());
    suite.num_references = m;
    for (int i = 0; i < m; i++) {
        suite.experiments.push_back(build_diagonal_experiment(problem.references[static_cast<size_t>(i)],
                                                              problem.hamiltonian, options));
        suite.elements.push_back({i, i});
    }
    for (int i = 0; i < m; i++) {
        for (int j = i + 1; j < m; j++) {
            suite.experiments.push_back(build_hadamard_experiment(problem.references[static_cast<size_t>(i)],
                                                                  problem.references[static_cast<size_t>(j)],
                                                                  problem.hamiltonian, options));
            suite.elements.push_back({i, j});
        }
    }
    return suite;
}

std::vector<std::vector<double>> evaluate_suite(const HadamardSuite &suite, const std::optional<NoiseModel> &noise,
                                                double fold_scale) {
    std::vector<std::vector<double>> out;
    for (const auto &e : suite.experiments) {
        out.push_back(evaluate_jobs(e, noise, fold_scale));
    }
    return out;
}

size_t suite_job_count(const HadamardSuite &suite) {
    size_t n = 0;
    for (const auto &e : suite.experiments) {
        n += e.jobs.size();
    }
    return n;
}

namespace {

MatrixElementEstimates assemble_suite_values(const HadamardSuite &suite,
                                             const std::vector<std::vector<SampledValue>> &values, uint64_t n) {
    auto m = static_cast<Eigen::Index>(suite.num_references);
    MatrixElementEstimates out;
    out.method = Method::Hadamard;
    out.s = Eigen::MatrixXcd::Identity(m, m);
    out.h = Eigen::MatrixXcd::Zero(m, m);
    for (size_t x = 0; x < suite.experiments.size(); x++) {
        auto [i, j] = suite.elements[x];
        auto v = combine_jobs(suite.experiments[x], values[x]);
        if (i == j) {
            out.h(i, i) = v.h.real();
        } else {
            out.s(i, j) = v.s;
            out.s(j, i) = std::conj(v.s);
            out.h(i, j) = v.h;
            out.h(j, i) = std::conj(v.h);
            ElementEstimate s;
            s.quantity = "S";
            s.i = i;
            s.j = j;
            s.value = v.s;
            s.se = v.s_se;
            s.n = n;
            out.elements.push_back(s);
        }
        ElementEstimate h;
        h.quantity = "H";
        h.i = i;
        h.j = j;
        h.value = i == j ? cplx(v.h.real(), 0) : v.h;
        h.se = i == j ? cplx(v.h_se.real(), 0) : v.h_se;
        h.n = n;
        out.elements.push_back(h);
    }
    return out;
}

}  // namespace

MatrixElementEstimates assemble_hadamard(const HadamardSuite &suite, const std::vector<std::vector<double>> &exact,
                                         uint64_t shots, uint64_t seed) {
    if (exact.size() != suite.experiments.size()) {
        throw ContractError("assemble_hadamard: one evaluation per experiment required");
    }
    std::vector<std::vector<SampledValue>> values;
    for (size_t x = 0; x < exact.size(); x++) {
        values.push_back(shots > 0 ? sample_jobs(exact[x], shots, derive_seed(seed, kHadamardStream, x))
                                   : exact_values(exact[x]));
    }
    auto out = assemble_suite_values(suite, values, shots);
    out.total_shots = shots * suite_job_count(suite);
    return out;
}

MatrixElementEstimates assemble_hadamard_zne(const HadamardSuite &suite,
                                             const std::vector<std::vector<std::vector<double>>> &exact_per_scale,
                                             const ZneConfig &config, uint64_t seed) {
    config.validate();
    if (exact_per_scale.size() != config.scales.size()) {
        throw ContractError("assemble_hadamard_zne: one evaluation per scale factor required");
    }
    std::vector<std::vector<SampledValue>> values;
    for (size_t x = 0; x < suite.experiments.size(); x++) {
        std::vector<std::vector<SampledValue>> per_scale;
        for (size_t s = 0; s < config.scales.size(); s++) {
            per_scale.push_back(sample_jobs(exact_per_scale[s][x], config.shots_per_scale,
                                            derive_seed(seed, kZneStream + s, x)));
        }
        std::vector<SampledValue> fitted;
        for (size_t k = 0; k < suite.experiments[x].jobs.size(); k++) {
            std::vector<ZnePoint> pts;
            for (size_t s = 0; s < config.scales.size(); s++) {
                pts.push_back({config.scales[s], per_scale[s][k].mean, per_scale[s][k].se});
            }
            auto fit = extrapolate(pts);
            fitted.push_back({fit.value, fit.se});
        }
        values.push_back(std::move(fitted));
    }
    auto out = assemble_suite_values(suite, values, config.shots_per_scale);
    out.total_shots = config.shots_per_scale * config.scales.size() * suite_job_count(suite);
    return out;
}

// ---- End to end ----

json matrix_to_json(const Eigen::MatrixXcd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

json estimates_to_json(const MatrixElementEstimates &est) {
    json elements = json::array();
    for (const auto &e : est.elements) {
        json x = {{"name", element_name(e.quantity, e.i, e.j)},
                  {"quantity", e.quantity},
                  {"i", e.i},
                  {"j", e.j},
                  {"re", e.value.real()},
                  {"im", e.value.imag()},
                  {"se_re", e.se.real()},
                  {"se_im", e.se.imag()},
                  {"n", e.n},
                  {"m", e.m},
                  {"distilled", e.distilled},
                  {"residual", e.residual},
                  {"unreliable", e.unreliable}};
        if (e.raw_value) {
            x["raw_re"] = e.raw_value->real();
            x["raw_im"] = e.raw_value->imag();
        }
        elements.push_back(x);
    }
    return {{"method", method_name(est.method)},
            {"elements", elements},
            {"S", matrix_to_json(est.s)},
            {"H", matrix_to_json(est.h)},
            {"flags", est.flags},
            {"total_shots", est.total_shots}};
}

json gevp_to_json(const GevpResult &g) {
    std::vector<double> energies(g.energies.data(), g.energies.data() + g.energies.size());
    return {{"energies", energies},
            {"coefficients", matrix_to_json(g.coefficients)},
            {"retained_dim", g.retained_dim},
            {"overlap_eigenvalues", g.overlap_eigenvalues},
            {"discarded_eigenvalues", g.discarded_eigenvalues},
            {"residual_norms", g.residual_norms}};
}

namespace {

json census_json(const GateCensus &c) {
    return {{"two_qubit", c.two_qubit}, {"one_qubit", c.one_qubit}, {"gates", c.depth_gates}, {"by_kind", c.by_kind}};
}

json resources_json(const Problem &problem) {
    json out = json::object();
    if (problem.references.empty()) {
        return out;
    }
    const auto &r0 = problem.references[0];
    out["reference"] = census_json(resource_report(build_reference_circuit(r0)));
    out["auxiliary"] = census_json(resource_report(build_auxiliary_circuit(r0, AuxKind::R)));
    const auto &r1 = problem.references.size() > 1 ? problem.references[1] : r0;
    out["hadamard"] = census_json(resource_report(build_hadamard_circuit(r0, r1, 0.0)));
    return out;
}

json base_report(const ExperimentConfig &config, const Problem &problem, bool exact_mode) {
    json refs = json::array();
    for (const auto &r : problem.references) {
        refs.push_back({{"label", r.label},
                        {"num_qubits", r.num_qubits},
                        {"occupation", r.occupation()},
                        {"circuit_hash", circuit_hash(build_reference_circuit(r))}});
    }
    return {{"schema", "noqe-report/1"},
            {"version", {{"version", version_string()}, {"git", git_revision()}}},
            {"seed", config.seed},
            {"exact_mode", exact_mode},
            {"config", config.raw},
            {"hamiltonian",
             {{"num_qubits", problem.hamiltonian.num_qubits()},
              {"terms", problem.hamiltonian.term_count()},
              {"unit", problem.hamiltonian.unit_label()}}},
            {"references", refs},
            {"resources", resources_json(problem)},
            {"artifacts", json::array()}};
}

MatrixElementEstimates oracle_estimates(const OracleMatrices &o) {
    MatrixElementEstimates out;
    out.s = o.s;
    out.h = o.h;
    auto m = o.s.rows();
    for (Eigen::Index i = 0; i < m; i++) {
        for (Eigen::Index j = i; j < m; j++) {
            if (i != j) {
                ElementEstimate s;
                s.quantity = "S";
                s.i = static_cast<int>(i);
                s.j = static_cast<int>(j);
                s.value = o.s(i, j);
                out.elements.push_back(s);
            }
            ElementEstimate h;
            h.quantity = "H";
            h.i = static_cast<int>(i);
            h.j = static_cast<int>(j);
            h.value = o.h(i, j);
            out.elements.push_back(h);
        }
    }
    return out;
}

ShadowData load_shadow_data(const ExperimentConfig &config, const Problem &problem) {
    ShadowData data;
    std::string dir = resolve(config.base_dir, config.datasets);
    for (const auto &r : problem.references) {
        std::array<ShadowDataset, 3> sets;
        for (int k = 0; k < 3; k++) {
            auto kind = static_cast<DatasetKind>(k);
            auto path = (fs::path(dir) / (dataset_label(r, kind) + ".jsonl")).string();
            auto ds = load_dataset(path);
            auto want = circuit_hash(dataset_circuit(r, kind));
            if (ds.num_qubits != r.num_qubits || ds.metadata.circuit_hash != want) {
                throw FormatError(path + ": dataset was not acquired from the configured circuit");
            }
            sets[static_cast<size_t>(k)] = std::move(ds);
        }
        data.per_ref.push_back(std::move(sets));
    }
    return data;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentResult noqe_energy(const ExperimentConfig &config, const Problem &problem, bool exact_mode,
                             const ShadowData *data) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.oracle = oracle_matrices(problem);
    res.exact_energy = solve_gevp(res.oracle.h, res.oracle.s, config.s_min).energies[0];
    bool noisy = config.noise && !config.noise->is_noiseless();
    std::string method = method_name(config.method);

    if (exact_mode && (config.method == Method::Shadow || !noisy)) {
        res.estimates = oracle_estimates(res.oracle);
        res.estimates.method = config.method;
    } else if (config.method == Method::Shadow) {
        ShadowData owned;
        if (!data) {
            owned = config.datasets.empty()
                        ? acquire_shadow_data(problem, config.budget, config.noise, config.seed, config.threads)
                        : load_shadow_data(config, problem);
            data = &owned;
        }
        ShadowOptions opt;
        opt.m = config.estimator_m;
        opt.distill = config.distill;
        opt.overlap_floor = config.overlap_floor;
        opt.bootstrap = config.bootstrap;
        opt.seed = derive_seed(config.seed, kBootstrapStream, 0);
        res.estimates = assemble_shadow(problem, *data, opt);
        if (config.distill) {
            opt.distill = false;
            opt.bootstrap = 0;
            res.raw = assemble_from_estimates(problem, estimate_shadow_data(*data, opt.m), opt,
                                              data->per_ref[0][0].size());
        }
    } else {
        HadamardOptions hopt;
        hopt.grouping = config.grouping;
        hopt.measure_imaginary = config.measure_imaginary;
        auto suite = build_hadamard_suite(problem, hopt);
        auto exact = evaluate_suite(suite, config.noise);
        res.estimates = assemble_hadamard(suite, exact, exact_mode ? 0 : config.budget, config.seed);
    }
    res.gevp = solve_gevp(res.estimates.h, res.estimates.s, config.s_min);

    res.report = base_report(config, problem, exact_mode);
    res.report["method"] = method;
    res.report["estimates"] = estimates_to_json(res.estimates);
    res.report["gevp"] = gevp_to_json(res.gevp);
    if (res.raw) {
        res.report["raw_estimates"] = estimates_to_json(*res.raw);
        try {
            auto g = solve_gevp(res.raw->h, res.raw->s, config.s_min);
            res.report["raw_energies"] = std::vector<double>(g.energies.data(), g.energies.data() + g.energies.size());
        } catch (const DegenerateError &e) {
            res.report["raw_energies"] = json::array();
            res.estimates.flags.push_back(std::string("raw GEVP: ") + e.what());
        }
    }
    res.report["exact"] = {{"S", matrix_to_json(res.oracle.s)},
                           {"H", matrix_to_json(res.oracle.h)},
                           {"energy", res.exact_energy}};
    res.report["energy_error"] = res.gevp.energies[0] - res.exact_energy;
    res.report["timing"] = {{"total_seconds", seconds_since(t0)}};
    return res;
}

ExperimentResult zne_hadamard_energy(const ExperimentConfig &config, const Problem &problem) {
    if (!config.zne) {
        throw ParseError("config field \"zne\": required for zero-noise extrapolation");
    }
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.oracle = oracle_matrices(problem);
    res.exact_energy = solve_gevp(res.oracle.h, res.oracle.s, config.s_min).energies[0];

    HadamardOptions hopt;
    hopt.grouping = config.grouping;
    hopt.measure_imaginary = config.measure_imaginary;
    auto suite = build_hadamard_suite(problem, hopt);
    std::vector<std::vector<std::vector<double>>> per_scale;
    for (double s : config.zne->scales) {
        per_scale.push_back(evaluate_suite(suite, config.noise, s));
    }
    res.estimates = assemble_hadamard_zne(suite, per_scale, *config.zne, config.seed);
    // Unmitigated reference at the native noise level with the same per-scale shots.
    size_t base = 0;
    for (size_t k = 0; k < config.zne->scales.size(); k++) {
        if (config.zne->scales[k] < config.zne->scales[base]) {
            base = k;
        }
    }
    res.raw = assemble_hadamard(suite, per_scale[base], config.zne->shots_per_scale, config.seed);
    res.gevp = solve_gevp(res.estimates.h, res.estimates.s, config.s_min);

    res.report = base_report(config, problem, false);
    res.report["method"] = "zne-hadamard";
    res.report["estimates"] = estimates_to_json(res.estimates);
    res.report["raw_estimates"] = estimates_to_json(*res.raw);
    res.report["gevp"] = gevp_to_json(res.gevp);
    try {
        auto g = solve_gevp(res.raw->h, res.raw->s, config.s_min);
        res.report["raw_energies"] = std::vector<double>(g.energies.data(), g.energies.data() + g.energies.size());
    } catch (const DegenerateError &) {
        res.report["raw_energies"] = json::array();
    }
    res.report["zne"] = {{"scales", config.zne->scales},
                         {"shots_per_scale", config.zne->shots_per_scale},
                         {"total_shots", res.estimates.total_shots}};
    res.report["exact"] = {{"S", matrix_to_json(res.oracle.s)},
                           {"H", matrix_to_json(res.oracle.h)},
                           {"energy", res.exact_energy}};
    res.report["energy_error"] = res.gevp.energies[0] - res.exact_energy;
    res.report["timing"] = {{"total_seconds", seconds_since(t0)}};
    return res;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig &config, const Problem &problem) {
    std::vector<SweepRow> rows;
    auto oracle = oracle_matrices(problem);
    double e_true = solve_gevp(oracle.h, oracle.s, config.s_min).energies[0];
    for (double lambda : config.sweep_lambdas) {
        for (Method method : config.sweep_methods) {
            ExperimentConfig c = config;
            NoiseModel nm = config.noise.value_or(NoiseModel{});
            nm.lambda = lambda;
            c.noise = nm;
            c.method = method;
            c.bootstrap = method == Method::Shadow ? config.bootstrap : 0;
            auto res = noqe_energy(c, problem, false);
            auto add = [&](const std::string &q, double v, double se, double truth) {
                rows.push_back({lambda, method_name(method), q, v, se, truth, std::abs(v - truth)});
            };
            for (const auto &e : res.estimates.elements) {
                auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
                cplx truth = e.quantity == "S" ? oracle.s(i, j) : oracle.h(i, j);
                auto name = element_name(e.quantity, e.i, e.j);
                if (e.i == e.j) {
                    add(name, e.value.real(), e.se.real(), truth.real());
                } else {
                    add("Re " + name, e.value.real(), e.se.real(), truth.real());
                    add("Im " + name, e.value.imag(), e.se.imag(), truth.imag());
                }
            }
            add("E0", res.gevp.energies[0], 0.0, e_true);
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << "lambda,method,quantity,value,se,true_value,abs_error\n";
    out << std::setprecision(12);
    for (const auto &r : rows) {
        out << r.lambda << ',' << r.method << ',' << r.quantity << ',' << r.value << ',' << r.se << ','
            << r.true_value << ',' << r.abs_error << '\n';
    }
    return out.str();
}

}  // namespace noqe
