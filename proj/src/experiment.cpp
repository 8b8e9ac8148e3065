#include "bqc/experiment.hpp"

#include "bqc/counting.hpp"
#include "bqc/expsums.hpp"
#include "bqc/padic.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace bqc {

namespace {

using json = nlohmann::json;

struct KindName {
    ExperimentKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::verify_quadric_asymptotic, "verify-quadric-asymptotic"},
    {ExperimentKind::verify_biquadratic_sigma, "verify-biquadratic-sigma"},
    {ExperimentKind::thin_set, "thin-set"},
    {ExperimentKind::expsum_audit, "expsum-audit"},
    {ExperimentKind::density_audit, "density-audit"},
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& source) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(source + ": field " + key + " has the wrong type");
    }
}

ExperimentConfig parse_one(const json& obj, const std::filesystem::path& base_dir, const std::string& source) {
    if (!obj.is_object()) throw SchemaError(source + ": experiment must be an object");
    ExperimentConfig cfg;
    if (!obj.contains("kind")) throw SchemaError(source + ": missing field \"kind\"");
    try {
        cfg.kind = experiment_kind_from_string(obj.at("kind").get<std::string>());
    } catch (const json::exception&) {
        throw SchemaError(source + ": field kind must be a string");
    }
    cfg.name = get_or<std::string>(obj, "name", to_string(cfg.kind), source);
    if (!obj.contains("form")) throw SchemaError(source + ": missing field \"form\"");
    cfg.form_path = get_or<std::string>(obj, "form", "", source);
    if (cfg.form_path.is_relative()) cfg.form_path = base_dir / cfg.form_path;
    cfg.sweep = get_or<std::vector<double>>(obj, "sweep", {}, source);
    cfg.seed = get_or<std::uint64_t>(obj, "seed", cfg.seed, source);
    cfg.budget = get_or<double>(obj, "budget", cfg.budget, source);
    cfg.mc.samples = get_or<std::uint64_t>(obj, "samples", cfg.mc.samples, source);
    cfg.mc.delta_schedule = get_or<std::vector<double>>(obj, "delta_schedule", cfg.mc.delta_schedule, source);
    cfg.q_max = get_or<i64>(obj, "q_max", cfg.q_max, source);
    cfg.p_max = get_or<i64>(obj, "p_max", cfg.p_max, source);
    cfg.c_vectors = get_or<std::vector<std::vector<i64>>>(obj, "c", {}, source);
    // Thin-set coordinates are 1-based in the file.
    for (const char* key : {"x_zero", "y_zero"}) {
        auto& dst = std::string(key) == "x_zero" ? cfg.x_zero : cfg.y_zero;
        for (i64 v : get_or<std::vector<i64>>(obj, key, {}, source)) {
            if (v < 1) throw SchemaError(source + ": field " + key + ": indices are 1-based");
            dst.push_back(static_cast<std::size_t>(v - 1));
        }
    }
    if (obj.contains("tolerances")) {
        const json& t = obj.at("tolerances");
        cfg.tol.ratio = get_or<double>(t, "ratio", cfg.tol.ratio, source);
        cfg.tol.exponent = get_or<double>(t, "exponent", cfg.tol.exponent, source);
        cfg.tol.slope_slack = get_or<double>(t, "slope_slack", cfg.tol.slope_slack, source);
        cfg.tol.envelope_C = get_or<double>(t, "envelope_C", cfg.tol.envelope_C, source);
        cfg.tol.envelope_eps = get_or<double>(t, "envelope_eps", cfg.tol.envelope_eps, source);
    }
    if (obj.contains("output")) cfg.output = get_or<std::string>(obj, "output", "", source);
    cfg.mc.seed = cfg.seed;
    try {
        cfg.validate();
    } catch (const SchemaError& e) {
        throw SchemaError(source + ": " + e.what());
    }
    return cfg;
}

ReportRow make_row(std::string op, std::string param, double value, double empirical, double predicted,
                   double uncertainty) {
    ReportRow row{std::move(op), std::move(param), value, empirical, predicted, 0.0, uncertainty, "ok"};
    row.ratio = predicted != 0 ? empirical / predicted : 0.0;
    return row;
}

ReportRow error_row(std::string op, std::string param, double value, const std::exception& e) {
    ReportRow row{std::move(op), std::move(param), value, 0, 0, 0, 0, std::string("error: ") + e.what()};
    return row;
}

const QuadraticForm& as_quadratic(const AnyForm& form, const ExperimentConfig& cfg) {
    if (const auto* f = std::get_if<QuadraticForm>(&form)) return *f;
    throw SchemaError(cfg.form_path.string() + ": " + to_string(cfg.kind) + " needs a quadratic form");
}

const BiquadraticForm& as_biquadratic(const AnyForm& form, const ExperimentConfig& cfg) {
    if (const auto* b = std::get_if<BiquadraticForm>(&form)) return *b;
    throw SchemaError(cfg.form_path.string() + ": " + to_string(cfg.kind) + " needs a biquadratic form");
}

std::string vec_label(std::span<const i64> c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
    return s + ")";
}

void quadric_asymptotic(const QuadraticForm& f, const ExperimentConfig& cfg, Report& rep) {
    const auto w = WeightFunction::box(1.0);
    std::optional<IntegralEstimate> sigma;
    std::optional<DensityEstimate> series;
    try {
        sigma = sigma_infinity(f, w, cfg.mc);
        series = singular_series(f, cfg.q_max, cfg.p_max, cfg.budget);
        rep.fitted.emplace_back("sigma_infinity", sigma->value);
        rep.fitted.emplace_back("sigma_infinity_stderr", sigma->mc_stderr);
        rep.fitted.emplace_back("singular_series", series->value);
        rep.fitted.emplace_back("singular_series_tail", series->tail_bound);
    } catch (const Error& e) {
        rep.rows.push_back(error_row("sigma_infinity*singular_series", "q_max", static_cast<double>(cfg.q_max), e));
        series.reset();
    }

    std::vector<double> distances;
    bool all_ok = series.has_value();
    for (double B : cfg.sweep) {
        const std::string op = "count_quadric_box(slice)/predicted_main_term(w0)";
        try {
            const auto count = count_quadric_box(f, static_cast<i64>(B), CountMethod::slice, cfg.budget);
            if (!series) {
                rep.rows.push_back(make_row(op, "B", B, static_cast<double>(count.count), 0.0, 0.0));
                continue;
            }
            const auto main = predicted_main_term(f, *sigma, *series, B);
            auto row = make_row(op, "B", B, static_cast<double>(count.count), main.value, main.uncertainty);
            distances.push_back(std::abs(row.ratio - 1.0));
            rep.rows.push_back(row);
        } catch (const BudgetExceeded& e) {
            rep.rows.push_back(error_row(op, "B", B, e));
            all_ok = false;
        }
    }
    const double last = (all_ok && !distances.empty()) ? distances.back() : INFINITY;
    rep.verdicts.push_back({"final_ratio_distance", last, cfg.tol.ratio, last <= cfg.tol.ratio});
    bool monotone = all_ok;
    double worst = 0;
    for (std::size_t i = 1; i < distances.size(); ++i) {
        worst = std::max(worst, distances[i] - distances[i - 1]);
        if (distances[i] > distances[i - 1]) monotone = false;
    }
    rep.verdicts.push_back({"distance_nonincreasing", worst, 0.0, monotone});
}

void biquadratic_sigma(const BiquadraticForm& b, const ExperimentConfig& cfg, Report& rep) {
    const std::size_t n = b.dim();
    double c = 0, c_unc = 0;
    if (n >= 4) {
        // No prediction row is fatal: the joint integral need not converge at small n.
        try {
            const auto pred = peyre_prediction(b, cfg.q_max, cfg.mc, cfg.budget);
            c = pred.value;
            c_unc = pred.uncertainty;
            rep.fitted.emplace_back("peyre_constant", c);
            rep.fitted.emplace_back("peyre_uncertainty", c_unc);
            rep.fitted.emplace_back("joint_singular_series", pred.singular_series);
            rep.fitted.emplace_back("joint_singular_integral", pred.singular_integral);
        } catch (const Error& e) {
            rep.rows.push_back(error_row("peyre_prediction q_max=" + std::to_string(cfg.q_max), "q_max",
                                         static_cast<double>(cfg.q_max), e));
        }
    }
    bool agree = true;
    double mismatches = 0;
    for (double H : cfg.sweep) {
        const std::string op = "count_NU(direct)/peyre_prediction";
        try {
            const auto direct = count_NU(b, H, NURoute::direct, cfg.budget);
            const auto mob = count_NU(b, H, NURoute::mobius, cfg.budget);
            const double logH = H > 1 ? std::log(H) : 0.0;
            auto row = make_row(op, "H", H, static_cast<double>(direct.count), c * H * logH, c_unc * H * logH);
            if (direct.count != mob.count) {
                agree = false;
                ++mismatches;
                row.status = "mismatch: mobius=" + std::to_string(mob.count);
            }
            rep.rows.push_back(row);
        } catch (const BudgetExceeded& e) {
            rep.rows.push_back(error_row(op, "H", H, e));
            agree = false;
        }
    }
    rep.verdicts.push_back({"direct_equals_mobius", mismatches, 0.0, agree});
}

void thin_set(const BiquadraticForm& b, const ExperimentConfig& cfg, Report& rep) {
    const std::size_t n = b.dim();
    std::vector<std::size_t> xz = cfg.x_zero, yz = cfg.y_zero;
    if (xz.empty() && yz.empty()) {
        xz = {0};
        for (std::size_t j = 1; j < n; ++j) yz.push_back(j);
    }
    std::vector<double> hs, counts;
    bool all_ok = true;
    for (double H : cfg.sweep) {
        const std::string op = "count_thin_set";
        try {
            const auto rec = count_thin_set(b, H, xz, yz, cfg.budget);
            rep.rows.push_back(make_row(op, "H", H, static_cast<double>(rec.count), 0.0, 0.0));
            if (rec.count > 0) {
                hs.push_back(H);
                counts.push_back(static_cast<double>(rec.count));
            }
        } catch (const BudgetExceeded& e) {
            rep.rows.push_back(error_row(op, "H", H, e));
            all_ok = false;
        }
    }
    const double expected = static_cast<double>(n - 1) / static_cast<double>(n - 2);
    const double slope = hs.size() >= 2 ? loglog_slope(hs, counts) : NAN;
    rep.fitted.emplace_back("exponent", slope);
    rep.fitted.emplace_back("expected_exponent", expected);
    const double dev = std::abs(slope - expected);
    rep.verdicts.push_back({"exponent", dev, cfg.tol.exponent, all_ok && dev <= cfg.tol.exponent});
}

void expsum_audit(const QuadraticForm& f, const ExperimentConfig& cfg, Report& rep) {
    const std::size_t n = f.dim();
    std::vector<std::vector<i64>> cs = cfg.c_vectors;
    if (cs.empty()) {
        cs.emplace_back(n, 0);
        std::vector<i64> e1(n, 0);
        e1[0] = 1;
        cs.push_back(e1);
    }
    const DualForm dual = dual_form(f);
    const i64 q_top = static_cast<i64>(cfg.sweep.back());
    double worst_envelope = 0;
    bool all_ok = true;
    for (const auto& c : cs) {
        if (c.size() != n) throw SchemaError("expsum-audit: frequency vector has wrong length");
        const std::string label = vec_label(c);
        const bool degenerate = dual.evaluate(c) == 0;
        const double ceiling = degenerate ? n / 2.0 + 2.0 - kappa(n) / 2.0 : (n + kappa(n)) / 2.0 + 1.0;

        std::vector<double> xs, totals;
        for (double x : cfg.sweep) {
            const std::string op = "sigma_n_sum c=" + label;
            try {
                const auto avg = sigma_n_sum(f, x, c, cfg.budget);
                rep.rows.push_back(make_row(op, "x", x, avg.total, 0.0, 0.0));
                xs.push_back(x);
                totals.push_back(avg.total);
            } catch (const BudgetExceeded& e) {
                rep.rows.push_back(error_row(op, "x", x, e));
                all_ok = false;
            }
        }
        const double slope = xs.size() >= 2 ? loglog_slope(xs, totals) : NAN;
        rep.fitted.emplace_back("slope c=" + label, slope);
        rep.verdicts.push_back({"slope_ceiling c=" + label, slope, ceiling + cfg.tol.slope_slack,
                                all_ok && slope <= ceiling + cfg.tol.slope_slack});

        for (i64 q = 1; q <= q_top; ++q) {
            try {
                const double s = expsum(f, q, c, cfg.budget).magnitude();
                const double bound = standard_bound(f, q, cfg.tol.envelope_C, cfg.tol.envelope_eps);
                worst_envelope = std::max(worst_envelope, s / bound);
            } catch (const BudgetExceeded& e) {
                rep.rows.push_back(error_row("expsum c=" + label, "q", static_cast<double>(q), e));
                all_ok = false;
            }
        }
    }
    rep.fitted.emplace_back("max_envelope_ratio", worst_envelope);
    rep.verdicts.push_back({"standard_bound", worst_envelope, 1.0, all_ok && worst_envelope <= 1.0});
}

void density_audit(const QuadraticForm& f, const ExperimentConfig& cfg, Report& rep) {
    bool all_ok = true;
    double worst = 0;
    for (double q : cfg.sweep) {
        const std::string op = "singular_series q-series vs Euler p_max=" + std::to_string(cfg.p_max);
        try {
            const auto s = singular_series(f, static_cast<i64>(q), cfg.p_max, cfg.budget);
            const double qv = s.param("q_series_value"), qt = s.param("q_series_tail");
            const double allowed = s.tail_bound + qt;
            auto row = make_row(op, "q_max", q, qv, s.value, allowed);
            const double gap = std::abs(qv - s.value);
            worst = std::max(worst, allowed > 0 ? gap / allowed : (gap > 0 ? INFINITY : 0.0));
            if (gap > allowed) {
                row.status = "disagree";
                all_ok = false;
            }
            rep.rows.push_back(row);
        } catch (const Error& e) {
            rep.rows.push_back(error_row(op, "q_max", q, e));
            all_ok = false;
        }
    }
    rep.verdicts.push_back({"routes_within_tails", worst, 1.0, all_ok});
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const auto& k : kKinds)
        if (name == k.name) return k.kind;
    throw SchemaError("unknown experiment kind \"" + name + "\"");
}

void ExperimentConfig::validate() const {
    if (sweep.empty()) throw SchemaError("field sweep: sweep is empty");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i] > sweep[i - 1])) throw SchemaError("field sweep: values must be strictly increasing");
    if (!(budget > 0)) throw SchemaError("field budget: must be positive");
    if (mc.samples < 2) throw SchemaError("field samples: need at least two samples");
    if (q_max < 1 || p_max < 2) throw SchemaError("fields q_max/p_max: out of range");
}

std::vector<ExperimentConfig> parse_experiments(const std::string& text, const std::filesystem::path& base_dir,
                                                const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(source + ": JSON syntax error (" + e.what() + ")");
    }
    std::vector<ExperimentConfig> out;
    if (doc.is_object() && doc.contains("experiments")) {
        const json& list = doc.at("experiments");
        if (!list.is_array() || list.empty()) throw SchemaError(source + ": field experiments must be a nonempty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            json item = list[i];
            // Suite-level defaults apply unless the entry overrides them.
            for (const char* key : {"seed", "budget", "samples", "delta_schedule"})
                if (doc.contains(key) && !item.contains(key)) item[key] = doc[key];
            out.push_back(parse_one(item, base_dir, source + ": experiments[" + std::to_string(i + 1) + "]"));
        }
    } else {
        out.push_back(parse_one(doc, base_dir, source));
    }
    return out;
}

std::vector<ExperimentConfig> load_experiments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiments(ss.str(), path.parent_path(), path.string());
}

bool Report::passed() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return !verdicts.empty();
}

Report run_experiment(const ExperimentConfig& config) {
    config.validate();
    const AnyForm form = load_form(config.form_path);
    Report rep;
    rep.name = config.name;
    rep.kind = config.kind;
    rep.seed = config.seed;
    switch (config.kind) {
        case ExperimentKind::verify_quadric_asymptotic: quadric_asymptotic(as_quadratic(form, config), config, rep); break;
        case ExperimentKind::verify_biquadratic_sigma: biquadratic_sigma(as_biquadratic(form, config), config, rep); break;
        case ExperimentKind::thin_set: thin_set(as_biquadratic(form, config), config, rep); break;
        case ExperimentKind::expsum_audit: expsum_audit(as_quadratic(form, config), config, rep); break;
        case ExperimentKind::density_audit: density_audit(as_quadratic(form, config), config, rep); break;
    }
    return rep;
}

std::string csv_header() { return "experiment,operation,parameter,value,empirical,predicted,ratio,uncertainty,status\n"; }

std::string to_csv(const Report& report) {
    std::string out;
    for (const auto& r : report.rows) {
        out += csv_field(report.name) + ',' + csv_field(r.operation) + ',' + r.parameter + ',' + fmt(r.value) + ',' +
               fmt(r.empirical) + ',' + fmt(r.predicted) + ',' + fmt(r.ratio) + ',' + fmt(r.uncertainty) + ',' +
               csv_field(r.status) + '\n';
    }
    return out;
}

std::string summary_json(const std::vector<Report>& reports) {
    json out = json::array();
    bool all = true;
    for (const auto& rep : reports) {
        json fitted = json::object();
        for (const auto& [k, v] : rep.fitted) fitted[k] = std::isfinite(v) ? json(v) : json(nullptr);
        json verdicts = json::array();
        for (const auto& v : rep.verdicts)
            verdicts.push_back({{"name", v.name},
                                {"value", std::isfinite(v.value) ? json(v.value) : json(nullptr)},
                                {"tolerance", v.tolerance},
                                {"pass", v.pass}});
        out.push_back({{"experiment", rep.name},
                       {"kind", to_string(rep.kind)},
                       {"seed", rep.seed},
                       {"fitted", fitted},
                       {"verdicts", verdicts},
                       {"passed", rep.passed()}});
        all = all && rep.passed();
    }
    json doc = {{"reports", out}, {"passed", all}};
    return doc.dump(2) + "\n";
}

}  // namespace bqc
