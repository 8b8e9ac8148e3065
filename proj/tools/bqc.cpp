// Command-line front end: counts, exponential sums, densities, singular
// integrals and experiment sweeps.

#include "bqc/counting.hpp"
#include "bqc/experiment.hpp"
#include "bqc/expsums.hpp"
#include "bqc/form_io.hpp"
#include "bqc/padic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace bqc;

struct Globals {
    double budget = kDefaultBudget;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string render(const Table& t, const std::string& format) {
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = r[i];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        s += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return s;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error(out + ": cannot write file");
    f << text;
}

std::vector<i64> parse_vector(const std::string& s) {
    std::vector<i64> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stoll(item));
    return v;
}

std::string form_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

QuadraticForm quadratic_from(const std::string& path) {
    auto form = load_form(path);
    if (auto* f = std::get_if<QuadraticForm>(&form)) return *f;
    throw SchemaError(path + ": expected a quadratic form");
}

BiquadraticForm biquadratic_from(const std::string& path) {
    auto form = load_form(path);
    if (auto* b = std::get_if<BiquadraticForm>(&form)) return *b;
    throw SchemaError(path + ": expected a biquadratic form");
}

WeightFunction make_weight(const std::string& kind, double eta, double kappa) {
    if (kind == "w0") return WeightFunction::box(kappa);
    if (kind == "w1") return WeightFunction::annular_w1(eta);
    if (kind == "w2") return WeightFunction::annular_w2(eta);
    throw std::invalid_argument("unknown weight " + kind);
}

Table integral_table(const IntegralEstimate& est) {
    Table t{{"delta", "estimate", "stderr"}, {}};
    for (std::size_t i = 0; i < est.delta_schedule.size(); ++i)
        t.rows.push_back({num(est.delta_schedule[i]), num(est.level_values[i]), num(est.level_stderrs[i])});
    t.rows.push_back({"0", num(est.value), num(est.mc_stderr)});
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting points on quadrics and biquadratic hypersurfaces"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--budget", g.budget, "work budget for brute-force paths")->envname("BQC_BUDGET");
    app.add_option("--seed", g.seed, "Monte Carlo seed")->envname("BQC_SEED");
    app.add_option("--out", g.out, "output file (default stdout)")->envname("BQC_OUT");
    app.add_option("--format", g.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->envname("BQC_FORMAT");

    std::string form_path;
    int exit_code = 0;

    // count-quadric
    auto* cq = app.add_subcommand("count-quadric", "N(w;B) for a quadratic form");
    i64 cq_B = 1;
    std::string cq_method = "slice", cq_weight = "w0";
    double cq_eta = 0.1;
    cq->add_option("--form", form_path)->required();
    cq->add_option("-B,--bound", cq_B)->required();
    cq->add_option("--method", cq_method)->check(CLI::IsMember({"slice", "naive"}));
    cq->add_option("--weight", cq_weight)->check(CLI::IsMember({"w0", "w1", "w2"}));
    cq->add_option("--eta", cq_eta);
    cq->callback([&] {
        const auto f = quadratic_from(form_path);
        CountRecord rec = cq_weight == "w0"
                              ? count_quadric_box(f, cq_B, cq_method == "naive" ? CountMethod::naive : CountMethod::slice,
                                                  g.budget)
                              : count_quadric_weighted(f, make_weight(cq_weight, cq_eta, 1.0),
                                                       static_cast<double>(cq_B), g.budget);
        Table t{{"form_id", "B", "method", "count", "seconds"}, {}};
        t.rows.push_back({form_id(form_path), std::to_string(cq_B), rec.method,
                          rec.weighted ? num(rec.value) : std::to_string(rec.count), num(rec.seconds)});
        emit(render(t, g.format), g.out);
    });

    // count-biquadratic
    auto* cb = app.add_subcommand("count-biquadratic", "N(A;X,Y), N~(X,Y) or N_x(Y)");
    i64 cb_X = 1, cb_Y = 1;
    std::string cb_mode = "A", cb_x;
    cb->add_option("--form", form_path)->required();
    cb->add_option("-X", cb_X);
    cb->add_option("-Y", cb_Y)->required();
    cb->add_option("--mode", cb_mode)->check(CLI::IsMember({"A", "tilde", "slice"}));
    cb->add_option("--x", cb_x, "comma-separated x for --mode slice");
    cb->callback([&] {
        const auto b = biquadratic_from(form_path);
        CountRecord rec;
        if (cb_mode == "A")
            rec = count_A(b, cb_X, cb_Y, g.budget);
        else if (cb_mode == "tilde")
            rec = count_tilde(b, cb_X, cb_Y, g.budget);
        else
            rec = count_Nx(b, parse_vector(cb_x), cb_Y, g.budget);
        Table t{{"form_id", "X", "Y", "method", "count", "seconds"}, {}};
        t.rows.push_back({form_id(form_path), cb_mode == "slice" ? cb_x : std::to_string(cb_X), std::to_string(cb_Y),
                          rec.method, std::to_string(rec.count), num(rec.seconds)});
        emit(render(t, g.format), g.out);
    });

    // count-nu
    auto* cn = app.add_subcommand("count-nu", "N_U(B), direct and Mobius routes");
    double cn_H = 10;
    std::string cn_route = "both";
    cn->add_option("--form", form_path)->required();
    cn->add_option("-B,--height", cn_H)->required();
    cn->add_option("--route", cn_route)->check(CLI::IsMember({"direct", "mobius", "both"}));
    cn->callback([&] {
        const auto b = biquadratic_from(form_path);
        Table t{{"form_id", "B", "method", "count", "seconds"}, {}};
        for (auto route : {NURoute::direct, NURoute::mobius}) {
            if (cn_route != "both" && cn_route != to_string(route)) continue;
            const auto rec = count_NU(b, cn_H, route, g.budget);
            t.rows.push_back({form_id(form_path), num(cn_H), rec.method, std::to_string(rec.count), num(rec.seconds)});
        }
        emit(render(t, g.format), g.out);
    });

    // expsum
    auto* es = app.add_subcommand("expsum", "S_q(c)");
    i64 es_q = 1;
    std::string es_c, es_method = "crt";
    es->add_option("--form", form_path)->required();
    es->add_option("-q", es_q)->required();
    es->add_option("-c", es_c, "comma-separated frequency vector (default 0)");
    es->add_option("--method", es_method)->check(CLI::IsMember({"crt", "brute"}));
    es->callback([&] {
        const auto f = quadratic_from(form_path);
        auto c = es_c.empty() ? std::vector<i64>(f.dim(), 0) : parse_vector(es_c);
        const auto s = es_method == "brute" ? expsum_brute(f, es_q, c, g.budget) : expsum(f, es_q, c, g.budget);
        Table t{{"form_id", "q", "method", "re", "im", "abs"}, {}};
        t.rows.push_back({form_id(form_path), std::to_string(es_q), es_method, num(s.re()), num(s.im()),
                          num(s.magnitude())});
        emit(render(t, g.format), g.out);
    });

    // sigma-n
    auto* sn = app.add_subcommand("sigma-n", "Sigma_n(x;c) = sum over x/2 < q <= x of |S_q(c)|");
    std::vector<double> sn_x;
    std::string sn_c;
    sn->add_option("--form", form_path)->required();
    sn->add_option("-x", sn_x)->required()->delimiter(',');
    sn->add_option("-c", sn_c);
    sn->callback([&] {
        const auto f = quadratic_from(form_path);
        auto c = sn_c.empty() ? std::vector<i64>(f.dim(), 0) : parse_vector(sn_c);
        Table t{{"form_id", "x", "total"}, {}};
        for (double x : sn_x) {
            const auto avg = sigma_n_sum(f, x, c, g.budget);
            t.rows.push_back({form_id(form_path), num(x), num(avg.total)});
        }
        emit(render(t, g.format), g.out);
    });

    // singular-series
    auto* ss = app.add_subcommand("singular-series", "S(F) by Euler product and q-series");
    i64 ss_q = 40, ss_p = 40;
    ss->add_option("--form", form_path)->required();
    ss->add_option("--q-max", ss_q);
    ss->add_option("--p-max", ss_p);
    ss->callback([&] {
        const auto f = quadratic_from(form_path);
        const auto s = singular_series(f, ss_q, ss_p, g.budget);
        Table t{{"route", "cutoff", "value", "tail_bound"}, {}};
        t.rows.push_back({"euler_product", std::to_string(ss_p), num(s.value), num(s.tail_bound)});
        t.rows.push_back({"q_series", std::to_string(ss_q), num(s.param("q_series_value")), num(s.param("q_series_tail"))});
        emit(render(t, g.format), g.out);
    });

    // sigma-infinity and joint-integral
    MonteCarloParams mc;
    std::string si_weight = "w0";
    double si_eta = 0.1, si_kappa = 1.0;
    auto* si = app.add_subcommand("sigma-infinity", "sigma_inf(w;F) by Monte Carlo");
    si->add_option("--form", form_path)->required();
    si->add_option("--weight", si_weight)->check(CLI::IsMember({"w0", "w1", "w2"}));
    si->add_option("--eta", si_eta);
    si->add_option("--kappa", si_kappa);
    si->add_option("--delta-schedule", mc.delta_schedule)->delimiter(',');
    si->add_option("--samples", mc.samples);
    si->callback([&] {
        mc.seed = g.seed;
        const auto f = quadratic_from(form_path);
        emit(render(integral_table(sigma_infinity(f, make_weight(si_weight, si_eta, si_kappa), mc)), g.format), g.out);
    });

    auto* ji = app.add_subcommand("joint-integral", "T = joint singular integral by Monte Carlo");
    ji->add_option("--form", form_path)->required();
    ji->add_option("--delta-schedule", mc.delta_schedule)->delimiter(',');
    ji->add_option("--samples", mc.samples);
    ji->callback([&] {
        mc.seed = g.seed;
        const auto b = biquadratic_from(form_path);
        emit(render(integral_table(joint_singular_integral(b, mc)), g.format), g.out);
    });

    // experiment
    auto* ex = app.add_subcommand("experiment", "run an experiment config; exit 0 iff all tolerances pass");
    std::string ex_config, ex_summary;
    ex->add_option("--config", ex_config)->required();
    ex->add_option("--summary", ex_summary, "summary JSON path (default <out>.summary.json or stderr)");
    ex->callback([&] {
        auto configs = load_experiments(ex_config);
        std::vector<Report> reports;
        for (auto& cfg : configs) {
            if (app.get_option("--seed")->count() > 0 || std::getenv("BQC_SEED")) {
                cfg.seed = g.seed;
                cfg.mc.seed = g.seed;
            }
            if (app.get_option("--budget")->count() > 0 || std::getenv("BQC_BUDGET")) cfg.budget = g.budget;
            reports.push_back(run_experiment(cfg));
        }
        std::string csv = csv_header();
        for (const auto& r : reports) csv += to_csv(r);
        const std::string summary = summary_json(reports);
        if (g.format == "json") {
            emit(summary, g.out);
        } else {
            emit(csv, g.out);
            const std::string path = !ex_summary.empty() ? ex_summary : (g.out.empty() ? "" : g.out + ".summary.json");
            if (path.empty())
                std::cerr << summary;
            else
                emit(summary, path);
        }
        bool ok = true;
        for (const auto& r : reports) ok = ok && r.passed();
        exit_code = ok ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}
