// lgdkit command-line driver: ingest, screen, adf, fit, cv, mars,
// predict, simulate. Every command reads one flat key=value config file;
// reports embed the config hash, seed and version so fixed-seed runs are
// byte-identical.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgdkit/adf.hpp"
#include "lgdkit/config.hpp"
#include "lgdkit/csv.hpp"
#include "lgdkit/design.hpp"
#include "lgdkit/lgd.hpp"
#include "lgdkit/mars.hpp"
#include "lgdkit/parallel.hpp"
#include "lgdkit/report.hpp"
#include "lgdkit/stats.hpp"
#include "lgdkit/synthetic.hpp"
#include "lgdkit/tobit.hpp"
#include "lgdkit/validation.hpp"

namespace fs = std::filesystem;
using namespace lgdkit;

namespace {

struct CliContext {
    RunConfig config;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;

    [[nodiscard]] ReportMeta meta(const std::string& command) const {
        return {command, config.hash_hex(), seed};
    }

    [[nodiscard]] std::string out_path(const std::string& file) const {
        return (fs::path(out_dir) / file).string();
    }
};

// ------------------------------------------------------------ series store

[[nodiscard]] std::vector<MonthlySeries> load_series_store(const CliContext& ctx) {
    std::vector<MonthlySeries> store;
    std::vector<std::string> names;
    auto add = [&](const std::string& path) {
        std::string name = path_stem(path);
        for (const auto& existing : names)
            if (existing == name)
                throw config_error("duplicate series name '" + name + "' from " + path);
        names.push_back(name);
        store.push_back(read_series_csv(path, name));
    };
    if (auto dir = ctx.config.maybe("data.mev_dir")) {
        if (!fs::is_directory(*dir))
            throw data_error("data.mev_dir '" + *dir + "' is not a directory");
        std::vector<std::string> paths;
        for (const auto& entry : fs::directory_iterator(*dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                paths.push_back(entry.path().string());
        std::sort(paths.begin(), paths.end());
        for (const auto& p : paths) add(p);
    }
    for (const auto& p : ctx.config.get_list("data.series")) add(p);
    return store;
}

[[nodiscard]] const MonthlySeries& find_series(const std::vector<MonthlySeries>& store,
                                               const std::string& name) {
    for (const auto& s : store)
        if (s.name() == name) return s;
    throw config_error("unknown series '" + name + "'");
}

[[nodiscard]] AdfRegression parse_adf_kind(const std::string& text) {
    if (text == "constant" || text == "c") return AdfRegression::constant;
    if (text == "constant_and_trend" || text == "ct") return AdfRegression::constant_and_trend;
    if (text == "none" || text == "n") return AdfRegression::none;
    throw config_error("unknown ADF regression kind '" + text + "'");
}

/// "SERIES:TRANSFORM" pair used in screen/adf grids.
struct SeriesRef {
    std::string name;
    TransformSpec transform;

    [[nodiscard]] static SeriesRef parse(const std::string& text) {
        auto colon = text.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
            throw config_error("expected SERIES:TRANSFORM, got '" + text + "'");
        return {text.substr(0, colon), TransformSpec::parse(text.substr(colon + 1))};
    }
};

// ----------------------------------------------------------------- ingest

int cmd_ingest(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    std::string csv = ctx.meta("ingest").csv_banner() + "\n";
    csv += "series,first_month,last_month,n_obs,missing_months\n";
    for (const auto& s : store) {
        std::string row = s.name() + ",";
        if (s.empty())
            row += ",,0,0";
        else
            row += s.first_key().str() + "," + s.last_key().str() + "," +
                   std::to_string(s.size()) + "," + std::to_string(s.missing_months());
        csv += row + "\n";
        std::cout << row << "\n";
    }
    std::cout << store.size() << " series loaded\n";
    write_text_file(ctx.out_path("ingest.csv"), csv);
    return 0;
}

// ----------------------------------------------------------------- screen

int cmd_screen(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    struct Pair {
        SeriesRef x, y;
    };
    std::vector<Pair> pairs;
    for (const auto& item : ctx.config.get_list("screen.pairs")) {
        auto bar = item.find('|');
        if (bar == std::string::npos)
            throw config_error("screen.pairs items are X:TX|Y:TY, got '" + item + "'");
        pairs.push_back({SeriesRef::parse(csv_detail::trim(item.substr(0, bar))),
                         SeriesRef::parse(csv_detail::trim(item.substr(bar + 1)))});
    }
    if (pairs.empty()) throw config_error("screen.pairs is empty");
    std::vector<int> leads;
    for (const auto& l : ctx.config.get_list("screen.leads"))
        leads.push_back(static_cast<int>(std::stol(l)));
    if (leads.empty()) leads.push_back(0);
    std::vector<MonthWindow> windows;
    for (const auto& w : ctx.config.get_list("screen.windows"))
        windows.push_back(RunConfig::parse_window(w));
    if (windows.empty()) windows.push_back({{1800, 1}, {2200, 12}});
    std::optional<BucketSpec> buckets;
    if (ctx.config.has("screen.buckets")) {
        BucketSpec spec;
        for (const auto& e : ctx.config.get_list("screen.buckets"))
            spec.edges.push_back(std::stod(e));
        spec.validate();
        buckets = spec;
    }
    const bool with_adf = ctx.config.get_bool("screen.adf", false);
    const auto adf_kind = parse_adf_kind(ctx.config.get("screen.adf_kind", "constant"));

    // validate every series name before any computation
    for (const auto& p : pairs) {
        (void)find_series(store, p.x.name);
        (void)find_series(store, p.y.name);
    }

    struct Cell {
        Pair pair;
        int lead;
        MonthWindow window;
    };
    std::vector<Cell> cells;
    for (const auto& p : pairs)
        for (int lead : leads)
            for (const auto& w : windows) cells.push_back({p, lead, w});

    std::vector<std::vector<ScreenRow>> results(cells.size());
    parallel_for(static_cast<int>(cells.size()), ctx.jobs, [&](int i) {
        const auto& cell = cells[static_cast<size_t>(i)];
        const auto& xs = find_series(store, cell.pair.x.name);
        const auto& ys = find_series(store, cell.pair.y.name);
        std::vector<ScreenRow>& rows = results[static_cast<size_t>(i)];
        auto rep = screen(xs, ys, cell.pair.x.transform, cell.pair.y.transform, cell.lead,
                          cell.window);
        if (with_adf) {
            auto try_adf = [&](const MonthlySeries& s,
                               const TransformSpec& t) -> std::optional<double> {
                try {
                    return adf_test(window(apply_transform(s, t), cell.window), adf_kind)
                        .p_value;
                } catch (const data_error&) {
                    return std::nullopt;
                }
            };
            rep.adf_p_x = try_adf(xs, cell.pair.x.transform);
            rep.adf_p_y = try_adf(ys, cell.pair.y.transform);
        }
        rows.push_back({rep, "", rep.n_pairs});
        if (buckets) {
            auto parts = screen_bucketed(xs, ys, cell.pair.x.transform,
                                         cell.pair.y.transform, cell.lead, cell.window,
                                         *buckets);
            for (const auto& part : parts)
                rows.push_back({part.report, part.bucket_label, part.month_count});
        }
    });

    std::vector<ScreenRow> flat;
    for (const auto& rows : results) flat.insert(flat.end(), rows.begin(), rows.end());
    write_text_file(ctx.out_path("screening.csv"), screening_csv(flat, ctx.meta("screen")));
    std::cout << "screening.csv: " << flat.size() << " rows ("
              << cells.size() << " grid cells)\n";
    return 0;
}

// -------------------------------------------------------------------- adf

int cmd_adf(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    auto kind = parse_adf_kind(ctx.config.get("adf.kind", "constant"));
    std::optional<MonthWindow> win;
    if (auto w = ctx.config.maybe("adf.window")) win = RunConfig::parse_window(*w);
    std::optional<int> max_lags;
    if (auto m = ctx.config.maybe("adf.max_lags"))
        if (*m != "auto") max_lags = static_cast<int>(std::stol(*m));
    auto items = ctx.config.get_list("adf.series");
    if (items.empty()) throw config_error("adf.series is empty");
    ordered_json results = ordered_json::array();
    for (const auto& item : items) {
        auto ref = SeriesRef::parse(item);
        auto series = apply_transform(find_series(store, ref.name), ref.transform);
        if (win) series = window(series, *win);
        auto res = adf_test(series, kind, max_lags);
        results.push_back(adf_json(series.name(), res));
        std::cout << series.name() << ": stat=" << res.test_statistic
                  << " p=" << res.p_value << " lags=" << res.lags_used << "\n";
    }
    write_json_file(ctx.out_path("adf.json"),
                    ordered_json{{"meta", ctx.meta("adf").json()}, {"results", results}});
    return 0;
}

// --------------------------------------------------------------- simulate

[[nodiscard]] GeneratorConfig generator_from_config(const RunConfig& cfg) {
    GeneratorConfig g;
    g.n_loans = static_cast<int>(cfg.get_int("sim.n_loans", 1000));
    g.intercept = cfg.get_double("sim.intercept", 0.1);
    g.noise_sigma = cfg.get_double("sim.noise_sigma", 0.25);
    for (const auto& item : cfg.get_list("sim.year_weights")) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error("sim.year_weights items are YEAR:W or Y1-Y2:W, got '" + item +
                               "'");
        double w = std::stod(item.substr(colon + 1));
        std::string span = item.substr(0, colon);
        auto dash = span.find('-');
        int y0 = static_cast<int>(std::stol(span.substr(0, dash)));
        int y1 = dash == std::string::npos
                     ? y0
                     : static_cast<int>(std::stol(span.substr(dash + 1)));
        for (int y = y0; y <= y1; ++y) g.year_weights[y] = w;
    }
    for (const auto& item : cfg.get_list("sim.mev_loadings")) {
        auto colon = item.find_last_of(':');
        if (colon == std::string::npos)
            throw config_error("sim.mev_loadings items are SERIES.TRANSFORM:COEF");
        auto term = FormulaTerm::parse(item.substr(0, colon));
        if (term.kind != FormulaTerm::Kind::mev)
            throw config_error("sim.mev_loadings: '" + item + "' is not SERIES.TRANSFORM");
        g.mev_loadings.push_back(
            {term.series_name, term.transform, std::stod(item.substr(colon + 1))});
    }
    for (const auto& item : cfg.get_list("sim.covariates")) {
        // name:mean:sd:coef
        std::vector<std::string> parts;
        std::string cur;
        for (char c : item) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else
                cur.push_back(c);
        }
        parts.push_back(cur);
        if (parts.size() != 4)
            throw config_error("sim.covariates items are NAME:MEAN:SD:COEF, got '" + item +
                               "'");
        g.covariates.push_back({parts[0], std::stod(parts[1]), std::stod(parts[2]),
                                std::stod(parts[3])});
    }
    g.ltv_mean = cfg.get_double("sim.ltv_mean", g.ltv_mean);
    g.ltv_sd = cfg.get_double("sim.ltv_sd", g.ltv_sd);
    g.ltv_coefficient = cfg.get_double("sim.ltv_coef", g.ltv_coefficient);
    g.workout_ratio_mean = cfg.get_double("sim.workout_mean", g.workout_ratio_mean);
    g.workout_ratio_sd = cfg.get_double("sim.workout_sd", g.workout_ratio_sd);
    g.balance_log_mean = cfg.get_double("sim.balance_log_mean", g.balance_log_mean);
    g.balance_log_sd = cfg.get_double("sim.balance_log_sd", g.balance_log_sd);
    g.resolution_min_months =
        static_cast<int>(cfg.get_int("sim.resolution_min", g.resolution_min_months));
    g.resolution_max_months =
        static_cast<int>(cfg.get_int("sim.resolution_max", g.resolution_max_months));
    g.appraisal_jitter_months =
        static_cast<int>(cfg.get_int("sim.appraisal_jitter", g.appraisal_jitter_months));
    return g;
}

int cmd_simulate(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    auto gen = generator_from_config(ctx.config);
    auto records = generate_synthetic_portfolio(gen, store, ctx.seed);
    write_loans_csv(ctx.out_path("loans.csv"), records,
                    ctx.meta("simulate").csv_banner());
    int censored = 0;
    std::map<int, int> by_year;
    for (const auto& r : records) {
        censored += raw_lgd(r) <= 0.0;
        ++by_year[r.default_month.year];
    }
    ordered_json years = ordered_json::object();
    for (const auto& [y, c] : by_year) years[std::to_string(y)] = c;
    ordered_json summary{{"meta", ctx.meta("simulate").json()},
                         {"n_loans", records.size()},
                         {"censored_share",
                          static_cast<double>(censored) / static_cast<double>(records.size())},
                         {"defaults_by_year", years}};
    write_json_file(ctx.out_path("simulate_summary.json"), summary);
    std::cout << "loans.csv: " << records.size() << " records, censored share "
              << static_cast<double>(censored) / static_cast<double>(records.size()) << "\n";
    return 0;
}

// -------------------------------------------------------------------- fit

[[nodiscard]] CensoredMeanForm mean_form(const RunConfig& cfg, const std::string& key) {
    return cfg.get_bool(key, false) ? CensoredMeanForm::unscaled_phi
                                    : CensoredMeanForm::textbook;
}

int cmd_fit(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    auto records = read_loans_csv(ctx.config.require("data.loans"));
    auto model_names = ctx.config.keys_under("fit.formula.");
    if (model_names.empty()) throw config_error("no fit.formula.<name> entries");
    auto form = mean_form(ctx.config, "fit.unscaled_phi");

    std::vector<ModelFrame> frames;
    std::vector<TobitFit> fits;
    for (const auto& name : model_names) {
        auto terms = parse_formula(ctx.config.get_list("fit.formula." + name));
        frames.push_back(build_model_frame(records, store, terms));
        TobitOptions opt;
        opt.model_name = name;
        fits.push_back(fit_tobit(frames.back().X, frames.back().y, opt));
        write_json_file(ctx.out_path("fit_" + name + ".json"),
                        fit_report_json(fits.back(), ctx.meta("fit")));
        write_text_file(ctx.out_path("quarterly_" + name + ".csv"),
                        quarterly_csv(quarterly_mean_fit(frames.back(), fits.back(), form),
                                      ctx.meta("fit")));
        std::cout << "model " << name << ": bic=" << fits.back().bic
                  << " sigma=" << fits.back().sigma
                  << " censored=" << fits.back().n_censored << "/" << fits.back().n_obs
                  << "\n";
    }

    if (fits.size() > 1) {
        auto ranked = rank_by_bic(fits);
        ordered_json by_bic = ordered_json::array();
        for (const auto& f : ranked)
            by_bic.push_back(ordered_json{{"model", f.model_name}, {"bic", f.bic}});
        ordered_json doc{{"meta", ctx.meta("fit").json()}, {"by_bic", by_bic}};
        if (auto tq = ctx.config.maybe("fit.target_quarter")) {
            auto quarter = QuarterKey::parse(*tq);
            std::vector<DownturnCandidate> candidates;
            for (size_t i = 0; i < fits.size(); ++i)
                candidates.push_back({model_names[i], fits[i], &frames[i]});
            auto downturn = downturn_underestimation_rank(candidates, quarter, form);
            ordered_json du = ordered_json::array();
            for (const auto& d : downturn)
                du.push_back(ordered_json{{"model", d.name},
                                          {"underestimation", d.underestimation}});
            doc["target_quarter"] = quarter.str();
            doc["by_downturn_underestimation"] = du;
        }
        write_json_file(ctx.out_path("model_ranking.json"), doc);
    }
    return 0;
}

// --------------------------------------------------------------------- cv

int cmd_cv(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    auto records = read_loans_csv(ctx.config.require("data.loans"));
    auto terms = parse_formula(ctx.config.get_list("cv.formula"));
    auto frame = build_model_frame(records, store, terms);
    auto scheme = ctx.config.get("cv.scheme", "k_fold");
    FoldPlan plan;
    double default_threshold;
    if (scheme == "k_fold") {
        int k = static_cast<int>(ctx.config.get_int("cv.k", 10));
        plan = k_fold_plan(frame.X.n_rows(), k, ctx.seed);
        default_threshold = 1.0;
    } else if (scheme == "leave_one_year") {
        std::vector<int> years;
        for (const auto& m : frame.default_month) years.push_back(m.year);
        plan = leave_one_group_plan(years, "default_year");
        default_threshold = 2.0;
    } else {
        throw config_error("cv.scheme must be k_fold or leave_one_year");
    }
    double threshold = ctx.config.get_double("cv.threshold_se", default_threshold);
    auto report = run_stability_cv(frame.X, frame.y, plan, threshold, {}, ctx.jobs);
    write_text_file(ctx.out_path("stability_" + scheme + ".csv"),
                    stability_csv(report, ctx.meta("cv")));
    write_json_file(ctx.out_path("stability_" + scheme + ".json"),
                    stability_json(report, ctx.meta("cv")));
    std::cout << "cv " << plan.scheme << ": " << report.per_fold.size() << " folds, "
              << report.flags.size() << " flags at " << threshold << " SE\n";
    return 0;
}

// ------------------------------------------------------------------- mars

int cmd_mars(const CliContext& ctx) {
    auto store = load_series_store(ctx);
    auto records = read_loans_csv(ctx.config.require("data.loans"));
    auto terms = parse_formula(ctx.config.get_list("mars.formula"));
    for (const auto& t : terms)
        if (t.kind == FormulaTerm::Kind::intercept)
            throw config_error("mars.formula lists predictors only (no '1')");
    auto frame = build_model_frame(records, store, terms);
    MarsOptions opt;
    opt.max_terms = static_cast<int>(ctx.config.get_int("mars.max_terms", 21));
    opt.max_degree = static_cast<int>(ctx.config.get_int("mars.max_degree", 1));
    opt.penalty_d = ctx.config.get_double("mars.penalty", 3.0);
    opt.min_span = static_cast<int>(ctx.config.get_int("mars.min_span", 0));
    opt.allow_self_product = ctx.config.get_bool("mars.self_product", false);
    auto model = mars_fit(frame.X, frame.y, opt);
    write_json_file(ctx.out_path("mars_model.json"),
                    mars_model_json(model, ctx.meta("mars")));
    std::cout << "mars: " << model.n_terms() << " terms, gcv=" << model.gcv << "\n";
    return 0;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const CliContext& ctx) {
    auto path = ctx.config.require("predict.model");
    std::ifstream in(path);
    if (!in) throw data_error("cannot open model report '" + path + "'");
    ordered_json doc = ordered_json::parse(in, nullptr, true, true);
    auto fit = fit_from_report_json(doc);
    auto xs = ctx.config.get_list("predict.x");
    Eigen::VectorXd x(static_cast<Eigen::Index>(xs.size()));
    for (size_t i = 0; i < xs.size(); ++i) x[static_cast<Eigen::Index>(i)] = std::stod(xs[i]);
    double value = predict_censored_mean(fit, x, mean_form(ctx.config, "predict.unscaled_phi"));
    ordered_json out{{"meta", ctx.meta("predict").json()},
                     {"model", fit.model_name},
                     {"x", xs},
                     {"censored_mean", value}};
    write_json_file(ctx.out_path("prediction.json"), out);
    std::cout << "censored mean: " << value << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"macro-driven workout LGD modeling toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> jobs_override;
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--out", out_dir, "output directory (default: out.dir or '.')");
    app.add_option("--seed", seed_override, "seed override");
    app.add_option("--jobs", jobs_override, "worker threads for grid/fold parallelism");

    const std::vector<std::pair<const char*, const char*>> subcommands = {
        {"ingest", "load MEV CSVs and summarize spans"},
        {"screen", "correlation screening grid"},
        {"adf", "unit-root tests on configured series"},
        {"fit", "Tobit fits, BIC and downturn ranking"},
        {"cv", "coefficient-stability cross validation"},
        {"mars", "nonlinearity detection via MARS"},
        {"predict", "score a fitted model report"},
        {"simulate", "generate a synthetic loan portfolio"},
    };
    for (const auto& [name, desc] : subcommands)
        app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CliContext ctx;
        ctx.config = RunConfig::from_file(config_path);
        ctx.out_dir = !out_dir.empty() ? out_dir : ctx.config.get("out.dir", ".");
        ctx.seed = seed_override.value_or(
            static_cast<std::uint64_t>(ctx.config.get_int("seed", 0)));
        ctx.jobs = jobs_override.value_or(static_cast<int>(ctx.config.get_int("jobs", 1)));
        if (ctx.jobs < 1) throw config_error("jobs must be >= 1");
        fs::create_directories(ctx.out_dir);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "ingest") return cmd_ingest(ctx);
        if (sub == "screen") return cmd_screen(ctx);
        if (sub == "adf") return cmd_adf(ctx);
        if (sub == "fit") return cmd_fit(ctx);
        if (sub == "cv") return cmd_cv(ctx);
        if (sub == "mars") return cmd_mars(ctx);
        if (sub == "predict") return cmd_predict(ctx);
        if (sub == "simulate") return cmd_simulate(ctx);
        throw config_error("unknown subcommand " + sub);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
