#include "config.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dblevy/gaver.hpp"

namespace dntcli {

using nlohmann::json;
using namespace dblevy;

namespace {

double as_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v.get<std::string>(), &pos);
            if (pos == v.get<std::string>().size()) return d;
        } catch (...) {
        }
    }
    throw std::invalid_argument("config: bad numeric value for '" + key + "'");
}

void reject_unknown(const json& block, const std::set<std::string>& known,
                    const std::string& name) {
    for (auto it = block.begin(); it != block.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + name + "." +
                                        it.key() + "'");
}

KoBoLParams model_from_json(const json& m) {
    if (m.contains("preset")) {
        reject_unknown(m, {"preset"}, "model");
        const auto key = m.at("preset").get<std::string>();
        auto p = preset(key);
        if (!p) throw std::invalid_argument("config: unknown preset '" + key + "'");
        return *p;
    }
    reject_unknown(m, {"c", "nu", "lambda_plus", "lambda_minus", "mu"}, "model");
    return KoBoLParams(as_number(m.at("c"), "c"), as_number(m.at("nu"), "nu"),
                       as_number(m.at("lambda_minus"), "lambda_minus"),
                       as_number(m.at("lambda_plus"), "lambda_plus"),
                       as_number(m.at("mu"), "mu"));
}

}  // namespace

void apply_json(RunConfig& cfg, const json& j) {
    reject_unknown(j, {"model", "market", "option", "numerics", "regime"},
                   "config");
    if (j.contains("model")) {
        cfg.model = model_from_json(j.at("model"));
        if (j.at("model").contains("preset"))
            cfg.preset_key = j.at("model").at("preset").get<std::string>();
    }
    if (j.contains("market")) {
        const auto& m = j.at("market");
        reject_unknown(m, {"r"}, "market");
        if (m.contains("r")) cfg.rate = as_number(m.at("r"), "r");
    }
    if (j.contains("option")) {
        const auto& o = j.at("option");
        reject_unknown(o, {"spot", "spots", "lo", "hi", "T"}, "option");
        if (o.contains("lo")) cfg.lo = as_number(o.at("lo"), "lo");
        if (o.contains("hi")) cfg.hi = as_number(o.at("hi"), "hi");
        if (o.contains("T")) cfg.maturity = as_number(o.at("T"), "T");
        if (o.contains("spot")) cfg.spots = {as_number(o.at("spot"), "spot")};
        if (o.contains("spots")) {
            cfg.spots.clear();
            for (const auto& s : o.at("spots"))
                cfg.spots.push_back(as_number(s, "spots"));
        }
    }
    if (j.contains("numerics")) {
        const auto& n = j.at("numerics");
        reject_unknown(n,
                       {"r0", "M", "M0", "kappa", "main_points", "whf_points",
                        "b", "omega", "block", "eps_trunc", "eps_whf",
                        "series_tol"},
                       "numerics");
        if (n.contains("r0")) cfg.numerics.r0 = as_number(n.at("r0"), "r0");
        if (n.contains("M"))
            cfg.numerics.gwr_m = static_cast<int>(as_number(n.at("M"), "M"));
        if (n.contains("M0"))
            cfg.numerics.m0 = static_cast<int>(as_number(n.at("M0"), "M0"));
        if (n.contains("kappa"))
            cfg.numerics.kappa = as_number(n.at("kappa"), "kappa");
        if (n.contains("main_points"))
            cfg.numerics.main_points =
                static_cast<int>(as_number(n.at("main_points"), "main_points"));
        if (n.contains("whf_points"))
            cfg.numerics.whf_points =
                static_cast<int>(as_number(n.at("whf_points"), "whf_points"));
        if (n.contains("b")) cfg.numerics.b = as_number(n.at("b"), "b");
        if (n.contains("omega"))
            cfg.numerics.omega = as_number(n.at("omega"), "omega");
        if (n.contains("block"))
            cfg.numerics.solver_block =
                static_cast<int>(as_number(n.at("block"), "block"));
        if (n.contains("eps_trunc"))
            cfg.numerics.eps_trunc = as_number(n.at("eps_trunc"), "eps_trunc");
        if (n.contains("eps_whf"))
            cfg.numerics.eps_whf = as_number(n.at("eps_whf"), "eps_whf");
        if (n.contains("series_tol"))
            cfg.numerics.series_tol = as_number(n.at("series_tol"), "series_tol");
    }
    if (j.contains("regime")) {
        const auto& rg = j.at("regime");
        reject_unknown(rg, {"states", "rates", "r", "G"}, "regime");
        RegimeModel model;
        for (const auto& st : rg.at("states"))
            model.states.push_back(model_from_json(st));
        const int m = model.size();
        model.rates = Eigen::MatrixXd::Zero(m, m);
        const auto& rates = rg.at("rates");
        if (static_cast<int>(rates.size()) != m)
            throw std::invalid_argument("config: regime.rates must be m x m");
        for (int a = 0; a < m; ++a) {
            if (static_cast<int>(rates[a].size()) != m)
                throw std::invalid_argument("config: regime.rates must be m x m");
            for (int b = 0; b < m; ++b)
                model.rates(a, b) = as_number(rates[a][b], "rates");
        }
        for (const auto& v : rg.at("r"))
            model.r.push_back(as_number(v, "regime.r"));
        for (const auto& v : rg.at("G"))
            model.payoff.push_back(as_number(v, "regime.G"));
        cfg.regime = std::move(model);
    }
}

json resolved_config(const RunConfig& cfg) {
    json j;
    if (cfg.model) {
        if (!cfg.preset_key.empty()) {
            j["model"] = {{"preset", cfg.preset_key}};
        } else {
            j["model"] = {{"c", cfg.model->c},
                          {"nu", cfg.model->nu},
                          {"lambda_plus", cfg.model->lambda_plus},
                          {"lambda_minus", cfg.model->lambda_minus},
                          {"mu", cfg.model->mu}};
        }
    }
    j["market"] = {{"r", cfg.rate}};
    j["option"] = {{"lo", cfg.lo}, {"hi", cfg.hi}, {"T", cfg.maturity},
                   {"spots", cfg.spots}};
    j["numerics"] = {{"r0", cfg.numerics.r0},
                     {"M", cfg.numerics.gwr_m},
                     {"M0", cfg.numerics.m0},
                     {"kappa", cfg.numerics.kappa},
                     {"main_points", cfg.numerics.main_points},
                     {"whf_points", cfg.numerics.whf_points},
                     {"b", cfg.numerics.b},
                     {"omega", cfg.numerics.omega},
                     {"block", cfg.numerics.solver_block},
                     {"eps_trunc", cfg.numerics.eps_trunc},
                     {"eps_whf", cfg.numerics.eps_whf},
                     {"series_tol", cfg.numerics.series_tol}};
    if (cfg.regime) {
        json states = json::array();
        for (const auto& s : cfg.regime->states)
            states.push_back({{"c", s.c},
                              {"nu", s.nu},
                              {"lambda_plus", s.lambda_plus},
                              {"lambda_minus", s.lambda_minus},
                              {"mu", s.mu}});
        json rates = json::array();
        for (int a = 0; a < cfg.regime->size(); ++a) {
            json row = json::array();
            for (int b = 0; b < cfg.regime->size(); ++b)
                row.push_back(cfg.regime->rates(a, b));
            rates.push_back(row);
        }
        j["regime"] = {{"states", states},
                       {"rates", rates},
                       {"r", cfg.regime->r},
                       {"G", cfg.regime->payoff}};
    }
    return j;
}

RunConfig parse(const std::vector<std::string>& args) {
    RunConfig cfg;

    // First pass: pull the config file so flags can override its values.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            std::ifstream in(args[i + 1]);
            if (!in)
                throw std::invalid_argument("config: cannot open file '" +
                                            args[i + 1] + "'");
            json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                throw std::invalid_argument(std::string("config: bad JSON: ") +
                                            e.what());
            }
            apply_json(cfg, j);
        }
    }

    CLI::App app{"Double-no-touch pricing under KoBoL/CGMY jump models"};
    app.require_subcommand(1);

    std::string preset_key, config_path;
    std::vector<double> spots;
    double lo = cfg.lo, hi = cfg.hi, maturity = cfg.maturity, rate = cfg.rate;
    double c = 0, nu = 0, lp = 0, lm = 0, mu = 0;
    bool have_custom = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--preset", preset_key, "model preset (AA|AB|MA|MB)");
        sub->add_option("--c", c)->check(CLI::PositiveNumber);
        sub->add_option("--nu", nu);
        sub->add_option("--lambda-plus", lp);
        sub->add_option("--lambda-minus", lm);
        sub->add_option("--mu", mu);
        sub->add_option("--spot", spots, "spot price(s)");
        sub->add_option("--lo", lo, "lower barrier");
        sub->add_option("--hi", hi, "upper barrier");
        sub->add_option("--T", maturity, "maturity in years");
        sub->add_option("--r", rate, "discount rate");
        sub->add_option("--r0", cfg.numerics.r0, "spectral shift");
        sub->add_option("--M", cfg.numerics.gwr_m, "GWR depth (2M nodes)");
        sub->add_option("--M0", cfg.numerics.m0, "series term cap");
        sub->add_option("--main-points", cfg.numerics.main_points);
        sub->add_option("--whf-points", cfg.numerics.whf_points);
        sub->add_option("--block", cfg.numerics.solver_block,
                        "solver block 1|2|3");
        sub->add_option("--format", cfg.output_format)
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", cfg.output_path, "output path");
        sub->add_flag("-v", cfg.verbosity, "verbose");
    };

    for (const char* name : {"price", "curve", "selfcheck", "gwr-test",
                             "whf-check", "mc", "regime-price"}) {
        auto* sub = app.add_subcommand(name);
        add_common(sub);
        if (std::string(name) == "mc") {
            sub->add_option("--paths", cfg.mc.n_paths);
            sub->add_option("--steps", cfg.mc.n_steps);
            sub->add_option("--eps", cfg.mc.eps);
            sub->add_option("--seed", cfg.mc.seed);
        }
        if (std::string(name) == "regime-price")
            sub->add_option("--state", cfg.initial_state, "initial state");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();

    if (!preset_key.empty()) {
        auto p = preset(preset_key);
        if (!p)
            throw std::invalid_argument("config: unknown preset '" + preset_key +
                                        "'");
        cfg.model = *p;
        cfg.preset_key = preset_key;
    }
    have_custom = c > 0 || nu > 0 || lp != 0 || lm != 0 || mu != 0;
    if (have_custom) {
        if (!(c > 0 && nu > 0 && lp > 0 && lm < 0))
            throw std::invalid_argument(
                "config: custom model needs --c --nu --lambda-plus "
                "--lambda-minus --mu");
        cfg.model = KoBoLParams(c, nu, lm, lp, mu);
        cfg.preset_key.clear();
    }
    if (!spots.empty()) cfg.spots = spots;
    cfg.lo = lo;
    cfg.hi = hi;
    cfg.maturity = maturity;
    cfg.rate = rate;

    if (!(cfg.lo < cfg.hi))
        throw std::invalid_argument("config: barriers out of order");
    if (!(cfg.lo > 0.0))
        throw std::invalid_argument("config: barriers must be positive");
    if (!(cfg.maturity > 0.0))
        throw std::invalid_argument("config: maturity must be positive");
    if (cfg.command == "regime-price" && !cfg.regime)
        throw std::invalid_argument(
            "config: regime-price needs a regime block in the config file");
    if ((cfg.command == "price" || cfg.command == "curve" ||
         cfg.command == "selfcheck" || cfg.command == "whf-check" ||
         cfg.command == "mc") &&
        !cfg.model)
        throw std::invalid_argument("config: no model given (preset or custom)");
    return cfg;
}

namespace {

std::string format_sig(double v, int digits = 10) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.output_path);
        if (!out)
            throw std::runtime_error("cannot open output path " + cfg.output_path);
        out << text;
    }
}

PricingRequest to_request(const RunConfig& cfg) {
    PricingRequest req{*cfg.model,
                       std::log(cfg.lo),
                       std::log(cfg.hi),
                       {},
                       cfg.maturity,
                       cfg.rate,
                       cfg.numerics};
    for (double s : cfg.spots) req.spots.push_back(std::log(s));
    return req;
}

std::string curve_csv(const RunConfig& cfg,
                      const std::vector<PricingResult>& res) {
    std::ostringstream os;
    os << "S,price,im_residual,whf_residual,series_terms\n";
    for (std::size_t i = 0; i < res.size(); ++i) {
        os << format_sig(cfg.spots[i]) << ',' << format_sig(res[i].price) << ','
           << format_sig(res[i].im_residual) << ','
           << format_sig(res[i].whf_residual) << ',' << res[i].series_terms
           << '\n';
    }
    return os.str();
}

std::string curve_json(const RunConfig& cfg,
                       const std::vector<PricingResult>& res) {
    json out = json::array();
    for (std::size_t i = 0; i < res.size(); ++i)
        out.push_back({{"S", cfg.spots[i]},
                       {"price", res[i].price},
                       {"im_residual", res[i].im_residual},
                       {"whf_residual", res[i].whf_residual},
                       {"series_terms", res[i].series_terms},
                       {"knocked_out", res[i].knocked_out}});
    return json{{"results", out}}.dump(2) + "\n";
}

int cmd_price_curve(const RunConfig& cfg) {
    const auto res = price_curve(to_request(cfg));
    emit(cfg, cfg.output_format == "json" ? curve_json(cfg, res)
                                          : curve_csv(cfg, res));
    return 0;
}

int cmd_selfcheck(const RunConfig& cfg) {
    const auto rep = self_consistency(to_request(cfg));
    std::ostringstream os;
    os << "config,max_abs_diff\n";
    os << "eps0_contours," << format_sig(rep.max_eps0) << '\n';
    os << "eps_r0_family," << format_sig(rep.max_r0_family) << '\n';
    os << "eps2_grid," << format_sig(rep.max_grid) << '\n';
    emit(cfg, os.str());
    const bool ok = rep.max_eps0 < 1e-7 && rep.max_r0_family < 2e-4 &&
                    rep.max_grid < 1e-4;
    return ok ? 0 : 1;
}

int cmd_gwr_test(const RunConfig& cfg) {
    struct Case {
        const char* name;
        std::function<cplx(double)> f;
        double exact;
        double tol;
    };
    const double t = 0.25;
    const std::vector<Case> cases{
        {"1/q", [](double q) { return cplx(1.0 / q, 0.0); }, 1.0, 1e-12},
        {"1/(q+3)", [](double q) { return cplx(1.0 / (q + 3.0), 0.0); },
         std::exp(-3.0 * t), 1e-6},
        {"1/q^2", [](double q) { return cplx(1.0 / (q * q), 0.0); }, t, 1e-7},
        {"q/(q^2+1)", [](double q) { return cplx(q / (q * q + 1.0), 0.0); },
         std::cos(t), 1e-5},
    };
    GwrConfig gc;
    gc.m = cfg.numerics.gwr_m;
    gc.maturity = t;
    std::ostringstream os;
    os << "transform,value,exact,error,pass\n";
    bool all_ok = true;
    for (const auto& c : cases) {
        std::vector<cplx> samples;
        for (double q : gwr_nodes(gc)) samples.push_back(c.f(q));
        const double v = gwr_invert(samples, gc);
        const double err = std::abs(v - c.exact);
        const bool ok = err < c.tol;
        all_ok = all_ok && ok;
        os << c.name << ',' << format_sig(v) << ',' << format_sig(c.exact) << ','
           << format_sig(err) << ',' << (ok ? "yes" : "no") << '\n';
    }
    emit(cfg, os.str());
    return all_ok ? 0 : 1;
}

int cmd_whf_check(const RunConfig& cfg) {
    const auto req = to_request(cfg);
    const BarrierGeometry geom(req.h_minus, req.h_plus);
    const double off = geom.width() / 2.0;
    ContourConfig cc;
    cc.main_points = cfg.numerics.main_points;
    cc.whf_points = cfg.numerics.whf_points;
    const auto pair = make_contour_pair(req.model, off, off, cc);
    GwrConfig gc;
    gc.m = cfg.numerics.gwr_m;
    gc.maturity = req.maturity;
    double worst = 0.0;
    for (double q : gwr_nodes(gc)) {
        const auto tab = compute_factors(req.model, req.rate + q, pair);
        worst = std::max(worst, tab.identity_residual);
    }
    std::ostringstream os;
    os << "max_identity_residual," << format_sig(worst) << '\n';
    emit(cfg, os.str());
    return worst < 1e-12 ? 0 : 1;
}

int cmd_mc(const RunConfig& cfg) {
    const auto req = to_request(cfg);
    if (req.spots.size() != 1)
        throw std::invalid_argument("mc: expected exactly one spot");
    const BarrierGeometry geom(req.h_minus, req.h_plus);
    const auto mc =
        simulate_dnt(req.model, geom, req.maturity, req.spots[0], req.rate,
                     cfg.mc);
    const auto analytic = price(req);
    const auto cmp = compare(analytic.price, mc);
    std::ostringstream os;
    os << "price,stderr,analytic,gap,gap_sigma,flagged,paths,steps,eps,seed\n";
    os << format_sig(mc.price) << ',' << format_sig(mc.stderr_) << ','
       << format_sig(analytic.price) << ',' << format_sig(cmp.gap) << ','
       << format_sig(cmp.gap_in_sigma) << ',' << (cmp.flagged ? "yes" : "no")
       << ',' << cfg.mc.n_paths << ',' << cfg.mc.n_steps << ','
       << format_sig(cfg.mc.eps) << ',' << cfg.mc.seed << '\n';
    emit(cfg, os.str());
    return cmp.flagged ? 1 : 0;
}

int cmd_regime(const RunConfig& cfg) {
    const BarrierGeometry geom(std::log(cfg.lo), std::log(cfg.hi));
    RegimeNumerics rn = cfg.regime_numerics;
    rn.gwr_m = cfg.numerics.gwr_m;
    rn.r0 = cfg.numerics.r0;
    std::ostringstream os;
    os << "state,price\n";
    const double x = std::log(cfg.spots.at(0));
    const auto prices =
        price_regime_dnt_all(*cfg.regime, geom, cfg.maturity, x, rn);
    for (std::size_t j = 0; j < prices.size(); ++j)
        os << j << ',' << format_sig(prices[j]) << '\n';
    emit(cfg, os.str());
    if (cfg.verbosity > 0)
        std::cerr << "initial state " << cfg.initial_state << ": "
                  << format_sig(prices.at(cfg.initial_state)) << '\n';
    return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
    if (cfg.command == "price" || cfg.command == "curve")
        return cmd_price_curve(cfg);
    if (cfg.command == "selfcheck") return cmd_selfcheck(cfg);
    if (cfg.command == "gwr-test") return cmd_gwr_test(cfg);
    if (cfg.command == "whf-check") return cmd_whf_check(cfg);
    if (cfg.command == "mc") return cmd_mc(cfg);
    if (cfg.command == "regime-price") return cmd_regime(cfg);
    throw std::invalid_argument("config: unknown command " + cfg.command);
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunConfig cfg;
    try {
        cfg = parse(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    try {
        return run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}

}  // namespace dntcli
