#include "twinbeam/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "twinbeam/gaussian.hpp"

namespace twinbeam::cli {

namespace {

using reservoir::SpectralKind;
using reservoir::SpectralModel;

CliConfig make_preset(SpectralKind kind, double omega0, double r, double t_max,
                      int n_steps) {
    CliConfig cfg;
    cfg.run.model.kind = kind;
    cfg.run.model.lambda = 0.1;
    cfg.run.model.beta = (kind == SpectralKind::HighTLorentzian) ? 200.0 : 0.0;
    cfg.run.params.alpha = 0.1;
    cfg.run.params.omega0 = omega0;
    cfg.run.r = r;
    cfg.run.grid.t_max = t_max;
    cfg.run.grid.n_steps = n_steps;
    cfg.run.eps_death = 1e-9;
    return cfg;
}

std::string kind_name(SpectralKind k) {
    return k == SpectralKind::ZeroTLorentzian ? "zero_t_lorentzian"
                                              : "high_t_lorentzian";
}

SpectralKind kind_from_name(const std::string& s) {
    if (s == "zero_t_lorentzian") return SpectralKind::ZeroTLorentzian;
    if (s == "high_t_lorentzian") return SpectralKind::HighTLorentzian;
    throw ConfigError("model.kind must be zero_t_lorentzian or high_t_lorentzian");
}

void reject_unknown(const ordered_json& obj, const std::vector<std::string>& known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) {
            if (it.key() == k) { ok = true; break; }
        }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

double need_number(const ordered_json& obj, const std::string& key,
                   const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

struct Options {
    std::string subcommand;
    std::string preset;
    std::string config_path;
    std::string out_path;
    std::string source;
    double eps_death = -1.0;
    bool dump_config = false;
};

CliConfig resolve_config(const Options& opt) {
    if (!opt.preset.empty() && !opt.config_path.empty()) {
        throw ConfigError("--preset and --config are mutually exclusive");
    }
    CliConfig cfg;
    if (!opt.preset.empty()) {
        const FigurePreset* p = find_preset(opt.preset);
        if (!p) throw ConfigError("unknown preset '" + opt.preset + "'");
        cfg = p->config;
    } else if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ConfigError("cannot open config file " + opt.config_path);
        ordered_json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        cfg = parse_config(doc);
    } else {
        throw ConfigError("need --preset or --config");
    }
    if (!opt.source.empty()) {
        if (opt.source == "analytic") {
            cfg.run.source = propagator::CoefficientSource::Analytic;
        } else if (opt.source == "quadrature") {
            cfg.run.source = propagator::CoefficientSource::Quadrature;
        } else {
            throw ConfigError("--source must be analytic or quadrature");
        }
    }
    if (opt.eps_death > 0.0) cfg.run.eps_death = opt.eps_death;
    try {
        cfg.run.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (cfg.run.params.alpha > 0.3) {
        std::cerr << "warning: alpha = " << cfg.run.params.alpha
                  << " is outside the weak-coupling regime\n";
    }
    return cfg;
}

// Output sink: file (binary mode, \n endings) or stdout.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::out | std::ios::binary);
            if (!file_) throw ConfigError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

ordered_json event_report_json(const dynamics::EventReport& r) {
    ordered_json j;
    j["classification"] = dynamics::to_string(r.classification);
    j["death_times"] = r.death_times;
    j["revival_times"] = r.revival_times;
    return j;
}

int cmd_run(const Options& opt) {
    const CliConfig cfg = resolve_config(opt);
    const dynamics::Trajectory traj = dynamics::run(cfg.run);

    {
        Sink sink(opt.out_path);
        std::ostream& os = sink.stream();
        os << "t,ef_exact,ef_secular,nu_min_exact,nu_min_secular,gamma_big,delta_gamma\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            os << format_number(traj.times[i]) << ','
               << format_number(traj.ef_exact[i]) << ','
               << format_number(traj.ef_secular[i]) << ','
               << format_number(traj.nu_min_exact[i]) << ','
               << format_number(traj.nu_min_secular[i]) << ','
               << format_number(traj.kernels[i].Gamma) << ','
               << format_number(traj.kernels[i].DeltaGamma) << '\n';
        }
    }

    const auto [rep_exact, rep_secular] = dynamics::detect_events(traj, cfg.run.eps_death);
    ordered_json events;
    events["horizon"] = traj.times.back();
    events["eps_death"] = cfg.run.eps_death;
    events["exact"] = event_report_json(rep_exact);
    events["secular"] = event_report_json(rep_secular);
    events["physicality_warning_times"] = traj.physicality_warnings;
    if (!opt.out_path.empty()) {
        std::ofstream ev(opt.out_path + ".events.json", std::ios::out | std::ios::binary);
        ev << events.dump(2) << '\n';
    } else {
        std::cout << events.dump(2) << '\n';
    }
    if (!traj.physicality_warnings.empty()) {
        std::cerr << "warning: exact-mode state dipped below the vacuum floor at "
                  << traj.physicality_warnings.size() << " sample(s)\n";
    }
    return 0;
}

int cmd_coeffs(const Options& opt) {
    const CliConfig cfg = resolve_config(opt);
    Sink sink(opt.out_path);
    std::ostream& os = sink.stream();
    os << "t,delta,pi,gamma,delta_quad,pi_quad,gamma_quad,rshift_quad,"
          "dev_delta,dev_pi,dev_gamma\n";
    const int n = cfg.coeff_samples;
    for (int i = 0; i <= n; ++i) {
        const double t = cfg.run.grid.t_max * i / n;
        const auto a = reservoir::coeff_analytic(cfg.run.model, cfg.run.params, t);
        const auto q = reservoir::coeff_quadrature(cfg.run.model, cfg.run.params, t,
                                                   cfg.run.quad);
        const auto dev = [](double x, double y) {
            return std::fabs(x - y) / std::max(std::fabs(y), 1e-12);
        };
        os << format_number(t) << ','
           << format_number(a.delta) << ',' << format_number(a.pi) << ','
           << format_number(a.gamma) << ','
           << format_number(q.delta) << ',' << format_number(q.pi) << ','
           << format_number(q.gamma) << ','
           << format_number(q.rshift.value_or(0.0)) << ','
           << format_number(dev(a.delta, q.delta)) << ','
           << format_number(dev(a.pi, q.pi)) << ','
           << format_number(dev(a.gamma, q.gamma)) << '\n';
    }
    return 0;
}

double* sweep_target(dynamics::RunConfig& rc, const std::string& param) {
    if (param == "r") return &rc.r;
    if (param == "omega0") return &rc.params.omega0;
    if (param == "alpha") return &rc.params.alpha;
    if (param == "lambda") return &rc.model.lambda;
    if (param == "beta") return &rc.model.beta;
    return nullptr;
}

int cmd_sweep(const Options& opt) {
    const CliConfig cfg = resolve_config(opt);
    if (!cfg.sweep) throw ConfigError("sweep subcommand needs a 'sweep' section in the config");
    Sink sink(opt.out_path);
    std::ostream& os = sink.stream();
    os << "value,classification_exact,classification_secular,"
          "first_death_exact,first_death_secular,max_ef_diff\n";
    for (const double v : cfg.sweep->values) {
        dynamics::RunConfig rc = cfg.run;
        double* slot = sweep_target(rc, cfg.sweep->param);
        if (!slot) throw ConfigError("unknown sweep parameter '" + cfg.sweep->param + "'");
        *slot = v;
        try {
            rc.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        const dynamics::Trajectory traj = dynamics::run(rc);
        const auto [re, rs] = dynamics::detect_events(traj, rc.eps_death);
        const auto m = dynamics::compare(traj, rc.eps_death);
        os << format_number(v) << ','
           << dynamics::to_string(re.classification) << ','
           << dynamics::to_string(rs.classification) << ','
           << format_number(m.death_time_exact) << ','
           << format_number(m.death_time_secular) << ','
           << format_number(m.max_abs_diff) << '\n';
    }
    return 0;
}

int cmd_compare(const Options& opt) {
    const CliConfig cfg = resolve_config(opt);
    const dynamics::Trajectory traj = dynamics::run(cfg.run);
    const auto m = dynamics::compare(traj, cfg.run.eps_death);
    ordered_json j;
    j["max_abs_diff"] = m.max_abs_diff;
    j["t_at_max"] = m.t_at_max;
    j["death_time_exact"] = m.death_time_exact;
    j["death_time_secular"] = m.death_time_secular;
    Sink sink(opt.out_path);
    sink.stream() << j.dump(2) << '\n';
    return 0;
}

}  // namespace

const std::vector<FigurePreset>& presets() {
    static const std::vector<FigurePreset> table = {
        {"fig1a", make_preset(SpectralKind::ZeroTLorentzian, 5.0, 2.0, 30.0, 8192)},
        {"fig1b", make_preset(SpectralKind::ZeroTLorentzian, 5.0, 0.2, 30.0, 8192)},
        {"fig2a", make_preset(SpectralKind::HighTLorentzian, 10.0, 2.0, 15.0, 8192)},
        {"fig2b", make_preset(SpectralKind::HighTLorentzian, 10.0, 0.01, 2.0, 8192)},
        {"fig3a", make_preset(SpectralKind::HighTLorentzian, 0.15, 1.0, 40.0, 8192)},
        {"fig3b", make_preset(SpectralKind::HighTLorentzian, 0.15, 0.08, 40.0, 8192)},
        {"fig4L", make_preset(SpectralKind::ZeroTLorentzian, 10.0, 0.6, 30.0, 8192)},
        {"fig4R", make_preset(SpectralKind::HighTLorentzian, 10.0, 0.6, 15.0, 8192)},
    };
    return table;
}

const FigurePreset* find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

CliConfig parse_config(const ordered_json& doc) {
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    reject_unknown(doc, {"model", "alpha", "omega0", "r", "t_max", "n_steps",
                         "eps_death", "source", "coeff_samples", "sweep"},
                   "config");
    CliConfig cfg;

    if (!doc.contains("model") || !doc["model"].is_object()) {
        throw ConfigError("config needs a 'model' object");
    }
    const auto& jm = doc["model"];
    reject_unknown(jm, {"kind", "lambda", "beta"}, "model");
    if (!jm.contains("kind") || !jm["kind"].is_string()) {
        throw ConfigError("model.kind must be a string");
    }
    cfg.run.model.kind = kind_from_name(jm["kind"].get<std::string>());
    cfg.run.model.lambda = need_number(jm, "lambda", "model");
    if (jm.contains("beta")) {
        cfg.run.model.beta = need_number(jm, "beta", "model");
        if (!(cfg.run.model.beta > 0.0)) throw ConfigError("model.beta must be > 0");
    } else if (cfg.run.model.kind == SpectralKind::HighTLorentzian) {
        throw ConfigError("model.beta required for the high-T kind");
    }

    cfg.run.params.alpha = need_number(doc, "alpha", "config");
    cfg.run.params.omega0 = need_number(doc, "omega0", "config");
    cfg.run.r = need_number(doc, "r", "config");
    cfg.run.grid.t_max = need_number(doc, "t_max", "config");
    if (!doc.contains("n_steps") || !doc["n_steps"].is_number_integer()) {
        throw ConfigError("n_steps must be an integer");
    }
    cfg.run.grid.n_steps = doc["n_steps"].get<int>();
    if (doc.contains("eps_death")) {
        cfg.run.eps_death = need_number(doc, "eps_death", "config");
    }
    if (doc.contains("source")) {
        if (!doc["source"].is_string()) throw ConfigError("source must be a string");
        const std::string s = doc["source"].get<std::string>();
        if (s == "analytic") {
            cfg.run.source = propagator::CoefficientSource::Analytic;
        } else if (s == "quadrature") {
            cfg.run.source = propagator::CoefficientSource::Quadrature;
        } else {
            throw ConfigError("source must be analytic or quadrature");
        }
    }
    if (doc.contains("coeff_samples")) {
        if (!doc["coeff_samples"].is_number_integer()) {
            throw ConfigError("coeff_samples must be an integer");
        }
        cfg.coeff_samples = doc["coeff_samples"].get<int>();
        if (cfg.coeff_samples < 1) throw ConfigError("coeff_samples must be >= 1");
    }
    if (doc.contains("sweep")) {
        const auto& js = doc["sweep"];
        if (!js.is_object()) throw ConfigError("sweep must be an object");
        reject_unknown(js, {"param", "values"}, "sweep");
        SweepAxis axis;
        if (!js.contains("param") || !js["param"].is_string()) {
            throw ConfigError("sweep.param must be a string");
        }
        axis.param = js["param"].get<std::string>();
        if (!js.contains("values") || !js["values"].is_array()) {
            throw ConfigError("sweep.values must be an array");
        }
        for (const auto& v : js["values"]) {
            if (!v.is_number()) throw ConfigError("sweep.values must be numbers");
            axis.values.push_back(v.get<double>());
            if (!std::isfinite(axis.values.back())) {
                throw ConfigError("sweep.values must be finite");
            }
        }
        if (axis.values.size() > 10000) {
            throw ConfigError("sweep.values limited to 10000 points");
        }
        cfg.sweep = std::move(axis);
    }

    try {
        cfg.run.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ordered_json dump_config(const CliConfig& cfg) {
    ordered_json j;
    j["model"]["kind"] = kind_name(cfg.run.model.kind);
    j["model"]["lambda"] = cfg.run.model.lambda;
    if (cfg.run.model.kind == SpectralKind::HighTLorentzian) {
        j["model"]["beta"] = cfg.run.model.beta;
    }
    j["alpha"] = cfg.run.params.alpha;
    j["omega0"] = cfg.run.params.omega0;
    j["r"] = cfg.run.r;
    j["t_max"] = cfg.run.grid.t_max;
    j["n_steps"] = cfg.run.grid.n_steps;
    j["eps_death"] = cfg.run.eps_death;
    j["source"] = cfg.run.source == propagator::CoefficientSource::Analytic
                      ? "analytic"
                      : "quadrature";
    j["coeff_samples"] = cfg.coeff_samples;
    if (cfg.sweep) {
        j["sweep"]["param"] = cfg.sweep->param;
        j["sweep"]["values"] = cfg.sweep->values;
    }
    return j;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"two-mode Gaussian entanglement dynamics in Lorentzian reservoirs"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--preset", opt.preset, "named parameter preset");
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--out", opt.out_path, "output path (default stdout)");
        sub->add_option("--source", opt.source, "coefficient source: analytic|quadrature");
        sub->add_option("--eps-death", opt.eps_death, "threshold for EoF = 0 (nats)");
        sub->add_flag("--dump-config", opt.dump_config,
                      "echo the effective configuration and exit");
    };
    CLI::App* run = app.add_subcommand("run", "trajectory CSV + event report");
    CLI::App* coeffs = app.add_subcommand("coeffs", "coefficient series CSV");
    CLI::App* sweep = app.add_subcommand("sweep", "one row of events per parameter value");
    CLI::App* compare = app.add_subcommand("compare", "exact-vs-secular divergence JSON");
    for (CLI::App* sub : {run, coeffs, sweep, compare}) add_common(sub);

    std::vector<const char*> argv;
    argv.push_back("twinbeam");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        opt.subcommand = app.get_subcommands().front()->get_name();
        if (opt.dump_config) {
            const CliConfig cfg = resolve_config(opt);
            Sink sink(opt.out_path);
            sink.stream() << dump_config(cfg).dump(2) << '\n';
            return 0;
        }
        if (opt.subcommand == "run") return cmd_run(opt);
        if (opt.subcommand == "coeffs") return cmd_coeffs(opt);
        if (opt.subcommand == "sweep") return cmd_sweep(opt);
        if (opt.subcommand == "compare") return cmd_compare(opt);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const reservoir::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what()
                  << " (achieved " << e.achieved_error() << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace twinbeam::cli
