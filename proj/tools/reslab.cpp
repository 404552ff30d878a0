// reslab command-line tool: character tables, central values (formula and
// oracle, with an append-only cache), verification experiments, and the
// resonator-guided extreme-value search.
//
// Exit codes: 0 success / all experiments pass, 1 experiment failure,
// 2 usage error, 3 budget or convergence error.

#include <chrono>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "reslab/cache.hpp"
#include "reslab/central.hpp"
#include "reslab/characters.hpp"
#include "reslab/experiments.hpp"
#include "reslab/report_io.hpp"
#include "reslab/resonator.hpp"
#include "reslab/search.hpp"

namespace {

using namespace reslab;
using cplx = std::complex<double>;
using report_io::fmt17;

// ---- configuration ---------------------------------------------------------
// Plain `key = value` lines, '#' comments. Precedence: flag > file > default.

std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::ifstream in(path);
    if (!in) throw usage_error("config: cannot open '" + path + "'");
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw usage_error("config: empty key on line " + std::to_string(lineno));
        kv[key] = val;
    }
    return kv;
}

struct ConfigBinding {
    CLI::Option* opt;
    std::string key;
    std::function<void(const std::string&)> set;
};

class ConfigMerger {
public:
    void bind(CLI::Option* opt, std::string key, std::function<void(const std::string&)> set) {
        bindings_.push_back({opt, std::move(key), std::move(set)});
    }
    void bind_double(CLI::Option* opt, const std::string& key, double& ref) {
        bind(opt, key, [&ref, key](const std::string& v) {
            size_t pos = 0;
            ref = std::stod(v, &pos);
            if (pos != v.size()) throw usage_error("config: bad number for '" + key + "'");
        });
    }
    void bind_u64(CLI::Option* opt, const std::string& key, uint64_t& ref) {
        bind(opt, key, [&ref, key](const std::string& v) {
            size_t pos = 0;
            ref = std::stoull(v, &pos);
            if (pos != v.size()) throw usage_error("config: bad integer for '" + key + "'");
        });
    }
    void bind_unsigned(CLI::Option* opt, const std::string& key, unsigned& ref) {
        bind(opt, key, [&ref, key](const std::string& v) {
            size_t pos = 0;
            unsigned long u = std::stoul(v, &pos);
            if (pos != v.size() || u == 0) throw usage_error("config: bad thread count for '" + key + "'");
            ref = static_cast<unsigned>(u);
        });
    }
    void bind_string(CLI::Option* opt, const std::string& key, std::string& ref) {
        bind(opt, key, [&ref](const std::string& v) { ref = v; });
    }
    void apply(const std::map<std::string, std::string>& kv) const {
        for (const auto& b : bindings_) {
            if (b.opt && b.opt->count() > 0) continue;  // flag wins
            auto it = kv.find(b.key);
            if (it != kv.end()) b.set(it->second);
        }
    }

private:
    std::vector<ConfigBinding> bindings_;
};

// ---- shared state ----------------------------------------------------------

struct GlobalOpts {
    std::string config_path;
    std::string cache_path;
    std::string format = "json";
    std::string output;
    double tol = 1e-8;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void write_payload(const GlobalOpts& g, const std::string& payload) {
    if (g.output.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        if (!payload.empty() && payload.back() != '\n') std::fputc('\n', stdout);
    } else {
        std::ofstream out(g.output, std::ios::binary);
        if (!out) throw usage_error("cannot open output file '" + g.output + "'");
        out << payload;
    }
}

std::string effective_cache_path(const GlobalOpts& g) {
    if (const char* env = std::getenv("RESLAB_CACHE")) return env;  // env overrides the flag
    return g.cache_path;
}

std::map<std::string, cplx> parse_coeffs(const std::string& text) {
    // "label=re[,im];label=re[,im]"
    std::map<std::string, cplx> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw usage_error("coeffs: item '" + item + "' is not label=re[,im]");
        std::string label = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        double re = 0.0, im = 0.0;
        auto comma = val.find(',');
        try {
            if (comma == std::string::npos) {
                re = std::stod(val);
            } else {
                re = std::stod(val.substr(0, comma));
                im = std::stod(val.substr(comma + 1));
            }
        } catch (...) {
            throw usage_error("coeffs: bad number in '" + item + "'");
        }
        out[label] = cplx(re, im);
    }
    if (out.empty()) throw usage_error("coeffs: empty coefficient list");
    return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& text) {
    std::vector<uint64_t> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        out.push_back(std::stoull(item, &pos));
        if (pos != item.size()) throw usage_error("bad integer '" + item + "' in list");
    }
    return out;
}

// ---- subcommands -----------------------------------------------------------

int cmd_chars(const GlobalOpts& g, uint64_t q) {
    characters::CharacterGroup group(static_cast<uint32_t>(q));
    std::string out;
    const bool csv = g.format == "csv";
    if (csv)
        out = "label,order,parity,primitive,quadratic,gauss_abs\r\n";
    else
        out = "label   order  parity  primitive  quadratic  |tau|\n";
    for (const auto& c : group.characters()) {
        double tau = std::abs(characters::gauss_sum_raw(c));
        if (csv) {
            out += c.label() + ',' + std::to_string(c.order()) + ',' + (c.is_even() ? "even" : "odd") +
                   ',' + (c.is_primitive() ? "true" : "false") + ',' +
                   (c.is_quadratic() ? "true" : "false") + ',' + fmt17(tau) + "\r\n";
        } else {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-7s %-6u %-7s %-10s %-10s %.17g\n", c.label().c_str(),
                          c.order(), c.is_even() ? "even" : "odd", c.is_primitive() ? "yes" : "no",
                          c.is_quadratic() ? "yes" : "no", tau);
            out += buf;
        }
    }
    write_payload(g, out);
    return 0;
}

int cmd_lvalue(const GlobalOpts& g, uint64_t q, const std::string& label, uint64_t d,
               const std::string& method_name) {
    central::Method method;
    if (method_name == "formula")
        method = central::Method::formula;
    else if (method_name == "oracle")
        method = central::Method::oracle;
    else if (method_name == "both")
        method = central::Method::both;
    else
        throw usage_error("lvalue: method must be formula, oracle, or both");

    characters::CharacterGroup group(static_cast<uint32_t>(q));
    const auto& psi = group.by_label(label);
    const bool need_oracle = method != central::Method::formula;
    const bool need_formula = method != central::Method::oracle;

    cache::ValueCache vc(effective_cache_path(g));
    if (vc.corrupt_lines() > 0)
        std::fprintf(stderr, "[cache] skipped %zu corrupt line(s)\n", vc.corrupt_lines());

    central::CentralValueRecord rec;
    auto t0 = std::chrono::steady_clock::now();
    auto hit = vc.lookup(static_cast<uint32_t>(q), label, d, g.tol, need_oracle, need_formula);
    if (hit) {
        rec.q = hit->q;
        rec.psi_label = hit->psi_label;
        rec.d = hit->d;
        rec.value_oracle = cplx(hit->re, hit->im);
        rec.value_sq_formula = hit->lsq;
        rec.tol = hit->tol;
        rec.has_oracle = hit->has_oracle();
        rec.has_formula = hit->has_formula();
        rec.epsilon = central::root_number(psi, d);
    } else {
        rec = central::compute_record(psi, d, g.tol, method);
        vc.append(cache::to_cache_record(rec));
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                  .count();
    std::fprintf(stderr, "[lvalue] %s in %lld ms\n", hit ? "cache hit" : "computed",
                 static_cast<long long>(ms));

    std::string out = "{\"q\":" + std::to_string(rec.q) + ",\"psi_label\":\"" +
                      report_io::json_escape(rec.psi_label) + "\",\"d\":" + std::to_string(rec.d);
    if (rec.has_oracle)
        out += ",\"L_re\":" + fmt17(rec.value_oracle.real()) + ",\"L_im\":" + fmt17(rec.value_oracle.imag());
    if (rec.has_formula) out += ",\"Lsq_formula\":" + fmt17(rec.value_sq_formula);
    out += ",\"epsilon_re\":" + fmt17(rec.epsilon.real()) + ",\"epsilon_im\":" + fmt17(rec.epsilon.imag());
    out += ",\"tol\":" + fmt17(rec.tol);
    if (rec.has_oracle && rec.has_formula)
        out += ",\"discrepancy\":" + fmt17(std::fabs(std::norm(rec.value_oracle) - rec.value_sq_formula));
    out += "}";
    write_payload(g, out);
    return 0;
}

struct VerifyOpts {
    std::string experiment;
    uint64_t q = 7;
    uint64_t u = 1;
    uint64_t X = 10000;
    uint64_t x = 1000000;
    std::string x_list = "250,500,1000";
    double theta = 1.0 / 3.0;
    double c_L = 1.2;
    double K = experiments::kCharsumErrorK;
    std::string psi_label;
    std::string psi2_label;
};

int cmd_verify(const GlobalOpts& g, const VerifyOpts& v) {
    std::vector<experiments::ExperimentReport> reports;
    auto group_for = [&]() { return characters::CharacterGroup(static_cast<uint32_t>(v.q)); };
    auto pick = [&](const characters::CharacterGroup& grp, const std::string& label,
                    size_t fallback) -> const characters::DirichletCharacter& {
        if (!label.empty()) return grp.by_label(label);
        auto good = grp.even_nonquadratic_primitive();
        if (good.size() <= fallback)
            throw usage_error("q=" + std::to_string(v.q) + " has no suitable character (need index " +
                              std::to_string(fallback) + ")");
        return *good[fallback];
    };

    if (v.experiment == "charsum") {
        reports.push_back(experiments::charsum_experiment(v.u, v.q, v.X, v.K));
    } else if (v.experiment == "fourth-moment") {
        auto grp = group_for();
        const auto& psi = pick(grp, v.psi_label, 0);
        reports = experiments::fourth_moment_scan(psi, parse_u64_list(v.x_list), g.tol, g.threads);
    } else if (v.experiment == "prime-sum") {
        auto grp = group_for();
        const auto& psi = pick(grp, v.psi_label, 0);
        const auto& psi2 = v.psi2_label.empty() ? psi : grp.by_label(v.psi2_label);
        reports.push_back(experiments::prime_sum_check(psi, psi2, v.x));
    } else if (v.experiment == "mixed-moment") {
        auto grp = group_for();
        const auto& psi0 = pick(grp, v.psi_label, 0);
        const auto& psi = v.psi2_label.empty() ? psi0 : grp.by_label(v.psi2_label);
        auto params = resonator::make_params(v.X, v.theta, v.c_L);
        reports.push_back(
            experiments::mixed_moment_experiment(params, psi0, psi, v.X, g.tol, g.threads));
    } else if (v.experiment == "resonator-moments") {
        auto grp = group_for();
        const auto& psi0 = pick(grp, v.psi_label, 0);
        auto params = resonator::make_params(v.X, v.theta, v.c_L);
        reports = experiments::resonator_moment_experiment(params, psi0, v.X, g.threads);
    } else {
        throw usage_error("verify: unknown experiment '" + v.experiment + "'");
    }

    std::string out;
    if (g.format == "csv") {
        out = report_io::reports_to_csv(reports);
    } else {
        for (const auto& r : reports) out += report_io::to_json_line(r) + "\n";
    }
    write_payload(g, out);
    for (const auto& r : reports)
        if (!r.pass) return 1;
    return 0;
}

struct SearchOpts {
    uint64_t q = 7;
    std::string coeffs = "2=1";
    uint64_t X = 200;
    double theta = 1.0 / 3.0;
    double c_L = 1.4;
    double shortlist = 1.0;
    std::string threshold_mode = "theorem";
    double threshold_constant = 1.0 / 81.0;
    std::string csv_path;
};

int cmd_search(const GlobalOpts& g, const SearchOpts& s) {
    search::SearchConfig cfg;
    cfg.q = s.q;
    cfg.coeffs = parse_coeffs(s.coeffs);
    cfg.X = s.X;
    cfg.params = resonator::make_params(s.X, s.theta, s.c_L);
    cfg.shortlist_fraction = s.shortlist;
    if (s.threshold_mode == "theorem")
        cfg.threshold_mode = search::ThresholdMode::theorem;
    else if (s.threshold_mode == "section6")
        cfg.threshold_mode = search::ThresholdMode::section6;
    else if (s.threshold_mode == "custom")
        cfg.threshold_mode = search::ThresholdMode::custom;
    else
        throw usage_error("search: threshold-mode must be theorem, section6, or custom");
    cfg.threshold_constant = s.threshold_constant;
    cfg.tol = g.tol;
    cfg.threads = g.threads;

    auto result = search::extreme_value_search(cfg);
    write_payload(g, report_io::to_json(result, cfg));
    if (!s.csv_path.empty()) {
        std::ofstream out(s.csv_path, std::ios::binary);
        if (!out) throw usage_error("cannot open csv file '" + s.csv_path + "'");
        out << report_io::exceedances_to_csv(result);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    CLI::App app{"resonance-method experiments for quadratic twists of Dirichlet L-functions"};
    app.require_subcommand(1);
    ConfigMerger merger;

    auto* opt_config = app.add_option("--config", g.config_path, "config file (key = value lines)");
    auto* opt_cache = app.add_option("--cache-path", g.cache_path, "central-value cache file");
    auto* opt_tol = app.add_option("--tol", g.tol, "accuracy target");
    auto* opt_threads = app.add_option("--threads", g.threads, "worker thread cap");
    auto* opt_format = app.add_option("--format", g.format, "output format: json or csv");
    auto* opt_output = app.add_option("--output", g.output, "write output to file instead of stdout");
    merger.bind_string(opt_cache, "cache_path", g.cache_path);
    merger.bind_double(opt_tol, "tol", g.tol);
    merger.bind_unsigned(opt_threads, "threads", g.threads);
    merger.bind_string(opt_format, "format", g.format);
    merger.bind_string(opt_output, "output", g.output);

    uint64_t chars_q = 0;
    auto* sc_chars = app.add_subcommand("chars", "print the character table mod q");
    auto* opt_chars_q = sc_chars->add_option("--q", chars_q, "odd modulus > 1")->required(false);
    merger.bind_u64(opt_chars_q, "q", chars_q);

    uint64_t lv_q = 7, lv_d = 1;
    std::string lv_label, lv_method = "both";
    auto* sc_lvalue = app.add_subcommand("lvalue", "central value of L(1/2, psi x chi_{8d})");
    auto* opt_lv_q = sc_lvalue->add_option("--q", lv_q, "odd modulus > 1");
    auto* opt_lv_label = sc_lvalue->add_option("--psi-label", lv_label, "character label");
    auto* opt_lv_d = sc_lvalue->add_option("--d", lv_d, "twist parameter");
    sc_lvalue->add_option("--method", lv_method, "formula | oracle | both");
    merger.bind_u64(opt_lv_q, "q", lv_q);
    merger.bind_string(opt_lv_label, "psi_label", lv_label);
    merger.bind_u64(opt_lv_d, "d", lv_d);

    VerifyOpts vo;
    auto* sc_verify = app.add_subcommand("verify", "run a named verification experiment");
    sc_verify->add_option("--experiment", vo.experiment,
                          "charsum | fourth-moment | prime-sum | mixed-moment | resonator-moments")
        ->required();
    auto* opt_v_q = sc_verify->add_option("--q", vo.q, "odd modulus > 1");
    sc_verify->add_option("--u", vo.u, "charsum argument u");
    auto* opt_v_X = sc_verify->add_option("--X", vo.X, "range scale: d in (X, 2X]");
    sc_verify->add_option("--x", vo.x, "prime-sum upper limit");
    sc_verify->add_option("--x-list", vo.x_list, "comma-separated ascending X list (fourth moment)");
    auto* opt_v_theta = sc_verify->add_option("--theta", vo.theta, "resonator exponent, N = X^theta");
    auto* opt_v_cl = sc_verify->add_option("--c-L", vo.c_L, "resonator constant: L = c_L sqrt(log N loglog N)");
    sc_verify->add_option("--K", vo.K, "charsum error-window constant");
    sc_verify->add_option("--psi-label", vo.psi_label, "character label (default: first suitable)");
    sc_verify->add_option("--psi2-label", vo.psi2_label, "second character label");
    merger.bind_u64(opt_v_q, "q", vo.q);
    merger.bind_u64(opt_v_X, "X", vo.X);
    merger.bind_double(opt_v_theta, "theta", vo.theta);
    merger.bind_double(opt_v_cl, "c_L", vo.c_L);

    SearchOpts so;
    auto* sc_search = app.add_subcommand("search", "resonator-ranked extreme-value search");
    auto* opt_s_q = sc_search->add_option("--q", so.q, "odd modulus > 1");
    sc_search->add_option("--coeffs", so.coeffs, "F coefficients: label=re[,im];label=re[,im]");
    auto* opt_s_X = sc_search->add_option("--X", so.X, "range scale: d in (X, 2X]");
    auto* opt_s_theta = sc_search->add_option("--theta", so.theta, "resonator exponent");
    auto* opt_s_cl = sc_search->add_option("--c-L", so.c_L, "resonator constant");
    sc_search->add_option("--shortlist", so.shortlist, "fraction of ranked d to evaluate, (0,1]");
    sc_search->add_option("--threshold-mode", so.threshold_mode, "theorem | section6 | custom");
    sc_search->add_option("--threshold-constant", so.threshold_constant, "constant for custom mode");
    sc_search->add_option("--csv", so.csv_path, "also write exceedances CSV to this file");
    merger.bind_u64(opt_s_q, "q", so.q);
    merger.bind_u64(opt_s_X, "X", so.X);
    merger.bind_double(opt_s_theta, "theta", so.theta);
    merger.bind_double(opt_s_cl, "c_L", so.c_L);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }
        if (opt_config->count() > 0) merger.apply(load_config(g.config_path));
        if (g.threads == 0) g.threads = 1;
        if (g.format != "json" && g.format != "csv") throw usage_error("format must be json or csv");

        if (sc_chars->parsed()) {
            if (chars_q == 0) throw usage_error("chars: --q is required (flag or config)");
            return cmd_chars(g, chars_q);
        }
        if (sc_lvalue->parsed()) {
            if (lv_label.empty()) throw usage_error("lvalue: --psi-label is required");
            return cmd_lvalue(g, lv_q, lv_label, lv_d, lv_method);
        }
        if (sc_verify->parsed()) return cmd_verify(g, vo);
        if (sc_search->parsed()) return cmd_search(g, so);
        throw usage_error("no subcommand given");
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const budget_error& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return 3;
    } catch (const convergence_error& e) {
        std::fprintf(stderr, "convergence error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
