#include "cli_commands.hpp"

#include "divcorr/approximants.hpp"
#include "divcorr/arith_tables.hpp"
#include "divcorr/constants.hpp"
#include "divcorr/correlations.hpp"
#include "divcorr/lemmas.hpp"
#include "divcorr/moments.hpp"
#include "divcorr/parallel.hpp"
#include "divcorr/singular.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace divcorr::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr int kExitIdentity = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;

/// Bad flag values that CLI11 itself accepts as strings.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::int64_t parse_count(const std::string &text, const char *flag)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        throw config_error(std::string(flag) + ": not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15)
        throw config_error(std::string(flag) + ": expected an integer, got '" + text + "'");
    return static_cast<std::int64_t>(v);
}

std::vector<std::int64_t> parse_ladder(const std::string &text)
{
    std::vector<std::int64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(parse_count(item, "--ladder"));
    if (out.empty())
        throw config_error("--ladder: empty");
    return out;
}

/// "key=value,key=value".
std::map<std::string, std::string> parse_params(const std::string &text)
{
    std::map<std::string, std::string> out;
    if (text.empty())
        return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        // Values of P may contain commas inside "P=1;-1,1"; split on ",key=" only.
        std::size_t next = text.size();
        for (std::size_t i = start; i < text.size(); ++i)
            if (text[i] == ',') {
                const auto eq = text.find('=', i + 1);
                const auto comma = text.find(',', i + 1);
                if (eq != std::string::npos && (comma == std::string::npos || eq < comma) &&
                    std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
                    next = i;
                    break;
                }
            }
        const std::string item = text.substr(start, next - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("--params: expected key=value, got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
        start = next + 1;
        if (next == text.size())
            break;
    }
    return out;
}

ShiftPattern parse_pattern(const std::string &text)
{
    try {
        return ShiftPattern::parse(text);
    } catch (const std::exception &e) {
        throw config_error(std::string("--pattern: ") + e.what());
    }
}

std::string fmt_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const json &v)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s)
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    if (v.is_number_float())
        return fmt_double(v.get<double>());
    if (v.is_null())
        return "";
    return v.dump();
}

json num(double v)
{
    if (std::isfinite(v))
        return v;
    return fmt_double(v);
}

struct Artifact {
    std::string command;
    json config = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json document = json::object(); // extra structured output (JSON) / comment lines (CSV)
};

void emit(const Artifact &a, const std::string &format, const std::string &path)
{
    std::ostringstream out;
    if (format == "json") {
        json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = a.command;
        doc["config"] = a.config;
        if (!a.columns.empty()) {
            json rows = json::array();
            for (const auto &r : a.rows) {
                json obj = json::object();
                for (std::size_t i = 0; i < a.columns.size(); ++i)
                    obj[a.columns[i]] = r[i];
                rows.push_back(obj);
            }
            doc["rows"] = rows;
        }
        for (const auto &[k, v] : a.document.items())
            doc[k] = v;
        out << doc.dump(2) << '\n';
    } else {
        out << "# divcorr schema_version=" << kSchemaVersion << " command=" << a.command << '\n';
        for (const auto &[k, v] : a.config.items())
            out << "# config." << k << '=' << csv_cell(v) << '\n';
        for (const auto &[k, v] : a.document.items())
            out << "# " << k << '=' << (v.is_structured() ? v.dump() : csv_cell(v)) << '\n';
        for (std::size_t i = 0; i < a.columns.size(); ++i)
            out << (i ? "," : "") << a.columns[i];
        if (!a.columns.empty())
            out << '\n';
        for (const auto &r : a.rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << (i ? "," : "") << csv_cell(r[i]);
            out << '\n';
        }
    }
    if (path.empty() || path == "-") {
        std::cout << out.str();
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file " + path);
    file << out.str();
}

struct Common {
    unsigned threads = 1;
    std::string format;
    std::string output = "-";
    std::string p_cut = "1e6";
};

struct RSpec {
    std::string level;
    double exponent = 0.0;
    bool has_exponent = false;
};

std::uint64_t resolve_R(const RSpec &spec, std::int64_t N, json &config)
{
    if (!spec.level.empty() && spec.has_exponent)
        throw config_error("give either --r-level or --r-exp, not both");
    std::uint64_t R = 0;
    if (!spec.level.empty()) {
        const auto v = parse_count(spec.level, "--r-level");
        if (v < 1)
            throw config_error("--r-level must be at least 1");
        R = static_cast<std::uint64_t>(v);
    } else if (spec.has_exponent) {
        if (!(spec.exponent > 0.0) || spec.exponent > 1.0)
            throw config_error("--r-exp must lie in (0, 1]");
        config["r_exp"] = spec.exponent;
        R = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(N), spec.exponent) + 1e-9));
        R = std::max<std::uint64_t>(R, 1);
    } else {
        throw config_error("one of --r-level or --r-exp is required");
    }
    config["R"] = R;
    return R;
}

void base_config(json &config, const Common &common)
{
    config["euler_p_cut"] = parse_count(common.p_cut, "--p-cut");
    config["prime_sum_cut"] = kPrimeSumCut;
}

ArithTables load(std::int64_t need)
{
    return cached_tables(static_cast<std::uint64_t>(std::max<std::int64_t>(need, 100)));
}

std::string rational_string(const Rational &q) { return q.get_str(); }

// ---------------------------------------------------------------- commands

struct SieveArgs {
    std::string n_max;
};

int cmd_sieve(const SieveArgs &args, const Common &common, Artifact &art)
{
    const auto n_max = parse_count(args.n_max, "--n-max");
    art.config["n_max"] = n_max;
    const auto t = load(n_max);
    std::int64_t mertens = 0;
    for (std::int64_t n = 1; n <= n_max; ++n)
        mertens += t.mu(static_cast<std::uint64_t>(n));
    art.columns = {"n_max", "prime_count", "psi", "psi_minus_x", "mertens"};
    std::int64_t primes = 0;
    for (auto p : t.primes())
        if (p <= n_max)
            ++primes;
    const double psi = t.psi(n_max);
    art.rows.push_back({n_max, primes, num(psi), num(psi - static_cast<double>(n_max)), mertens});
    (void)common;
    return 0;
}

struct LambdaArgs {
    std::string n;
    RSpec r;
    bool exact = false;
};

int cmd_lambda(const LambdaArgs &args, const Common &, Artifact &art)
{
    const auto N = parse_count(args.n, "--n");
    if (N < 1 || N > 1'000'000)
        throw config_error("--n must lie in [1, 1e6] for listings");
    art.config["N"] = N;
    const auto R = resolve_R(args.r, N, art.config);
    art.config["exact"] = args.exact;
    const auto t = load(N);
    const auto big = biglambda_R_range(N, R);
    art.columns = {"n", "lambda_R", "Lambda_R", "Lambda"};
    if (args.exact) {
        const ExactLambdaSeries s(R, N);
        for (std::int64_t n = 1; n <= N; ++n)
            art.rows.push_back({n, rational_string(s(n)), num(big[static_cast<std::size_t>(n - 1)]),
                                num(t.lambda(static_cast<std::uint64_t>(n)))});
    } else {
        const LambdaSeries s(R, N);
        for (std::int64_t n = 1; n <= N; ++n)
            art.rows.push_back({n, num(s(n)), num(big[static_cast<std::size_t>(n - 1)]),
                                num(t.lambda(static_cast<std::uint64_t>(n)))});
    }
    return 0;
}

struct SingularArgs {
    std::string pattern;
    int sn = 0;
    std::string j;
    int constant = 0;
    int tuple_r = 0;
    std::string h;
};

json singular_json(const SingularValue &v)
{
    json out;
    out["value"] = num(v.value);
    out["finite_part"] = rational_string(v.finite_part);
    out["p_cut"] = v.p_cut;
    out["tail_bound"] = num(v.tail_bound);
    out["vanishes"] = v.vanishes;
    return out;
}

int cmd_singular(const SingularArgs &args, const Common &common, Artifact &art)
{
    const auto p_cut = static_cast<std::uint64_t>(parse_count(common.p_cut, "--p-cut"));
    const int modes = !args.pattern.empty() + (args.sn != 0) + (args.constant != 0) + (args.tuple_r != 0);
    if (modes != 1)
        throw config_error("singular: give exactly one of --pattern, --sn, --constant, --tuple-r");
    if (!args.pattern.empty()) {
        const auto pat = parse_pattern(args.pattern);
        art.config["pattern"] = pat.to_string();
        const auto v = singular_vector(pat.shifts, p_cut);
        art.document["result"] = singular_json(v);
        if (pat.r() <= 12)
            art.document["result"]["u_transform"] = num(u_transform(pat.shifts, p_cut));
        art.columns = {"pattern", "value", "finite_part", "p_cut", "tail_bound"};
        art.rows.push_back({pat.to_string(), num(v.value), rational_string(v.finite_part), v.p_cut,
                            num(v.tail_bound)});
    } else if (args.sn != 0) {
        const auto j = parse_count(args.j, "--j");
        art.config["n"] = args.sn;
        art.config["j"] = j;
        const auto v = singular_Sn(args.sn, j, p_cut);
        art.document["result"] = singular_json(v);
        art.columns = {"n", "j", "value", "finite_part", "p_cut", "tail_bound"};
        art.rows.push_back({args.sn, j, num(v.value), rational_string(v.finite_part), v.p_cut, num(v.tail_bound)});
    } else if (args.constant != 0) {
        art.config["constant"] = args.constant;
        const auto v = constant_C(args.constant, p_cut);
        art.document["result"] = singular_json(v);
        art.columns = {"n", "value", "p_cut", "tail_bound"};
        art.rows.push_back({args.constant, num(v.value), v.p_cut, num(v.tail_bound)});
    } else {
        const auto h = parse_count(args.h, "--h");
        art.config["r"] = args.tuple_r;
        art.config["h"] = h;
        const double Rr = big_R(args.tuple_r, h, p_cut);
        const double g = gallagher_sum(args.tuple_r, h, p_cut);
        const double gr = gallagher_from_R(args.tuple_r, h, p_cut);
        const double x = static_cast<double>(h);
        art.columns = {"r", "h", "R_r", "gallagher_sum", "gallagher_from_R", "pair_prediction"};
        art.rows.push_back({args.tuple_r, h, num(Rr), num(g), num(gr),
                            num(args.tuple_r == 2 ? -x * std::log(x) + kPairAverageA * x : 0.0)});
        if (args.tuple_r == 2) {
            const auto w = weighted_S2_sum(h, p_cut);
            art.document["weighted_S2_sum"] = num(w.sum);
            art.document["weighted_S2_main"] = num(w.main);
        }
        if (std::abs(g - gr) > 1e-9 * std::max(1.0, std::abs(g)))
            return kExitIdentity;
    }
    return 0;
}

struct CorrelateArgs {
    std::string n;
    RSpec r;
    std::string pattern;
    bool mixed = false;
    bool primed = false;
    bool exact = false;
};

int cmd_correlate(const CorrelateArgs &args, const Common &, Artifact &art)
{
    const auto N = parse_count(args.n, "--n");
    if (N < 1)
        throw config_error("--n must be positive");
    art.config["N"] = N;
    const auto R = resolve_R(args.r, N, art.config);
    if (args.pattern.empty())
        throw config_error("--pattern is required");
    const auto pat = parse_pattern(args.pattern);
    art.config["pattern"] = pat.to_string();
    art.config["mixed"] = args.mixed;
    art.config["primed_range"] = args.primed;
    art.config["exact"] = args.exact;
    if (args.exact && args.mixed)
        throw config_error("--exact applies to pure correlations only");

    CorrelationResult res;
    const auto hi = correlation_range(N, args.primed).second;
    const std::int64_t top = hi + std::max<std::int64_t>(pat.max_abs_shift(), 0);
    if (args.mixed) {
        const auto t = load(top);
        res = s_tilde_k(N, pat, R, t, args.primed);
    } else {
        res = s_k(N, pat, R, args.primed);
        if (args.exact) {
            const ExactLambdaSeries ex(R, top);
            res.computed_exact = s_k_exact(N, pat, ex, args.primed);
        }
    }
    art.columns = {"N", "R", "pattern", "k", "mixed", "primed", "computed", "singular", "predicted_main",
                   "residual", "normalized_residual"};
    art.rows.push_back({N, R, pat.to_string(), pat.k(), args.mixed, args.primed, num(res.computed),
                        num(res.singular), res.has_prediction ? num(res.predicted_main) : json("n/a"),
                        res.has_prediction ? num(res.residual) : json("n/a"),
                        res.has_prediction ? num(res.normalized_residual) : json("n/a")});
    if (res.computed_exact)
        art.document["computed_exact"] = rational_string(*res.computed_exact);
    return 0;
}

struct MomentsArgs {
    unsigned k = 1;
    std::string h;
    double lambda = 0.0;
    bool has_lambda = false;
    RSpec r;
    std::string n;
    bool centered = false;
    bool mixed = false;
    bool psi = false;
    bool exact = false;
    std::string omega;
};

std::int64_t resolve_h(const MomentsArgs &args, std::int64_t N, json &config)
{
    if (!args.h.empty() && args.has_lambda)
        throw config_error("give either --h or --lambda, not both");
    std::int64_t h = 0;
    if (!args.h.empty())
        h = parse_count(args.h, "--h");
    else if (args.has_lambda) {
        if (!(args.lambda > 0.0))
            throw config_error("--lambda must be positive");
        h = std::llround(args.lambda * std::log(static_cast<double>(N)));
        config["lambda_requested"] = args.lambda;
    } else
        throw config_error("one of --h or --lambda is required");
    if (h < 1)
        throw config_error("h must be at least 1");
    config["h"] = h;
    return h;
}

json moment_row(const MomentReport &m)
{
    return json::array({m.k, m.N, m.h, m.R, m.mixed, m.centered, num(m.computed), num(m.via_correlations),
                        num(m.expansion_residual), m.has_prediction ? num(m.predicted) : json("n/a"),
                        m.has_prediction ? num(m.normalized_residual) : json("n/a"), num(m.lambda_param),
                        num(m.theta)});
}

int cmd_omega_core(std::int64_t N, std::int64_t h, std::uint64_t R, double rho, double C, Artifact &art);

std::pair<double, std::optional<double>> parse_omega_spec(const std::string &text)
{
    double rho = 0.0;
    std::optional<double> C;
    bool has_rho = false;
    for (const auto &[k, v] : parse_params(text)) {
        double x = 0;
        std::size_t used = 0;
        if (k != "C" || v != "coupled") {
            try {
                x = std::stod(v, &used);
            } catch (const std::exception &) {
                throw config_error("--omega: bad value for " + k);
            }
            if (used != v.size())
                throw config_error("--omega: bad value for " + k);
        }
        if (k == "rho") {
            rho = x;
            has_rho = true;
        } else if (k == "C") {
            if (v != "coupled")
                C = x;
        } else
            throw config_error("--omega: unknown key " + k);
    }
    if (!has_rho)
        throw config_error("--omega: rho is required");
    return {rho, C};
}

int cmd_moments(const MomentsArgs &args, const Common &, Artifact &art)
{
    const auto N = parse_count(args.n, "--n");
    if (N < 1)
        throw config_error("--n must be positive");
    art.config["N"] = N;
    art.config["k"] = args.k;
    const auto h = resolve_h(args, N, art.config);
    art.config["lambda"] = static_cast<double>(h) / std::log(static_cast<double>(N));
    art.config["centered"] = args.centered;
    art.config["mixed"] = args.mixed;
    art.config["psi"] = args.psi;
    art.config["exact"] = args.exact;
    if (args.psi + args.mixed + !args.omega.empty() > 1)
        throw config_error("--psi, --mixed and --omega are exclusive");
    if (args.centered && !args.psi)
        throw config_error("--centered applies to --psi moments");

    art.columns = {"k", "N", "h", "R", "mixed", "centered", "computed", "via_correlations", "expansion_residual",
                   "predicted", "normalized_residual", "lambda", "theta"};
    if (args.psi) {
        const auto t = load(N + h);
        const auto m = moment_psi(N, h, args.k, t, args.centered);
        art.rows.push_back(moment_row(m).get<std::vector<json>>());
        return 0;
    }
    const auto R = resolve_R(args.r, N, art.config);
    if (!args.omega.empty()) {
        const auto [rho, C] = parse_omega_spec(args.omega);
        art.columns.clear();
        const double c = C ? *C : omega_preset_C(N, h, R, rho);
        art.config["rho"] = rho;
        art.config["C"] = c;
        art.config["C_preset"] = C ? "none" : "coupled";
        return cmd_omega_core(N, h, R, rho, c, art);
    }
    if (args.mixed) {
        const auto t = load(N + h);
        const auto m = mixed_moment(N, h, R, args.k, t);
        art.rows.push_back(moment_row(m).get<std::vector<json>>());
        return 0; // the mixed expansion is approximate; its residual is reported only
    }
    const auto m = moment_psiR(N, h, R, args.k, args.exact);
    art.rows.push_back(moment_row(m).get<std::vector<json>>());
    if (args.exact) {
        art.document["computed_exact"] = rational_string(*m.computed_exact);
        art.document["via_correlations_exact"] = rational_string(*m.via_exact);
        if (*m.computed_exact != *m.via_exact)
            return kExitIdentity;
    } else if (std::abs(m.expansion_residual) > 1e-9 * std::max(1.0, std::abs(m.computed))) {
        return kExitIdentity;
    }
    return 0;
}

struct LemmaArgs {
    std::string which;
    std::string params;
    std::string ladder = "1e4,1e5,1e6";
};

std::int64_t param_int(const std::map<std::string, std::string> &p, const std::string &key, std::int64_t dflt)
{
    const auto it = p.find(key);
    return it == p.end() ? dflt : parse_count(it->second, ("--params " + key).c_str());
}

int cmd_lemma(const LemmaArgs &args, const Common &, Artifact &art)
{
    const auto ladder = parse_ladder(args.ladder);
    const auto params = parse_params(args.params);
    for (const auto &[k, v] : params)
        if (k != "k" && k != "j" && k != "J" && k != "P")
            throw config_error("--params: unknown key " + k);
    art.config["which"] = args.which;
    json ladder_json = json::array();
    for (auto x : ladder)
        ladder_json.push_back(x);
    art.config["ladder"] = ladder_json;

    MonicPolyPair pair;
    if (const auto it = params.find("P"); it != params.end()) {
        try {
            pair = MonicPolyPair::parse(it->second);
        } catch (const std::invalid_argument &e) {
            throw config_error(std::string("--params P: ") + e.what());
        }
    }
    const auto k = param_int(params, "k", 1);
    const auto j = param_int(params, "j", 2);
    const auto J = param_int(params, "J", 6);

    if (ladder.front() < 1)
        throw config_error("--ladder rungs must be positive");
    const auto t = load(ladder.back());
    LemmaReport r;
    if (args.which == "1") {
        art.config["P"] = pair.to_string();
        art.config["k"] = k;
        r = lemma1(pair, k, ladder, t);
    } else if (args.which == "2") {
        r = lemma2(ladder, t);
    } else if (args.which == "3") {
        r = lemma3(ladder, t);
    } else if (args.which == "4") {
        art.config["j"] = j;
        art.config["k"] = k;
        r = lemma4(j, k, ladder, t);
    } else if (args.which == "4log") {
        art.config["j"] = j;
        r = lemma4_log(j, ladder, t);
    } else if (args.which == "5") {
        art.config["J"] = J;
        art.config["k"] = k;
        r = lemma5(J, k, ladder, t);
    } else {
        throw config_error("--which must be one of 1, 2, 3, 4, 4log, 5");
    }
    art.columns = {"x", "lhs", "main", "scaled_error"};
    for (std::size_t i = 0; i < r.x_ladder.size(); ++i)
        art.rows.push_back({r.x_ladder[i], num(r.lhs[i]), num(r.main[i]), num(r.scaled_error[i])});
    art.document["name"] = r.name;
    art.document["normalization"] = r.normalization;
    json extras = json::object();
    for (const auto &[key, v] : r.extras)
        extras[key] = num(v);
    art.document["extras"] = extras;
    return 0;
}

struct OmegaArgs {
    std::string n, h;
    RSpec r;
    double rho = 0.3;
    double C = 0.0;
    bool has_C = false;
    bool preset = false;
};

int cmd_omega_core(std::int64_t N, std::int64_t h, std::uint64_t R, double rho, double C, Artifact &art)
{
    const auto t = load(2 * N + h);
    const auto e = omega_experiment(N, h, R, rho, C, t);
    art.columns = {"N", "h", "R", "rho", "C", "A", "m1", "m2", "m3", "m1_expanded", "m2_expanded", "m3_expanded",
                   "predicted_m2", "predicted_m3", "theta", "alpha", "regime"};
    art.rows.push_back({N, h, R, num(rho), num(C), num(e.A), num(e.m1), num(e.m2), num(e.m3), num(e.m1_expanded),
                        num(e.m2_expanded), num(e.m3_expanded), num(e.predicted_m2), num(e.predicted_m3),
                        num(e.theta), num(e.alpha), e.in_proven_regime ? "proven" : "outside proven regime"});
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); };
    // Relative to the scale of the largest expansion piece.
    const double scale3 = std::abs(e.m3) + 1.0;
    const bool ok = close(e.m1, e.m1_expanded) && close(e.m2, e.m2_expanded) &&
                    std::abs(e.m3 - e.m3_expanded) <= 1e-9 * std::max(scale3, std::abs(e.m3_expanded));
    return ok ? 0 : kExitIdentity;
}

int cmd_omega(const OmegaArgs &args, const Common &, Artifact &art)
{
    const auto N = parse_count(args.n, "--n");
    const auto h = parse_count(args.h, "--h");
    if (N < 1 || h < 1)
        throw config_error("--n and --h must be positive");
    art.config["N"] = N;
    art.config["h"] = h;
    const auto R = resolve_R(args.r, N, art.config);
    if (args.preset && args.has_C)
        throw config_error("--coupled-C fixes C; do not also pass --C");
    const double C = args.preset ? omega_preset_C(N, h, R, args.rho) : args.C;
    art.config["rho"] = args.rho;
    art.config["C"] = C;
    art.config["C_preset"] = args.preset ? "coupled" : "none";
    return cmd_omega_core(N, h, R, args.rho, C, art);
}

void add_r_options(CLI::App *sub, RSpec &r)
{
    sub->add_option("--r-level", r.level, "truncation level R");
    sub->add_option_function<double>(
        "--r-exp",
        [&r](const double &v) {
            r.exponent = v;
            r.has_exponent = true;
        },
        "R = floor(N^theta)");
}

} // namespace

int run(int argc, char **argv)
{
    CLI::App app{"divcorr: truncated divisor sums, singular series and prime correlation experiments"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand
    // --h is the interval length, so help is long-form only.
    app.set_help_flag("--help", "print help");
    Common common;
    app.add_option("--threads", common.threads, "worker threads (output does not depend on it)")
        ->check(CLI::Range(1u, 256u));
    app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", common.output, "output path, '-' for stdout");
    app.add_option("--p-cut", common.p_cut, "truncation prime for singular-series Euler products");

    SieveArgs sieve;
    auto *s_sieve = app.add_subcommand("sieve", "build the arithmetic tables and summarize them");
    s_sieve->add_option("--n-max", sieve.n_max, "table limit")->required();

    LambdaArgs lambda;
    auto *s_lambda = app.add_subcommand("lambda", "list lambda_R(n), Lambda_R(n), Lambda(n)");
    s_lambda->add_option("--n", lambda.n, "last n")->required();
    add_r_options(s_lambda, lambda.r);
    s_lambda->add_flag("--exact", lambda.exact, "exact rational lambda_R");

    SingularArgs singular;
    auto *s_singular = app.add_subcommand("singular", "singular series values and tuple averages");
    s_singular->add_option("--pattern", singular.pattern, "shifts, e.g. 0,2,6");
    s_singular->add_option("--sn", singular.sn, "evaluate S_n(j) for n in {2,3}");
    s_singular->add_option("--j", singular.j, "argument j for --sn");
    s_singular->add_option("--constant", singular.constant, "evaluate C_n for n in {2,3}");
    s_singular->add_option("--tuple-r", singular.tuple_r, "R_r(h) and Gallagher sums for r in {1,2,3}");
    s_singular->set_help_flag("--help", "print help");
    s_singular->add_option("--h", singular.h, "tuple range for --tuple-r");

    CorrelateArgs corr;
    auto *s_corr = app.add_subcommand("correlate", "pure or mixed correlation against its prediction");
    s_corr->add_option("--n", corr.n, "range length N")->required();
    add_r_options(s_corr, corr.r);
    s_corr->add_option("--pattern", corr.pattern, "shift:multiplicity list, e.g. 0:1,2:1")->required();
    s_corr->add_flag("--mixed", corr.mixed, "von Mangoldt weight at the last shift");
    s_corr->add_flag("--primed-range", corr.primed, "sum over [N+1, 2N]");
    s_corr->add_flag("--exact", corr.exact, "also compute the pure correlation exactly");

    MomentsArgs mom;
    auto *s_mom = app.add_subcommand("moments", "moments of psi_R and psi increments");
    s_mom->add_option("--k", mom.k, "moment order")->check(CLI::Range(1u, 20u));
    s_mom->set_help_flag("--help", "print help");
    s_mom->add_option("--h", mom.h, "interval length");
    s_mom->add_option_function<double>(
        "--lambda",
        [&mom](const double &v) {
            mom.lambda = v;
            mom.has_lambda = true;
        },
        "h = round(lambda log N)");
    add_r_options(s_mom, mom.r);
    s_mom->add_option("--n", mom.n, "range length N")->required();
    s_mom->add_flag("--centered", mom.centered, "centered psi moments");
    s_mom->add_flag("--mixed", mom.mixed, "mixed psi_R / psi moments");
    s_mom->add_flag("--psi", mom.psi, "moments of psi increments");
    s_mom->add_flag("--exact", mom.exact, "exact rational psi_R moments");
    s_mom->add_option("--omega", mom.omega, "run the primed omega experiment, e.g. rho=0.3,C=-0.5 or C=coupled");

    LemmaArgs lem;
    auto *s_lem = app.add_subcommand("lemma", "finite sums against closed-form main terms");
    s_lem->add_option("--which", lem.which, "1, 2, 3, 4, 4log or 5")->required();
    s_lem->add_option("--params", lem.params, "k=..,j=..,J=..,P=P1;P2 (coefficients low to high)");
    s_lem->add_option("--ladder", lem.ladder, "x values, e.g. 1e4,1e5,1e6");

    OmegaArgs om;
    auto *s_om = app.add_subcommand("omega", "primed mixed moments M'_1..3 and their expansions");
    s_om->add_option("--n", om.n, "N")->required();
    s_om->set_help_flag("--help", "print help");
    s_om->add_option("--h", om.h, "h")->required();
    add_r_options(s_om, om.r);
    s_om->add_option("--rho", om.rho, "rho");
    s_om->add_option_function<double>(
        "--C",
        [&om](const double &v) {
            om.C = v;
            om.has_C = true;
        },
        "C");
    s_om->add_flag("--coupled-C", om.preset, "C = -(theta - alpha)/rho");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    parallel::set_thread_count(common.threads);
    Artifact art;
    art.command = app.get_subcommands().front()->get_name();
    int status = 0;
    try {
        base_config(art.config, common);
        std::string dflt = "csv";
        if (art.command == "sieve")
            status = cmd_sieve(sieve, common, art);
        else if (art.command == "lambda")
            status = cmd_lambda(lambda, common, art);
        else if (art.command == "singular") {
            dflt = "json";
            status = cmd_singular(singular, common, art);
        } else if (art.command == "correlate")
            status = cmd_correlate(corr, common, art);
        else if (art.command == "moments")
            status = cmd_moments(mom, common, art);
        else if (art.command == "lemma") {
            dflt = "json";
            status = cmd_lemma(lem, common, art);
        } else
            status = cmd_omega(om, common, art);
        emit(art, common.format.empty() ? dflt : common.format, common.output);
    } catch (const config_error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitParse;
    } catch (const identity_failure &e) {
        std::cerr << "identity failure: " << e.what() << '\n';
        return kExitIdentity;
    } catch (const std::exception &e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kExitPrecondition;
    }
    if (status == kExitIdentity)
        std::cerr << "identity failure: see output\n";
    return status;
}

} // namespace divcorr::cli
