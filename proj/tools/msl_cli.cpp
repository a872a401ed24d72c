// Experiment runner: one subcommand per module operation, file output plus a run manifest.
#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msl/attractor.hpp"
#include "msl/convolution.hpp"
#include "msl/entropy.hpp"
#include "msl/exact.hpp"
#include "msl/freeness.hpp"
#include "msl/measure.hpp"
#include "msl/stationary.hpp"

using namespace msl;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Malformed input, as opposed to a precondition the library rejects.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int n = 16;
    int m = 4;
    std::string levels;
    std::uint64_t seed = 1;
    std::int64_t samples = 1000000;
    std::string out;
    int workers = 1;
    std::string ifs;
    std::string p;
    std::string measure = "cantor";
    std::string input;
    std::string other = "same";
    std::string nu = "translations";
    std::string nu_input;
    std::string sampler;
    std::string box;
    std::string ratios;
    std::string ratio = "hash";
    int k_level = -1;
    double h = 0.5;
    double delta = 0.1;
    double epsilon = 0.1;
    std::string maps;
    std::string pool;
    std::string w;
    std::string w_prime;
    int gamma = 0;
    std::string phi;
    std::string psi;
    int L = 8;
    std::int64_t cap = kDefaultWordCap;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double number(const std::string& s) {
    try {
        return parse_scalar(s).to_double();
    } catch (const std::exception& e) {
        throw ConfigError("bad number '" + s + "': " + e.what());
    }
}

std::vector<double> numbers(const std::string& s) {
    std::vector<double> v;
    for (const auto& item : split(s, ',')) v.push_back(number(item));
    return v;
}

std::pair<int, int> parse_levels(const std::string& s, int fallback_hi) {
    if (s.empty()) return {1, fallback_hi};
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw ConfigError("--levels expects a..b");
    try {
        const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        if (a > b) throw ConfigError("--levels: empty range");
        return {a, b};
    } catch (const std::logic_error&) {
        throw ConfigError("--levels expects integers a..b");
    }
}

// "a,t;a,t" with exact or decimal entries.
std::vector<AffineMap> parse_maps(const std::string& s) {
    std::vector<AffineMap> maps;
    for (const auto& item : split(s, ';')) {
        const auto v = numbers(item);
        if (v.size() != 2) throw ConfigError("map '" + item + "' needs a ratio and a translation");
        maps.push_back({v[0], v[1]});
    }
    if (maps.empty()) throw ConfigError("empty map list");
    return maps;
}

WeightedIFS parse_ifs(const Options& o) {
    WeightedIFS ifs;
    ifs.maps = parse_maps(o.ifs);
    if (o.p.empty()) {
        ifs.p.assign(ifs.maps.size(), 1.0 / static_cast<double>(ifs.maps.size()));
    } else {
        ifs.p = numbers(o.p);
        if (ifs.p.size() != ifs.maps.size()) throw ConfigError("--p must have one weight per map");
    }
    return ifs;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Named generators for measures on R: cantor, uniform, dirac:k.
DyadicMeasure1D named_measure(const std::string& name, int n) {
    if (name == "cantor") return middle_third_cantor(n);
    if (name == "uniform" || name == "lebesgue") return DyadicMeasure1D::uniform_unit(n);
    if (name.rfind("dirac", 0) == 0) {
        const auto colon = name.find(':');
        return DyadicMeasure1D::dirac(n, colon == std::string::npos ? 0 : std::stoll(name.substr(colon + 1)));
    }
    throw ConfigError("unknown measure '" + name + "'");
}

DyadicMeasure1D measure_from(const Options& o, int n) {
    if (!o.input.empty()) return coarsen_to(measure_from_json(read_file(o.input)), n);
    if (!o.ifs.empty()) return self_similar_measure(parse_ifs(o), n);
    return named_measure(o.measure, n);
}

// Named generators on G: dirac:k1,k2; translations (t uniform on [0,1)); stabilizer
// (Cantor-distributed scalings x -> e^s x, the stabilizer of 0).
DyadicMeasureG nu_from(const Options& o, int n) {
    if (!o.nu_input.empty()) return coarsen_to(measure_g_from_json(read_file(o.nu_input)), n);
    if (o.nu == "translations") {
        std::vector<CellG> cells;
        for (std::int64_t k = 0; k < (std::int64_t{1} << n); ++k) cells.push_back({-1, k, 1.0});
        return DyadicMeasureG::from_cells(n, std::move(cells));
    }
    if (o.nu == "stabilizer") {
        std::vector<CellG> cells;
        const auto cantor = middle_third_cantor(n);
        for (const auto& c : cantor.cells()) cells.push_back({-1 - c.k, 0, c.mass});
        return DyadicMeasureG::from_cells(n, std::move(cells));
    }
    if (o.nu.rfind("dirac", 0) == 0) {
        const auto colon = o.nu.find(':');
        if (colon == std::string::npos) return DyadicMeasureG::dirac(n, 0, 0);
        const auto v = split(o.nu.substr(colon + 1), ',');
        if (v.size() != 2) throw ConfigError("--nu dirac:k1,k2");
        return DyadicMeasureG::dirac(n, std::stoll(v[0]), std::stoll(v[1]));
    }
    throw ConfigError("unknown --nu '" + o.nu + "'");
}

FamilySpec family_from(const Options& o) {
    FamilySpec f;
    if (!o.ifs.empty()) f.maps = parse_maps(o.ifs);
    if (!o.box.empty()) {
        const auto v = numbers(o.box);
        if (v.size() != 4 && v.size() != 5) throw ConfigError("--box expects r0,r1,t0,t1[,g]");
        f.box = ParameterBox{v[0], v[1], v[2], v[3], v.size() == 5 ? static_cast<int>(v[4]) : 8};
    }
    if (f.maps.empty() && !f.box) throw ConfigError("a family needs --ifs or --box");
    return f;
}

std::unique_ptr<MapSampler> sampler_from(const Options& o) {
    if (!o.sampler.empty()) {
        const std::string text = o.sampler.front() == '@' ? read_file(o.sampler.substr(1)) : o.sampler;
        return sampler_from_json(text);
    }
    if (!o.ifs.empty()) return std::make_unique<FiniteSampler>(parse_ifs(o));
    if (!o.box.empty()) {
        const auto v = numbers(o.box);
        if (v.size() != 4) throw ConfigError("--box expects r0,r1,t0,t1");
        return std::make_unique<BoxSampler>(v[0], v[1], v[2], v[3]);
    }
    throw ConfigError("stationary needs --sampler, --ifs or --box");
}

std::vector<ExactAffineMap> exact_maps(const std::string& s) {
    try {
        return parse_exact_maps(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Word parse_word(const std::string& s) {
    Word w;
    for (const auto& item : split(s, ',')) {
        const int letter = std::stoi(item);
        if (letter < 1) throw ConfigError("word letters are 1-based");
        w.push_back(letter - 1);
    }
    return w;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json cell_counts(const std::vector<CellSet>& ladder) {
    json rows = json::array();
    for (const auto& c : ladder) rows.push_back({{"level", c.level}, {"count", c.size()}});
    return rows;
}

// Deterministic ratio in [1/2, 1] from the bits of the center.
double hashed_ratio(double x, std::uint64_t seed) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return 0.5 + 0.5 * static_cast<double>(splitmix64(bits ^ splitmix64(seed)) >> 11) * 0x1.0p-53;
}

class Runner {
public:
    Runner(Options& o, std::vector<std::string> argv) : o_(o), argv_(std::move(argv)) {}

    void emit(const std::string& command, const std::string& content) {
        if (o_.out.empty()) {
            std::cout << content;
            if (!content.empty() && content.back() != '\n') std::cout << '\n';
            return;
        }
        write(o_.out, content);
        json manifest{{"tool", "msl_cli"},
                      {"version", kVersion},
                      {"subcommand", command},
                      {"argv", argv_},
                      {"seed", o_.seed},
                      {"workers", o_.workers},
                      {"boost", BOOST_LIB_VERSION},
                      {"compiler", __VERSION__},
                      {"output", o_.out}};
        write(o_.out + ".manifest.json", manifest.dump(2) + "\n");
    }

private:
    static void write(const std::string& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + path);
        f << content;
        if (content.empty() || content.back() != '\n') f << '\n';
    }

    Options& o_;
    std::vector<std::string> argv_;
};

std::string measure_report(const DyadicMeasure1D& mu) {
    const auto r = entropy_dim_estimate(mu, mu.level());
    json j{{"level", mu.level()},
           {"entropy_bits", entropy(mu, mu.level()).value_bits},
           {"edim_slope", r.slope},
           {"measure", json::parse(to_json(mu))}};
    return j.dump();
}

// Appends {"--key", value} for config keys that are not already given as flags.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t j = 0; j + 1 < args.size(); ++j) {
        if (args[j] == "--config") path = args[j + 1];
    }
    for (const auto& a : args) {
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
    if (path.empty()) return args;
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        if (value.is_string()) {
            args.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            args.push_back(joined);
        } else {
            args.push_back(value.dump());
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Multiscale entropy, stationary measures, attractors and free affine maps"};
    app.require_subcommand(1);
    std::string config;

    auto common = [&](CLI::App* c) {
        c->add_option("--config", config, "JSON file of flag values; flags win");
        c->add_option("--out", o.out, "output path (stdout if absent); a manifest is written beside it");
    };
    auto measure_opts = [&](CLI::App* c) {
        c->add_option("--ifs", o.ifs, "self-similar measure maps 'a,t;a,t'");
        c->add_option("--p", o.p, "weights 'p1,p2,...'");
        c->add_option("--measure", o.measure, "cantor | uniform | dirac:k");
        c->add_option("--input", o.input, "measure JSON file");
    };
    auto nu_opts = [&](CLI::App* c) {
        c->add_option("--nu", o.nu, "translations | stabilizer | dirac:k1,k2");
        c->add_option("--nu-input", o.nu_input, "G-measure JSON file");
    };
    auto family_opts = [&](CLI::App* c) {
        c->add_option("--ifs", o.ifs, "maps 'a,t;a,t'");
        c->add_option("--box", o.box, "parameter box 'r0,r1,t0,t1[,g]'");
    };

    std::vector<std::pair<std::string, CLI::App*>> subs;
    auto sub = [&](const std::string& name, const std::string& help) {
        auto* c = app.add_subcommand(name, help);
        common(c);
        subs.emplace_back(name, c);
        return c;
    };

    auto* c_entropy = sub("entropy", "H(mu, D_n) over a range of levels");
    measure_opts(c_entropy);
    c_entropy->add_option("--n", o.n, "resolution");
    c_entropy->add_option("--levels", o.levels, "a..b");

    auto* c_edim = sub("edim", "entropy-dimension table");
    measure_opts(c_edim);
    c_edim->add_option("--n", o.n, "top level");

    auto* c_por = sub("porosity", "entropy porosity test");
    measure_opts(c_por);
    c_por->add_option("--n", o.n, "resolution");
    c_por->add_option("--m", o.m, "window size");
    c_por->add_option("--levels", o.levels, "component levels a..b");
    c_por->add_option("--threshold", o.h, "entropy threshold h");
    c_por->add_option("--delta", o.delta, "allowed failure mass");

    auto* c_conv = sub("convolve", "additive convolution on R");
    measure_opts(c_conv);
    c_conv->add_option("--n", o.n, "resolution");
    c_conv->add_option("--with", o.other, "same | cantor | uniform | dirac:k");

    auto* c_act = sub("act", "action convolution nu.mu");
    measure_opts(c_act);
    nu_opts(c_act);
    c_act->add_option("--n", o.n, "resolution");

    auto* c_growth = sub("growth", "entropy growth under the action");
    measure_opts(c_growth);
    nu_opts(c_growth);
    c_growth->add_option("--levels", o.levels, "a..b");
    c_growth->add_option("--m", o.m, "porosity window");
    c_growth->add_option("--epsilon", o.epsilon, "porosity slack");
    c_growth->add_option("--delta", o.delta, "porosity failure mass");

    auto* c_stat = sub("stationary", "Monte-Carlo stationary measure");
    c_stat->add_option("--sampler", o.sampler, "sampler JSON or @file");
    c_stat->add_option("--ifs", o.ifs, "finite sampler maps");
    c_stat->add_option("--p", o.p, "finite sampler weights");
    c_stat->add_option("--box", o.box, "box sampler 'r0,r1,t0,t1'");
    c_stat->add_option("--n", o.n, "resolution");
    c_stat->add_option("--samples", o.samples, "number of draws");
    c_stat->add_option("--seed", o.seed, "master seed");
    c_stat->add_option("--workers", o.workers, "threads");

    auto* c_self = sub("selfsim", "self-similar measure by Hutchinson iteration");
    c_self->add_option("--ifs", o.ifs, "maps 'a,t;a,t'")->required();
    c_self->add_option("--p", o.p, "weights");
    c_self->add_option("--n", o.n, "resolution");

    auto* c_attr = sub("attractor", "attractor cells");
    family_opts(c_attr);
    c_attr->add_option("--n", o.n, "resolution");

    auto* c_box = sub("boxdim", "box dimension of an attractor");
    family_opts(c_box);
    c_box->add_option("--levels", o.levels, "a..b");

    auto* c_sim = sub("simdim", "similarity dimension");
    c_sim->add_option("--ratios", o.ratios, "r1,r2,...");
    c_sim->add_option("--ifs", o.ifs, "maps 'a,t;a,t'");

    auto* c_porous = sub("porous-set", "porosity constant of an attractor");
    family_opts(c_porous);
    c_porous->add_option("--n", o.n, "resolution");

    auto* c_copies = sub("cantor-copies", "union of scaled Cantor sets centered on an attractor");
    family_opts(c_copies);
    c_copies->add_option("--levels", o.levels, "a..b");
    c_copies->add_option("--ratio", o.ratio, "hash | constant in (0,1]");
    c_copies->add_option("--k-level", o.k_level, "resolution of K (default top + 2)");
    c_copies->add_option("--seed", o.seed, "seed of the hashed ratio rule");

    auto* c_free = sub("free-check", "freeness up to a word length");
    c_free->add_option("--maps", o.maps, "'a=..,b=..;a=..,b=..'")->required();
    c_free->add_option("--L", o.L, "maximal word length");
    c_free->add_option("--cap", o.cap, "word cap");

    auto* c_rel = sub("relation-solve", "solutions gamma of an alternating relation");
    c_rel->add_option("--maps", o.maps, "assignment of the fixed letters");
    c_rel->add_option("--w", o.w, "word, 1-based letters 'i,j,...'");
    c_rel->add_option("--w-prime", o.w_prime, "second word");
    c_rel->add_option("--gamma", o.gamma, "1-based letter that is the unknown");
    c_rel->add_option("--phi", o.phi, "fixed blocks phi_0;phi_2;... directly");
    c_rel->add_option("--psi", o.psi, "fixed blocks psi_0;psi_2;... directly");
    c_rel->add_option("--samples", o.samples, "solutions to sample and verify");
    c_rel->add_option("--seed", o.seed, "sampling seed");

    auto* c_ext = sub("free-extend", "greedy free extension");
    c_ext->add_option("--pool", o.pool, "candidate maps")->required();
    c_ext->add_option("--maps", o.maps, "starting free set");
    c_ext->add_option("--L", o.L, "maximal word length");
    c_ext->add_option("--cap", o.cap, "word cap");

    std::vector<std::string> forward(argv + 1, argv + argc);
    try {
        forward = merge_config(forward);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    // CLI11 consumes a vector from the back.
    std::vector<std::string> reversed(forward.rbegin(), forward.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    Runner run(o, forward);
    try {
        if (*c_entropy) {
            const auto [lo, hi] = parse_levels(o.levels, o.n);
            const auto mu = measure_from(o, hi);
            std::string csv = "n,H_bits,H_over_n\n";
            for (int n = lo; n <= hi; ++n) {
                const double h = entropy(mu, n).value_bits;
                csv += std::to_string(n) + "," + fmt(h) + "," + fmt(n > 0 ? h / n : 0.0) + "\n";
            }
            run.emit("entropy", csv);
        } else if (*c_edim) {
            const auto r = entropy_dim_estimate(measure_from(o, o.n), o.n);
            std::cerr << "slope " << fmt(r.slope) << " upper " << fmt(r.upper) << " lower " << fmt(r.lower) << "\n";
            run.emit("edim", edim_csv(r));
        } else if (*c_por) {
            const auto [lo, hi] = parse_levels(o.levels, o.n - o.m);
            const auto v = entropy_porosity_test(measure_from(o, o.n), o.h, o.delta, o.m, lo, hi);
            run.emit("porosity", json{{"h", v.h}, {"delta", v.delta}, {"m", v.m}, {"n1", v.n1}, {"n2", v.n2},
                                      {"p", v.p}, {"passes", v.passes}}.dump());
        } else if (*c_conv) {
            const auto mu = measure_from(o, o.n);
            const auto nu = o.other == "same" ? mu : named_measure(o.other, o.n);
            run.emit("convolve", measure_report(convolve_R(nu, mu)));
        } else if (*c_act) {
            run.emit("act", measure_report(act_convolve(nu_from(o, o.n), measure_from(o, o.n))));
        } else if (*c_growth) {
            const auto [lo, hi] = parse_levels(o.levels, 14);
            GrowthParams params;
            params.epsilon = o.epsilon;
            params.delta = o.delta;
            params.m = o.m;
            const auto r = entropy_growth_experiment(nu_from(o, hi), measure_from(o, hi), lo, hi, params);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
            std::cerr << "min tail gap " << fmt(r.min_tail_gap) << "\n";
            run.emit("growth", growth_csv(r));
        } else if (*c_stat) {
            const auto sampler = sampler_from(o);
            const auto r = stationary_measure(*sampler, o.n, o.samples, {o.seed, o.workers, 0.5});
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
            json j{{"sampler", sampler->describe()},
                   {"samples", r.samples},
                   {"max_standard_error", r.max_standard_error},
                   {"max_tau", r.max_tau},
                   {"edim_slope", entropy_dim_estimate(r.measure, o.n).slope},
                   {"measure", json::parse(to_json(r.measure))}};
            run.emit("stationary", j.dump());
        } else if (*c_self) {
            run.emit("selfsim", measure_report(self_similar_measure(parse_ifs(o), o.n)));
        } else if (*c_attr) {
            run.emit("attractor", to_json(attractor_cells(family_from(o), o.n)));
        } else if (*c_box) {
            const auto [lo, hi] = parse_levels(o.levels, 18);
            const auto ladder = coarsening_ladder(attractor_cells(family_from(o), hi), lo);
            std::cerr << "box dimension " << fmt(box_dim_estimate(ladder)) << "\n";
            run.emit("boxdim", box_dim_csv(ladder));
        } else if (*c_sim) {
            std::vector<double> r;
            if (!o.ratios.empty()) {
                r = numbers(o.ratios);
            } else if (!o.ifs.empty()) {
                for (const auto& phi : parse_maps(o.ifs)) r.push_back(phi.norm());
            } else {
                throw ConfigError("simdim needs --ratios or --ifs");
            }
            run.emit("simdim", fmt(similarity_dimension(r)));
        } else if (*c_porous) {
            const auto scan = porosity_constant(attractor_cells(family_from(o), o.n), default_c_grid());
            run.emit("porous-set", json{{"c", scan.c}, {"level_ratio", scan.level_ratio}}.dump());
        } else if (*c_copies) {
            const auto [lo, hi] = parse_levels(o.levels, 18);
            const auto centers = attractor_cells(family_from(o), hi);
            const double constant = o.ratio == "hash" ? 0.0 : number(o.ratio);
            const std::uint64_t seed = o.seed;
            const auto rule = [&](double x) { return o.ratio == "hash" ? hashed_ratio(x, seed) : constant; };
            const int k_level = o.k_level >= 0 ? o.k_level : hi + 2;
            const auto ladder = coarsening_ladder(cantor_copies_union(centers, rule, k_level), lo);
            const double dim_y = box_dim_estimate(ladder);
            const double dim_k = box_dim_estimate(coarsening_ladder(symmetric_cantor_cells(hi), lo));
            const double dim_c = box_dim_estimate(coarsening_ladder(centers, lo));
            run.emit("cantor-copies", json{{"boxdim_union", dim_y},
                                           {"boxdim_k", dim_k},
                                           {"boxdim_centers", dim_c},
                                           {"excess", dim_y - dim_k},
                                           {"counts", cell_counts(ladder)}}
                                          .dump());
        } else if (*c_free) {
            run.emit("free-check", certificate_json(check_free(exact_maps(o.maps), o.L, o.cap)));
        } else if (*c_rel) {
            std::vector<ExactAffineMap> phi, psi;
            if (!o.phi.empty() || !o.psi.empty()) {
                phi = exact_maps(o.phi);
                psi = exact_maps(o.psi);
            } else {
                if (o.w.empty() || o.w_prime.empty() || o.gamma < 1) {
                    throw ConfigError("relation-solve needs --phi/--psi or --maps, --w, --w-prime and --gamma");
                }
                const auto assignment = o.maps.empty() ? std::vector<ExactAffineMap>{} : exact_maps(o.maps);
                phi = alternating_form(parse_word(o.w), assignment, o.gamma - 1);
                psi = alternating_form(parse_word(o.w_prime), assignment, o.gamma - 1);
            }
            const auto set = relation_solution_set(phi, psi);
            Rng rng(o.seed);
            const auto pts = sample_solutions(set, static_cast<int>(std::min<std::int64_t>(o.samples, 1000)), rng);
            std::int64_t failures = 0;
            for (const auto& g : pts) {
                const auto [x, y] = evaluate_alternating(phi, psi, g);
                failures += x == y ? 0 : 1;
            }
            auto j = json::parse(set.to_json());
            j["sampled"] = pts.size();
            j["sample_failures"] = failures;
            std::cerr << set.describe() << "\n";
            run.emit("relation-solve", j.dump());
        } else if (*c_ext) {
            const auto delta = o.maps.empty() ? std::vector<ExactAffineMap>{} : exact_maps(o.maps);
            const auto out = greedy_free_extension(exact_maps(o.pool), delta, o.L, o.cap);
            json maps = json::array();
            for (const auto& f : out) maps.push_back(f.str());
            run.emit("free-extend", json{{"L", o.L}, {"size", out.size()}, {"maps", maps}}.dump());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
