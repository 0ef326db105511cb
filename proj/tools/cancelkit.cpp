// cancelkit: classify constant-coefficient operators, test cocancellation,
// run torus probes, export the catalog.
//
// Exit codes: 0 decisive, 1 input error, 2 inconclusive ellipticity.

#include "cancelkit/cancellation.hpp"
#include "cancelkit/fourierlab.hpp"
#include "cancelkit/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cancelkit;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string path;
    std::string catalog_name;
    int n = -1, k = -1, m = -1;
    std::string lambda;
    double delta = 0.1;
    int quad_level = 6;
    std::size_t grid = 0;
    int scales = 3;
    int trials = -1;
    std::uint64_t seed = 1;
    int ell = -1;
    bool md = false;
    bool decompose = false;
    bool timings = false;
    std::string csv;
};

CatalogParams catalog_params(const Options& o) {
    CatalogParams p;
    if (o.n >= 0) p.n = o.n;
    if (o.k >= 0) p.k = o.k;
    if (o.m >= 0) p.m = o.m;
    if (!o.lambda.empty()) p.lambda = parse_rational(o.lambda);
    return p;
}

OperatorSpec load_operator(const Options& o) {
    if (!o.catalog_name.empty()) {
        if (!o.path.empty()) throw InputError("give either a path or --catalog, not both");
        return catalog(o.catalog_name, catalog_params(o));
    }
    if (o.path.empty()) throw InputError("no operator: give a JSON path or --catalog NAME");
    std::ostringstream buf;
    if (o.path == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(o.path);
        if (!in) throw InputError("cannot open " + o.path);
        buf << in.rdbuf();
    }
    return operator_from_json(buf.str());
}

ojson rationals(const std::vector<Rational>& v) {
    auto a = ojson::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

ojson basis(const Subspace& s) {
    auto a = ojson::array();
    for (std::size_t j = 0; j < s.dim(); ++j) a.push_back(rationals(s.basis_vector(j)));
    return a;
}

ojson finite(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

class Stopwatch {
public:
    void lap(ojson& t, const char* name) {
        const auto now = std::chrono::steady_clock::now();
        t[name] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ojson decomposition_json(const HomoPolyMatrix& L, std::uint64_t seed) {
    ojson d;
    const RatMatrix q = RatMatrix::identity(L.cols());
    try {
        const auto dec = decompose_identity(L, q, seed);
        d["m"] = dec.m;
        auto pts = ojson::array();
        for (const auto& xi : dec.xis) pts.push_back(rationals(xi));
        d["points"] = pts;
        d["residual_zero"] = decomposition_residual(L, q, dec).is_zero();
    } catch (const DecompositionError& e) {
        d["error"] = e.what();
        d["witness"] = rationals(e.witness);
    }
    return d;
}

EllipticityVerdict certify_with_halving(const OperatorSpec& op, double delta) {
    EllipticityVerdict v;
    for (int i = 0; i < 5; ++i, delta /= 2) {
        v = certify_elliptic(op, delta);
        if (v.status != EllipticStatus::Inconclusive) break;
    }
    return v;
}

ojson classify(const OperatorSpec& op, const Options& o, int& exit_code) {
    Stopwatch clock;
    ojson times;
    ojson summary;

    ojson ell;
    std::optional<bool> elliptic;
    if (op.n > 4) {
        ell["verdict"] = to_string(EllipticStatus::Inconclusive);
        ell["elliptic"] = nullptr;
        ell["note"] = "no certified sphere net for n > 4";
    } else {
        const auto v = certify_with_halving(op, o.delta);
        ell["verdict"] = to_string(v.status);
        if (v.status != EllipticStatus::Inconclusive) elliptic = v.status == EllipticStatus::CertifiedElliptic;
        ell["elliptic"] = elliptic ? ojson(*elliptic) : ojson(nullptr);
        if (!v.route.empty()) ell["route"] = v.route;
        ell["delta"] = v.delta;
        ell["net_size"] = v.net_size;
        ell["min_sigma"] = finite(v.min_sigma);
        ell["min_det"] = finite(v.min_det);
        ell["lipschitz_det"] = v.lipschitz_det;
        ell["lipschitz_symbol"] = v.lipschitz_symbol;
        ell["constant"] = v.constant ? ojson(*v.constant) : ojson(nullptr);
        if (v.witness) {
            ell["witness"] = {{"xi", rationals(v.witness->xi)}, {"v", rationals(v.witness->v)}};
        } else {
            ell["witness"] = nullptr;
        }
    }
    if (!elliptic) exit_code = 2;
    summary["elliptic"] = elliptic ? ojson(*elliptic) : ojson(nullptr);
    clock.lap(times, "ellipticity_ms");

    ojson compat, cancel;
    std::optional<CancellingResult> exact;
    try {
        exact = is_cancelling(op, o.seed);
        const auto& c = exact->compat;
        compat["degree"] = c.degree;
        compat["L_degree"] = c.L.degree() ? ojson(*c.L.degree()) : ojson(nullptr);
        compat["nonzero_entries"] = c.L.nonzero_count();
        compat["annihilates"] = is_zero_polymat(c.L * symbol(op));
        cancel["cancelling"] = exact->cancelling;
        cancel["method"] = "exact";
        cancel["intersection_dim"] = exact->intersection.dim();
        cancel["intersection_basis"] = basis(exact->intersection);
        cancel["sampled_dim"] = exact->sampled.dim();
        cancel["sampled_points"] = exact->samples;
        cancel["cross_check"] = exact->cross_check;
        summary["cancelling"] = exact->cancelling;
    } catch (const std::domain_error& e) {
        compat["available"] = false;
        compat["reason"] = e.what();
        const auto s = sampled_image_intersection(op, o.seed);
        // a finite intersection that is already zero settles the question
        cancel["cancelling"] = s.subspace.is_zero();
        cancel["method"] = "sampled";
        cancel["certified"] = s.subspace.is_zero();
        cancel["intersection_dim"] = s.subspace.dim();
        cancel["intersection_basis"] = basis(s.subspace);
        cancel["sampled_points"] = s.samples;
        summary["cancelling"] = s.subspace.is_zero();
    }
    clock.lap(times, "cancellation_ms");

    ojson cocancel;
    const bool annihilator = is_annihilator_name(op.name);
    if (annihilator) {
        const auto ker = cocancel_kernel(symbol(op));
        cocancel["cocancelling"] = ker.is_zero();
        cocancel["kernel_dim"] = ker.dim();
        cocancel["kernel_basis"] = basis(ker);
        summary["cocancelling"] = ker.is_zero();
    }

    ojson weak;
    if (op.k >= op.n) {
        if (elliptic.value_or(false) && exact) {
            const auto w = weak_cancellation_test(op, exact->intersection, o.quad_level);
            weak["weakly_cancelling"] = w.verdict;
            weak["quad_level"] = o.quad_level;
            weak["tolerance_floor"] = w.tolerance_floor;
            auto ints = ojson::array();
            for (const auto& i : w.integrals) {
                ojson x;
                x["e"] = rationals(i.e);
                x["value"] = std::vector<double>(i.value.data(), i.value.data() + i.value.size());
                x["magnitude"] = i.magnitude;
                x["error"] = i.error;
                ints.push_back(x);
            }
            weak["integrals"] = ints;
            summary["weakly_cancelling"] = w.verdict;
        } else {
            weak["applicable"] = false;
            weak["reason"] = "requires a certified injectively elliptic operator";
        }
        clock.lap(times, "weak_cancellation_ms");
    }

    ojson r;
    r["tool"] = "cancelkit";
    r["version"] = kVersion;
    r["operator"] = operator_to_json(op);
    r["seed"] = o.seed;
    r["summary"] = summary;
    r["ellipticity"] = ell;
    r["compatibility"] = compat;
    r["cancelling"] = cancel;
    if (annihilator) r["cocancelling"] = cocancel;
    if (op.k >= op.n) r["weak_cancellation"] = weak;
    if (o.decompose && annihilator) {
        r["decomposition"] = decomposition_json(symbol(op), o.seed);
        clock.lap(times, "decomposition_ms");
    }
    if (o.timings) r["timings"] = times;
    return r;
}

ojson cocancel(const OperatorSpec& op, const Options& o) {
    Stopwatch clock;
    ojson times;
    const auto L = symbol(op);
    const auto ker = cocancel_kernel(L);
    ojson r;
    r["tool"] = "cancelkit";
    r["version"] = kVersion;
    r["operator"] = operator_to_json(op);
    r["seed"] = o.seed;
    r["cocancelling"] = ker.is_zero();
    r["kernel_dim"] = ker.dim();
    r["kernel_basis"] = basis(ker);
    clock.lap(times, "kernel_ms");
    if (o.decompose) {
        r["decomposition"] = decomposition_json(L, o.seed);
        clock.lap(times, "decomposition_ms");
    }
    if (o.timings) r["timings"] = times;
    return r;
}

// An operator A with L(D) A(D) = 0 built from the annihilator itself:
// A = det(L L*) id - L* adj(L L*) L, the compatibility operator of L*.
OperatorSpec operator_annihilated_by(const OperatorSpec& l) {
    const auto lt = from_symbol(symbol(l).transpose(), l.k, l.name + "_adjoint");
    const auto c = compatibility_operator(lt);
    if (is_zero_polymat(c.L)) throw std::invalid_argument("annihilator admits no nonzero operator in its kernel");
    return from_symbol(c.L, *c.L.degree(), "kernel_of_" + l.name);
}

ProbeReport probe(const std::string& kind, const OperatorSpec& op, const Options& o) {
    if (kind == "l2") return probe_l2(op, o.trials > 0 ? o.trials : 100, o.seed, o.grid);
    if (kind == "sobolev" || kind == "hardy") {
        const int ell = o.ell >= 0 ? o.ell : op.k - 1;
        return endpoint_probe(kind, op, ell, o.scales, o.grid, o.seed, o.trials > 0 ? o.trials : 4);
    }
    if (kind == "duality") {
        const int trials = o.trials > 0 ? o.trials : 200;
        if (is_annihilator_name(op.name)) {
            auto r = probe_duality(symbol(op), operator_annihilated_by(op), trials, o.seed, o.grid, o.scales);
            r.details["annihilator"] = op.name;
            return r;
        }
        auto r = probe_duality(compatibility_operator(op).L, op, trials, o.seed, o.grid, o.scales);
        r.details["annihilator"] = "compatibility_operator";
        return r;
    }
    if (kind == "kernel") return kernel_probe(op, o.grid ? o.grid : 256);
    throw InputError("unknown probe kind " + kind);
}

std::string scalar(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string markdown(const ojson& r, const std::string& title) {
    std::ostringstream os;
    os << "# " << title << "\n\n";
    if (r.contains("operator")) {
        const auto& op = r["operator"];
        os << "Operator `" << (op.contains("name") ? op["name"].get<std::string>() : std::string("(unnamed)")) << "`: n = " << op["n"]
           << ", k = " << op["k"] << ", dim V = " << op["dim_v"] << ", dim E = " << op["dim_e"] << "\n\n";
    }
    if (r.contains("summary")) {
        os << "| property | value |\n|---|---|\n";
        for (const auto& [key, v] : r["summary"].items()) os << "| " << key << " | " << scalar(v) << " |\n";
        os << "\n";
    }
    for (const auto& [key, v] : r.items()) {
        if (!v.is_object() || key == "operator" || key == "summary") continue;
        os << "## " << key << "\n\n";
        for (const auto& [k2, x] : v.items()) os << "- " << k2 << ": " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
        os << "\n";
    }
    for (const auto& [key, v] : r.items())
        if (!v.is_object() && key != "tool" && key != "version") os << "- " << key << ": " << scalar(v) << "\n";
    return os.str();
}

void print(const ojson& r, const Options& o, const std::string& title) {
    if (o.md) {
        std::cout << markdown(r, title);
    } else {
        std::cout << r.dump(2) << "\n";
    }
}

void add_operator_options(CLI::App* c, Options& o) {
    c->add_option("path", o.path, "operator JSON file, - for stdin");
    c->add_option("--catalog", o.catalog_name, "catalog operator name");
    c->add_option("--n", o.n, "space dimension");
    c->add_option("--k", o.k, "order (grad_k, div_pow)");
    c->add_option("--m", o.m, "form degree or fibre dimension");
    c->add_option("--lambda", o.lambda, "rational parameter as p/q");
    c->add_option("--seed", o.seed, "seed for sampled steps");
    c->add_flag("--md", o.md, "markdown output");
    c->add_flag("--timings", o.timings, "include wall-clock timings");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cancelkit: ellipticity and cancellation of constant-coefficient operators"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options o;

    auto* cls = app.add_subcommand("classify", "ellipticity, compatibility, cancellation and weak cancellation report");
    add_operator_options(cls, o);
    cls->add_option("--delta", o.delta, "initial net covering radius (halved while inconclusive)");
    cls->add_option("--quad-level", o.quad_level, "sphere quadrature level for weak cancellation");
    cls->add_flag("--decompose", o.decompose, "also decompose the identity for annihilators");

    auto* coc = app.add_subcommand("cocancel", "cocancellation of an annihilator");
    add_operator_options(coc, o);
    coc->add_flag("--decompose", o.decompose, "decompose the identity through L(xi_j)");

    std::string kind;
    auto* prb = app.add_subcommand("probe", "torus inequality probes");
    prb->add_option("kind", kind, "l2 | sobolev | duality | hardy | kernel")
        ->required()
        ->check(CLI::IsMember({"l2", "sobolev", "duality", "hardy", "kernel"}));
    add_operator_options(prb, o);
    prb->add_option("--grid", o.grid, "points per axis (power of two)");
    prb->add_option("--scales", o.scales, "number of dyadic scales");
    prb->add_option("--trials", o.trials, "random trials");
    prb->add_option("--ell", o.ell, "derivative order l (default k - 1)");
    prb->add_option("--csv", o.csv, "also write per-scale ratios as CSV");

    auto* cat = app.add_subcommand("catalog", "list or emit catalog operators");
    cat->require_subcommand(1);
    cat->add_subcommand("list", "catalog names");
    std::string emit_name;
    auto* emit = cat->add_subcommand("emit", "operator JSON for a catalog entry");
    emit->add_option("name", emit_name, "catalog name")->required();
    emit->add_option("--n", o.n, "space dimension");
    emit->add_option("--k", o.k, "order");
    emit->add_option("--m", o.m, "form degree or fibre dimension");
    emit->add_option("--lambda", o.lambda, "rational parameter as p/q");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cat->parsed()) {
            if (emit->parsed()) {
                o.catalog_name = emit_name;
                std::cout << emit_operator(load_operator(o));
            } else {
                std::cout << ojson(catalog_names()).dump(2) << "\n";
            }
            return 0;
        }
        const OperatorSpec op = load_operator(o);
        if (cls->parsed()) {
            int code = 0;
            print(classify(op, o, code), o, "Classification");
            return code;
        }
        if (coc->parsed()) {
            print(cocancel(op, o), o, "Cocancellation");
            return 0;
        }
        if (prb->parsed()) {
            const auto r = probe(kind, op, o);
            if (!o.csv.empty()) {
                std::ofstream out(o.csv);
                if (!out) throw InputError("cannot write " + o.csv);
                out << to_csv(r);
            }
            print(to_json(r), o, "Probe " + kind);
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
