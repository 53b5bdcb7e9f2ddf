// Command-line front end: synth | rlt | score | score-sup | bench-distance |
// persistence | import-csv.
#include "topo/bench.hpp"
#include "topo/dataio.hpp"
#include "topo/errors.hpp"
#include "topo/geometry.hpp"
#include "topo/persistence.hpp"
#include "topo/rlt.hpp"
#include "topo/rng.hpp"
#include "topo/scoring.hpp"
#include "topo/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string dataset, real_dataset, out, format = "json", cloud, csv;
    bool heatmap = false;
    double gamma = 1.0 / 128.0;
    std::size_t l0 = 64, n = 100, imax = 100;
    double epsilon = topo::OtParams{}.epsilon;
    double tau = 1.0;
    std::size_t max_iter = topo::OtParams{}.max_iter;
    std::size_t barycenter_max_iter = topo::OtParams{}.barycenter_max_iter;
    std::string sigma_mode = "fixed";
    double sigma = topo::SimilarityParams{}.sigma;
    std::size_t c_max = 0;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    // synth
    std::string family = "cylinder", entanglement = "none", provenance = "generated";
    std::size_t n_samples = 512, n_values = 8;
    double noise = 0.01, omega = 4.0, lift = 0.5;
    bool resample = false;
    // bench
    std::string classes;
};

void add_common(CLI::App* app, Options& o) {
    app->add_option("--gamma", o.gamma, "alpha_max as a fraction of the largest witness-landmark distance");
    app->add_option("--l0", o.l0, "landmarks per run");
    app->add_option("--n", o.n, "RLT runs per cloud");
    app->add_option("--imax", o.imax, "RLT bins");
    app->add_option("--epsilon", o.epsilon, "entropic regularization on the max-normalized cost");
    app->add_option("--tau", o.tau, "marginal KL weight (inf for balanced)");
    app->add_option("--max-iter", o.max_iter, "iteration cap per OT solve");
    app->add_option("--barycenter-max-iter", o.barycenter_max_iter, "iteration cap per barycenter");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--threads", o.threads, "worker threads (0: all cores)");
    app->add_option("--out", o.out, "output directory (default: stdout)");
    app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

topo::RltParams rlt_params(const Options& o) {
    topo::RltParams p;
    p.gamma = o.gamma;
    p.l0 = o.l0;
    p.n = o.n;
    p.i_max = o.imax;
    p.validate();
    return p;
}

topo::ScoreConfig score_config(const Options& o) {
    topo::ScoreConfig c;
    c.rlt = rlt_params(o);
    c.ot.epsilon = o.epsilon;
    c.ot.tau = o.tau;
    c.ot.max_iter = o.max_iter;
    c.ot.barycenter_max_iter = o.barycenter_max_iter;
    c.ot.validate();
    c.similarity.mode = o.sigma_mode == "median" ? topo::SigmaMode::median : topo::SigmaMode::fixed;
    c.similarity.sigma = o.sigma;
    c.c_max = o.c_max;
    c.seed = o.seed;
    c.threads = o.threads;
    return c;
}

// Writes `name` into --out, or prints it when no directory was given.
void emit(const Options& o, const std::string& name, const std::string& bytes) {
    if (o.out.empty()) {
        std::cout << bytes;
        if (!bytes.empty() && bytes.back() != '\n') std::cout << '\n';
        return;
    }
    topo::write_file_atomic(fs::path(o.out) / name, bytes);
}

std::string distribution_csv(const std::vector<topo::WassersteinRlt>& sig) {
    std::ostringstream ss;
    ss << "axis_id,axis_name,bin,mass\n";
    for (const auto& w : sig) {
        for (std::size_t i = 0; i < w.mass.size(); ++i) {
            ss << w.axis_id << ',' << w.axis_name << ',' << i << ',' << json(w.mass[i]).dump() << '\n';
        }
    }
    return ss.str();
}

topo::PointCloud load_cloud(const std::string& path) {
    const fs::path p(path);
    return p.extension() == ".csv" ? topo::import_csv(p) : topo::read_cloud(p);
}

void write_report(const Options& o, const topo::ScoreReport& r, const topo::ScoreConfig& c) {
    if (o.format == "json") {
        emit(o, "report.json", topo::report_json(r, c));
    } else {
        std::ostringstream ss;
        ss << "mu," << json(r.mu).dump() << "\n";
        if (r.mu_sup) ss << "mu_sup," << json(*r.mu_sup).dump() << "\n";
        ss << "c," << r.c << "\nrho_in," << json(r.rho_in).dump() << "\nrho_out," << json(r.rho_out).dump() << "\n";
        emit(o, "summary.csv", ss.str());
    }
    if (!o.out.empty()) {
        emit(o, "M.csv", topo::matrix_csv(r.m.similarities));
        emit(o, "distances.csv", topo::matrix_csv(r.m.distances));
        emit(o, "M_prime.csv", topo::matrix_csv(r.m_prime));
    }
    if (o.heatmap) {
        if (o.out.empty()) throw topo::ParameterError("--heatmap needs --out");
        emit(o, "M.pgm", topo::heatmap_pgm(r.m.similarities));
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"Topological disentanglement scores from conditioned point clouds"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "generate a synthetic conditioned dataset");
    synth->add_option("--family", o.family)->check(CLI::IsMember({"cylinder", "cone", "ellipsoid", "mini_dsprites"}));
    synth->add_option("--entanglement", o.entanglement)->check(CLI::IsMember({"none", "spiral", "threshold", "mixing"}));
    synth->add_option("--provenance", o.provenance)->check(CLI::IsMember({"generated", "real"}));
    synth->add_option("--n-samples", o.n_samples);
    synth->add_option("--n-values", o.n_values);
    synth->add_option("--noise", o.noise);
    synth->add_option("--omega", o.omega);
    synth->add_option("--lift", o.lift);
    synth->add_flag("--resample", o.resample, "fresh base latents for every conditioning value");
    synth->add_option("--seed", o.seed);
    synth->add_option("--out", o.out)->required();

    auto* rlt = app.add_subcommand("rlt", "per-axis Wasserstein RLT signatures");
    rlt->add_option("--dataset", o.dataset)->required();
    add_common(rlt, o);

    auto* score = app.add_subcommand("score", "unsupervised score mu");
    score->add_option("--dataset", o.dataset)->required();
    add_common(score, o);

    auto* score_sup = app.add_subcommand("score-sup", "supervised score mu_sup against real factors");
    score_sup->add_option("--dataset", o.dataset)->required();
    score_sup->add_option("--real-dataset", o.real_dataset)->required();
    add_common(score_sup, o);

    for (auto* sub : {score, score_sup}) {
        sub->add_option("--sigma-mode", o.sigma_mode)->check(CLI::IsMember({"fixed", "median"}));
        sub->add_option("--sigma", o.sigma, "similarity scale in squared bins (fixed mode)");
        sub->add_option("--c-max", o.c_max, "largest cluster count tried (0: all)");
        sub->add_flag("--heatmap", o.heatmap, "also write M.pgm");
    }

    auto* bench = app.add_subcommand("bench-distance", "difference ratio of the four distance constructions");
    bench->add_option("--dataset", o.dataset, "manifest (default: built-in loop harness)");
    bench->add_option("--classes", o.classes, "comma-separated class label per axis, required with --dataset");
    add_common(bench, o);

    auto* pers = app.add_subcommand("persistence", "barcode of one witness filtration of a cloud");
    pers->add_option("--cloud", o.cloud, "cloud file (.tpc or .csv)")->required();
    add_common(pers, o);

    auto* import = app.add_subcommand("import-csv", "convert a numeric CSV table to a cloud file");
    import->add_option("--csv", o.csv)->required();
    import->add_option("--out", o.out, "output .tpc path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (const char* env = std::getenv("TOPO_DISENTANGLE_THREADS")) o.threads = std::stoul(env);

    if (*synth) {
        topo::SynthSpec s;
        s.family = topo::parse_family(o.family);
        s.entanglement = topo::parse_entanglement(o.entanglement);
        s.provenance = o.provenance;
        s.n_samples = o.n_samples;
        s.n_values = o.n_values;
        s.noise_sigma = o.noise;
        s.omega = o.omega;
        s.lift = o.lift;
        s.resample = o.resample;
        s.seed = o.seed;
        const auto ds = topo::generate(s);
        const fs::path manifest = fs::path(o.out) / "manifest.json";
        topo::write_dataset(ds, manifest);
        json truth = topo::ground_truth_axes(s);
        topo::write_file_atomic(fs::path(o.out) / "ground_truth.json", truth.dump(2) + "\n");
        std::cout << manifest.string() << '\n';
    } else if (*rlt) {
        const auto c = score_config(o);
        const auto ds = topo::read_dataset(o.dataset);
        const auto sig = topo::conditioned_wrlts(ds, c.rlt, c.ot, topo::derive_seed(c.seed, {0}), c.threads);
        if (o.format == "csv") {
            emit(o, "wrlt.csv", distribution_csv(sig));
        } else {
            json doc = json::array();
            for (const auto& w : sig) {
                doc.push_back({{"axis_id", w.axis_id},
                               {"axis_name", w.axis_name},
                               {"mass", w.mass},
                               {"ensemble_size", w.ensemble_size},
                               {"degenerate", w.degenerate},
                               {"iterations", w.iterations}});
            }
            emit(o, "wrlt.json", doc.dump(2) + "\n");
        }
        for (const auto& w : topo::signature_warnings(sig)) std::cerr << "warning: " << w << '\n';
    } else if (*score) {
        const auto c = score_config(o);
        write_report(o, topo::score_dataset(topo::read_dataset(o.dataset), c), c);
    } else if (*score_sup) {
        const auto c = score_config(o);
        const auto gen = topo::read_dataset(o.dataset);
        const auto real = topo::read_dataset(o.real_dataset);
        write_report(o, topo::score_dataset_supervised(gen, real, c), c);
    } else if (*bench) {
        const auto c = score_config(o);
        topo::Harness h;
        if (o.dataset.empty()) {
            topo::HarnessSpec hs;
            hs.seed = o.seed;
            h = topo::homeomorphism_harness(hs);
        } else {
            h.dataset = topo::read_dataset(o.dataset);
            std::stringstream ss(o.classes);
            for (std::string tok; std::getline(ss, tok, ',');) h.classes.push_back(std::stoul(tok));
        }
        const auto rows = topo::difference_ratios(h.dataset, h.classes, topo::ablation_variants(), c.rlt, c.ot,
                                                  c.seed, c.threads);
        std::ostringstream out;
        if (o.format == "csv") {
            out << "variant,mean,distance,intra,inter,ratio\n";
            for (const auto& r : rows) {
                out << r.variant.label() << ',' << (r.variant.mean == topo::MeanKind::euclidean ? "euclidean" : "wasserstein")
                    << ',' << (r.variant.distance == topo::DistanceKind::euclidean ? "euclidean" : "wasserstein") << ','
                    << json(r.intra).dump() << ',' << json(r.inter).dump() << ',' << json(r.ratio).dump() << '\n';
            }
            emit(o, "bench.csv", out.str());
        } else {
            out << "| variant | mean | distance | difference ratio |\n|---|---|---|---|\n";
            for (const auto& r : rows) {
                out << "| " << r.variant.label() << " | "
                    << (r.variant.mean == topo::MeanKind::euclidean ? "euclidean" : "wasserstein") << " | "
                    << (r.variant.distance == topo::DistanceKind::euclidean ? "euclidean" : "wasserstein") << " | "
                    << r.ratio << "x |\n";
            }
            emit(o, "bench.md", out.str());
        }
    } else if (*pers) {
        const auto p = rlt_params(o);
        const auto cloud = load_cloud(o.cloud);
        const auto idx = topo::select_landmarks(cloud, std::min(p.l0, cloud.n_points()), topo::derive_seed(o.seed, {0}));
        const auto d = topo::pairwise_distances(cloud, cloud.subset(idx));
        const auto f = topo::build_witness_filtration(d, p.gamma * d.max());
        const auto bc = topo::compute_barcode(f);
        std::ostringstream out;
        if (o.format == "csv") {
            out << "dim,birth,death\n";
            for (const auto& iv : bc.intervals) {
                out << iv.dim << ',' << json(iv.birth).dump() << ',' << json(iv.death).dump() << '\n';
            }
            emit(o, "barcode.csv", out.str());
        } else {
            json iv = json::array();
            for (const auto& i : bc.intervals) iv.push_back({{"dim", i.dim}, {"birth", i.birth}, {"death", i.death}});
            const auto r = topo::rlt_from_barcode(bc, p.i_max);
            emit(o, "barcode.json",
                 json{{"alpha_max", bc.alpha_max}, {"landmarks", idx}, {"intervals", iv}, {"rlt", r.mass}}.dump(2) + "\n");
        }
    } else if (*import) {
        topo::write_cloud(topo::import_csv(o.csv), o.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const topo::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
