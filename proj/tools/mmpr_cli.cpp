// mmpr command-line front end: fits, paths, simulations, inclusion studies,
// diversity metrics and penalty surfaces.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <mmpr/mmpr.hpp>

namespace {

using nlohmann::json;

struct OutputOptions
{
    std::string out = "-";
    std::string format = "csv";
    std::string scale = "standardized";
};

struct DataOptions
{
    std::string input;
    std::string response = "y";
    bool fill_zero = false;
};

struct ModelOptions
{
    int models = 3;
    int c = 1;
    int d = 1;
    double rho_thresh = 0.3;
    double omega_max = 1e6;
    double omega_tol = 1e-2;
    double eps = 1e-6;
    int max_sweeps = 10000;
    bool exhaustive = false;
    int random_starts = 0;
};

struct Options
{
    OutputOptions output;
    DataOptions data;
    ModelOptions model;
    std::uint64_t seed = 0;

    std::optional<double> lambda;
    std::optional<double> omega;
    int folds = 10;

    int n_lambda = 50;
    double lambda_min_ratio = 1e-3;

    int sim_case = 0;
    double rho = 0.0;
    int blocks = 1;
    int block_size = 6;
    std::string structure = "identity";
    int n = 80;
    double sigma2 = 9.0;
    std::vector<double> beta0;

    int replicates = 16;

    std::string fit_file;
    int record = -1;

    std::vector<double> beta1{1.0, 0.0};
    double bound = 2.0;
    int resolution = 201;
};

void add_output(CLI::App* cmd, OutputOptions& o, bool with_scale)
{
    cmd->add_option("-o,--out", o.out, "Output file, - for stdout")->capture_default_str();
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    if (with_scale)
        cmd->add_option("--scale", o.scale, "Coefficient scale of CSV output")
            ->check(CLI::IsMember({"standardized", "raw"}))
            ->capture_default_str();
}

void add_data(CLI::App* cmd, DataOptions& o, bool required)
{
    auto* in = cmd->add_option("-i,--input", o.input, "Input CSV with a header row");
    if (required) in->required();
    in->check(CLI::ExistingFile);
    cmd->add_option("--response", o.response, "Response column name")->capture_default_str();
    cmd->add_flag("--fill-missing-zero", o.fill_zero, "Treat empty cells as 0");
}

void add_model(CLI::App* cmd, ModelOptions& o)
{
    cmd->add_option("-M,--models", o.models, "Number of models")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--c", o.c, "Sparsity power")->check(CLI::IsMember({1, 2}))->capture_default_str();
    cmd->add_option("--d", o.d, "Similarity power")->check(CLI::IsMember({1, 2}))->capture_default_str();
    cmd->add_option("--rho-thresh", o.rho_thresh, "Similarity ceiling")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--omega-max", o.omega_max, "Largest omega tried")->capture_default_str();
    cmd->add_option("--omega-tol", o.omega_tol, "Relative omega bracket width")->capture_default_str();
    cmd->add_option("--eps", o.eps, "Convergence tolerance")->capture_default_str();
    cmd->add_option("--max-sweeps", o.max_sweeps, "Sweep cap per start")->capture_default_str();
    cmd->add_flag("--exhaustive", o.exhaustive, "Start from every support subset (M*p <= 14)");
    cmd->add_option("--random-starts", o.random_starts, "Random support starts")->capture_default_str();
}

mmpr::PathSpec path_spec(const Options& opt)
{
    mmpr::PathSpec s;
    s.models = opt.model.models;
    s.c = opt.model.c;
    s.d = opt.model.d;
    s.rho_thresh = opt.model.rho_thresh;
    s.omega_max = opt.model.omega_max;
    s.omega_tol = opt.model.omega_tol;
    s.eps = opt.model.eps;
    s.max_sweeps = opt.model.max_sweeps;
    s.controls.exhaustive_subsets = opt.model.exhaustive;
    s.controls.random_starts = opt.model.random_starts;
    s.controls.seed = opt.seed;
    return s;
}

mmpr::StandardizedDesign load_design(const DataOptions& o)
{
    auto ingested = mmpr::ingest_csv(o.input, o.response, o.fill_zero);
    if (ingested.filled > 0)
        std::cerr << json{{"note", "filled_missing_values"}, {"count", ingested.filled}}.dump() << '\n';
    return mmpr::standardize(ingested.data);
}

void emit(const OutputOptions& o, const std::string& text)
{
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw mmpr::Error(mmpr::ErrorClass::data, "OutputError", "cannot write " + o.out);
    f << text;
    if (!f) throw mmpr::Error(mmpr::ErrorClass::data, "OutputError", "write failed for " + o.out);
}

mmpr::Scale scale_of(const OutputOptions& o)
{
    return o.scale == "raw" ? mmpr::Scale::raw : mmpr::Scale::standardized;
}

std::string render_path(const Options& opt, const mmpr::PathResult& path, const mmpr::StandardizedDesign& design)
{
    std::ostringstream os;
    if (opt.output.format == "json") {
        os << mmpr::path_to_json(path, design).dump(2) << '\n';
    } else {
        mmpr::write_path_csv(os, path, design, scale_of(opt.output));
    }
    return os.str();
}

double select_lambda(const Options& opt, const mmpr::StandardizedDesign& design)
{
    if (opt.lambda) return *opt.lambda;
    return mmpr::lasso_cv(design, opt.folds, opt.seed).lambda;
}

mmpr::PathRecord fit_record(const Options& opt, const mmpr::StandardizedDesign& design)
{
    const auto spec = path_spec(opt);
    spec.validate();
    const double lambda = select_lambda(opt, design);
    if (!opt.omega) return mmpr::fit_at_lambda(design, spec, lambda);

    auto fit = mmpr::solve(design, spec.penalty(lambda, *opt.omega), spec.controls);
    mmpr::TuneResult tuned;
    tuned.omega = *opt.omega;
    tuned.max_similarity = mmpr::max_pairwise_similarity(fit.coef);
    tuned.fit = std::move(fit);
    return mmpr::make_record(design, lambda, std::move(tuned));
}

void run_fit(const Options& opt)
{
    const auto design = load_design(opt.data);
    mmpr::PathResult path;
    path.records.push_back(fit_record(opt, design));
    emit(opt.output, render_path(opt, path, design));
}

void run_path(const Options& opt)
{
    const auto design = load_design(opt.data);
    auto spec = path_spec(opt);
    spec.lambda_grid = mmpr::default_lambda_grid(mmpr::lambda_max(design, spec.c), opt.n_lambda, opt.lambda_min_ratio);
    emit(opt.output, render_path(opt, mmpr::fit_path(design, spec), design));
}

mmpr::SimCase sim_case(const Options& opt)
{
    if (opt.sim_case != 0) {
        auto sc = mmpr::paper_case_settings(opt.sim_case, opt.seed);
        sc.n = opt.n;
        sc.sigma2 = opt.sigma2;
        return sc;
    }
    mmpr::SimCase sc;
    sc.rho = opt.rho;
    sc.blocks = opt.blocks;
    sc.block_size = opt.block_size;
    sc.structure = mmpr::parse_structure(opt.structure);
    sc.n = opt.n;
    sc.sigma2 = opt.sigma2;
    sc.seed = opt.seed;
    if (!opt.beta0.empty()) {
        sc.beta0.resize(static_cast<mmpr::Index>(opt.beta0.size()));
        for (std::size_t k = 0; k < opt.beta0.size(); ++k) sc.beta0(static_cast<mmpr::Index>(k)) = opt.beta0[k];
    }
    return sc;
}

void run_simulate(const Options& opt)
{
    const auto sim = mmpr::sample(sim_case(opt));
    std::ostringstream os;
    if (opt.output.format == "json") {
        json j;
        j["covariates"] = sim.data.names;
        j["seed"] = sim.seed;
        j["X"] = mmpr::detail::matrix_json(sim.data.X);
        j["y"] = mmpr::detail::vector_json(sim.data.y);
        os << j.dump() << '\n';
    } else {
        mmpr::write_dataset_csv(os, sim.data, "y");
    }
    emit(opt.output, os.str());
}

void run_inclusion(const Options& opt)
{
    const auto sc = sim_case(opt);
    const auto rule = opt.lambda ? mmpr::LambdaRule::fixed(*opt.lambda) : mmpr::LambdaRule::cv(opt.folds);
    const auto study = mmpr::inclusion_study(sc, opt.replicates, opt.seed, path_spec(opt), rule);
    const auto names = mmpr::default_names(sc.p());
    std::ostringstream os;
    if (opt.output.format == "json") {
        json j = mmpr::inclusion_to_json(study.table, names);
        j["lambdas"] = json::array();
        for (const auto& f : study.fits) j["lambdas"].push_back(f.lambda);
        os << j.dump(2) << '\n';
    } else {
        mmpr::write_inclusion_csv(os, study.table, names);
    }
    emit(opt.output, os.str());
}

void run_metrics(const Options& opt)
{
    const auto design = load_design(opt.data);
    mmpr::CoefficientSet coef;
    if (!opt.fit_file.empty()) {
        std::ifstream in(opt.fit_file);
        if (!in) throw mmpr::Error(mmpr::ErrorClass::data, "FileNotFound", "cannot open " + opt.fit_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw mmpr::Error(mmpr::ErrorClass::data, "MalformedJson", e.what());
        }
        const auto path = mmpr::path_from_json(j);
        if (path.records.empty()) throw mmpr::Error(mmpr::ErrorClass::data, "MalformedJson", "fit file has no records");
        const int n = static_cast<int>(path.records.size());
        const int r = opt.record < 0 ? n + opt.record : opt.record;
        if (r < 0 || r >= n) throw mmpr::InvalidConfig("record index out of range");
        coef = path.records[static_cast<std::size_t>(r)].coef;
    } else {
        coef = fit_record(opt, design).coef;
    }
    const auto rep = mmpr::diversity_report(design, coef);
    std::ostringstream os;
    if (opt.output.format == "json") os << mmpr::diversity_to_json(rep).dump(2) << '\n';
    else mmpr::write_diversity_csv(os, rep);
    emit(opt.output, os.str());
}

void run_surface(const Options& opt)
{
    if (opt.beta1.size() != 2) throw mmpr::InvalidConfig("--beta1 needs exactly two values");
    const Eigen::Vector2d b1(opt.beta1[0], opt.beta1[1]);
    const double lambda = opt.lambda.value_or(0.0);
    const double omega = opt.omega.value_or(1.0);
    mmpr::ContourGrid g;
    if (!opt.data.input.empty())
        g = mmpr::contour_grid(load_design(opt.data), b1, opt.model.c, opt.model.d, lambda, omega, opt.bound,
                               opt.resolution);
    else
        g = mmpr::penalty_surface(b1, opt.model.c, opt.model.d, lambda, omega, opt.bound, opt.resolution);
    std::ostringstream os;
    if (opt.output.format == "json") {
        json j{{"axis", mmpr::detail::vector_json(g.axis)},
               {"penalty", mmpr::detail::matrix_json(g.penalty)},
               {"beta1", opt.beta1},
               {"c", g.c},
               {"d", g.d},
               {"lambda", g.lambda},
               {"omega", g.omega},
               {"min_point", {g.min_point(0), g.min_point(1)}}};
        if (g.sse) j["sse"] = mmpr::detail::matrix_json(*g.sse);
        if (g.ls_point) j["ls_point"] = {(*g.ls_point)(0), (*g.ls_point)(1)};
        os << j.dump() << '\n';
    } else {
        mmpr::write_contour_csv(os, g);
    }
    emit(opt.output, os.str());
}

const char* class_name(mmpr::ErrorClass c)
{
    switch (c) {
    case mmpr::ErrorClass::usage: return "usage";
    case mmpr::ErrorClass::data: return "data";
    default: return "numerical";
    }
}

int exit_code(mmpr::ErrorClass c)
{
    switch (c) {
    case mmpr::ErrorClass::usage: return 1;
    case mmpr::ErrorClass::data: return 2;
    default: return 3;
    }
}

void report(const std::string& command, const char* cls, const std::string& kind, const std::string& msg)
{
    std::cerr << json{{"error", {{"class", cls}, {"kind", kind}, {"message", msg}, {"command", command}}}}.dump()
              << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-model penalized regression"};
    app.require_subcommand(1);
    Options opt;

    auto* fit = app.add_subcommand("fit", "Fit M models at one lambda");
    auto* path = app.add_subcommand("path", "Similarity-constrained regularization path");
    auto* sim = app.add_subcommand("simulate", "Generate a block-correlated Gaussian dataset");
    auto* inc = app.add_subcommand("inclusion-study", "Replicate nonzero-coefficient proportions");
    auto* met = app.add_subcommand("metrics", "Diversity and fit diagnostics of a fit");
    auto* surf = app.add_subcommand("penalty-surface", "Penalty and SSE values on a coefficient grid");

    for (auto* cmd : {fit, path, sim, inc, met, surf})
        cmd->add_option("--seed", opt.seed, "Seed for every random draw")->capture_default_str();

    for (auto* cmd : {fit, path, met}) {
        add_data(cmd, opt.data, true);
        add_model(cmd, opt.model);
    }
    add_model(inc, opt.model);
    for (auto* cmd : {fit, inc, met}) {
        cmd->add_option("--lambda", opt.lambda, "Sparsity weight; cross-validated lasso lambda when omitted");
        cmd->add_option("--folds", opt.folds, "Cross-validation folds")->capture_default_str();
    }
    for (auto* cmd : {fit, met}) cmd->add_option("--omega", opt.omega, "Fixed similarity weight; tuned when omitted");

    add_output(fit, opt.output, true);
    add_output(path, opt.output, true);
    add_output(sim, opt.output, false);
    add_output(inc, opt.output, false);
    add_output(met, opt.output, false);
    add_output(surf, opt.output, false);

    path->add_option("--n-lambda", opt.n_lambda, "Grid size")->check(CLI::PositiveNumber)->capture_default_str();
    path->add_option("--lambda-min-ratio", opt.lambda_min_ratio, "Smallest lambda over lambda_max")->capture_default_str();

    for (auto* cmd : {sim, inc}) {
        cmd->add_option("--case", opt.sim_case, "Reference case 1..7")->check(CLI::Range(1, 7));
        cmd->add_option("--rho", opt.rho, "Within-block correlation")->capture_default_str();
        cmd->add_option("--blocks", opt.blocks, "Block count")->capture_default_str();
        cmd->add_option("--block-size", opt.block_size, "Covariates per block")->capture_default_str();
        cmd->add_option("--structure", opt.structure, "Block structure")
            ->check(CLI::IsMember({"identity", "cs", "ar1"}))
            ->capture_default_str();
        cmd->add_option("-n,--n", opt.n, "Sample size")->capture_default_str();
        cmd->add_option("--sigma2", opt.sigma2, "Noise variance")->capture_default_str();
        cmd->add_option("--beta0", opt.beta0, "True coefficients")->delimiter(',');
    }
    inc->add_option("--replicates", opt.replicates, "Replicate datasets")->capture_default_str();

    met->add_option("--fit", opt.fit_file, "JSON output of fit or path")->check(CLI::ExistingFile);
    met->add_option("--record", opt.record, "Record index, negative counts from the end")->capture_default_str();

    surf->add_option("--beta1", opt.beta1, "Coefficients of the conditioning model")->delimiter(',');
    surf->add_option("--c", opt.model.c, "Sparsity power")->check(CLI::IsMember({1, 2}))->capture_default_str();
    surf->add_option("--d", opt.model.d, "Similarity power")->check(CLI::IsMember({1, 2}))->capture_default_str();
    surf->add_option("--lambda", opt.lambda, "Sparsity weight (default 0)");
    surf->add_option("--omega", opt.omega, "Similarity weight (default 1)");
    surf->add_option("--bound", opt.bound, "Grid half-width")->capture_default_str();
    surf->add_option("--resolution", opt.resolution, "Points per axis")->capture_default_str();
    add_data(surf, opt.data, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const auto subs = app.get_subcommands();
        report(subs.empty() ? "" : subs.front()->get_name(), "usage", "ParseError", e.what());
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (*fit) run_fit(opt);
        else if (*path) run_path(opt);
        else if (*sim) run_simulate(opt);
        else if (*inc) run_inclusion(opt);
        else if (*met) run_metrics(opt);
        else if (*surf) run_surface(opt);
    } catch (const mmpr::Error& e) {
        report(command, class_name(e.error_class()), e.kind(), e.what());
        return exit_code(e.error_class());
    } catch (const std::exception& e) {
        report(command, "numerical", "InternalError", e.what());
        return 3;
    }
    return 0;
}
