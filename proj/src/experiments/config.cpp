#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include <fmt/format.h>

#include "scoring/crossval.hpp"
#include "scoring/experiments.hpp"
#include "scoring/sure.hpp"

namespace scoring::experiments {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object())
        throw ConfigError(path, "expected an object");
    for (const auto& item : obj.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError(path + "/" + item.key(), "unknown key");
}

const json& required(const json& obj, const std::string& key, const std::string& path)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(path + "/" + key, "missing required key");
    return *it;
}

double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError(path, "expected a finite number");
    return d;
}

double as_positive(const json& v, const std::string& path)
{
    const double d = as_number(v, path);
    if (!(d > 0.0))
        throw ConfigError(path, "expected a positive number");
    return d;
}

std::size_t as_count(const json& v, const std::string& path, std::size_t minimum)
{
    if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()))
        throw ConfigError(path, "expected an integer");
    const double d = v.get<double>();
    if (d < static_cast<double>(minimum))
        throw ConfigError(path, fmt::format("expected an integer >= {}", minimum));
    return static_cast<std::size_t>(d);
}

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path, bool allow_empty = false)
{
    if (!v.is_array())
        throw ConfigError(path, "expected an array");
    if (!allow_empty && v.empty())
        throw ConfigError(path, "expected a non-empty array");
    return v;
}

Vector as_vector(const json& v, const std::string& path)
{
    as_array(v, path);
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = as_number(v[i], fmt::format("{}/{}", path, i));
    return out;
}

Matrix as_matrix(const json& v, const std::string& path)
{
    as_array(v, path);
    const std::size_t rows = v.size();
    Matrix out;
    for (std::size_t i = 0; i < rows; ++i)
    {
        const Vector row = as_vector(v[i], fmt::format("{}/{}", path, i));
        if (i == 0)
            out.resize(static_cast<Eigen::Index>(rows), row.size());
        if (row.size() != out.cols())
            throw ConfigError(fmt::format("{}/{}", path, i), "ragged matrix row");
        out.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return out;
}

std::vector<Vector> as_points(const json& v, const std::string& path)
{
    as_array(v, path);
    std::vector<Vector> out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        out.push_back(as_vector(v[i], fmt::format("{}/{}", path, i)));
        if (out.back().size() != out.front().size())
            throw ConfigError(fmt::format("{}/{}", path, i), "points have different dimensions");
    }
    return out;
}

template <typename Fn>
auto wrap_invalid(const std::string& path, Fn&& fn) -> decltype(fn())
{
    try
    {
        return fn();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(path, e.what());
    }
}

//---------------------------------------------------------------------------//
// Per-experiment validation. Each builds every object it names and throws
// on the first problem.

void validate_score_eval(const json& body)
{
    check_keys(body, "", {"experiment", "seed", "threads", "output", "densities", "rules", "points"});
    const json& densities = as_array(required(body, "densities", ""), "/densities");
    std::vector<DensityPtr> built;
    for (std::size_t i = 0; i < densities.size(); ++i)
        built.push_back(parse_density(densities[i], fmt::format("/densities/{}", i)));
    const json& rules = as_array(required(body, "rules", ""), "/rules");
    for (std::size_t i = 0; i < rules.size(); ++i)
        parse_rule(rules[i], fmt::format("/rules/{}", i));
    const auto points = as_points(required(body, "points", ""), "/points");
    for (std::size_t i = 0; i < built.size(); ++i)
        if (built[i]->dim() != static_cast<std::size_t>(points.front().size()))
            throw ConfigError(fmt::format("/densities/{}", i),
                              fmt::format("dimension {} does not match the points' dimension {}", built[i]->dim(),
                                          points.front().size()));
}

void validate_divergence_table(const json& body, std::uint64_t seed, std::size_t threads)
{
    check_keys(body, "", {"experiment", "seed", "threads", "output", "pairs", "kernels", "engine"});
    const json& pairs = as_array(required(body, "pairs", ""), "/pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i)
    {
        const std::string path = fmt::format("/pairs/{}", i);
        check_keys(pairs[i], path, {"p", "q"});
        const auto p = parse_density(required(pairs[i], "p", path), path + "/p");
        const auto q = parse_density(required(pairs[i], "q", path), path + "/q");
        if (p->dim() != q->dim())
            throw ConfigError(path, "p and q have different dimensions");
    }
    const json& kernels = as_array(required(body, "kernels", ""), "/kernels");
    for (std::size_t i = 0; i < kernels.size(); ++i)
        parse_profile(kernels[i], fmt::format("/kernels/{}", i));
    if (body.contains("engine"))
        parse_engine(body["engine"], seed, threads, "/engine");
}

void validate_sure(const json& body, std::uint64_t seed, std::size_t threads)
{
    check_keys(body, "", {"experiment", "seed", "threads", "output", "dim", "prior", "thetas", "truths", "samples",
                          "engine"});
    const std::size_t d = as_count(required(body, "dim", ""), "/dim", 1);
    const json& prior = required(body, "prior", "");
    check_keys(prior, "/prior", {"weights", "means", "variances", "variance"});
    if (prior.contains("variance"))
    {
        if (prior.contains("weights") || prior.contains("means") || prior.contains("variances"))
            throw ConfigError("/prior", "use either 'variance' or 'weights'/'means'/'variances'");
        const double v = as_number(prior["variance"], "/prior/variance");
        if (v < 0.0)
            throw ConfigError("/prior/variance", "must be non-negative");
    }
    else
    {
        const Vector w = as_vector(required(prior, "weights", "/prior"), "/prior/weights");
        const auto means = as_points(required(prior, "means", "/prior"), "/prior/means");
        const Vector v = as_vector(required(prior, "variances", "/prior"), "/prior/variances");
        if (static_cast<std::size_t>(w.size()) != means.size() || static_cast<std::size_t>(v.size()) != means.size())
            throw ConfigError("/prior", "weights, means and variances must have the same length");
        if (static_cast<std::size_t>(means.front().size()) != d)
            throw ConfigError("/prior/means", "mean dimension does not match 'dim'");
        wrap_invalid("/prior", [&] {
            return gaussian_prior_marginal(std::vector<double>(w.data(), w.data() + w.size()), means,
                                           std::vector<double>(v.data(), v.data() + v.size()));
        });
    }
    if (body.contains("thetas") == body.contains("truths"))
        throw ConfigError("/thetas", "exactly one of 'thetas' or 'truths' is required");
    if (body.contains("thetas"))
    {
        const auto thetas = as_points(body["thetas"], "/thetas");
        if (static_cast<std::size_t>(thetas.front().size()) != d)
            throw ConfigError("/thetas", "theta dimension does not match 'dim'");
    }
    else
    {
        const json& truths = as_array(body["truths"], "/truths");
        for (std::size_t i = 0; i < truths.size(); ++i)
        {
            const std::string path = fmt::format("/truths/{}", i);
            const auto density = parse_density(truths[i], path);
            const auto* g = dynamic_cast<const Gaussian*>(density.get());
            if (!g)
                throw ConfigError(path, "the observation model must be a gaussian");
            if (g->dim() != d)
                throw ConfigError(path, "dimension does not match 'dim'");
            wrap_invalid(path, [&] { return ShiftModel::from_gaussian(*g); });
        }
    }
    if (body.contains("samples"))
        as_count(body["samples"], "/samples", 2);
    if (body.contains("engine"))
        parse_engine(body["engine"], seed, threads, "/engine");
}

void validate_bandwidth(const json& body, const std::filesystem::path& base_dir, std::uint64_t seed,
                        std::size_t threads)
{
    check_keys(body, "",
               {"experiment", "seed", "threads", "output", "samples", "samples_file", "rule", "grid", "truth", "engine"});
    std::size_t dim = 0;
    if (body.contains("samples") == body.contains("samples_file"))
        throw ConfigError("/samples", "exactly one of 'samples' or 'samples_file' is required");
    if (body.contains("samples"))
    {
        const auto pts = as_points(body["samples"], "/samples");
        if (pts.size() < 2)
            throw ConfigError("/samples", "need at least 2 samples");
        dim = static_cast<std::size_t>(pts.front().size());
    }
    else
    {
        const std::filesystem::path file = base_dir / as_string(body["samples_file"], "/samples_file");
        std::ifstream in(file);
        if (!in)
            throw ConfigError("/samples_file", "cannot open '" + file.string() + "'");
        std::vector<Vector> pts;
        try
        {
            pts = read_samples(in);
        }
        catch (const std::runtime_error& e)
        {
            throw ConfigError("/samples_file", e.what());
        }
        if (pts.size() < 2)
            throw ConfigError("/samples_file", "need at least 2 samples");
        dim = static_cast<std::size_t>(pts.front().size());
    }
    const ScoringRule rule = parse_rule(required(body, "rule", ""), "/rule");
    (void)rule;
    const Vector grid = as_vector(required(body, "grid", ""), "/grid");
    for (Eigen::Index i = 0; i < grid.size(); ++i)
    {
        if (!(grid[i] > 0.0))
            throw ConfigError(fmt::format("/grid/{}", i), "bandwidths must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ConfigError(fmt::format("/grid/{}", i), "grid must be strictly increasing");
    }
    if (body.contains("truth"))
    {
        const auto truth = parse_density(body["truth"], "/truth");
        if (truth->dim() != dim)
            throw ConfigError("/truth", "dimension does not match the samples");
    }
    if (body.contains("engine"))
        parse_engine(body["engine"], seed, threads, "/engine");
}

void validate_check_suite(const json& body)
{
    check_keys(body, "", {"experiment", "seed", "threads", "output", "checks"});
    if (!body.contains("checks"))
        return;
    const json& checks = as_array(body["checks"], "/checks");
    const auto known = check_names();
    for (std::size_t i = 0; i < checks.size(); ++i)
    {
        const std::string name = as_string(checks[i], fmt::format("/checks/{}", i));
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError(fmt::format("/checks/{}", i), "unknown check '" + name + "'");
    }
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(fmt::format("config error at '{}': {}", field.empty() ? "/" : field, message)),
      field_(std::move(field))
{
}

std::string_view kind_name(ExperimentKind kind) noexcept
{
    switch (kind)
    {
    case ExperimentKind::ScoreEval: return "score-eval";
    case ExperimentKind::DivergenceTable: return "divergence-table";
    case ExperimentKind::SureExperiment: return "sure-experiment";
    case ExperimentKind::Bandwidth: return "bandwidth";
    case ExperimentKind::CheckSuite: return "check-suite";
    }
    return "unknown";
}

ExperimentKind parse_kind(std::string_view name)
{
    for (auto kind : {ExperimentKind::ScoreEval, ExperimentKind::DivergenceTable, ExperimentKind::SureExperiment,
                      ExperimentKind::Bandwidth, ExperimentKind::CheckSuite})
        if (kind_name(kind) == name)
            return kind;
    throw ConfigError("/experiment", fmt::format("unknown experiment '{}'", name));
}

DensityPtr parse_density(const json& spec, const std::string& path)
{
    if (!spec.is_object())
        throw ConfigError(path, "expected a density object");
    const std::string family = as_string(required(spec, "family", path), path + "/family");
    if (family == "gaussian")
    {
        check_keys(spec, path, {"family", "name", "mean", "cov", "variance"});
        Vector mean = as_vector(required(spec, "mean", path), path + "/mean");
        if (spec.contains("cov") == spec.contains("variance"))
            throw ConfigError(path, "gaussian needs exactly one of 'cov' or 'variance'");
        if (spec.contains("variance"))
        {
            const double v = as_positive(spec["variance"], path + "/variance");
            return gaussian_iso(std::move(mean), v);
        }
        Matrix cov = as_matrix(spec["cov"], path + "/cov");
        return wrap_invalid(path + "/cov", [&]() -> DensityPtr { return gaussian(std::move(mean), std::move(cov)); });
    }
    if (family == "logistic")
    {
        check_keys(spec, path, {"family", "name", "locations", "scales"});
        Vector loc = as_vector(required(spec, "locations", path), path + "/locations");
        Vector scale = as_vector(required(spec, "scales", path), path + "/scales");
        return wrap_invalid(path, [&]() -> DensityPtr { return logistic_product(std::move(loc), std::move(scale)); });
    }
    if (family == "mixture")
    {
        check_keys(spec, path, {"family", "name", "weights", "components"});
        const Vector w = as_vector(required(spec, "weights", path), path + "/weights");
        const json& comps = as_array(required(spec, "components", path), path + "/components");
        std::vector<DensityPtr> built;
        for (std::size_t i = 0; i < comps.size(); ++i)
            built.push_back(parse_density(comps[i], fmt::format("{}/components/{}", path, i)));
        return wrap_invalid(path, [&]() -> DensityPtr {
            return std::make_shared<const MixtureDensity>(std::vector<double>(w.data(), w.data() + w.size()),
                                                          std::move(built));
        });
    }
    if (family == "kde")
    {
        check_keys(spec, path, {"family", "name", "points", "bandwidth"});
        const auto points = as_points(required(spec, "points", path), path + "/points");
        const double h = as_positive(required(spec, "bandwidth", path), path + "/bandwidth");
        return wrap_invalid(path, [&]() -> DensityPtr { return kde(points, h); });
    }
    throw ConfigError(path + "/family", "unknown density family '" + family + "'");
}

std::string density_label(const json& spec, const Density& density)
{
    if (spec.is_object() && spec.contains("name") && spec["name"].is_string())
        return spec["name"].get<std::string>();
    return density.describe();
}

RadialProfile parse_profile(const json& spec, const std::string& path)
{
    std::string name;
    std::optional<double> scale;
    if (spec.is_string())
        name = spec.get<std::string>();
    else
    {
        check_keys(spec, path, {"profile", "scale"});
        name = as_string(required(spec, "profile", path), path + "/profile");
        if (spec.contains("scale"))
            scale = as_positive(spec["scale"], path + "/scale");
    }
    if (scale && name != "logcosh")
        throw ConfigError(path + "/scale", "only the logcosh profile takes a scale");
    if (name == "hyvarinen")
        return hyvarinen_profile();
    if (name == "logcosh")
        return logcosh_profile(scale.value_or(1.0));
    if (name == "convex-quadratic")
        return convex_quadratic_profile();
    if (name == "zero")
        return zero_profile();
    throw ConfigError(path, "unknown kernel profile '" + name + "'");
}

ScoringRule parse_rule(const json& spec, const std::string& path, std::size_t dim)
{
    if (spec.is_string())
    {
        const std::string name = spec.get<std::string>();
        if (name == "hyvarinen")
            return ScoringRule::hyvarinen();
        if (name == "log")
            return ScoringRule::logarithmic();
        return ScoringRule::radial(parse_profile(spec, path));
    }
    if (!spec.is_object())
        throw ConfigError(path, "expected a rule name or object");
    const std::string kind = as_string(required(spec, "kind", path), path + "/kind");
    if (kind == "hyvarinen" || kind == "log")
    {
        check_keys(spec, path, {"kind"});
        return kind == "log" ? ScoringRule::logarithmic() : ScoringRule::hyvarinen();
    }
    if (kind == "radial" || kind == "general")
    {
        check_keys(spec, path, {"kind", "profile"});
        RadialProfile profile = parse_profile(required(spec, "profile", path), path + "/profile");
        if (kind == "radial")
            return ScoringRule::radial(std::move(profile));
        return ScoringRule::general(radial_kernel(std::move(profile), dim));
    }
    if (kind == "blend")
    {
        check_keys(spec, path, {"kind", "alpha", "inner"});
        const double alpha = as_number(required(spec, "alpha", path), path + "/alpha");
        const ScoringRule inner = parse_rule(required(spec, "inner", path), path + "/inner", dim);
        return wrap_invalid(path, [&] { return ScoringRule::blend(alpha, inner); });
    }
    throw ConfigError(path + "/kind", "unknown rule kind '" + kind + "'");
}

EngineConfig parse_engine(const json& spec, std::uint64_t seed, std::size_t threads, const std::string& path)
{
    const std::string type = as_string(required(spec, "type", path), path + "/type");
    if (type == "quadrature")
    {
        check_keys(spec, path, {"type", "nodes", "box_sd"});
        QuadratureConfig q;
        q.threads = threads;
        if (spec.contains("nodes"))
            q.nodes_per_axis = as_count(spec["nodes"], path + "/nodes", QuadratureConfig::kPanelOrder);
        if (spec.contains("box_sd"))
            q.box_sd = as_positive(spec["box_sd"], path + "/box_sd");
        return q;
    }
    if (type == "monte-carlo")
    {
        check_keys(spec, path, {"type", "samples", "chunk"});
        MonteCarloConfig m;
        m.seed = seed;
        m.threads = threads;
        if (spec.contains("samples"))
            m.samples = as_count(spec["samples"], path + "/samples", 2);
        if (spec.contains("chunk"))
            m.chunk_size = as_count(spec["chunk"], path + "/chunk", 1);
        return m;
    }
    throw ConfigError(path + "/type", "unknown engine '" + type + "'");
}

ExperimentConfig make_config(ExperimentKind kind, const json& document, const Overrides& overrides,
                             std::filesystem::path base_dir)
{
    if (!document.is_object())
        throw ConfigError("", "the configuration must be a JSON object");
    ExperimentConfig config;
    config.kind = kind;
    config.body = document;
    config.base_dir = std::move(base_dir);

    if (document.contains("experiment"))
    {
        const ExperimentKind declared = parse_kind(as_string(document["experiment"], "/experiment"));
        if (declared != kind)
            throw ConfigError("/experiment", fmt::format("config is for '{}' but '{}' was requested",
                                                         kind_name(declared), kind_name(kind)));
    }
    if (document.contains("seed"))
    {
        if (!document["seed"].is_number_unsigned())
            throw ConfigError("/seed", "expected an unsigned integer");
        config.seed = document["seed"].get<std::uint64_t>();
    }
    if (document.contains("threads"))
        config.threads = as_count(document["threads"], "/threads", 1);
    if (document.contains("output"))
        config.output = as_string(document["output"], "/output");

    if (overrides.seed)
        config.seed = *overrides.seed;
    if (overrides.threads)
    {
        if (*overrides.threads == 0)
            throw ConfigError("--threads", "must be positive");
        config.threads = *overrides.threads;
    }
    if (overrides.output)
        config.output = overrides.output;

    switch (kind)
    {
    case ExperimentKind::ScoreEval: validate_score_eval(document); break;
    case ExperimentKind::DivergenceTable: validate_divergence_table(document, config.seed, config.threads); break;
    case ExperimentKind::SureExperiment: validate_sure(document, config.seed, config.threads); break;
    case ExperimentKind::Bandwidth: validate_bandwidth(document, config.base_dir, config.seed, config.threads); break;
    case ExperimentKind::CheckSuite: validate_check_suite(document); break;
    }
    return config;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

}  // namespace scoring::experiments
