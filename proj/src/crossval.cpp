#include "scoring/crossval.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace scoring {
namespace {

std::vector<Vector> canonical_order(std::span<const Vector> samples)
{
    std::vector<Vector> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const Vector& a, const Vector& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    return sorted;
}

void require_samples(std::span<const Vector> samples, const char* op)
{
    if (samples.size() < 2)
        throw std::invalid_argument(fmt::format("{}: need at least 2 samples, got {}", op, samples.size()));
}

}  // namespace

double cross_validated_risk(const ScoringRule& rule, std::span<const Vector> samples, const LooFit& loo_fit)
{
    require_samples(samples, "cross_validated_risk");
    std::vector<double> terms(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const DensityPtr fit = loo_fit(i);
        terms[i] = rule(*fit, samples[i]);
    }
    return compensated_sum(terms) / static_cast<double>(samples.size());
}

double cross_validated_risk(const ScoringRule& rule, std::span<const Vector> samples, double bandwidth)
{
    require_samples(samples, "cross_validated_risk");
    const std::vector<Vector> sorted = canonical_order(samples);
    const auto full = kde(sorted, bandwidth);
    return cross_validated_risk(rule, sorted, [&](std::size_t i) -> DensityPtr {
        return std::make_shared<const MixtureDensity>(full->leave_one_out(i));
    });
}

ExpectationResult modified_risk(const ScoringRule& rule, const Density& p, const Density& q,
                                const EngineConfig& engine)
{
    if (p.dim() != q.dim())
        throw std::invalid_argument("modified_risk: dimension mismatch");
    return expect([&](const Vector& x) { return rule(p, x); }, q, engine);
}

ExpectationResult loo_reference_risk(const ScoringRule& rule, std::span<const Vector> samples, double bandwidth,
                                     const Density& truth, const EngineConfig& engine)
{
    require_samples(samples, "loo_reference_risk");
    const std::vector<Vector> sorted = canonical_order(samples);
    const auto full = kde(sorted, bandwidth);
    std::vector<double> values;
    std::vector<double> errors;
    ExpectationResult out;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        const MixtureDensity fit = full->leave_one_out(i);
        const ExpectationResult r = modified_risk(rule, fit, truth, engine);
        values.push_back(r.value);
        errors.push_back(r.error);
        out.engine = r.engine;
        out.config = r.config;
    }
    const auto n = static_cast<double>(sorted.size());
    out.value = compensated_sum(values) / n;
    out.error = compensated_sum(errors) / n;
    return out;
}

CvReport select_bandwidth(const ScoringRule& rule, std::span<const Vector> samples, const std::vector<double>& grid,
                          const Density* truth, const EngineConfig& engine)
{
    if (grid.empty())
        throw std::invalid_argument("select_bandwidth: empty bandwidth grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!(grid[i] > 0.0))
            throw std::invalid_argument(fmt::format("select_bandwidth: bandwidth {:g} must be positive", grid[i]));
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("select_bandwidth: grid must be strictly increasing");
    }

    CvReport report;
    report.bandwidths = grid;
    if (truth)
        report.reference.emplace();
    for (double h : grid)
    {
        report.cv_risk.push_back(cross_validated_risk(rule, samples, h));
        if (truth)
            report.reference->push_back(loo_reference_risk(rule, samples, h, *truth, engine));
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (report.cv_risk[i] < report.cv_risk[report.selected_index])
            report.selected_index = i;
    report.selected_bandwidth = grid[report.selected_index];
    return report;
}

CvReplicationReport cv_replication_experiment(const ScoringRule& rule, const Density& truth, std::size_t n,
                                              double bandwidth, std::size_t replications, std::uint64_t seed,
                                              const EngineConfig& engine, std::size_t threads)
{
    if (replications < 2)
        throw std::invalid_argument("cv_replication_experiment: need at least 2 replications");
    std::vector<double> cv(replications);
    std::vector<double> ref(replications);
    std::vector<double> diff;
    parallel_fill(
        replications, 1, threads,
        [&](std::size_t r) {
            const std::uint64_t rep_seed = Rng::substream(seed, r)();
            const std::vector<Vector> draws = sample(truth, n, rep_seed);
            cv[r] = cross_validated_risk(rule, draws, bandwidth);
            ref[r] = loo_reference_risk(rule, draws, bandwidth, truth, engine).value;
            return cv[r] - ref[r];
        },
        diff);

    CvReplicationReport report;
    report.cv_risk = mean_and_stderr(cv);
    report.reference = mean_and_stderr(ref);
    report.difference = mean_and_stderr(diff);
    report.success = std::abs(report.difference.mean) <= 5.0 * report.difference.stderr_;
    return report;
}

std::vector<Vector> read_samples(std::istream& in)
{
    std::vector<Vector> points;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#')
            continue;
        std::vector<double> coords;
        std::stringstream fields(line);
        std::string field;
        bool numeric = true;
        while (std::getline(fields, field, ','))
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(field, &used);
                if (field.find_first_not_of(" \t\r", used) != std::string::npos)
                    numeric = false;
                coords.push_back(v);
            }
            catch (const std::exception&)
            {
                numeric = false;
            }
            if (!numeric)
                break;
        }
        if (!numeric)
        {
            if (first_content)
            {
                first_content = false;
                continue;
            }
            throw std::runtime_error(fmt::format("samples: line {} is not a comma-separated list of numbers", line_no));
        }
        first_content = false;
        if (!points.empty() && static_cast<std::size_t>(points.front().size()) != coords.size())
            throw std::runtime_error(fmt::format("samples: line {} has {} coordinates, expected {}", line_no,
                                                 coords.size(), points.front().size()));
        points.push_back(Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    return points;
}

void write_cv_report(std::ostream& out, const CvReport& report)
{
    out << "bandwidth,cv_risk";
    if (report.reference)
        out << ",reference_risk,reference_error";
    out << ",selected\n";
    for (std::size_t i = 0; i < report.bandwidths.size(); ++i)
    {
        out << fmt::format("{:.17g},{:.17g}", report.bandwidths[i], report.cv_risk[i]);
        if (report.reference)
            out << fmt::format(",{:.17g},{:.17g}", (*report.reference)[i].value, (*report.reference)[i].error);
        out << (i == report.selected_index ? ",1\n" : ",0\n");
    }
}

}  // namespace scoring
