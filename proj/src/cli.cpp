#include "eor/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eor/csv.hpp"
#include "eor/metrics.hpp"
#include "eor/optim.hpp"
#include "eor/policies.hpp"
#include "eor/synth.hpp"

namespace eor {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitNumerical = 4;

void writeOutput(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CsvError("cannot write '" + out_path + "'");
    out << content;
}

// Rows rendered as CSV or as a JSON array mirroring the CSV fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string toCsv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i)
            os << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
        return os.str();
    }
    std::string toJson() const {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json obj;
            for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
    std::string render(const std::string& format) const {
        if (format == "json") return toJson();
        return toCsv();
    }
};

int resolveProtectedGroup(const CandidatePool& pool, const std::string& name) {
    if (name.empty()) return 1;  // default: the second group is protected
    const auto& names = pool.groupNames();
    for (std::size_t g = 0; g < names.size(); ++g)
        if (names[g] == name) return static_cast<int>(g);
    throw CsvError("unknown group '" + name + "'");
}

struct CommonOpts {
    std::string input;
    std::string policy = "eor";
    std::string out;
    std::string format;  // empty: csv for tables, json for reports
    std::string mode = "probs";
    std::string protected_name;
    double alpha = 0.1;
    double threshold = 0.95;
    std::uint64_t seed = 0;
    int runs = 100;
    int k = -1;
};

Mode parseMode(const std::string& mode) {
    if (mode == "probs") return Mode::Probs;
    if (mode == "labels") return Mode::Labels;
    throw CsvError("unknown mode '" + mode + "' (use probs|labels)");
}

PolicySpec makeSpec(const CommonOpts& opt, const CandidatePool& pool) {
    PolicySpec spec;
    spec.kind = policyFromName(opt.policy);
    spec.protected_group = resolveProtectedGroup(pool, opt.protected_name);
    spec.alpha = opt.alpha;
    spec.threshold = opt.threshold;
    spec.seed = opt.seed;
    return spec;
}

// The ranking a policy presents: deterministic policies directly, the
// median-sum|delta| sample (of `runs` draws) for the stochastic ones.
Ranking policyRanking(const PolicySpec& spec, const CandidatePool& pool, int runs) {
    switch (spec.kind) {
        case PolicyKind::EOR: return eorRanking(pool);
        case PolicyKind::PRP: return prpRanking(pool);
        case PolicyKind::DP: return dpRanking(pool);
        case PolicyKind::PRR: return prrRanking(pool, spec.protected_group).ranking;
        case PolicyKind::FairStar:
            return fairstarRanking(pool, spec.protected_group, spec.alpha);
        case PolicyKind::RA: return rankAggregationExposure(pool, spec.threshold).ranking;
        case PolicyKind::Uniform:
        case PolicyKind::TS:
            return medianDeltaSample(spec, pool, std::max(runs, 1), spec.seed);
        case PolicyKind::Exp:
            throw NotStochastic(
                "exp yields a doubly stochastic matrix, not a ranking; "
                "use the compare/simulate subcommands");
    }
    throw BadParams("unknown policy");
}

int cmdRank(const CommonOpts& opt) {
    CandidatePool pool = loadPoolCsv(opt.input);
    Ranking ranking = policyRanking(makeSpec(opt, pool), pool, opt.runs);
    std::size_t limit = ranking.size();
    if (opt.k >= 0) {
        if (static_cast<std::size_t>(opt.k) > pool.size())
            throw CsvError("k exceeds pool size");
        limit = static_cast<std::size_t>(opt.k);
    }
    Table table;
    table.header = {"rank", "id", "group", "prob"};
    for (std::size_t pos = 0; pos < limit; ++pos) {
        std::uint32_t i = ranking[pos];
        table.rows.push_back({std::to_string(pos + 1), pool.id(i),
                              pool.groupNames()[pool.group(i)], formatG10(pool.prob(i))});
    }
    writeOutput(opt.out, table.render(opt.format));
    return kExitOk;
}

int cmdTrace(const CommonOpts& opt) {
    CandidatePool pool = loadPoolCsv(opt.input);
    Mode mode = parseMode(opt.mode);
    if (mode == Mode::Labels && !pool.hasLabels())
        throw MissingLabels("--mode labels needs a label column in the pool");
    Ranking ranking = policyRanking(makeSpec(opt, pool), pool, opt.runs);
    DeltaTrace trace = deltaTrace(pool, ranking, mode);

    Table table;
    table.header = {"k", "id", "group", "delta", "total_cost"};
    for (const std::string& g : pool.groupNames())
        table.header.push_back("cost_" + sanitizeName(g));
    for (std::size_t k = 1; k <= trace.n; ++k) {
        std::uint32_t i = ranking[k - 1];
        std::vector<std::string> row = {std::to_string(k), pool.id(i),
                                        pool.groupNames()[pool.group(i)],
                                        formatG10(trace.delta[k - 1]),
                                        formatG10(trace.total_cost[k - 1])};
        for (int g = 0; g < trace.group_count; ++g)
            row.push_back(formatG10(trace.group_cost[g][k - 1]));
        table.rows.push_back(std::move(row));
    }
    writeOutput(opt.out, table.render(opt.format));
    return kExitOk;
}

int cmdAudit(const CommonOpts& opt) {
    auto queries = loadLoggedRankingsCsv(opt.input);
    std::size_t max_n = 0;
    for (const auto& q : queries) max_n = std::max(max_n, q.pool.size());

    std::vector<double> mean_logged(max_n, 0.0), mean_eor(max_n, 0.0);
    std::vector<std::size_t> counts(max_n, 0);
    for (const auto& q : queries) {
        std::vector<std::uint32_t> identity(q.pool.size());
        for (std::size_t i = 0; i < identity.size(); ++i)
            identity[i] = static_cast<std::uint32_t>(i);
        DeltaTrace logged = deltaTrace(q.pool, Ranking(identity));
        DeltaTrace eor = deltaTrace(q.pool, eorRanking(q.pool));
        for (std::size_t k = 0; k < q.pool.size(); ++k) {
            mean_logged[k] += std::fabs(logged.delta[k]);
            mean_eor[k] += std::fabs(eor.delta[k]);
            counts[k]++;
        }
    }
    for (std::size_t k = 0; k < max_n; ++k) {
        mean_logged[k] /= static_cast<double>(counts[k]);
        mean_eor[k] /= static_cast<double>(counts[k]);
    }

    if (opt.format == "csv") {
        Table table;
        table.header = {"k", "mean_abs_delta_logged", "mean_abs_delta_eor"};
        for (std::size_t k = 0; k < max_n; ++k)
            table.rows.push_back({std::to_string(k + 1), formatG10(mean_logged[k]),
                                  formatG10(mean_eor[k])});
        writeOutput(opt.out, table.toCsv());
    } else {
        ordered_json report;
        report["query_count"] = queries.size();
        report["mean_abs_delta_logged"] = mean_logged;
        report["mean_abs_delta_eor"] = mean_eor;
        writeOutput(opt.out, report.dump(2) + "\n");
    }
    return kExitOk;
}

int cmdVerify(const CommonOpts& opt) {
    CandidatePool pool = loadPoolCsv(opt.input);
    Ranking eor = eorRanking(pool);
    auto stats = groupStats(pool);
    double total_nrel = 0.0;
    for (const auto& s : stats) total_nrel += s.n_rel;

    std::vector<std::size_t> ks;
    if (opt.k >= 0) {
        if (opt.k < 1 || static_cast<std::size_t>(opt.k) > pool.size())
            throw CsvError("--k must be in 1..n");
        ks.push_back(static_cast<std::size_t>(opt.k));
    } else {
        for (std::size_t k = 1; k <= pool.size(); ++k) ks.push_back(k);
    }

    const IlpMethod method = pool.size() <= 20 ? IlpMethod::Exhaustive : IlpMethod::GroupPrefix;
    bool all_ok = true;
    ordered_json reports = ordered_json::array();
    for (std::size_t k : ks) {
        DualCertificate cert = dualCertificate(pool, eor, k);
        CertificateReport check = verifyCertificate(cert, pool, k);
        IlpResult ilp = ilpTopK(pool, k, cert.delta, method);
        double ilp_value = ilp.objective / total_nrel;

        bool sandwich = cert.lp_objective >= ilp_value - 1e-9 &&
                        ilp_value >= cert.eor_objective - 1e-9;
        bool cost_gap_ok =
            (ilp_value - cert.eor_objective) <= cert.bound + 1e-9;  // cost(EOR)-cost(ILP)
        bool ok = check.feasible && sandwich && cost_gap_ok;
        all_ok = all_ok && ok;

        ordered_json r;
        r["k"] = k;
        r["delta"] = cert.delta;
        r["phi"] = cert.phi;
        r["bound"] = cert.bound;
        r["gap"] = cert.gap;
        r["lp_value"] = cert.lp_objective;
        r["ilp_value"] = ilp_value;
        r["eor_value"] = cert.eor_objective;
        r["feasible"] = ok;
        r["residual_max"] = check.residual_max;
        reports.push_back(std::move(r));
    }
    std::string body =
        (opt.k >= 0 ? reports[0].dump(2) : reports.dump(2)) + "\n";
    writeOutput(opt.out, body);
    return all_ok ? kExitOk : kExitNumerical;
}

std::vector<PolicySpec> parsePolicyList(const std::string& csv_list, int protected_group,
                                        const CommonOpts& opt) {
    std::vector<std::string> names;
    if (csv_list.empty()) {
        names = {"eor", "dp", "prp", "ts", "uniform", "exp", "ra", "fairstar"};
    } else {
        std::stringstream ss(csv_list);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
    }
    std::vector<PolicySpec> specs;
    for (const std::string& name : names) {
        PolicySpec spec;
        spec.kind = policyFromName(name);
        spec.protected_group = protected_group;
        spec.alpha = opt.alpha;
        spec.threshold = opt.threshold;
        specs.push_back(spec);
    }
    return specs;
}

int cmdSimulate(const CommonOpts& opt, const std::string& scenario,
                const std::string& policies) {
    ScenarioLevel level = scenarioLevelFromName(scenario);
    // Scenario pools name the groups A and B; the protected group for
    // PRR/FA*IR defaults to B (index 1).
    int protected_group = opt.protected_name.empty() ? 1 : (opt.protected_name == "A" ? 0 : 1);
    std::vector<PolicySpec> specs = parsePolicyList(policies, protected_group, opt);

    ScenarioRunOptions options;
    options.runs = opt.runs;
    options.exec = Execution::Parallel;
    auto table = scenarioRun(level, opt.seed, specs, options);

    Table out;
    out.header = {"policy", "unfairness_mean", "unfairness_se", "effectiveness_mean",
                  "effectiveness_se"};
    for (const auto& row : table)
        out.rows.push_back({policyName(row.policy), formatG10(row.unfairness_mean),
                            formatG10(row.unfairness_se), formatG10(row.effectiveness_mean),
                            formatG10(row.effectiveness_se)});
    writeOutput(opt.out, out.render(opt.format));
    return kExitOk;
}

int cmdCalibrate(const CommonOpts& opt, int bins, const std::string& binning) {
    ScoreData data = loadScoresCsv(opt.input);
    Binning mode;
    if (binning == "equal_count") mode = Binning::EqualCount;
    else if (binning == "equal_width") mode = Binning::EqualWidth;
    else throw CsvError("unknown binning '" + binning + "' (use equal_count|equal_width)");

    PlattParams params = plattFit(data.scores, data.labels);
    std::vector<double> calibrated = plattApply(params, data.scores);
    CalibrationCurve curve = calibrationCurve(calibrated, data.labels, bins, mode);

    if (opt.format == "csv") {
        Table table;
        table.header = {"bin", "mean_predicted", "fraction_positive", "count"};
        for (std::size_t b = 0; b < curve.bins.size(); ++b)
            table.rows.push_back({std::to_string(b + 1),
                                  formatG10(curve.bins[b].mean_predicted),
                                  formatG10(curve.bins[b].fraction_positive),
                                  std::to_string(curve.bins[b].count)});
        writeOutput(opt.out, table.toCsv());
    } else {
        ordered_json report;
        report["platt"] = {{"a", params.a}, {"b", params.b}, {"iterations", params.iterations}};
        ordered_json arr = ordered_json::array();
        for (const auto& bin : curve.bins)
            arr.push_back({{"mean_predicted", bin.mean_predicted},
                           {"fraction_positive", bin.fraction_positive},
                           {"count", bin.count}});
        report["curve"] = arr;
        writeOutput(opt.out, report.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int runCli(int argc, const char* const* argv) {
    CLI::App app{"Equal-opportunity ranking under disparate uncertainty"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string scenario, policies, binning = "equal_count";
    int bins = 20;

    auto addCommon = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", opt.input, "input CSV path");
        if (needs_input) in->required();
        sub->add_option("--out", opt.out, "output path (default: stdout)");
        sub->add_option("--format", opt.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opt.seed, "random seed");
    };

    CLI::App* rank = app.add_subcommand("rank", "rank a candidate pool under a policy");
    addCommon(rank, true);
    rank->add_option("--policy", opt.policy, "eor|prp|dp|prr|uniform|ts|fairstar|exp|ra");
    rank->add_option("--k", opt.k, "emit only the top k rows");
    rank->add_option("--runs", opt.runs, "samples behind the median pick (stochastic)");
    rank->add_option("--protected", opt.protected_name, "protected group name");
    rank->add_option("--alpha", opt.alpha, "FA*IR significance level");
    rank->add_option("--threshold", opt.threshold, "RA exposure ratio target");

    CLI::App* trace = app.add_subcommand("trace", "per-prefix delta and cost trace");
    addCommon(trace, true);
    trace->add_option("--policy", opt.policy, "ranking policy");
    trace->add_option("--mode", opt.mode, "probs|labels");
    trace->add_option("--runs", opt.runs, "samples behind the median pick (stochastic)");
    trace->add_option("--protected", opt.protected_name, "protected group name");
    trace->add_option("--alpha", opt.alpha, "FA*IR significance level");
    trace->add_option("--threshold", opt.threshold, "RA exposure ratio target");

    CLI::App* audit = app.add_subcommand("audit", "compare logged rankings against EOR");
    addCommon(audit, true);

    CLI::App* verify = app.add_subcommand("verify", "LP/ILP certificate checks");
    addCommon(verify, true);
    verify->add_option("--k", opt.k, "single prefix to certify (default: all)");

    CLI::App* simulate = app.add_subcommand("simulate", "synthetic scenario table");
    addCommon(simulate, false);
    simulate->add_option("--scenario", scenario, "high|medium|low")->required();
    simulate->add_option("--runs", opt.runs, "number of simulation runs");
    simulate->add_option("--policies", policies, "comma-separated policy subset");
    simulate->add_option("--protected", opt.protected_name, "protected group name (A|B)");
    simulate->add_option("--alpha", opt.alpha, "FA*IR significance level");
    simulate->add_option("--threshold", opt.threshold, "RA exposure ratio target");

    CLI::App* compare = app.add_subcommand("compare", "policy comparison table");
    addCommon(compare, false);
    compare->add_option("--scenario", scenario, "high|medium|low")->required();
    compare->add_option("--runs", opt.runs, "number of simulation runs");
    compare->add_option("--policies", policies, "comma-separated policy subset");
    compare->add_option("--protected", opt.protected_name, "protected group name (A|B)");
    compare->add_option("--alpha", opt.alpha, "FA*IR significance level");
    compare->add_option("--threshold", opt.threshold, "RA exposure ratio target");

    CLI::App* calibrate = app.add_subcommand("calibrate", "Platt fit and reliability curve");
    addCommon(calibrate, true);
    calibrate->add_option("--bins", bins, "number of calibration bins");
    calibrate->add_option("--binning", binning, "equal_count|equal_width");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (rank->parsed()) return cmdRank(opt);
        if (trace->parsed()) return cmdTrace(opt);
        if (audit->parsed()) return cmdAudit(opt);
        if (verify->parsed()) return cmdVerify(opt);
        if (simulate->parsed()) return cmdSimulate(opt, scenario, policies);
        if (compare->parsed()) return cmdSimulate(opt, scenario, policies);
        if (calibrate->parsed()) return cmdCalibrate(opt, bins, binning);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::InvalidInput: return kExitInput;
            case ErrorKind::Constraint: return kExitConstraint;
            case ErrorKind::Numerical: return kExitNumerical;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace eor
