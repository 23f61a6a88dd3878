#include "eksaii/cli.hpp"

#include "eksaii/canonical.hpp"
#include "eksaii/cascade.hpp"
#include "eksaii/dataset.hpp"
#include "eksaii/errors.hpp"
#include "eksaii/evaluation.hpp"
#include "eksaii/imbalance.hpp"
#include "eksaii/pool.hpp"
#include "eksaii/resample.hpp"
#include "eksaii/rule_dsl.hpp"
#include "eksaii/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace eksaii::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
    o << text;
    if (!o) throw Error(Errc::IoError, "write failed for '" + path.string() + "'");
}

Dataset filter_domains(const Dataset& data, const std::vector<std::string>& domains)
{
    if (domains.empty()) return data;
    const std::set<std::string> keep(domains.begin(), domains.end());
    auto out = data.filter([&](const Instance& i) { return keep.count(i.domain) > 0; });
    if (out.empty()) throw Error(Errc::EmptyDataset, "no rows left after the domain filter");
    return out;
}

cascade::CascadeTree load_tree(const fs::path& path)
{
    Json doc;
    try {
        doc = Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        throw Error(Errc::InvalidConfig, "tree file is not valid JSON: " + std::string(e.what()));
    }
    return cascade::import_tree(doc, path.parent_path());
}

cascade::FusionConfig parse_fusion(const std::string& text)
{
    if (text == "unweighted") return {};
    if (text == "weighted") return {cascade::FusionConfig::Mode::Weighted, std::nullopt};
    if (text.rfind("weighted:", 0) == 0) {
        auto alpha = parse_real(text.substr(9));
        if (!alpha || *alpha < 0 || *alpha > 1)
            throw Error(Errc::InvalidConfig, "fusion alpha must be a number in [0, 1]");
        return {cascade::FusionConfig::Mode::Weighted, *alpha};
    }
    throw Error(Errc::InvalidConfig, "--fusion expects unweighted, weighted or weighted:<alpha>");
}

struct FusionArgs {
    std::string mode;
    std::string external;
    std::string alpha_data;
};

std::optional<evaluation::FusionStage> fusion_stage(const cascade::CascadeTree& tree, const FusionArgs& a)
{
    if (a.mode.empty()) {
        if (!a.external.empty()) throw Error(Errc::InvalidConfig, "--external requires --fusion");
        return std::nullopt;
    }
    const auto cfg = parse_fusion(a.mode);
    std::optional<pool::ScoreTable> ext;
    if (!a.external.empty()) ext = pool::load_score_table(a.external);
    auto stage = evaluation::make_fusion_stage(tree, cfg, std::move(ext));
    if (cfg.mode == cascade::FusionConfig::Mode::Weighted && !cfg.alpha) {
        if (a.alpha_data.empty())
            throw Error(Errc::InvalidConfig, "weighted fusion without alpha needs --alpha-data to learn it");
        stage = evaluation::with_learned_alpha(std::move(stage), load_dataset(a.alpha_data));
    }
    return stage;
}

void add_fusion_options(CLI::App* cmd, FusionArgs& a)
{
    cmd->add_option("--fusion", a.mode, "unweighted | weighted | weighted:<alpha>");
    cmd->add_option("--external", a.external, "Neural branch score CSV (id,<labels...>)");
    cmd->add_option("--alpha-data", a.alpha_data, "Labeled CSV used to learn alpha for weighted fusion");
}

void report_error(std::ostream& err, std::string_view name, const std::string& message,
                  std::optional<SourcePosition> pos = std::nullopt)
{
    Json j{{"error", name}, {"message", message}};
    if (pos) {
        j["line"] = pos->line;
        j["column"] = pos->column;
    }
    err << canonical_dump(j) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Knowledge-guided cascade of experts for imbalanced classification", "eksaii"};
    app.require_subcommand(1);

    std::string rules_file;
    auto* validate_cmd = app.add_subcommand("validate-rules", "Parse and validate a rule file");
    validate_cmd->add_option("file", rules_file, "Rule file (.ekr)")->required();

    std::string pool_file, data_file;
    int eig_k = imbalance::kDefaultNeighbors;
    auto* eig_cmd = app.add_subcommand("eig", "Entropy-imbalance gain of every pool member, one JSON line each");
    eig_cmd->add_option("--pool", pool_file, "Pool config (JSON)")->required();
    eig_cmd->add_option("--data", data_file, "Labeled dataset CSV")->required();
    eig_cmd->add_option("--k", eig_k, "Neighbours for the local density")->check(CLI::PositiveNumber);

    std::string train_file, val_file, out_file;
    std::vector<std::string> train_domains, val_domains;
    cascade::CascadeConfig config;
    int min_samples = 0;
    bool smote = false;
    int smote_k = 5;
    auto* build_cmd = app.add_subcommand("build", "Grow a cascade and write the tree JSON");
    build_cmd->add_option("--pool", pool_file, "Pool config (JSON)")->required();
    build_cmd->add_option("--train", train_file, "Training CSV")->required();
    build_cmd->add_option("--val", val_file, "Validation CSV")->required();
    build_cmd->add_option("--rare", config.rare_class, "Rare class label")->required();
    build_cmd->add_option("--tau-m", config.tau_m, "EIG tie margin");
    build_cmd->add_option("--tau-g", config.tau_g, "Gini threshold for cascading");
    build_cmd->add_option("--d-th", config.d_th, "Dependability threshold");
    build_cmd->add_option("--k", config.k, "Neighbours for the local density");
    build_cmd->add_option("--max-depth", config.max_depth, "Maximum number of inner nodes on a path");
    build_cmd->add_option("--eps-stop", config.eps_stop, "Minimum validation macro-F1 gain per node");
    build_cmd->add_option("--min-samples", min_samples, "Minimum sample size to grow a node (default 2k+2)");
    build_cmd->add_option("--seed", config.seed, "Seed");
    build_cmd->add_option("--train-domains", train_domains, "Keep only these training domains")->delimiter(',');
    build_cmd->add_option("--val-domains", val_domains, "Keep only these validation domains")->delimiter(',');
    build_cmd->add_flag("--smote", smote, "Oversample the rare class in the training split");
    build_cmd->add_option("--smote-k", smote_k, "SMOTE neighbours");
    build_cmd->add_option("--out", out_file, "Output tree JSON")->required();

    std::string tree_file, test_file, member;
    std::vector<std::string> test_domains;
    FusionArgs eval_fusion;
    auto* eval_cmd = app.add_subcommand("eval", "Score a tree on a labeled dataset");
    eval_cmd->add_option("--tree", tree_file, "Tree JSON")->required();
    eval_cmd->add_option("--test", test_file, "Labeled test CSV")->required();
    eval_cmd->add_option("--domains", test_domains, "Keep only these test domains")->delimiter(',');
    eval_cmd->add_option("--member", member, "Score one pool member on its own instead of the tree");
    eval_cmd->add_option("--out", out_file, "Also write the report to this file");
    add_fusion_options(eval_cmd, eval_fusion);

    std::string instance_id;
    FusionArgs explain_fusion;
    auto* explain_cmd = app.add_subcommand("explain", "Explanation record for one instance");
    explain_cmd->add_option("--tree", tree_file, "Tree JSON")->required();
    explain_cmd->add_option("--data", data_file, "CSV holding the instance")->required();
    explain_cmd->add_option("--id", instance_id, "Instance id")->required();
    add_fusion_options(explain_cmd, explain_fusion);

    std::string synth_config, out_dir;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic benchmark");
    synth_cmd->add_option("--config", synth_config, "Synth config (JSON)")->required();
    synth_cmd->add_option("--out-dir", out_dir, "Directory for train.csv, val.csv, test.csv, shifts.json")->required();

    std::vector<std::string> argv_store{"eksaii"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        report_error(err, "UsageError", e.what());
        return kUserError;
    }

    try {
        if (*validate_cmd) {
            const auto rs = rules::parse_ruleset(read_text(rules_file));
            Json j{{"ok", true}, {"propositions", rs.extractors.size()}, {"classes", rs.class_labels()}};
            out << canonical_dump(j) << "\n";
        } else if (*eig_cmd) {
            const auto data = load_dataset(data_file);
            const auto pool = pool::load_pool(pool_file, data.labels());
            const auto raw = imbalance::entropy_imbalance_detail(imbalance::raw_view(data), eig_k);
            for (const auto& spec : pool.specs()) {
                const auto model = pool::train(spec, data, pool.base_dir);
                out << canonical_dump(imbalance::to_json(imbalance::eig(model, data, eig_k, raw))) << "\n";
            }
        } else if (*build_cmd) {
            if (min_samples > 0) config.min_samples = min_samples;
            auto train = filter_domains(load_dataset(train_file), train_domains);
            const auto val = filter_domains(load_dataset(val_file), val_domains);
            if (smote) train = resample::oversample(train, config.rare_class, smote_k, config.seed);
            const auto pool = pool::load_pool(pool_file, train.labels());
            const auto tree = cascade::build_cascade(pool, train, val, config);
            write_text(out_file, cascade::export_tree_text(tree));
            Json j{{"tree", out_file}, {"nodes", cascade::node_count(tree)}, {"depth", cascade::depth(tree)},
                   {"train_size", train.size()}};
            out << canonical_dump(j) << "\n";
        } else if (*eval_cmd) {
            const auto tree = load_tree(tree_file);
            const auto test = filter_domains(load_dataset(test_file), test_domains);
            metrics::MetricsReport report;
            if (!member.empty()) {
                if (!eval_fusion.mode.empty()) throw Error(Errc::InvalidConfig, "--member and --fusion exclude each other");
                auto m = std::find_if(tree.pool.begin(), tree.pool.end(),
                                      [&](const auto& c) { return c.spec().id == member; });
                if (m == tree.pool.end()) throw Error(Errc::InvalidConfig, "no pool member '" + member + "'");
                report = evaluation::evaluate(*m, test, tree.config.rare_class);
            } else {
                const auto stage = fusion_stage(tree, eval_fusion);
                report = evaluation::evaluate(tree, test, stage ? &*stage : nullptr);
            }
            auto j = metrics::to_json(report);
            if (!member.empty()) j["member"] = member;
            const auto text = canonical_dump(j) + "\n";
            if (!out_file.empty()) write_text(out_file, text);
            out << text;
        } else if (*explain_cmd) {
            const auto tree = load_tree(tree_file);
            const auto data = load_dataset(data_file);
            const auto* inst = data.find(instance_id);
            if (!inst) throw Error(Errc::UnknownInstance, "no instance '" + instance_id + "' in " + data_file);
            const auto stage = fusion_stage(tree, explain_fusion);
            const auto rec = evaluation::explain(tree, data.schema(), *inst, stage ? &*stage : nullptr);
            out << canonical_dump(evaluation::to_json(rec)) << "\n";
        } else if (*synth_cmd) {
            const auto cfg = synth::load_config(synth_config);
            const auto splits = synth::generate(cfg);
            fs::create_directories(out_dir);
            save_dataset(fs::path(out_dir) / "train.csv", splits.train);
            save_dataset(fs::path(out_dir) / "val.csv", splits.val);
            save_dataset(fs::path(out_dir) / "test.csv", splits.test);
            Json shifts = Json::array();
            for (const auto& s : splits.shifts) shifts.push_back(Json{{"domain", s.domain}, {"a", s.a}, {"b", s.b}});
            write_text(fs::path(out_dir) / "shifts.json", canonical_dump(shifts) + "\n");
            Json j{{"train", splits.train.size()}, {"val", splits.val.size()}, {"test", splits.test.size()}};
            out << canonical_dump(j) << "\n";
        }
    } catch (const LexError& e) {
        report_error(err, e.name(), e.what(), e.position());
        return kUserError;
    } catch (const ParseError& e) {
        report_error(err, e.name(), e.what(), e.position());
        return kUserError;
    } catch (const ValidationError& e) {
        report_error(err, e.name(), e.what(), e.position());
        return kUserError;
    } catch (const Error& e) {
        report_error(err, e.name(), e.what());
        return kUserError;
    } catch (const fs::filesystem_error& e) {
        report_error(err, "IoError", e.what());
        return kUserError;
    } catch (const std::exception& e) {
        report_error(err, "InternalError", e.what());
        return kInternalError;
    }
    return kSuccess;
}

}  // namespace eksaii::cli
