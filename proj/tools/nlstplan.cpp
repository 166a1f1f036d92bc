#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "app.h"
#include "nlstplan/catalog/database.h"
#include "nlstplan/corpus/corpus.h"
#include "nlstplan/eval/eval.h"
#include "nlstplan/nlu/classifier.h"
#include "nlstplan/planner/plan.h"

using namespace nlstplan;
using nlohmann::json;

namespace {

struct Common {
    std::string data;
    std::string model;
    std::uint64_t seed = 42;
    bool json_out = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_model = true) {
    cmd->add_option("--data", c.data, "Dataset root directory (NLSTPLAN_DATA overrides)");
    if (with_model) cmd->add_option("--model", c.model, "Classifier model file");
    cmd->add_option("--seed", c.seed, "Seed");
    cmd->add_flag("--json", c.json_out, "Emit JSON");
}

const catalog::Database& pick(const service::Engine& e, const std::string& name) {
    const auto* db = e.find(name);
    if (!db) {
        std::string known;
        for (const auto& d : e.databases()) known += " " + d.name();
        throw Error(ErrorCode::InvalidArgument, "unknown database " + name + " (loaded:" + known + ")");
    }
    return *db;
}

std::vector<catalog::Database> load_dbs(const std::string& data) { return catalog::load_all(app::data_root(data)); }

const catalog::Database& find_db(const std::vector<catalog::Database>& dbs, const std::string& name) {
    for (const auto& d : dbs) {
        if (d.name() == name) return d;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown database " + name);
}

void print_table(const planner::ResultSet& rs, std::size_t limit) {
    auto j = planner::rows_json(rs);
    std::ostringstream head;
    for (std::size_t i = 0; i < rs.schema.size(); ++i) head << (i ? " | " : "") << rs.schema[i].name;
    std::cout << head.str() << "\n";
    std::size_t shown = 0;
    for (const auto& row : j["rows"]) {
        if (shown++ == limit) {
            std::cout << "... " << rs.rows.size() - limit << " more\n";
            break;
        }
        std::ostringstream line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::string cell = row[i].is_string() ? row[i].get<std::string>() : row[i].dump();
            if (cell.size() > 60) cell = cell.substr(0, 57) + "...";
            line << (i ? " | " : "") << cell;
        }
        std::cout << line.str() << "\n";
    }
}

void print_response(const service::QueryResponse& r, bool as_json) {
    if (as_json) {
        std::cout << r.to_json().dump() << "\n";
        return;
    }
    if (r.type) std::cout << "type: " << type_name(*r.type) << "\n";
    for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
    if (r.plan) std::cout << "plan: " << planner::render_plan(*r.plan) << "\n";
    if (r.error) {
        std::cout << r.error->category << " error: " << r.error->message << "\n";
        for (const auto& s : r.error->suggestions) std::cout << "  try: " << s << "\n";
        return;
    }
    print_table(*r.result, 20);
    std::cout << std::fixed << std::setprecision(2) << "rows: " << r.result->rows.size()
              << "  translation " << r.translation_ms << " ms  baseline " << r.baseline_ms << " ms";
    if (r.optimized_ms) std::cout << "  optimized " << *r.optimized_ms << " ms";
    std::cout << "\n";
}

int cmd_load(const Common& c) {
    auto dbs = load_dbs(c.data);
    if (c.json_out) {
        std::cout << service::databases_json(dbs).dump() << "\n";
        return 0;
    }
    for (const auto& db : dbs) {
        std::cout << db.name() << "\n";
        for (std::size_t i = 0; i < db.declared_count(); ++i) {
            const auto& r = db.relations()[i];
            std::cout << "  " << r.name() << " (" << r.size() << " tuples)";
            for (const auto& a : r.attributes()) std::cout << " " << a.name << ":" << catalog::kind_name(a.kind) << (a.indexed ? "*" : "");
            std::cout << "\n";
        }
    }
    return 0;
}

int cmd_query(const Common& c, const std::string& db, const std::string& nlq, bool optimize) {
    auto engine = app::make_engine(app::data_root(c.data), c.model, c.seed);
    auto r = engine->query(pick(*engine, db), nlq, optimize);
    print_response(r, c.json_out);
    return r.error ? 2 : 0;
}

int cmd_repl(const Common& c, std::string db, bool optimize) {
    auto engine = app::make_engine(app::data_root(c.data), c.model, c.seed);
    pick(*engine, db);
    if (!c.json_out) std::cerr << "commands: :db NAME, :optimize on|off, :quit\n";
    std::string line;
    while ((c.json_out || std::cerr << db << "> ") && std::getline(std::cin, line)) {
        if (line.empty()) continue;
        if (line == ":quit" || line == ":q") break;
        if (line.rfind(":db ", 0) == 0) {
            try {
                pick(*engine, line.substr(4));
                db = line.substr(4);
            } catch (const Error& e) {
                std::cerr << e.what() << "\n";
            }
            continue;
        }
        if (line == ":optimize on" || line == ":optimize off") {
            optimize = line.ends_with("on");
            continue;
        }
        print_response(engine->query(pick(*engine, db), line, optimize), c.json_out);
    }
    return 0;
}

int cmd_corpus_gen(const Common& c, const std::string& db_name, std::size_t n, const std::string& type, const std::string& out) {
    auto dbs = load_dbs(c.data);
    const auto& db = find_db(dbs, db_name);
    std::optional<QueryType> t;
    if (!type.empty()) {
        t = parse_type(type);
        if (!t) throw Error(ErrorCode::InvalidArgument, "unknown query type " + type);
    }
    std::vector<corpus::CorpusEntry> entries;
    for (auto& e : corpus::generate(db, t ? n * kQueryTypeCount : n, c.seed)) {
        if (!t || e.type == *t) entries.push_back(std::move(e));
    }
    if (!out.empty()) {
        corpus::write_jsonl(out, entries);
        if (c.json_out) std::cout << json{{"path", out}, {"count", entries.size()}}.dump() << "\n";
        return 0;
    }
    if (c.json_out) {
        json arr = json::array();
        for (const auto& e : entries) arr.push_back(corpus::to_json(e));
        std::cout << arr.dump() << "\n";
    } else {
        for (const auto& e : entries) std::cout << corpus::to_json(e).dump() << "\n";
    }
    return 0;
}

int cmd_train(const Common& c, std::size_t per_db, double holdout, const std::string& out) {
    auto dbs = load_dbs(c.data);
    if (dbs.empty()) throw Error(ErrorCode::InsufficientData, "no datasets under " + app::data_root(c.data).string());
    if (holdout < 0 || holdout >= 1) throw Error(ErrorCode::InvalidArgument, "holdout must be in [0, 1)");
    std::vector<corpus::CorpusEntry> train, test;
    for (const auto& db : dbs) {
        auto part = corpus::generate(db, per_db, c.seed);
        const auto cut = part.size() - static_cast<std::size_t>(holdout * static_cast<double>(part.size()));
        train.insert(train.end(), part.begin(), part.begin() + static_cast<std::ptrdiff_t>(cut));
        test.insert(test.end(), part.begin() + static_cast<std::ptrdiff_t>(cut), part.end());
    }
    auto clf = nlu::train_classifier(train, c.seed);
    std::size_t correct = 0;
    for (const auto& e : test) correct += clf->classify(e.nlq).type == e.type;
    const std::filesystem::path path = out.empty() ? app::default_model_path() : std::filesystem::path(out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    nlu::save_classifier(*clf, path);
    json report = {{"model", path.string()}, {"train_size", train.size()}, {"holdout_size", test.size()}};
    report["holdout_accuracy"] = test.empty() ? json(nullptr) : json(static_cast<double>(correct) / static_cast<double>(test.size()));
    if (c.json_out) {
        std::cout << report.dump() << "\n";
    } else {
        std::cout << "trained on " << train.size() << " entries, saved " << path.string() << "\n";
        if (!test.empty()) std::cout << "held-out accuracy " << report["holdout_accuracy"].get<double>() << " on " << test.size() << "\n";
    }
    return 0;
}

int cmd_eval(const Common& c, std::vector<std::string> db_names, const std::string& corpus_file, std::size_t n, bool no_optimize) {
    auto engine = app::make_engine(app::data_root(c.data), c.model, c.seed);
    if (db_names.empty()) {
        for (const auto& d : engine->databases()) db_names.push_back(d.name());
    }
    if (!corpus_file.empty() && db_names.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "--corpus needs exactly one --db");
    }
    std::vector<eval::EvalReport> parts;
    for (std::size_t i = 0; i < db_names.size(); ++i) {
        const auto& db = pick(*engine, db_names[i]);
        std::vector<corpus::CorpusEntry> entries;
        if (!corpus_file.empty()) {
            entries = corpus::read_jsonl(corpus_file);
        } else {
            // split n across databases; the first ones absorb the remainder
            const std::size_t share = n / db_names.size() + (i < n % db_names.size() ? 1 : 0);
            entries = corpus::generate(db, share, c.seed);
        }
        parts.push_back(eval::evaluate(*engine, db, entries, {!no_optimize}));
    }
    auto rep = eval::merge(parts);
    if (c.json_out) {
        std::cout << rep.to_json().dump() << "\n";
        return 0;
    }
    std::cout << std::fixed << std::setprecision(3) << "n " << rep.n << "  translatability " << rep.translatability
              << "  precision " << rep.precision << "  mean " << rep.mean_response_ms << " ms  p95 "
              << rep.p95_response_ms << " ms\n";
    for (const auto& [t, tc] : rep.per_type) {
        std::cout << "  " << std::left << std::setw(16) << type_name(t) << tc.n << " " << tc.translated << " " << tc.correct << "\n";
    }
    for (const auto& f : rep.failures) std::cout << "  [" << f.stage << "] " << f.nlq << ": " << f.message << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Natural-language spatio-temporal query engine"};
    cli.require_subcommand(1);

    Common common;

    auto* load = cli.add_subcommand("load", "Load datasets and list their relations");
    add_common(load, common, false);

    std::string db, nlq;
    bool optimize = false;
    auto* query = cli.add_subcommand("query", "Translate and execute one query");
    add_common(query, common);
    query->add_option("--db", db, "Database")->required();
    query->add_option("--nlq", nlq, "Natural-language query")->required();
    query->add_flag("--optimize", optimize, "Run the optimizer and time both plans");

    auto* repl = cli.add_subcommand("repl", "Interactive query loop over stdin");
    add_common(repl, common);
    repl->add_option("--db", db, "Database")->required();
    repl->add_flag("--optimize", optimize, "Run the optimizer");

    std::size_t n = 70;
    std::string type, out;
    auto* corpus_cmd = cli.add_subcommand("corpus", "Corpus tools");
    corpus_cmd->require_subcommand(1);
    auto* gen = corpus_cmd->add_subcommand("gen", "Generate labeled NLQs as JSON lines");
    add_common(gen, common, false);
    gen->add_option("--db", db, "Database")->required();
    gen->add_option("-n", n, "Number of entries")->check(CLI::PositiveNumber);
    gen->add_option("--type", type, "Only this query type (n of them)");
    gen->add_option("--out", out, "Write to this file instead of stdout");

    std::size_t per_db = 700;
    double holdout = 0;
    auto* nlu_cmd = cli.add_subcommand("nlu", "Language-understanding tools");
    nlu_cmd->require_subcommand(1);
    auto* train = nlu_cmd->add_subcommand("train", "Train the query-type classifier on generated corpora");
    add_common(train, common, false);
    train->add_option("-n", per_db, "Entries per database")->check(CLI::PositiveNumber);
    train->add_option("--holdout", holdout, "Fraction held out per database for an accuracy report");
    train->add_option("--out", out, "Model path (default: the shipped model)");

    std::vector<std::string> dbs;
    std::string corpus_file;
    bool no_optimize = false;
    std::size_t eval_n = 500;
    auto* ev = cli.add_subcommand("eval", "Translatability, precision and response times");
    add_common(ev, common);
    ev->add_option("--db", dbs, "Databases (default: all)");
    ev->add_option("--corpus", corpus_file, "Corpus JSON lines with ground-truth slots")->check(CLI::ExistingFile);
    ev->add_option("-n", eval_n, "Generated entries in total when no corpus is given")->check(CLI::PositiveNumber);
    ev->add_flag("--no-optimize", no_optimize, "Skip the optimizer");

    app::ServeOptions so;
    auto* serve = cli.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--data", so.data, "Dataset root directory (NLSTPLAN_DATA overrides)");
    serve->add_option("--model", so.model, "Classifier model file");
    serve->add_option("--port", so.port, "Port");
    serve->add_option("--host", so.host, "Listen address");
    serve->add_option("--seed", so.seed, "Seed");
    serve->add_option("--static", so.static_dir, "Web console assets directory");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*load) return cmd_load(common);
        if (*query) return cmd_query(common, db, nlq, optimize);
        if (*repl) return cmd_repl(common, db, optimize);
        if (*gen) return cmd_corpus_gen(common, db, n, type, out);
        if (*train) return cmd_train(common, per_db, holdout, out);
        if (*ev) return cmd_eval(common, dbs, corpus_file, eval_n, no_optimize);
        if (*serve) return app::serve(so);
    } catch (const Error& e) {
        if (common.json_out) {
            std::cout << json{{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}}.dump() << "\n";
        } else {
            std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
        }
        return 1;
    }
    return 0;
}
