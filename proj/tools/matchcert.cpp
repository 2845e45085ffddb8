// matchcert command-line entry point.
//
// Exit codes: 0 success, 2 a certificate is vacuous (sound but empty),
// 1 any error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "matchcert/batch_validation.hpp"
#include "matchcert/config.hpp"
#include "matchcert/error.hpp"
#include "matchcert/experiment.hpp"
#include "matchcert/graph.hpp"
#include "matchcert/matchers.hpp"
#include "matchcert/query_validation.hpp"
#include "matchcert/report.hpp"
#include "matchcert/sampling.hpp"
#include "matchcert/synth.hpp"

namespace fs = std::filesystem;
using namespace matchcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVacuous = 2;

struct NetworkArgs {
  std::string x_path;
  std::string y_path;
  bool self_match = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--x", x_path, "X network edge TSV")->required();
    cmd->add_option("--y", y_path, "Y network edge TSV (omit with --self)");
    cmd->add_flag("--self", self_match, "match X against itself; identity pairs are illegal");
  }

  NetworkPair load() const {
    if (self_match) return NetworkPair::self_match(load_network(x_path));
    if (y_path.empty()) throw Error("invalid-input", "--y is required unless --self is given");
    return NetworkPair(load_network(x_path), load_network(y_path));
  }
};

std::vector<NodeIndex> load_nodes(const std::string& path, const Network& net) {
  std::vector<NodeIndex> out;
  for (const auto& id : load_item_list(path)) out.push_back(net.index_of(id));
  return out;
}

DeltaBudget budget_for(const std::vector<double>& deltas, std::size_t terms) {
  if (deltas.empty()) return DeltaBudget::equal_split(0.05, terms);
  if (deltas.size() == 1) return DeltaBudget::equal_split(deltas.front(), terms);
  if (deltas.size() != terms) {
    throw Error("budget-mismatch", "expected 1 or " + std::to_string(terms) + " delta values, got " +
                                       std::to_string(deltas.size()));
  }
  return DeltaBudget(deltas);
}

void emit(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out_path, j);
  }
}

int emit_reports(std::vector<ValidationReport> reports, nlohmann::json config, const std::string& out_path) {
  bool vacuous = false;
  for (const auto& r : reports) vacuous = vacuous || r.vacuous;
  nlohmann::json j = to_json(simultaneous(std::move(reports)));
  j["config"] = std::move(config);
  emit(j, out_path);
  return vacuous ? kExitVacuous : kExitOk;
}

std::vector<IdPair> load_id_pairs(const std::string& path, const NetworkPair& pair) {
  std::vector<IdPair> out;
  const MatchSet seeds = load_matches(path, pair, MatchRole::actual);
  for (const auto& [x, y] : seeds.pairs()) out.emplace_back(pair.x_net().id(x), pair.y_net().id(y));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify precision and recall of network matchers with PAC bounds"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a correlated network pair with ground truth");
  std::string gen_config;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out = ".";
  gen->add_option("--config", gen_config, "generator JSON")->required();
  gen->add_option("--seed", gen_seed, "overrides rng_seed");
  gen->add_option("--out-dir", gen_out, "writes x.tsv, y.tsv, truth.tsv");

  // match
  auto* match = app.add_subcommand("match", "run a baseline matcher in batch mode");
  NetworkArgs match_net;
  match_net.add_to(match);
  std::string match_config;
  std::string match_seeds;
  std::string match_out = "-";
  bool match_complete = false;
  match->add_option("--config", match_config, "matcher JSON")->required();
  match->add_option("--seeds", match_seeds, "verified pairs (match TSV) the matcher may use");
  match->add_flag("--complete", match_complete,
                  "the seed file includes validation samples (complete matcher)");
  match->add_option("--out", match_out, "identified matches TSV ('-' for stdout)");

  // split
  auto* split = app.add_subcommand("split", "train/validation subsampling of a labeled sample");
  std::string split_labeled;
  std::int64_t split_population = 0;
  std::size_t split_t = 0;
  std::size_t split_s = 0;
  std::uint64_t split_seed = 0;
  std::string split_train;
  std::string split_validation;
  split->add_option("--labeled", split_labeled, "item list L")->required();
  split->add_option("--population", split_population, "population size n")->required();
  split->add_option("--t", split_t, "training subsample size")->required();
  split->add_option("--s", split_s, "validation subsample size")->required();
  split->add_option("--seed", split_seed, "random seed");
  split->add_option("--train", split_train, "training item list output")->required();
  split->add_option("--validation", split_validation, "validation item list output")->required();

  // validate batch | query
  auto* validate = app.add_subcommand("validate", "compute a certificate");
  validate->require_subcommand(1);

  auto* batch = validate->add_subcommand("batch", "batch matcher certificates");
  NetworkArgs batch_net;
  batch_net.add_to(batch);
  std::string batch_holdout;
  std::string batch_complete;
  std::string batch_sample_matches;
  std::string batch_sample_nodes;
  std::string batch_actual;
  std::string batch_quantity = "recall";
  std::optional<std::int64_t> batch_m_size;
  std::size_t batch_ky = 1;
  std::vector<double> batch_delta;
  std::string batch_method = "hoeffding";
  std::string batch_out = "-";
  batch->add_option("--holdout", batch_holdout, "holdout identified matches TSV")->required();
  batch->add_option("--complete", batch_complete, "complete identified matches TSV");
  batch->add_option("--sample-matches", batch_sample_matches, "S_M: verified matches TSV")->required();
  batch->add_option("--sample-nodes", batch_sample_nodes, "S_X: node list");
  batch->add_option("--actual", batch_actual, "actual matches of the S_X nodes (match TSV)");
  batch->add_option("--quantity", batch_quantity, "recall | precision")
      ->check(CLI::IsMember({"recall", "precision"}));
  batch->add_option("--m-size", batch_m_size, "|M| when known exactly");
  batch->add_option("--k-y", batch_ky, "cap on actual matches per x node");
  batch->add_option("--delta", batch_delta, "total delta, or one value per term")->delimiter(',');
  batch->add_option("--method", batch_method, "hoeffding | empirical-bernstein-serfling | hypergeometric-exact");
  batch->add_option("--out", batch_out, "report JSON ('-' for stdout)");

  auto* query = validate->add_subcommand("query", "query matcher certificates");
  NetworkArgs query_net;
  query_net.add_to(query);
  std::string query_holdout;
  std::string query_complete;
  std::string query_sample_nodes;
  std::string query_sample_prime;
  std::string query_actual;
  std::string query_quantity = "recall";
  std::size_t query_k_cap = 1;
  std::vector<double> query_delta;
  std::string query_method = "hoeffding";
  std::string query_out = "-";
  std::string query_node_stats;
  query->add_option("--holdout", query_holdout, "holdout identified matches TSV")->required();
  query->add_option("--complete", query_complete, "complete identified matches TSV");
  query->add_option("--sample-nodes", query_sample_nodes, "S_X: node list")->required();
  query->add_option("--sample-nodes-prime", query_sample_prime, "S'_X: independent node list");
  query->add_option("--actual", query_actual, "actual matches of the S_X nodes (match TSV)")->required();
  query->add_option("--quantity", query_quantity, "recall | precision | error-rate")
      ->check(CLI::IsMember({"recall", "precision", "error-rate"}));
  query->add_option("--k-cap", query_k_cap, "cap on identified matches per node");
  query->add_option("--delta", query_delta, "total delta, or one value per term")->delimiter(',');
  query->add_option("--method", query_method, "hoeffding | empirical-bernstein-serfling | hypergeometric-exact");
  query->add_option("--out", query_out, "report JSON ('-' for stdout)");
  query->add_option("--emit-node-stats", query_node_stats, "write per-node statistics JSON");

  // coverage
  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage sweep");
  std::string coverage_config;
  std::optional<std::uint64_t> coverage_seed;
  std::size_t coverage_jobs = 1;
  std::string coverage_out;
  coverage->add_option("--config", coverage_config, "experiment JSON")->required();
  coverage->add_option("--seed", coverage_seed, "overrides the master seed");
  coverage->add_option("--jobs", coverage_jobs, "concurrent trials");
  coverage->add_option("--out", coverage_out, "CSV path (JSON written alongside); overrides output_path");

  // report
  auto* report = app.add_subcommand("report", "combine certificates into one simultaneous statement");
  std::vector<std::string> report_inputs;
  std::string report_out = "-";
  report->add_option("inputs", report_inputs, "report JSON files from validate")->required();
  report->add_option("--out", report_out, "combined JSON ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*gen) {
      GeneratorConfig cfg = generator_config_from_json(read_json_file(gen_config));
      if (gen_seed) cfg.rng_seed = *gen_seed;
      const GeneratedPair g = generate_pair(cfg);
      fs::create_directories(gen_out);
      save_network(fs::path(gen_out) / "x.tsv", g.pair.x_net());
      save_network(fs::path(gen_out) / "y.tsv", g.pair.y_net());
      save_matches(fs::path(gen_out) / "truth.tsv", g.pair, g.truth);
      return kExitOk;
    }

    if (*match) {
      const MatcherConfig cfg = matcher_config_from_json(read_json_file(match_config));
      const NetworkPair pair = match_net.load();
      std::vector<IdPair> seeds;
      if (!match_seeds.empty()) seeds = load_id_pairs(match_seeds, pair);
      const auto handle = match_complete ? MatcherHandle::holdout(cfg).complete_with(seeds)
                                         : MatcherHandle::holdout(cfg, seeds);
      const MatchSet result = run_batch(handle, pair);
      if (match_out == "-") {
        write_matches(std::cout, pair, result);
      } else {
        save_matches(match_out, pair, result);
      }
      return kExitOk;
    }

    if (*split) {
      SplitSpec spec;
      spec.population_n = split_population;
      spec.labeled = load_item_list(split_labeled);
      spec.t = split_t;
      spec.s = split_s;
      spec.rng_seed = split_seed;
      const auto result = split_train_validation(spec);
      save_item_list(split_train, result.train);
      save_item_list(split_validation, result.validation);
      return kExitOk;
    }

    if (*batch) {
      const NetworkPair pair = batch_net.load();
      const MatchSet holdout = load_matches(batch_holdout, pair, MatchRole::identified_holdout);
      std::optional<MatchSet> complete;
      if (!batch_complete.empty()) complete = load_matches(batch_complete, pair, MatchRole::identified);
      std::optional<MatchSet> actual;
      if (!batch_actual.empty()) actual = load_matches(batch_actual, pair, MatchRole::actual, batch_ky);
      const MatchSet s_m_set = load_matches(batch_sample_matches, pair, MatchRole::actual);

      BatchValidationInput in;
      in.pair = &pair;
      in.m_hat_holdout = &holdout;
      in.m_hat_complete = complete ? &*complete : nullptr;
      in.s_m = s_m_set.pairs();
      if (!batch_sample_nodes.empty()) in.s_x = load_nodes(batch_sample_nodes, pair.x_net());
      in.s_x_actual = actual ? &*actual : nullptr;
      if (batch_m_size) in.m_size = PopulationSize{*batch_m_size, true};
      in.k_y = batch_ky;
      in.method = parse_bound_method(batch_method);

      const bool precision = batch_quantity == "precision";
      const std::size_t terms = precision || complete ? 2 : 1;
      in.budget = budget_for(batch_delta, terms);
      ValidationReport r = complete ? (precision ? complete_batch_precision(in) : complete_batch_recall(in))
                                    : (precision ? holdout_batch_precision(in) : holdout_batch_recall(in));
      nlohmann::json config = {{"command", "validate batch"},
                               {"x", batch_net.x_path},
                               {"y", batch_net.y_path},
                               {"self", batch_net.self_match},
                               {"holdout", batch_holdout},
                               {"complete", batch_complete},
                               {"sample_matches", batch_sample_matches},
                               {"sample_nodes", batch_sample_nodes},
                               {"actual", batch_actual},
                               {"quantity", batch_quantity},
                               {"k_y", batch_ky},
                               {"method", batch_method},
                               {"delta_parts", in.budget.parts()}};
      config["m_size"] = batch_m_size ? nlohmann::json(*batch_m_size) : nlohmann::json(nullptr);
      return emit_reports({std::move(r)}, std::move(config), batch_out);
    }

    if (*query) {
      const NetworkPair pair = query_net.load();
      const MatchSet holdout = load_matches(query_holdout, pair, MatchRole::identified_holdout);
      std::optional<MatchSet> complete;
      if (!query_complete.empty()) complete = load_matches(query_complete, pair, MatchRole::identified);
      const MatchSet actual = load_matches(query_actual, pair, MatchRole::actual);

      struct FileQueries final : QueryMatcher {
        explicit FileQueries(const MatchSet& m) : matches(m) {}
        PerNodeView query(NodeIndex x) override {
          ++count;
          return matches.view(x);
        }
        std::size_t query_count() const override { return count; }
        const MatchSet& matches;
        std::size_t count = 0;
      };
      FileQueries holdout_queries(holdout);
      std::optional<FileQueries> complete_queries;
      if (complete) complete_queries.emplace(*complete);
      MatchSetTruth truth(actual);

      QueryValidationInput in;
      in.pair = &pair;
      in.holdout = &holdout_queries;
      in.complete = complete_queries ? &*complete_queries : nullptr;
      in.complete_identical = complete && holdout == *complete;
      in.s_x = load_nodes(query_sample_nodes, pair.x_net());
      if (!query_sample_prime.empty()) in.s_x_prime = load_nodes(query_sample_prime, pair.x_net());
      in.truth = &truth;
      in.k_cap = query_k_cap;
      in.method = parse_bound_method(query_method);

      ValidationReport r;
      if (!complete) {
        if (query_quantity == "error-rate") {
          in.budget = budget_for(query_delta, 1);
          r = holdout_error_rate(in);
        } else {
          const DeltaBudget one = budget_for(query_delta, 1);
          in.budget = DeltaBudget({one.parts()[0], one.parts()[0]});
          auto both = holdout_query_bounds(in);
          r = query_quantity == "precision" ? std::move(both.first) : std::move(both.second);
        }
      } else if (query_quantity == "recall") {
        in.budget = budget_for(query_delta, 3);
        r = complete_query_recall(in);
      } else if (query_quantity == "precision") {
        in.budget = budget_for(query_delta, 4);
        r = complete_query_precision(in);
      } else {
        in.budget = budget_for(query_delta, 2);
        r = complete_error_rate(in);
      }
      if (!query_node_stats.empty()) {
        nlohmann::json stats = nlohmann::json::array();
        for (const auto& s : compute_node_stats(in)) stats.push_back(to_json(s, pair));
        write_json_file(query_node_stats, stats);
      }
      nlohmann::json config = {{"command", "validate query"},
                               {"x", query_net.x_path},
                               {"y", query_net.y_path},
                               {"self", query_net.self_match},
                               {"holdout", query_holdout},
                               {"complete", query_complete},
                               {"sample_nodes", query_sample_nodes},
                               {"sample_nodes_prime", query_sample_prime},
                               {"actual", query_actual},
                               {"quantity", query_quantity},
                               {"k_cap", query_k_cap},
                               {"method", query_method},
                               {"delta_parts", r.budget.parts()},
                               {"queries_holdout", holdout_queries.query_count()}};
      return emit_reports({std::move(r)}, std::move(config), query_out);
    }

    if (*coverage) {
      ExperimentConfig cfg = experiment_config_from_json(read_json_file(coverage_config));
      if (coverage_seed) cfg.seed = *coverage_seed;
      if (!coverage_out.empty()) cfg.output_path = coverage_out;
      const CoverageTable table = run_coverage(cfg, coverage_jobs);
      const std::string csv = table.to_csv();
      if (cfg.output_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(cfg.output_path, std::ios::binary);
        if (!out) throw Error("io-error", "cannot write " + cfg.output_path);
        out << csv;
        write_json_file(fs::path(cfg.output_path).replace_extension(".json"), table.to_json());
      }
      return kExitOk;
    }

    if (*report) {
      nlohmann::json combined;
      combined["inputs"] = report_inputs;
      combined["reports"] = nlohmann::json::array();
      std::vector<double> parts;
      bool vacuous = false;
      for (const auto& path : report_inputs) {
        const nlohmann::json doc = read_json_file(path);
        if (!doc.contains("reports")) throw Error("invalid-input", path + ": no reports");
        for (const auto& r : doc.at("reports")) {
          for (double p : r.at("budget").get<std::vector<double>>()) parts.push_back(p);
          vacuous = vacuous || r.at("vacuous").get<bool>();
          combined["reports"].push_back(r);
        }
      }
      combined["delta_parts"] = parts;
      combined["joint_confidence"] = union_confidence(DeltaBudget(parts));
      emit(combined, report_out);
      return vacuous ? kExitVacuous : kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "matchcert: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "matchcert: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
