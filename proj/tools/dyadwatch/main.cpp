// dyadwatch: batch front-end for dyadic conflict forecasting and control.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dyadwatch/arch_ga.hpp"
#include "dyadwatch/artifact.hpp"
#include "dyadwatch/control.hpp"
#include "dyadwatch/dataset.hpp"
#include "dyadwatch/eval.hpp"
#include "dyadwatch/report.hpp"
#include "dyadwatch/service.hpp"
#include "dyadwatch/synth.hpp"
#include "dyadwatch/training.hpp"

namespace dw = dyadwatch;
using nlohmann::json;

namespace {

// Raised for flag combinations CLI11 cannot express; exits 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_json(const json& j) { std::cout << dw::dump_json(j); }

std::vector<int> labels_of(const dw::Dataset& d) {
  std::vector<int> out;
  out.reserve(d.size());
  for (const auto& r : d.records) out.push_back(r.outcome);
  return out;
}

std::vector<std::size_t> parse_columns(const std::string& list) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, end - start);
    if (!name.empty()) out.push_back(dw::VariableSchema::standard().require_index(name));
    start = end + 1;
  }
  if (out.empty()) throw UsageError("empty variable list");
  return out;
}

// "allies=0,contiguity=1,..." in raw units; every variable required.
dw::DyadYearRecord parse_case(const std::string& text) {
  const auto& schema = dw::VariableSchema::standard();
  dw::DyadYearRecord record;
  std::array<bool, dw::kInputCount> seen{};
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto item = text.substr(start, end - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("case entry '" + item + "' is not name=value");
    const auto i = schema.require_index(item.substr(0, eq));
    std::size_t used = 0;
    try {
      record.values[i] = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - eq - 1) throw UsageError("case value '" + item + "' is not a number");
    seen[i] = true;
    start = end + 1;
  }
  for (std::size_t i = 0; i < dw::kInputCount; ++i) {
    if (!seen[i]) throw UsageError("case is missing " + schema[i].name);
  }
  dw::validate_record(schema, record);
  return record;
}

struct Global {
  std::size_t threads = 1;
};

struct TrainFlags {
  std::string method = "evidence";
  std::size_t hidden = 10;
  std::string hidden_activation = "tanh";
  std::string output_activation = "logistic";
  std::optional<std::string> groups;
  std::size_t outer = 8;
  double initial_alpha = 0.01;
  std::size_t inner = 150;
  std::size_t hmc_samples = 60;
  std::size_t hmc_burn_in = 40;
  std::size_t hmc_thinning = 2;
  std::size_t hmc_leapfrog = 40;
  double hmc_step = 0.02;

  void add(CLI::App* cmd) {
    cmd->add_option("--method", method, "Training method")
        ->check(CLI::IsMember({"evidence", "hmc", "ard"}))
        ->capture_default_str();
    cmd->add_option("--hidden", hidden, "Hidden units")->check(CLI::Range(1, 1000))->capture_default_str();
    cmd->add_option("--hidden-activation", hidden_activation, "Hidden activation")
        ->check(CLI::IsMember({"linear", "logistic", "tanh"}))
        ->capture_default_str();
    cmd->add_option("--output-activation", output_activation, "Output activation")
        ->check(CLI::IsMember({"logistic", "softmax", "linear", "tanh"}))
        ->capture_default_str();
    cmd->add_option("--groups", groups,
                    "Prior groups: single, layered or ard (default layered; ard for --method hmc or ard)")
        ->check(CLI::IsMember({"single", "layered", "ard"}));
    cmd->add_option("--evidence-iterations", outer, "Evidence re-estimation rounds")->capture_default_str();
    cmd->add_option("--initial-alpha", initial_alpha, "Starting prior precision")->capture_default_str();
    cmd->add_option("--scg-iterations", inner, "SCG iterations per round")->capture_default_str();
    cmd->add_option("--hmc-samples", hmc_samples, "Retained HMC samples")->capture_default_str();
    cmd->add_option("--hmc-burn-in", hmc_burn_in, "Discarded HMC trajectories")->capture_default_str();
    cmd->add_option("--hmc-thinning", hmc_thinning, "Keep every k-th trajectory")->capture_default_str();
    cmd->add_option("--hmc-leapfrog", hmc_leapfrog, "Leapfrog steps per trajectory")->capture_default_str();
    cmd->add_option("--hmc-step", hmc_step, "Base leapfrog step size")->capture_default_str();
  }

  dw::TrainRecipe recipe(std::uint64_t seed) const {
    dw::TrainRecipe r;
    r.method = dw::train_method_from_string(method);
    r.arch.hidden = hidden;
    r.arch.hidden_activation = dw::activation_from_string(hidden_activation);
    r.arch.output_activation = dw::activation_from_string(output_activation);
    r.evidence.outer_iterations = outer;
    r.evidence.initial_alpha = initial_alpha;
    r.evidence.inner.max_iterations = inner;
    if (groups) {
      r.evidence.groups = dw::group_layout_from_string(*groups);
    } else if (r.method != dw::TrainMethod::evidence) {
      r.evidence.groups = dw::GroupLayout::ard;
    }
    r.hmc.samples = hmc_samples;
    r.hmc.burn_in = hmc_burn_in;
    r.hmc.thinning = hmc_thinning;
    r.hmc.leapfrog_steps = hmc_leapfrog;
    r.hmc.step_size = hmc_step;
    r.seed = seed;
    r.evidence.validate();
    r.hmc.validate();
    r.arch.validate();
    return r;
  }
};

struct ControlFlags {
  double threshold = 0.5;
  double confidence_min = 0.0;
  double gss_tolerance = 1e-4;
  double sa_temperature = 0.05;
  double sa_cooling = 0.995;
  std::size_t sa_steps = 1500;
  double sa_proposal = 0.15;

  void add(CLI::App* cmd) {
    cmd->add_option("--threshold", threshold, "Peace threshold")->capture_default_str();
    cmd->add_option("--confidence-min", confidence_min, "Skip predicted conflicts below this confidence")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--gss-tolerance", gss_tolerance, "Golden-section tolerance (scaled units)")
        ->capture_default_str();
    cmd->add_option("--sa-temperature", sa_temperature, "Initial annealing temperature")->capture_default_str();
    cmd->add_option("--sa-cooling", sa_cooling, "Cooling factor per step")->capture_default_str();
    cmd->add_option("--sa-steps", sa_steps, "Annealing steps")->capture_default_str();
    cmd->add_option("--sa-proposal", sa_proposal, "Proposal standard deviation")->capture_default_str();
  }

  dw::ControlConfig config(std::uint64_t seed) const {
    dw::ControlConfig c;
    c.peace_threshold = threshold;
    c.confidence_min = confidence_min;
    c.gss_tolerance = gss_tolerance;
    c.sa.initial_temperature = sa_temperature;
    c.sa.cooling_factor = sa_cooling;
    c.sa.steps = sa_steps;
    c.sa.proposal_scale = sa_proposal;
    c.sa.seed = seed;
    c.validate();
    return c;
  }
};

std::string ard_csv(const dw::ArdResult& ard) {
  std::string out = "variable,alpha,relevance,rank\n";
  for (std::size_t i = 0; i < ard.inputs.size(); ++i) {
    const auto rank = std::find(ard.ranking.begin(), ard.ranking.end(), i) - ard.ranking.begin() + 1;
    out += ard.inputs[i] + ',' + dw::format_double(ard.input_alphas[i]) + ',' + dw::format_double(ard.relevance[i]) +
           ',' + std::to_string(rank) + '\n';
  }
  return out;
}

dw::HttpServer* g_server = nullptr;

extern "C" void handle_stop(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadwatch: Bayesian neural-network forecasting and control of militarized interstate disputes",
               "dyadwatch"};
  app.require_subcommand(1);
  Global global;
  app.add_option("--threads", global.threads, "Worker threads for parallel stages")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a dyad-year CSV and optionally split it");
  std::string ingest_in, ingest_out, split_train, split_test;
  std::size_t per_class = 500;
  std::optional<std::uint64_t> ingest_seed;
  ingest->add_option("--in", ingest_in, "Input CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Normalized CSV output");
  ingest->add_option("--train-out", split_train, "Balanced training split output");
  ingest->add_option("--test-out", split_test, "Remaining records output");
  ingest->add_option("--per-class", per_class, "Training records per outcome class")->capture_default_str();
  ingest->add_option("--seed", ingest_seed, "Split seed (required with --train-out)");
  ingest->callback([&] {
    action = [&] {
      if (split_train.empty() != split_test.empty()) throw UsageError("--train-out and --test-out go together");
      if (!split_train.empty() && !ingest_seed) throw UsageError("--seed is required when splitting");
      const auto data = dw::load_dataset(ingest_in);
      json summary = {{"rows", data.size()},
                      {"disputes", data.count(1)},
                      {"non_disputes", data.count(0)},
                      {"fingerprint", dw::fingerprint(dw::serialize_dataset(data))}};
      if (!ingest_out.empty()) dw::save_dataset(ingest_out, data);
      if (!split_train.empty()) {
        const auto split = dw::balanced_split(data, per_class, *ingest_seed);
        dw::save_dataset(split_train, split.train);
        dw::save_dataset(split_test, split.test);
        summary["train_rows"] = split.train.size();
        summary["test_rows"] = split.test.size();
        if (split.empty_test_warning) std::cerr << "warning: the test split is empty\n";
      }
      print_json(summary);
    };
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dyad-year dataset");
  std::string preset = "separable", synth_out;
  std::size_t synth_count = 2000;
  std::uint64_t synth_seed = 0;
  std::optional<double> synth_balance;
  synth->add_option("--preset", preset, "Ground-truth preset")
      ->check(CLI::IsMember({"separable", "two_signal", "noise"}))
      ->capture_default_str();
  synth->add_option("--count", synth_count, "Records to generate")->check(CLI::Range(1, 10000000))->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->required();
  synth->add_option("--balance", synth_balance, "Dispute fraction (exact, by rejection)")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->callback([&] {
    action = [&] {
      auto cfg = preset == "separable"    ? dw::SynthConfig::separable(synth_count)
                 : preset == "two_signal" ? dw::SynthConfig::two_signal(synth_count)
                                          : dw::SynthConfig::noise(synth_count);
      if (synth_balance) cfg.balance = synth_balance;
      const auto data = dw::synth_generate(cfg, synth_seed);
      dw::save_dataset(synth_out, data);
      print_json({{"rows", data.size()}, {"disputes", data.count(1)}, {"preset", preset}, {"seed", synth_seed}});
    };
  });

  // train
  auto* train = app.add_subcommand("train", "Train a model (evidence MAP, HMC ensemble or ARD)");
  std::string train_data, train_out, ga_history;
  std::uint64_t train_seed = 0;
  TrainFlags train_flags;
  bool use_ga = false;
  std::size_t ga_population = 20, ga_generations = 10;
  train->add_option("--data", train_data, "Training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "Random seed")->required();
  train->add_option("--out", train_out, "Model artifact (JSON)")->required();
  train_flags.add(train);
  train->add_flag("--ga", use_ga, "Choose the architecture by genetic search first");
  train->add_option("--ga-population", ga_population, "GA population size")->capture_default_str();
  train->add_option("--ga-generations", ga_generations, "GA generations")->capture_default_str();
  train->add_option("--ga-history", ga_history, "Write per-generation GA history CSV");
  train->callback([&] {
    action = [&] {
      if (!ga_history.empty() && !use_ga) throw UsageError("--ga-history requires --ga");
      auto recipe = train_flags.recipe(train_seed);
      const auto data = dw::load_dataset(train_data);
      json summary = json::object();
      if (use_ga) {
        dw::GaConfig ga;
        ga.population_size = ga_population;
        ga.generations = ga_generations;
        ga.seed = train_seed;
        ga.threads = global.threads;
        const auto result = dw::ga_search(dw::scale_dataset(data, dw::fit_scaling(data)), ga);
        recipe.arch = result.best;
        if (!ga_history.empty()) dw::write_text_file(ga_history, dw::ga_history_csv(result));
        summary["ga"] = {{"best_fitness", result.best_fitness},
                         {"best_chromosome", dw::to_bit_string(result.best_chromosome)},
                         {"m_max", result.m_max}};
      }
      const auto predictor = dw::train_predictor(data, recipe);
      dw::save_predictor(train_out, predictor);
      const auto scores = predictor.probabilities(data);
      summary["kind"] = std::string(dw::to_string(predictor.kind()));
      summary["architecture"] = dw::to_json(predictor.architecture());
      summary["train_auc"] = dw::auc(scores, labels_of(data));
      print_json(summary);
    };
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on labeled data: AUC, ROC, confusion, omission");
  std::string eval_model, eval_data, roc_out, confusion_out, omission_out, eval_train, subset_a, subset_b, subset_out;
  double eval_threshold = 0.5;
  std::size_t max_thresholds = 0;
  std::optional<std::uint64_t> eval_seed;
  TrainFlags eval_train_flags;
  evaluate->add_option("--model", eval_model, "Model artifact")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", eval_data, "Labeled test CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--threshold", eval_threshold, "Conflict threshold")->capture_default_str();
  evaluate->add_option("--roc", roc_out, "Write ROC points CSV");
  evaluate->add_option("--max-thresholds", max_thresholds, "Cap interior ROC points (0 = all)")->capture_default_str();
  evaluate->add_option("--confusion", confusion_out, "Write confusion matrix JSON");
  evaluate->add_option("--omission", omission_out, "Write input-omission AUC table CSV (retrains)");
  evaluate->add_option("--subset-a", subset_a, "Comma-separated inputs for subset comparison");
  evaluate->add_option("--subset-b", subset_b, "Second input subset");
  evaluate->add_option("--subset-out", subset_out, "Write subset comparison JSON");
  evaluate->add_option("--train", eval_train, "Training CSV for retraining studies")->check(CLI::ExistingFile);
  evaluate->add_option("--seed", eval_seed, "Seed shared by every retraining row");
  eval_train_flags.add(evaluate);
  evaluate->callback([&] {
    action = [&] {
      const bool retrain = !omission_out.empty() || !subset_out.empty();
      if (retrain && (eval_train.empty() || !eval_seed)) {
        throw UsageError("--omission and --subset-out need --train and --seed");
      }
      if (!subset_out.empty() && (subset_a.empty() || subset_b.empty())) {
        throw UsageError("--subset-out needs --subset-a and --subset-b");
      }
      const auto predictor = dw::load_predictor(eval_model);
      const auto data = dw::load_dataset(eval_data);
      const auto scores = predictor.probabilities(data);
      const auto labels = labels_of(data);
      const auto matrix = dw::confusion(scores, labels, eval_threshold);
      const auto curve = dw::roc(scores, labels, max_thresholds);
      json summary = {{"auc", dw::auc(curve)}, {"confusion", dw::to_json(matrix)}};
      if (!roc_out.empty()) dw::write_text_file(roc_out, dw::roc_csv(curve));
      if (!confusion_out.empty()) dw::write_text_file(confusion_out, dw::dump_json(dw::to_json(matrix)));
      if (retrain) {
        const auto train_set = dw::load_dataset(eval_train);
        const auto recipe = eval_train_flags.recipe(*eval_seed);
        if (!omission_out.empty()) {
          const auto rows = dw::omission_study(train_set, data, recipe, global.threads);
          dw::write_text_file(omission_out, dw::omission_csv(rows));
          json table = json::array();
          for (const auto& r : rows) table.push_back({{"omitted", r.omitted}, {"auc", r.error ? json() : json(r.auc)}});
          summary["omission"] = table;
        }
        if (!subset_out.empty()) {
          const auto a = parse_columns(subset_a);
          const auto b = parse_columns(subset_b);
          const auto cmp = dw::subset_compare(train_set, data, a, b, recipe);
          dw::write_text_file(subset_out, dw::dump_json({{"a", {{"inputs", subset_a}, {"roc", dw::to_json(cmp.a)}}},
                                                         {"b", {{"inputs", subset_b}, {"roc", dw::to_json(cmp.b)}}}}));
          summary["subset_auc"] = {{"a", cmp.auc_a}, {"b", cmp.auc_b}};
        }
      }
      print_json(summary);
    };
  });

  // ard
  auto* ard = app.add_subcommand("ard", "Rank input relevance from an ARD sidecar or a fresh ARD run");
  std::string ard_model, ard_data, ard_out;
  std::optional<std::uint64_t> ard_seed;
  std::size_t ard_hidden = 10;
  ard->add_option("--model", ard_model, "Model artifact carrying ARD alphas")->check(CLI::ExistingFile);
  ard->add_option("--data", ard_data, "Training CSV for a fresh ARD run")->check(CLI::ExistingFile);
  ard->add_option("--seed", ard_seed, "Seed for a fresh ARD run");
  ard->add_option("--hidden", ard_hidden, "Hidden units for a fresh ARD run")->capture_default_str();
  ard->add_option("--out", ard_out, "Write relevance CSV");
  ard->callback([&] {
    action = [&] {
      if (ard_model.empty() == ard_data.empty()) throw UsageError("give exactly one of --model or --data");
      dw::ArdResult result;
      if (!ard_model.empty()) {
        const auto predictor = dw::load_predictor(ard_model);
        if (!predictor.ard()) throw dw::ConfigError("relevance unavailable for this model kind");
        result = *predictor.ard();
      } else {
        if (!ard_seed) throw UsageError("--seed is required with --data");
        const auto data = dw::load_dataset(ard_data);
        dw::MlpArchitecture arch{.hidden = ard_hidden};
        result = dw::ard_train(arch, dw::scale_dataset(data, dw::fit_scaling(data)), {}, *ard_seed,
                               data.schema.names());
      }
      if (!ard_out.empty()) dw::write_text_file(ard_out, ard_csv(result));
      print_json(dw::to_json(result));
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Corner-scenario sweep (all-min, all-max, one-up, one-down)");
  std::string sweep_model, sweep_out;
  sweep->add_option("--model", sweep_model, "Model artifact")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Write scenario CSV");
  sweep->callback([&] {
    action = [&] {
      const auto predictor = dw::load_predictor(sweep_model);
      const auto outcomes = dw::scenario_sweep(predictor);
      if (!sweep_out.empty()) dw::write_text_file(sweep_out, dw::scenario_csv(outcomes));
      print_json(dw::to_json(std::span<const dw::ScenarioOutcome>(outcomes)));
    };
  });

  // control
  auto* control = app.add_subcommand("control", "Propose controllable-variable changes for one case");
  std::string control_model, control_case, control_data, control_strategy = "multi", control_out;
  std::optional<std::size_t> control_row;
  std::uint64_t control_seed = 0;
  ControlFlags control_flags;
  control->add_option("--model", control_model, "Model artifact")->required()->check(CLI::ExistingFile);
  control->add_option("--case", control_case, "Case as name=value pairs, comma separated");
  control->add_option("--data", control_data, "CSV to take the case from")->check(CLI::ExistingFile);
  control->add_option("--row", control_row, "0-based record index in --data");
  control->add_option("--strategy", control_strategy, "multi or single:<variable>")->capture_default_str();
  control->add_option("--seed", control_seed, "Annealing seed")->required();
  control->add_option("--out", control_out, "Write result JSON");
  control_flags.add(control);
  control->callback([&] {
    action = [&] {
      dw::DyadYearRecord record;
      if (!control_case.empty()) {
        if (!control_data.empty()) throw UsageError("give --case or --data/--row, not both");
        record = parse_case(control_case);
      } else {
        if (control_data.empty() || !control_row) throw UsageError("give --case, or --data with --row");
        const auto data = dw::load_dataset(control_data);
        if (*control_row >= data.size()) throw UsageError("--row is past the end of the data");
        record = data.records[*control_row];
      }
      const auto predictor = dw::load_predictor(control_model);
      const auto strategy = dw::Strategy::parse(control_strategy, predictor.schema());
      const auto cfg = control_flags.config(control_seed);
      const json result = strategy.kind == dw::Strategy::Kind::multi
                              ? dw::to_json(dw::control_multi(predictor, record, cfg))
                              : dw::to_json(dw::control_single(predictor, record, strategy.variable, cfg));
      if (!control_out.empty()) dw::write_text_file(control_out, dw::dump_json(result));
      print_json(result);
    };
  });

  // campaign
  auto* campaign = app.add_subcommand("campaign", "Run a control strategy over every predicted conflict");
  std::string campaign_model, campaign_data, campaign_strategy = "multi", campaign_out, campaign_cases;
  std::uint64_t campaign_seed = 0;
  ControlFlags campaign_flags;
  campaign->add_option("--model", campaign_model, "Model artifact")->required()->check(CLI::ExistingFile);
  campaign->add_option("--data", campaign_data, "Labeled test CSV")->required()->check(CLI::ExistingFile);
  campaign->add_option("--strategy", campaign_strategy, "multi, single:<variable>, or all")->capture_default_str();
  campaign->add_option("--seed", campaign_seed, "Annealing seed")->required();
  campaign->add_option("--out", campaign_out, "Write report JSON");
  campaign->add_option("--cases", campaign_cases, "Write per-case CSV (single strategy runs only)");
  campaign_flags.add(campaign);
  campaign->callback([&] {
    action = [&] {
      const auto predictor = dw::load_predictor(campaign_model);
      const auto data = dw::load_dataset(campaign_data);
      const auto cfg = campaign_flags.config(campaign_seed);
      std::vector<dw::Strategy> strategies;
      if (campaign_strategy == "all") {
        strategies.push_back(dw::Strategy::multi());
        for (auto i : predictor.schema().controllable_indices()) strategies.push_back(dw::Strategy::single(i));
        if (!campaign_cases.empty()) throw UsageError("--cases needs a single strategy, not all");
      } else {
        strategies.push_back(dw::Strategy::parse(campaign_strategy, predictor.schema()));
      }
      json result;
      if (strategies.size() == 1) {
        const auto report = dw::control_campaign(predictor, data, strategies.front(), cfg, global.threads);
        if (!campaign_cases.empty()) dw::write_text_file(campaign_cases, dw::campaign_csv(report));
        result = dw::to_json(report);
        if (!campaign_out.empty()) dw::write_text_file(campaign_out, dw::dump_json(result));
        print_json(dw::to_json(report, false));
      } else {
        json all = json::array();
        for (const auto& s : strategies) {
          all.push_back(dw::to_json(dw::control_campaign(predictor, data, s, cfg, global.threads), false));
        }
        result = {{"campaigns", all}};
        if (!campaign_out.empty()) dw::write_text_file(campaign_out, dw::dump_json(result));
        print_json(result);
      }
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1", artifact_dir = "artifacts", static_dir;
  int port = 8080;
  std::size_t workers = 1;
  serve->add_option("--host", host, "Listen address")->envname("DYADWATCH_HOST")->capture_default_str();
  serve->add_option("--port", port, "Listen port")->envname("DYADWATCH_PORT")->capture_default_str();
  serve->add_option("--artifacts", artifact_dir, "Artifact directory")
      ->envname("DYADWATCH_ARTIFACTS")
      ->capture_default_str();
  serve->add_option("--workers", workers, "Training/campaign worker threads")
      ->envname("DYADWATCH_WORKERS")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Serve UI files from this directory at /")->check(CLI::ExistingDirectory);
  serve->callback([&] {
    action = [&] {
      dw::Service service({artifact_dir, workers});
      dw::HttpServer server(service, static_dir);
      g_server = &server;
      std::signal(SIGINT, handle_stop);
      std::signal(SIGTERM, handle_stop);
      std::cerr << "listening on http://" << host << ':' << port << '\n';
      const bool ok = server.listen(host, port);
      g_server = nullptr;
      if (!ok) throw dw::Error("could not listen on " + host + ':' + std::to_string(port));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for the synopsis.\n";
    return 2;
  } catch (const dw::DomainError& e) {
    std::cerr << json({{"error", e.what()}, {"kind", "domain"}, {"field", e.variable()}, {"line", e.line()}}).dump()
              << '\n';
  } catch (const dw::ParseError& e) {
    std::cerr << json({{"error", e.what()}, {"kind", "parse"}, {"line", e.line()}}).dump() << '\n';
  } catch (const dw::Error& e) {
    std::cerr << json({{"error", e.what()}, {"kind", "domain"}}).dump() << '\n';
  } catch (const std::exception& e) {
    std::cerr << json({{"error", e.what()}, {"kind", "internal"}}).dump() << '\n';
  }
  return 1;
}
