#include "relexp/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relexp/common/error.hpp"
#include "relexp/common/png_io.hpp"
#include "relexp/explain/annotation.hpp"
#include "relexp/explain/render.hpp"
#include "relexp/explain/verbalize.hpp"
#include "relexp/ilp/parser.hpp"
#include "relexp/pipeline/pipeline.hpp"
#include "relexp/tinynn/model_io.hpp"
#include "relexp/tinynn/training.hpp"
#include "relexp/worldgen/dataset.hpp"

namespace fs = std::filesystem;

namespace relexp::cli {

namespace {

// Input files that do not exist.
class MissingInput : public Error {
 public:
  using Error::Error;
};

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw MissingInput(std::string(what) + " not found: " + p.string());
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RELEXP_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("RELEXP_SEED is not an unsigned integer: ") + env);
  }
  return 1;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct GenOptions {
  std::string concept_name;
  fs::path out;
  worldgen::DatasetSizes sizes;
  bool paper_scale = false;
  std::optional<std::uint64_t> seed;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  const auto c = worldgen::parse_concept(o.concept_name);
  if (!c) throw ConfigError("unknown concept: " + o.concept_name);
  const auto sizes = o.paper_scale ? worldgen::kFullScaleSizes : o.sizes;
  const auto data = worldgen::build_dataset(*c, sizes, seed_or_env(o.seed));
  worldgen::write_dataset(data, o.out);
  out << "wrote " << sizes.train << "/" << sizes.val << "/" << sizes.test << " images to " << o.out.string()
      << "\n";
  return kOk;
}

struct TrainOptions {
  fs::path data;
  std::string concept_name;
  worldgen::DatasetSizes sizes;
  bool paper_scale = false;
  fs::path out;
  tinynn::TrainConfig config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

int cmd_train(TrainOptions o, std::ostream& out) {
  worldgen::DatasetSplit data;
  const std::uint64_t seed = seed_or_env(o.seed);
  if (!o.data.empty()) {
    require_file(o.data / "manifest.json", "dataset manifest");
    data = worldgen::read_dataset(o.data);
  } else {
    const auto c = worldgen::parse_concept(o.concept_name);
    if (!c) throw ConfigError("train needs --data or a valid --concept");
    data = worldgen::build_dataset(*c, o.paper_scale ? worldgen::kFullScaleSizes : o.sizes, seed);
  }
  o.config.seed = seed;
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  auto report = [&](const tinynn::EpochMetrics& m) {
    out << m.epoch << "," << fixed(m.train_loss) << "," << fixed(m.train_accuracy) << "," << fixed(m.val_loss)
        << "," << fixed(m.val_accuracy) << "\n"
        << std::flush;
  };
  const auto result = tinynn::train(data, o.config, {}, report);
  fs::create_directories(o.out);
  tinynn::ModelMetadata meta{result.classifier.architecture(), o.config, result.best_epoch, result.history};
  tinynn::save_model(o.out, result.classifier, meta);
  std::string csv = "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& m : result.history)
    csv += std::to_string(m.epoch) + "," + fixed(m.train_loss, 6) + "," + fixed(m.train_accuracy, 6) + "," +
           fixed(m.val_loss, 6) + "," + fixed(m.val_accuracy, 6) + "\n";
  write_text_file(o.out / "metrics.csv", csv);
  const auto val = tinynn::evaluate(result.classifier, data.val, o.threads);
  out << "best epoch " << result.best_epoch << ", val accuracy " << fixed(val.accuracy) << "\n";
  return kOk;
}

struct EvalOptions {
  fs::path model;
  fs::path data;
  std::string split = "test";
  int threads = 1;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  require_file(o.model / "model.bin", "model");
  require_file(o.data / "manifest.json", "dataset manifest");
  const auto clf = tinynn::load_model(o.model);
  const auto data = worldgen::read_dataset(o.data);
  const std::vector<worldgen::LabeledImage>* items = nullptr;
  if (o.split == "train") items = &data.train;
  else if (o.split == "val") items = &data.val;
  else if (o.split == "test") items = &data.test;
  else throw ConfigError("unknown split: " + o.split);
  const auto ev = tinynn::evaluate(clf, *items, o.threads);
  out << o.split << " loss " << fixed(ev.loss) << " accuracy " << fixed(ev.accuracy) << " (" << items->size()
      << " images)\n";
  return kOk;
}

struct ExplainOptions {
  fs::path model;
  fs::path image;
  fs::path out = "runs";
  std::string name;
  fs::path modes;
  fs::path templates;
  pipeline::ExplainConfig config;
  bool absolute = false;
  std::optional<std::uint64_t> seed;
  int scale = 10;
  int threads = 1;
};

fs::path run_directory(const fs::path& root, const std::string& name) {
  if (!name.empty()) return root / name;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "run-%Y%m%d-%H%M%S", &tm);
  return root / buf;
}

explain::Templates load_templates(const fs::path& p) {
  if (p.empty()) return explain::Templates::defaults();
  require_file(p, "template file");
  return explain::Templates::from_json(read_text_file(p));
}

nlohmann::ordered_json annotation_json(const explain::Annotation& a) {
  nlohmann::ordered_json j;
  j["clause"] = a.clause;
  j["substitution"] = a.substitution;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : a.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"relation", e.relation}});
  auto cells = nlohmann::ordered_json::array();
  for (const auto& h : a.highlights) cells.push_back({{"cell", h.cell}, {"label", h.label}});
  j["highlights"] = cells;
  j["edges"] = edges;
  j["caption"] = a.caption;
  return j;
}

int cmd_explain(ExplainOptions o, std::ostream& out, std::ostream& err) {
  require_file(o.model / "model.bin", "model");
  require_file(o.image, "image");
  const auto clf = tinynn::load_model(o.model);
  const Image image = from_raster(read_png(o.image));
  if (image.width() != 32 || image.height() != 32) throw ConfigError("image must be 32x32");
  if (!o.modes.empty()) {
    require_file(o.modes, "mode file");
    o.config.modes = ilp::parse_modes(read_text_file(o.modes));
  }
  const auto templates = load_templates(o.templates);
  o.config.seed = seed_or_env(o.seed);
  o.config.selection = o.absolute ? surrogate::SelectionMode::absolute_weight : surrogate::SelectionMode::signed_weight;
  o.config.ilp.threads = o.threads;
  const int threads = o.threads;
  const surrogate::BatchPredictor predict = [&clf, threads](std::span<const Image> batch) {
    return clf.predict_batch(batch, threads);
  };

  pipeline::ExplanationRun run;
  try {
    run = pipeline::explain(image, predict, o.config);
  } catch (const pipeline::BelowThresholdError& e) {
    err << e.what() << "\n";
    return kBelowThreshold;
  }

  const fs::path dir = run_directory(o.out, o.name);
  fs::create_directories(dir);
  write_png(dir / "input.png", to_raster(image));
  write_text_file(dir / "modes.pl", ilp::to_text(o.config.modes));
  write_text_file(dir / "examples.pl", ilp::to_text(run.program));
  write_text_file(dir / "theory.pl", ilp::to_text(run.theory));
  write_text_file(dir / "stats.json", ilp::stats_json(run.theory, o.config.ilp));
  write_text_file(dir / "pool.csv", surrogate::pool_to_csv(run.pool));
  write_text_file(dir / "fit.json", surrogate::fit_to_json(run.fit));

  nlohmann::ordered_json j;
  j["image"] = o.image.string();
  j["estimate"] = run.estimate;
  j["k"] = run.k;
  j["theta"] = run.theta;
  std::vector<int> sel = run.selection;
  j["selection"] = sel;
  j["positives"] = run.positives();
  j["negatives"] = run.negatives();
  j["theory_accuracy"] = run.theory.accuracy();
  if (run.theory.empty()) {
    j["diagnostic"] = run.theory.diagnostic;
    write_text_file(dir / "explanation.json", j.dump(2) + "\n");
    err << "no theory found: " << run.theory.diagnostic << "\n";
    out << dir.string() << "\n";
    return kNoTheory;
  }
  const std::string text = explain::verbalize(run.theory, templates);
  write_text_file(dir / "explanation.txt", text);
  auto clauses = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.theory.clauses.size(); ++i) {
    const auto& clause = run.theory.clauses[i].clause.clause;
    const std::string file = i == 0 ? "annotated.png" : "annotated_" + std::to_string(i + 1) + ".png";
    auto entry = nlohmann::ordered_json{{"rule", ilp::to_string(clause)}, {"verbal", explain::verbalize(clause, templates)}};
    try {
      const auto ann = explain::instantiate(clause, run);
      write_png(dir / file, explain::render_annotated(image, ann, o.scale));
      entry["annotation"] = annotation_json(ann);
      entry["png"] = file;
    } catch (const InvalidSelectionError&) {
      throw;
    } catch (const Error& e) {
      entry["annotation"] = nullptr;  // clause does not cover the original example
      entry["note"] = e.what();
    }
    clauses.push_back(entry);
  }
  j["clauses"] = clauses;
  j["files"] = {"examples.pl", "modes.pl", "theory.pl", "stats.json", "explanation.txt", "annotated.png"};
  write_text_file(dir / "explanation.json", j.dump(2) + "\n");
  out << text;
  out << dir.string() << "\n";
  return kOk;
}

struct RenderOptions {
  fs::path run;
  fs::path output;
  int scale = 10;
};

int cmd_render(const RenderOptions& o, std::ostream& out) {
  for (const char* f : {"input.png", "examples.pl", "theory.pl"}) require_file(o.run / f, f);
  const Image image = from_raster(read_png(o.run / "input.png"));
  const auto program = ilp::parse_program(read_text_file(o.run / "examples.pl"));
  const auto clauses = ilp::parse_clauses(read_text_file(o.run / "theory.pl"));
  if (clauses.empty()) {
    out << "theory is empty\n";
    return kNoTheory;
  }
  if (program.positives.empty()) throw ConfigError("examples.pl has no positive example");
  const auto ann = explain::instantiate(clauses.front(), program, program.positives.front());
  const fs::path target = o.output.empty() ? o.run / "annotated.png" : o.output;
  write_png(target, explain::render_annotated(image, ann, o.scale));
  out << target.string() << "\n";
  return kOk;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return args;
  if (!fs::exists(*config)) throw MissingInput("config file not found: " + *config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(*config));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> flags;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) flags.push_back("--" + key);
    } else if (value.is_string()) {
      flags.push_back("--" + key);
      flags.push_back(value.get<std::string>());
    } else if (value.is_number() || value.is_null()) {
      flags.push_back("--" + key);
      flags.push_back(value.dump());
    } else {
      throw ConfigError("config value for \"" + key + "\" must be a scalar");
    }
  }
  // subcommand first, then file values, then explicit flags
  std::vector<std::string> out;
  std::size_t start = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) out.push_back(rest[start++]);
  out.insert(out.end(), flags.begin(), flags.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(start), rest.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"relexp: relational explanations for image classifiers"};
  app.name("relexp");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "relexp 0.1.0");
  app.add_option("--config", "JSON file with default flag values");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a blocksworld dataset");
  gen_cmd->add_option("--concept", gen.concept_name, "single-relation or tower")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--train", gen.sizes.train, "Training images");
  gen_cmd->add_option("--val", gen.sizes.val, "Validation images");
  gen_cmd->add_option("--test", gen.sizes.test, "Test images");
  gen_cmd->add_flag("--paper-scale", gen.paper_scale, "Use 7000/2000/1000 images");
  gen_cmd->add_option("--seed", gen.seed, "Random seed (default: RELEXP_SEED or 1)");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the classifier");
  train_cmd->add_option("--data", tr.data, "Dataset directory written by gen");
  train_cmd->add_option("--concept", tr.concept_name, "Generate the dataset in memory instead");
  train_cmd->add_option("--train", tr.sizes.train);
  train_cmd->add_option("--val", tr.sizes.val);
  train_cmd->add_option("--test", tr.sizes.test);
  train_cmd->add_flag("--paper-scale", tr.paper_scale);
  train_cmd->add_option("--out", tr.out, "Model directory")->required();
  train_cmd->add_option("--epochs", tr.config.max_epochs, "Maximum epochs");
  train_cmd->add_option("--patience", tr.config.patience, "Early-stopping patience");
  train_cmd->add_option("--batch", tr.config.batch_size, "Batch size");
  train_cmd->add_option("--lr", tr.config.learning_rate, "Adam learning rate");
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--threads", tr.threads);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a dataset split");
  eval_cmd->add_option("--model", ev.model)->required();
  eval_cmd->add_option("--data", ev.data)->required();
  eval_cmd->add_option("--split", ev.split, "train, val or test");
  eval_cmd->add_option("--threads", ev.threads);

  ExplainOptions ex;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one classification");
  explain_cmd->add_option("--model", ex.model)->required();
  explain_cmd->add_option("--image", ex.image, "32x32 PNG")->required();
  explain_cmd->add_option("--out", ex.out, "Root directory for runs");
  explain_cmd->add_option("--name", ex.name, "Run directory name (default: timestamp)");
  explain_cmd->add_option("--k", ex.config.k, "Selected super-pixels");
  explain_cmd->add_option("--theta", ex.config.theta, "Concept threshold");
  explain_cmd->add_option("--samples", ex.config.n_samples, "Perturbed samples");
  explain_cmd->add_option("--lasso-k", ex.config.lasso_k, "Lasso support size (default 2k)");
  explain_cmd->add_option("--kernel-width", ex.config.pool.kernel_width);
  explain_cmd->add_flag("--absolute", ex.absolute, "Select by absolute weight");
  explain_cmd->add_option("--min-acc", ex.config.ilp.min_accuracy);
  explain_cmd->add_option("--min-pos", ex.config.ilp.min_positives);
  explain_cmd->add_option("--max-body", ex.config.ilp.max_body);
  explain_cmd->add_option("--beam", ex.config.ilp.beam_width);
  explain_cmd->add_option("--nodes", ex.config.ilp.node_budget);
  explain_cmd->add_option("--modes", ex.modes, "Mode declaration file");
  explain_cmd->add_option("--templates", ex.templates, "Verbalization template JSON");
  explain_cmd->add_option("--scale", ex.scale, "Annotated image scale");
  explain_cmd->add_option("--seed", ex.seed);
  explain_cmd->add_option("--threads", ex.threads);

  RenderOptions rd;
  auto* render_cmd = app.add_subcommand("render", "Re-render the annotated image of a run");
  render_cmd->add_option("--run", rd.run, "Run directory")->required();
  render_cmd->add_option("--output", rd.output, "PNG path (default: <run>/annotated.png)");
  render_cmd->add_option("--scale", rd.scale);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "relexp 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const MissingInput& e) {
    err << e.what() << "\n";
    return kMissingInput;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*train_cmd) return cmd_train(tr, out);
    if (*eval_cmd) return cmd_eval(ev, out);
    if (*explain_cmd) return cmd_explain(ex, out, err);
    if (*render_cmd) return cmd_render(rd, out);
  } catch (const MissingInput& e) {
    err << e.what() << "\n";
    return kMissingInput;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace relexp::cli
