#include "privcore_cli/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "privcore/csv.hpp"
#include "privcore/dataset.hpp"
#include "privcore/error.hpp"
#include "privcore/gradtrace.hpp"
#include "privcore/linreg.hpp"
#include "privcore/privacy_select.hpp"
#include "privcore/report.hpp"
#include "privcore/serialize.hpp"
#include "privcore/taskmask.hpp"

namespace privcore::cli {

namespace fs = std::filesystem;

namespace {

const char* const kReservedOptions[] = {"help", "out", "config", "jobs"};

bool reserved(const std::string& name) {
  for (const char* r : kReservedOptions) {
    if (name == r) return true;
  }
  return false;
}

CLI::App* selected(const CLI::App* root) {
  auto subs = root->get_subcommands();
  return subs.empty() ? nullptr : subs.front();
}

// Reads a flat JSON object of option values for the selected subcommand.
// A top-level key naming a subcommand may instead hold that subcommand's object.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json doc;
    try {
      input >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    const CLI::App* sub = selected(root_);
    if (sub == nullptr) throw CLI::ConfigError("--config needs a subcommand");
    if (doc.contains(sub->get_name()) && doc.at(sub->get_name()).is_object()) {
      Json inner = doc.at(sub->get_name());
      doc = std::move(inner);
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      if (reserved(key) || sub->get_option_no_throw("--" + key) == nullptr) {
        throw CLI::ConfigError("unknown config key '" + key + "' for " + sub->get_name());
      }
      CLI::ConfigItem item;
      item.parents = {sub->get_name()};
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(key, v));
      } else {
        item.inputs.push_back(scalar(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const std::string& key, const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("config key '" + key + "' must hold a scalar or an array of scalars");
  }

  const CLI::App* root_;
};

Json typed_value(const std::string& type, const std::string& text) {
  auto parse = [&](auto value) -> std::optional<decltype(value)> {
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
  };
  if (type.rfind("UINT", 0) == 0) {
    if (auto v = parse(std::uint64_t{})) return *v;
  } else if (type.rfind("INT", 0) == 0) {
    if (auto v = parse(std::int64_t{})) return *v;
  } else if (type.rfind("FLOAT", 0) == 0) {
    if (auto v = parse(double{})) return *v;
  }
  return text;
}

// Every option of `sub` with its final value, as a config file would hold it.
Json resolved_config(const CLI::App& sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (reserved(name)) continue;
    const std::string type = opt->get_type_name();
    if (opt->get_type_size() == 0) {
      j[name] = opt->count() > 0 ? opt->as<bool>() : opt->get_default_str() == "true";
      continue;
    }
    std::vector<std::string> values = opt->results();
    if (opt->count() == 0) {
      if (opt->get_default_str().empty()) continue;
      values = {opt->get_default_str()};
    }
    if (opt->get_items_expected_max() > 1) {
      Json arr = Json::array();
      for (const auto& v : values) arr.push_back(typed_value(type, v));
      j[name] = arr;
    } else if (!values.empty()) {
      j[name] = typed_value(type, values.back());
    }
  }
  return j;
}

class Output {
 public:
  Output(std::optional<fs::path> dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  bool has_dir() const { return dir_.has_value(); }
  std::ostream& stream() { return out_; }

  void file(const std::string& name, std::string_view content) {
    if (dir_) write_text_file_atomic(*dir_ / name, content);
  }
  void json(const std::string& name, const Json& doc) { file(name, dump_json(doc)); }

 private:
  std::optional<fs::path> dir_;
  std::ostream& out_;
};

struct Common {
  std::string out;
  unsigned jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
}

struct DataInput {
  std::string path;
  std::string manifest;
  std::vector<std::string> roles;
};

void add_data_input(CLI::App* sub, DataInput& in, const std::string& flag = "--data") {
  sub->add_option(flag, in.path, "Dataset CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--manifest", in.manifest, "Generator manifest JSON (pins class counts)")
      ->check(CLI::ExistingFile);
  sub->add_option("--role", in.roles, "Column role override NAME=ROLE (ROLE: y, z, coarse, fine, feature)");
}

Dataset load(const DataInput& in, const std::string& path) {
  RoleOverrides overrides;
  for (const auto& spec : in.roles) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw CLI::ValidationError("--role", "expected NAME=ROLE, got '" + spec + "'");
    }
    overrides[spec.substr(0, eq)] = spec.substr(eq + 1);
  }
  Dataset data = read_csv(path, overrides);
  if (!in.manifest.empty()) attach_manifest(data, manifest_from_json(read_json_file(in.manifest)));
  return data;
}

Dataset load(const DataInput& in) { return load(in, in.path); }

CLI::Validator bound(bool strict) {
  return CLI::Validator(
      [strict](std::string& text) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(text, v)) return "'" + text + "' is not a number";
        if (strict ? v > 0.0 : v >= 0.0) return {};
        return "value " + text + (strict ? " must be positive" : " must not be negative");
      },
      strict ? "POSITIVE" : "NONNEGATIVE");
}

const CLI::Validator kPositive = bound(true);
const CLI::Validator kNonNegative = bound(false);

CLI::Validator choice(std::vector<std::string> names) { return CLI::IsMember(std::move(names)); }

void add_train_flags(CLI::App* sub, TrainConfig& t) {
  sub->add_option("--epochs", t.epochs, "Training epochs")->check(kPositive);
  sub->add_option("--lr", t.learning_rate, "Learning rate")->check(kPositive);
  sub->add_option("--batch-size", t.batch_size, "Mini-batch size")->check(kPositive);
  sub->add_option("--l2", t.l2, "L2 penalty on non-bias weights")->check(kNonNegative);
}

void add_hier_flags(CLI::App* sub, HierarchyConfig& h) {
  sub->add_option("--coarse", h.num_coarse, "Coarse classes")->check(kPositive);
  sub->add_option("--fine-per-coarse", h.fine_per_coarse, "Fine classes per coarse class")
      ->check(kPositive);
  sub->add_option("--per-fine", h.per_fine_count, "Examples per fine class")->check(kPositive);
  sub->add_option("--d", h.d, "Feature dimension")->check(kPositive);
  sub->add_option("--coarse-sep", h.coarse_sep, "Coarse center separation")->check(kPositive);
  sub->add_option("--fine-sep", h.fine_sep, "Fine center separation")->check(kPositive);
  sub->add_option("--within-sd", h.within_sd, "Within-class standard deviation")
      ->check(kPositive);
}

std::vector<std::string> names_of(auto all, auto name) {
  std::vector<std::string> out;
  for (auto v : all) out.emplace_back(name(v));
  return out;
}

const std::vector<std::string>& hide_names() {
  static const auto names = names_of(std::vector{HideMode::kNone, HideMode::kHideValue, HideMode::kPlant},
                                     hide_mode_name);
  return names;
}
const std::vector<std::string>& plant_label_names() {
  static const auto names =
      names_of(std::vector{PlantLabel::kSecret, PlantLabel::kLiteralPublic}, plant_label_name);
  return names;
}
const std::vector<std::string>& task_names() {
  static const auto names = names_of(std::vector{Task::kCoarse, Task::kFine}, task_name);
  return names;
}
const std::vector<std::string>& construction_names() {
  static const auto names = names_of(all_constructions(), construction_name);
  return names;
}

void write_dataset(Output& out, const Dataset& data) {
  out.file("dataset.csv", to_csv_string(data));
  if (data.manifest()) out.json("manifest.json", to_json(*data.manifest()));
}

std::string coreset_summary(const CoreSet& c) {
  return "core-set of " + std::to_string(c.k()) + " rows from dataset " + c.parent_fingerprint + "\n";
}

struct Context {
  CLI::App* sub = nullptr;
  std::function<void(Output&)> action;
};

template <typename State, typename Setup, typename Run>
void command(CLI::App& app, Context& ctx, const std::string& name, const std::string& help, Setup setup,
             Run run) {
  auto state = std::make_shared<State>();
  auto common = std::make_shared<Common>();
  CLI::App* sub = app.add_subcommand(name, help);
  add_common(sub, *common);
  setup(sub, *state);
  sub->callback([&ctx, sub, state, common, run] {
    ctx.sub = sub;
    ctx.action = [state, common, run](Output& out) { run(*state, *common, out); };
  });
}

// ---------------------------------------------------------------------------

struct GenLinear {
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::size_t d = 3;
  double noise_sd = 0.5;
};

struct GenHier {
  std::uint64_t seed = 0;
  HierarchyConfig hierarchy;
};

struct GenNormal {
  std::uint64_t seed = 0;
  std::size_t n = 100;
  double mu = 0.0;
  double sigma = 1.0;
};

struct Fit {
  DataInput data;
  std::string target = "y";
};

struct Losses {
  DataInput data;
  std::string model;
  std::string hide = "plant";
  double alpha = 1.0;
  std::string plant;
  std::uint64_t plant_seed = 0;
  std::string plant_label = "secret";
  std::optional<double> z_center;
};

struct Select {
  std::string losses;
  std::size_t k = 0;
  std::string fingerprint;
};

struct SelectMoment {
  DataInput data;
  std::string column;
  std::size_t k = 0;
  double tol = 0.05;
};

struct Trace {
  DataInput data;
  std::string task = "fine";
  std::uint64_t seed = 0;
  TrainConfig train;
};

struct Scores {
  std::string trace_coarse;
  std::string trace_fine;
  std::string construction;
  std::uint64_t seed = 0;
};

struct SelectBalanced {
  DataInput data;
  std::string scores;
  std::size_t k = 0;
};

struct EvalCoreset {
  DataInput train_data;
  std::string test;
  std::string coreset;
  std::string label = "custom";
  std::uint64_t seed = 0;
  TrainConfig train;
};

struct PipelineLinear {
  LinearPipelineConfig config;
  std::string hide = "plant";
  std::string plant_label = "secret";
  std::size_t seeds = 1;
};

struct PipelineMask {
  MaskPipelineConfig config;
  std::vector<std::string> constructions;
  std::string bucket_task = "fine";
  std::size_t seeds = 1;
};

struct ReportCmd {
  std::string in;
};

void register_commands(CLI::App& app, Context& ctx) {
  command<GenLinear>(
      app, ctx, "gen-linear", "Generate the linear synthetic dataset (x, y, z)",
      [](CLI::App* s, GenLinear& o) {
        s->add_option("--seed", o.seed, "Root seed");
        s->add_option("--n", o.n, "Rows")->check(kPositive);
        s->add_option("--d", o.d, "Features")->check(kPositive);
        s->add_option("--noise-sd", o.noise_sd, "Label noise standard deviation")
            ->check(kPositive);
      },
      [](GenLinear& o, Common&, Output& out) {
        const Dataset data = gen_linear(o.seed, o.n, o.d, o.noise_sd);
        write_dataset(out, data);
        if (!out.has_dir()) out.stream() << to_csv_string(data);
      });

  command<GenHier>(
      app, ctx, "gen-hier", "Generate the hierarchical (coarse/fine) classification dataset",
      [](CLI::App* s, GenHier& o) {
        s->add_option("--seed", o.seed, "Root seed");
        add_hier_flags(s, o.hierarchy);
      },
      [](GenHier& o, Common&, Output& out) {
        const Dataset data = gen_hierarchical(o.seed, o.hierarchy);
        write_dataset(out, data);
        if (!out.has_dir()) out.stream() << to_csv_string(data);
      });

  command<GenNormal>(
      app, ctx, "gen-normal", "Generate scalar normal samples",
      [](CLI::App* s, GenNormal& o) {
        s->add_option("--seed", o.seed, "Root seed");
        s->add_option("--n", o.n, "Samples")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
        s->add_option("--mu", o.mu, "Mean");
        s->add_option("--sigma", o.sigma, "Standard deviation")->check(kPositive);
      },
      [](GenNormal& o, Common&, Output& out) {
        const Dataset data = gen_normal_scalar(o.seed, o.n, o.mu, o.sigma);
        write_dataset(out, data);
        if (!out.has_dir()) out.stream() << to_csv_string(data);
      });

  command<Fit>(
      app, ctx, "fit", "Fit ordinary least squares to a target column",
      [](CLI::App* s, Fit& o) {
        add_data_input(s, o.data);
        s->add_option("--target", o.target, "Target role")->check(choice({"y", "z"}));
      },
      [](Fit& o, Common&, Output& out) {
        const Dataset data = load(o.data);
        const Role role = *parse_role(o.target);
        const LinearModel model = fit_ols(data.features(), data.continuous(role));
        const double r2 = r_squared(model, data.features(), data.continuous(role));
        out.json("model.json", to_json(model));
        std::string text = o.target + " = " + format_model(model, data.feature_names()) + "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "r2 = %.6f%s\n", r2, model.ridge_used ? " (ridge fallback)" : "");
        text += buf;
        out.file("report.txt", text);
        if (out.has_dir()) {
          out.stream() << text;
        } else {
          out.stream() << dump_json(to_json(model));
        }
      });

  command<Losses>(
      app, ctx, "losses", "Per-point selection losses (fidelity + alpha * hide term)",
      [](CLI::App* s, Losses& o) {
        add_data_input(s, o.data);
        s->add_option("--model", o.model, "Public model JSON (default: OLS fit of y on the data)")
            ->check(CLI::ExistingFile);
        s->add_option("--hide", o.hide, "Hide mode")->check(choice(hide_names()));
        s->add_option("--alpha", o.alpha, "Hide weight")->check(kNonNegative);
        s->add_option("--plant", o.plant, "Plant model JSON (default: drawn from --plant-seed)")
            ->check(CLI::ExistingFile);
        s->add_option("--plant-seed", o.plant_seed, "Seed for the planted model");
        s->add_option("--plant-label", o.plant_label, "Column the plant residual is measured on")
            ->check(choice(plant_label_names()));
        s->add_option("--z-center", o.z_center, "Center for hide-value (default: mean of z)");
      },
      [](Losses& o, Common& c, Output& out) {
        const Dataset data = load(o.data);
        const LinearModel model =
            o.model.empty() ? fit_ols(data.features(), data.continuous(Role::kY))
                            : linear_model_from_json(read_json_file(o.model));
        HideConfig hide;
        hide.mode = *parse_hide_mode(o.hide);
        hide.alpha = o.alpha;
        hide.plant_label = *parse_plant_label(o.plant_label);
        if (hide.mode == HideMode::kPlant) {
          hide.plant_model = o.plant.empty() ? make_plant(o.plant_seed, data.d())
                                             : linear_model_from_json(read_json_file(o.plant));
        }
        if (hide.mode == HideMode::kHideValue) {
          hide.z_center = o.z_center ? *o.z_center : data.continuous(Role::kZ).mean();
        }
        const std::string csv = series_to_csv("loss", point_losses(data, model, hide, c.jobs));
        out.file("series/losses.csv", csv);
        if (!out.has_dir()) out.stream() << csv;
      });

  command<Select>(
      app, ctx, "select", "Bottom-k selection from a loss series",
      [](CLI::App* s, Select& o) {
        s->add_option("--losses", o.losses, "Loss series CSV (index,loss)")->required()->check(CLI::ExistingFile);
        s->add_option("--k", o.k, "Core-set size")->required()->check(kPositive);
        s->add_option("--fingerprint", o.fingerprint, "Parent dataset fingerprint to record");
      },
      [](Select& o, Common&, Output& out) {
        const auto losses = series_from_csv(read_text_file(o.losses), "loss", o.losses);
        const CoreSet cs = select_bottom_k(losses, o.k, o.fingerprint);
        out.json("coreset.json", to_json(cs));
        if (out.has_dir()) {
          out.stream() << coreset_summary(cs);
        } else {
          out.stream() << dump_json(to_json(cs));
        }
      });

  command<SelectMoment>(
      app, ctx, "select-moment", "Mean-preserving, variance-inflating core-set of a scalar column",
      [](CLI::App* s, SelectMoment& o) {
        add_data_input(s, o.data);
        s->add_option("--column", o.column, "Column to use (default: first feature)");
        s->add_option("--k", o.k, "Core-set size")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1000000000}));
        s->add_option("--tol", o.tol, "Mean tolerance")->check(kPositive);
      },
      [](SelectMoment& o, Common&, Output& out) {
        const Dataset data = load(o.data);
        std::size_t col = 0;
        if (!o.column.empty()) {
          const auto& names = data.feature_names();
          auto it = std::find(names.begin(), names.end(), o.column);
          if (it == names.end()) {
            throw CLI::ValidationError("--column", "no feature column '" + o.column + "'");
          }
          col = static_cast<std::size_t>(it - names.begin());
        }
        const Vector values = data.features().col(static_cast<Eigen::Index>(col));
        const std::span<const double> samples(values.data(), static_cast<std::size_t>(values.size()));
        CoreSet cs = select_moment_coreset(samples, o.k, o.tol);
        cs.parent_fingerprint = data.fingerprint();
        const MomentStats full = moments(samples);
        const MomentStats sub = moments(samples, cs.indices);
        char buf[160];
        std::snprintf(buf, sizeof buf, "full: mean %.6f variance %.6f\ncore-set: mean %.6f variance %.6f\n",
                      full.mean, full.variance, sub.mean, sub.variance);
        out.json("coreset.json", to_json(cs));
        out.file("report.txt", buf);
        if (out.has_dir()) {
          out.stream() << buf;
        } else {
          out.stream() << dump_json(to_json(cs));
        }
      });

  command<Trace>(
      app, ctx, "trace", "Train a softmax classifier and record per-example gradient norms",
      [](CLI::App* s, Trace& o) {
        add_data_input(s, o.data);
        s->add_option("--task", o.task, "Label task")->check(choice(task_names()));
        s->add_option("--seed", o.seed, "Shuffle seed");
        add_train_flags(s, o.train);
      },
      [](Trace& o, Common& c, Output& out) {
        const Dataset data = load(o.data);
        TrainConfig config = o.train;
        config.seed = o.seed;
        const Task task = *parse_task(o.task);
        const TrainResult result = train(data, task, config, {c.jobs, false});
        out.json("trace.json", to_json(result.trace, config));
        out.file("series/trace_" + o.task + ".csv",
                 series_to_csv("avg_grad_norm", result.trace.per_example_avg_norm));
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s task: training accuracy %.4f after %d epochs\n", o.task.c_str(),
                      accuracy(result.classifier, data, task), config.epochs);
        if (out.has_dir()) {
          out.stream() << buf;
        } else {
          out.stream() << dump_json(to_json(result.trace, config));
        }
      });

  command<Scores>(
      app, ctx, "scores", "Combine coarse and fine gradient traces into selection scores",
      [](CLI::App* s, Scores& o) {
        s->add_option("--trace-coarse", o.trace_coarse, "Coarse-task trace JSON")->required()->check(CLI::ExistingFile);
        s->add_option("--trace-fine", o.trace_fine, "Fine-task trace JSON")->required()->check(CLI::ExistingFile);
        s->add_option("--construction", o.construction, "Score construction")
            ->required()
            ->check(choice(construction_names()));
        s->add_option("--seed", o.seed, "Seed for the random construction");
      },
      [](Scores& o, Common&, Output& out) {
        const GradientTrace coarse = gradient_trace_from_json(read_json_file(o.trace_coarse));
        const GradientTrace fine = gradient_trace_from_json(read_json_file(o.trace_fine));
        const ScoreVector scores = make_scores(coarse, fine, *parse_construction(o.construction), o.seed);
        const std::string csv = series_to_csv("score", scores.scores);
        out.file("series/scores.csv", csv);
        if (!out.has_dir()) out.stream() << csv;
      });

  command<SelectBalanced>(
      app, ctx, "select-balanced", "Class-balanced bottom-k selection under the fine labels",
      [](CLI::App* s, SelectBalanced& o) {
        add_data_input(s, o.data);
        s->add_option("--scores", o.scores, "Score series CSV (index,score)")->required()->check(CLI::ExistingFile);
        s->add_option("--k", o.k, "Core-set size")->required()->check(kPositive);
      },
      [](SelectBalanced& o, Common&, Output& out) {
        const Dataset data = load(o.data);
        const auto scores = series_from_csv(read_text_file(o.scores), "score", o.scores);
        const auto& fine = data.categorical(Role::kFine);
        const CoreSet cs = class_balanced_select(scores, fine.labels, fine.num_classes, o.k, data.fingerprint());
        out.json("coreset.json", to_json(cs));
        if (out.has_dir()) {
          out.stream() << coreset_summary(cs);
        } else {
          out.stream() << dump_json(to_json(cs));
        }
      });

  command<EvalCoreset>(
      app, ctx, "eval-coreset", "Train coarse and fine classifiers on a core-set and score them",
      [](CLI::App* s, EvalCoreset& o) {
        add_data_input(s, o.train_data, "--train");
        s->add_option("--test", o.test, "Test dataset CSV")->required()->check(CLI::ExistingFile);
        s->add_option("--coreset", o.coreset, "Core-set JSON")->required()->check(CLI::ExistingFile);
        s->add_option("--label", o.label, "Construction label for the report");
        s->add_option("--seed", o.seed, "Shuffle seed");
        add_train_flags(s, o.train);
      },
      [](EvalCoreset& o, Common& c, Output& out) {
        const Dataset train_data = load(o.train_data);
        const Dataset test = load(o.train_data, o.test);
        const CoreSet cs = coreset_from_json(read_json_file(o.coreset));
        if (!cs.parent_fingerprint.empty() && cs.parent_fingerprint != train_data.fingerprint()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "core-set " + o.coreset + " was selected from a different dataset (fingerprint " +
                          cs.parent_fingerprint + ", --train has " + train_data.fingerprint() + ")");
        }
        TrainConfig config = o.train;
        config.seed = o.seed;
        const TaskPairReport report = evaluate_coreset(train_data, cs, test, config, o.label, c.jobs);
        const std::string text = render_text(report);
        out.json("report.json", task_pair_document(report));
        out.file("report.txt", text);
        out.stream() << text;
      });

  command<PipelineLinear>(
      app, ctx, "pipeline-linear", "Linear privacy core-set pipeline",
      [](CLI::App* s, PipelineLinear& o) {
        auto& c = o.config;
        s->add_option("--seed", c.seed, "Root seed");
        s->add_option("--n", c.n, "Rows")->check(kPositive);
        s->add_option("--d", c.d, "Features")->check(kPositive);
        s->add_option("--noise-sd", c.noise_sd, "Label noise standard deviation")->check(kPositive);
        s->add_option("--k", c.k, "Core-set size")->check(kPositive);
        s->add_option("--hide", o.hide, "Hide mode")->check(choice(hide_names()));
        s->add_option("--alpha", c.alpha, "Hide weight")->check(kNonNegative);
        s->add_option("--plant-label", o.plant_label, "Column the plant residual is measured on")
            ->check(choice(plant_label_names()));
        s->add_option("--holdout", c.holdout, "Held-out fraction (0 disables)")->check(CLI::Range(0.0, 0.99));
        s->add_option("--seeds", o.seeds, "Number of consecutive seeds to run")->check(kPositive);
      },
      [](PipelineLinear& o, Common& c, Output& out) {
        LinearPipelineConfig config = o.config;
        config.mode = *parse_hide_mode(o.hide);
        config.plant_label = *parse_plant_label(o.plant_label);
        std::string text;
        if (o.seeds > 1) {
          const MultiSeedReport report = run_linear_multi(config, o.seeds, c.jobs);
          text = render_text(report);
          out.json("report.json", to_json(report));
        } else {
          const LinearPipelineReport report = run_linear_pipeline(config, c.jobs);
          text = render_text(report);
          const Dataset data = linear_pipeline_dataset(config);
          write_dataset(out, data);
          out.json("coreset.json", to_json(report.coreset));
          out.json("report.json", to_json(report));
          std::vector<double> flags(data.n(), 0.0);
          for (std::size_t i : report.coreset.indices) flags[i] = 1.0;
          out.file("series/in_coreset.csv", series_to_csv("in_coreset", flags));
        }
        out.file("report.txt", text);
        out.stream() << text;
      });

  command<PipelineMask>(
      app, ctx, "pipeline-mask", "Gradient-norm masking pipeline with bucket sweep",
      [](CLI::App* s, PipelineMask& o) {
        auto& c = o.config;
        s->add_option("--seed", c.seed, "Root seed");
        add_hier_flags(s, c.hierarchy);
        s->add_option("--test-fraction", c.test_fraction, "Stratified test fraction")
            ->check(CLI::Range(0.01, 0.99));
        s->add_option("--k", c.k, "Core-set size")->check(kPositive);
        s->add_option("--constructions", o.constructions, "Score constructions (default: all)")
            ->check(choice(construction_names()));
        add_train_flags(s, c.train);
        s->add_option("--buckets", c.buckets, "Norm buckets for the sweep (0 skips)")->check(kNonNegative);
        s->add_option("--bucket-task", o.bucket_task, "Trace used to sort buckets")->check(choice(task_names()));
        s->add_option("--seeds", o.seeds, "Number of consecutive seeds to run")->check(kPositive);
      },
      [](PipelineMask& o, Common& c, Output& out) {
        MaskPipelineConfig config = o.config;
        config.bucket_task = *parse_task(o.bucket_task);
        if (!o.constructions.empty()) {
          config.constructions.clear();
          for (const auto& name : o.constructions) config.constructions.push_back(*parse_construction(name));
        }
        std::string text;
        if (o.seeds > 1) {
          const MultiSeedReport report = run_mask_multi(config, o.seeds, c.jobs);
          text = render_text(report);
          out.json("report.json", to_json(report));
        } else {
          MaskArtifacts artifacts;
          const MaskPipelineReport report = run_mask_pipeline(config, c.jobs, &artifacts);
          text = render_text(report);
          write_dataset(out, gen_hierarchical(config.seed, config.hierarchy));
          out.json("report.json", to_json(report));
          out.file("series/trace_coarse.csv",
                   series_to_csv("avg_grad_norm", artifacts.coarse.trace.per_example_avg_norm));
          out.file("series/trace_fine.csv",
                   series_to_csv("avg_grad_norm", artifacts.fine.trace.per_example_avg_norm));
          std::vector<double> acc;
          for (const auto& b : report.buckets) acc.push_back(b.fine_acc);
          if (!acc.empty()) out.file("series/bucket_fine_acc.csv", series_to_csv("fine_acc", acc));
        }
        out.file("report.txt", text);
        out.stream() << text;
      });

  command<ReportCmd>(
      app, ctx, "report", "Render a report JSON as text",
      [](CLI::App* s, ReportCmd& o) {
        s->add_option("--in", o.in, "Report JSON")->required()->check(CLI::ExistingFile);
      },
      [](ReportCmd& o, Common&, Output& out) {
        const std::string text = render_text(read_json_file(o.in));
        out.file("report.txt", text);
        out.stream() << text;
      });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy-preserving core-set construction", "privcore"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "JSON file of option values (flags take precedence)");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  Context ctx;
  register_commands(app, ctx);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run '" << app.get_name() << " --help' for usage\n";
    return kExitUsage;
  }

  std::optional<fs::path> dir;
  try {
    const Json echo = resolved_config(*ctx.sub);
    std::string out_dir;
    if (auto* opt = ctx.sub->get_option_no_throw("--out"); opt != nullptr && opt->count() > 0) {
      out_dir = opt->as<std::string>();
    }
    if (!out_dir.empty()) dir = fs::path(out_dir);
    Output output(dir, out);
    if (dir) output.json("config.json", echo);
    ctx.action(output);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace privcore::cli
