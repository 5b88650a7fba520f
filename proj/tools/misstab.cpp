// misstab: assess, fit and bootstrap incomplete contingency tables.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "misstab/bootstrap.hpp"
#include "misstab/datasets.hpp"
#include "misstab/fit.hpp"
#include "misstab/mar_bounds.hpp"
#include "misstab/odds.hpp"
#include "misstab/report.hpp"
#include "misstab/table_io.hpp"

using namespace misstab;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string dataset, file;
  std::string model = "all";
  std::string df_convention = "poisson-cells";
  std::string association = "saturated";
  std::string sampling = "multinomial";
  std::string format = "text";
  double tol = 1e-10;
  bool tol_from_env = false;
  int max_iter = 10000;
  std::int64_t reps = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool no_closed_form = false;
};

IncompleteTable load(const RunConfig& cfg) {
  if (cfg.dataset.empty() == cfg.file.empty()) throw CLI::ValidationError("exactly one of --dataset or --file is required");
  return cfg.dataset.empty() ? load_table_file(cfg.file) : builtin_dataset(cfg.dataset);
}

FitOptions fit_options(const RunConfig& cfg) {
  FitOptions o;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.df = parse_df_convention(cfg.df_convention);
  o.closed_form = !cfg.no_closed_form;
  return o;
}

std::string source(const RunConfig& cfg) { return cfg.dataset.empty() ? "file " + cfg.file : "dataset " + cfg.dataset; }

json header_json(const std::string& command, const RunConfig& cfg) {
  json h{{"command", command}, {"source", source(cfg)}};
  if (command == "fit" || command == "bootstrap") {
    h["tol"] = cfg.tol;
    h["tol_source"] = cfg.tol_from_env ? "MISSTAB_TOL" : "default/flag";
    h["max_iter"] = cfg.max_iter;
    h["df_convention"] = cfg.df_convention;
    h["y_association"] = cfg.association;
  }
  return h;
}

void header_text(const std::string& command, const RunConfig& cfg) {
  std::cout << "# misstab " << command << ": " << source(cfg);
  if (command == "fit" || command == "bootstrap") {
    std::cout << ", tol " << cfg.tol << (cfg.tol_from_env ? " (from MISSTAB_TOL)" : "") << ", max-iter "
              << cfg.max_iter << ", df " << cfg.df_convention << ", Y association " << cfg.association;
  }
  std::cout << "\n";
}

void cmd_assess(const RunConfig& cfg) {
  const auto table = load(cfg);
  const auto verdict = assess(table);
  if (cfg.format == "json") {
    json out = header_json("assess", cfg);
    out["N"] = table.total();
    out["shape"] = std::string(to_string(table.schema().shape()));
    out["assessment"] = verdict_json(verdict, table.schema());
    std::cout << out.dump(2) << "\n";
  } else {
    header_text("assess", cfg);
    std::cout << "N = " << table.total() << ", shape " << to_string(table.schema().shape()) << "\n";
    std::cout << verdict_text(verdict, table.schema());
  }
}

void cmd_fit(const RunConfig& cfg) {
  const auto table = load(cfg);
  table.schema().require_supported();
  const auto opts = fit_options(cfg);
  const auto assoc = parse_y_association(cfg.association);
  std::vector<FitResult> fits;
  if (cfg.model == "all") {
    fits = fit_all(table, opts, assoc);
  } else {
    fits.push_back(fit_model(find_model(table.schema(), cfg.model, assoc), table, opts));
  }
  if (cfg.format == "json") {
    json out = header_json("fit", cfg);
    out["fits"] = json::array();
    for (const auto& f : fits) {
      auto j = fit_json(f);
      j["mar_bounds"] = mar_bounds_json(mar_bounds(f), table.schema());
      out["fits"].push_back(j);
    }
    const int best = best_non_perfect(fits);
    out["best_non_perfect"] = best >= 0 ? json(fits[static_cast<std::size_t>(best)].model.id) : json(nullptr);
    std::cout << out.dump(2) << "\n";
    return;
  }
  header_text("fit", cfg);
  std::cout << fits_text(fits);
  if (fits.size() == 1) {
    std::cout << fit_detail_text(fits[0]);
    const auto bounds = mar_bounds(fits[0]);
    if (!bounds.bounds.empty()) std::cout << mar_bounds_text(bounds, table.schema());
  }
}

void cmd_bootstrap(const RunConfig& cfg) {
  if (cfg.model == "all") throw CLI::ValidationError("bootstrap needs a single --model");
  const auto table = load(cfg);
  table.schema().require_supported();
  BootstrapOptions opts;
  opts.replicates = cfg.reps;
  opts.seed = cfg.seed;
  opts.sampling = parse_sampling(cfg.sampling);
  opts.fit = fit_options(cfg);
  opts.association = parse_y_association(cfg.association);
  const auto summary = bootstrap_assess(cfg.model, table, opts);
  if (cfg.format == "json") {
    json out = header_json("bootstrap", cfg);
    out["bootstrap"] = bootstrap_json(summary, table.schema());
    std::cout << out.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    std::cout << bootstrap_csv(summary, table.schema());
  } else {
    header_text("bootstrap", cfg);
    std::cout << bootstrap_text(summary, table.schema());
  }
}

void cmd_datasets(const RunConfig& cfg, const std::string& show) {
  if (!show.empty()) {
    const auto table = builtin_dataset(show);
    std::cout << (cfg.format == "csv" ? to_csv_text(table) : to_json_text(table) + "\n");
    return;
  }
  if (cfg.format == "json") {
    json out = json::array();
    for (const auto& d : builtin_datasets()) out.push_back({{"name", d.name}, {"description", d.description}});
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& d : builtin_datasets()) std::cout << d.name << "  " << d.description << "\n";
}

void cmd_catalog(const RunConfig& cfg) {
  const auto table = load(cfg);
  const auto& schema = table.schema();
  schema.require_supported();
  const auto assoc = parse_y_association(cfg.association);
  const auto conv = parse_df_convention(cfg.df_convention);
  if (cfg.format == "json") {
    json out = header_json("catalog", cfg);
    out["models"] = catalog_json(schema, assoc, conv);
    std::cout << out.dump(2) << "\n";
  } else {
    header_text("catalog", cfg);
    std::cout << catalog_text(schema, assoc, conv);
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  if (const char* env = std::getenv("MISSTAB_TOL")) {
    try {
      cfg.tol = std::stod(env);
      cfg.tol_from_env = true;
    } catch (const std::exception&) {
      std::cerr << "error: MISSTAB_TOL is not a number: " << env << "\n";
      return 1;
    }
  }

  CLI::App app{"Missing-data mechanism assessment for incomplete contingency tables"};
  app.require_subcommand(1);
  app.add_option("--threads", cfg.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.dataset, "builtin dataset name");
    sub->add_option("--file", cfg.file, "table file (.json or .csv)")->check(CLI::ExistingFile);
  };
  auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember(allowed));
  };
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model id, or 'all'");
    sub->add_option("--df-convention", cfg.df_convention)->check(CLI::IsMember({"poisson-cells", "multinomial"}));
    sub->add_option("--y-association", cfg.association)->check(CLI::IsMember({"saturated", "pairwise"}));
    auto* tol = sub->add_option("--tol", cfg.tol, "relative log-likelihood tolerance");
    tol->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.max_iter)->check(CLI::PositiveNumber);
    sub->add_flag("--no-closed-form", cfg.no_closed_form, "always use EM");
    return tol;
  };

  auto* assess_cmd = app.add_subcommand("assess", "odds-based assessment of the missing-data mechanism");
  add_source(assess_cmd);
  add_format(assess_cmd, {"text", "json"});

  auto* fit_cmd = app.add_subcommand("fit", "fit nonresponse models");
  add_source(fit_cmd);
  add_format(fit_cmd, {"text", "json"});
  auto* fit_tol = add_fit(fit_cmd);

  auto* boot_cmd = app.add_subcommand("bootstrap", "parametric bootstrap of the assessment");
  add_source(boot_cmd);
  add_format(boot_cmd, {"text", "json", "csv"});
  auto* boot_tol = add_fit(boot_cmd);
  boot_cmd->add_option("--reps", cfg.reps)->check(CLI::PositiveNumber);
  boot_cmd->add_option("--seed", cfg.seed);
  boot_cmd->add_option("--sampling", cfg.sampling)->check(CLI::IsMember({"multinomial", "poisson"}));

  std::string show;
  auto* data_cmd = app.add_subcommand("datasets", "list builtin datasets, or print one");
  data_cmd->add_option("--show", show, "dataset to print");
  add_format(data_cmd, {"text", "json", "csv"});

  auto* cat_cmd = app.add_subcommand("catalog", "list the models for a table's shape");
  add_source(cat_cmd);
  add_format(cat_cmd, {"text", "json"});
  cat_cmd->add_option("--df-convention", cfg.df_convention)->check(CLI::IsMember({"poisson-cells", "multinomial"}));
  cat_cmd->add_option("--y-association", cfg.association)->check(CLI::IsMember({"saturated", "pairwise"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  // an explicit --tol wins over the environment
  if (fit_tol->count() || boot_tol->count()) cfg.tol_from_env = false;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

  try {
    if (*assess_cmd) cmd_assess(cfg);
    if (*fit_cmd) cmd_fit(cfg);
    if (*boot_cmd) cmd_bootstrap(cfg);
    if (*data_cmd) cmd_datasets(cfg, show);
    if (*cat_cmd) cmd_catalog(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ComputationError& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    // DataError, ShapeError and file errors
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
