// texgeo command-line frontend.
//
// Exit codes: 0 success, 2 I/O error, 3 feature-extraction error,
// 4 configuration or database mismatch, 5 solver non-convergence.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "texgeo/texgeo.hpp"

namespace {

using namespace texgeo;

enum Exit { kOk = 0, kIo = 2, kExtract = 3, kConfig = 4, kSolver = 5 };

std::string fmt(double v) { return detail::format_double(v, kReportDigits); }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const DecodeError*>(&e) ||
      dynamic_cast<const UnsupportedFormat*>(&e))
    return kIo;
  if (dynamic_cast<const ConvergenceError*>(&e)) return kSolver;
  return kConfig;
}

int fail(int code, const std::string& msg) {
  std::cerr << "texgeo: " << msg << '\n';
  return code;
}

// Common dataset / model flags.
struct ModelFlags {
  std::string family = "gamma";
  int levels = 3;
  std::string edge_weight = "sqrt2skld";
  std::string aggregation = "sum";

  void add(CLI::App* app) {
    app->add_option("--family", family, "gamma or weibull")->capture_default_str();
    app->add_option("--levels", levels, "DTCWT decomposition levels")->check(CLI::Range(1, 5))->capture_default_str();
    app->add_option("--edge-weight", edge_weight, "graph edge weight: skld, sqrt2skld, kld")->capture_default_str();
    app->add_option("--aggregation", aggregation, "subband aggregation: sum or l2")->capture_default_str();
  }

  DbConfig config() const {
    DbConfig c;
    c.family = family_from_string(family);
    c.levels = levels;
    c.edge_weight = edge_weight_from_string(edge_weight);
    c.aggregation = aggregation_from_string(aggregation);
    return c;
  }
};

struct DatasetFlags {
  std::string root;
  std::string layout = "dir";
  std::string manifest;

  void add(CLI::App* app, bool required) {
    auto* o = app->add_option("--dataset", root, "dataset root directory");
    if (required) o->required();
    app->add_option("--layout", layout, "dir (one directory per class) or prefix (manifest of name prefixes)")
        ->capture_default_str();
    app->add_option("--manifest", manifest, "prefix manifest (default <dataset>/classes.txt)");
  }

  DatasetIndex ingest() const { return ingest_dataset(root, layout_from_string(layout), manifest); }
};

// ---------------------------------------------------------------------------

struct ExtractCmd {
  DatasetFlags data;
  ModelFlags model;
  std::string db_path;
  unsigned workers = 0;
  bool skip_bad = false;

  int run() const {
    DbConfig cfg;
    DatasetIndex idx;
    try {
      cfg = model.config();
      idx = data.ingest();
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }
    for (const auto& w : idx.warnings) std::cerr << "warning: " << w << '\n';

    const std::size_t n = idx.size();
    std::vector<std::optional<Signature>> sigs(n);
    std::vector<std::string> errors(n);
    parallel_for(n, workers, [&](std::size_t i) {
      try {
        sigs[i] = extract_signature(load_image(idx.items[i].path), cfg.family, cfg.levels);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });

    SignatureDB db(cfg);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sigs[i]) {
        db.put(idx.items[i].id, idx.items[i].label, *sigs[i]);
        std::cerr << "[" << i + 1 << "/" << n << "] " << idx.items[i].id << '\n';
      } else {
        ++failed;
        std::cerr << "[" << i + 1 << "/" << n << "] " << idx.items[i].id << " FAILED: " << errors[i] << '\n';
      }
    }
    if (failed && !skip_bad) return fail(kExtract, std::to_string(failed) + " image(s) failed; use --skip-bad to continue");
    if (db.size() == 0) return fail(kExtract, "no signatures extracted");
    try {
      save_db(db, db_path);
    } catch (const std::exception& e) {
      return fail(kIo, e.what());
    }
    std::cerr << "wrote " << db.size() << " signatures to " << db_path << '\n';
    return kOk;
  }
};

struct EvaluateCmd {
  DatasetFlags data;
  std::string db_path;
  std::vector<std::string> methods = {"KLD", "SKLD", "GDSKLD", "GDFloyd"};
  std::size_t K = 0;
  bool exclude_query = false;
  std::string family, edge_weight, aggregation;
  int levels = 0;
  std::string arr_csv, pr_csv, json_out;
  unsigned workers = 0;

  int run() const {
    SignatureDB db;
    DatasetIndex idx;
    std::vector<Method> ms;
    EvalOptions opt;
    try {
      db = load_db(db_path);
      idx = data.root.empty() ? index_from_db(db) : data.ingest();
      for (const auto& m : methods) ms.push_back(method_from_string(m));
      if (!family.empty()) opt.expected_family = family_from_string(family);
      if (levels) opt.expected_levels = levels;
      if (!edge_weight.empty() || !aggregation.empty()) {
        DbConfig cfg = db.config();
        if (!edge_weight.empty()) cfg.edge_weight = edge_weight_from_string(edge_weight);
        if (!aggregation.empty()) cfg.aggregation = aggregation_from_string(aggregation);
        SignatureDB re(cfg);
        for (const auto& e : db.entries()) re.put(e.id, e.label, e.signature);
        db = re;
      }
    } catch (const std::exception& e) {
      return fail(kConfig, e.what());
    }
    for (const auto& w : idx.warnings) std::cerr << "warning: " << w << '\n';
    opt.include_query = !exclude_query;
    opt.workers = workers;

    std::vector<RetrievalReport> reports;
    std::vector<PrCurve> curves;
    try {
      for (Method m : ms) {
        const auto R = rank_dataset(db, idx, m, opt);
        std::size_t k = K;
        if (k == 0)
          for (const auto& q : R.queries) k = std::max(k, q.relevant);
        reports.push_back(report_at(R, k));
        curves.push_back(pr_curve(R));
      }
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }

    const std::string col = std::to_string(db.config().levels) + "-level";
    std::printf("%-10s %4s %10s\n", "method", "K", col.c_str());
    for (const auto& r : reports) std::printf("%-10s %4zu %10.2f\n", r.method.c_str(), r.K, 100.0 * r.arr);

    try {
      if (!arr_csv.empty()) write_arr_csv(reports, arr_csv);
      if (!pr_csv.empty()) write_pr_csv(curves, pr_csv);
      if (!json_out.empty()) write_report_json(reports, curves, json_out);
    } catch (const std::exception& e) {
      return fail(kIo, e.what());
    }
    return kOk;
  }
};

struct SynthCmd {
  std::string out;
  int classes = 5;
  int per_class = 8;
  std::size_t size = 128;
  std::uint64_t seed = 1;
  std::string preset = "separated";

  int run() const {
    try {
      SynthOptions o;
      o.classes = classes;
      o.per_class = per_class;
      o.size = size;
      o.seed = seed;
      o.preset = synth_preset_from_string(preset);
      const auto paths = write_synth_dataset(out, o);
      std::cerr << "wrote " << paths.size() << " images to " << out << '\n';
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }
    return kOk;
  }
};

struct GeoCmd {
  std::string family = "gamma";
  std::vector<double> p, q;
  int steps = 256;
  std::size_t samples = 1025;

  int run() const {
    std::optional<ManifoldPoint> a, b;
    try {
      const Family f = family_from_string(family);
      a.emplace(f, Vec2{p.at(0), p.at(1)});
      b.emplace(f, Vec2{q.at(0), q.at(1)});
    } catch (const std::exception& e) {
      return fail(kConfig, e.what());
    }
    int code = kOk;
    auto line = [](const char* name, double v) { std::printf("%-14s %s\n", name, fmt(v).c_str()); };
    try {
      const double pq = kld(*a, *b), qp = kld(*b, *a), s = skld(*a, *b);
      line("kld_pq", pq);
      line("kld_qp", qp);
      line("skld", s);
      line("sqrt2skld", std::sqrt(2.0 * s));
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }
    try {
      GeodesicOptions g;
      g.steps = steps;
      line("geodesic", solve_geodesic(*a, *b, g).distance);
    } catch (const std::exception& e) {
      line("geodesic", std::nan(""));
      std::cerr << "texgeo: geodesic: " << e.what() << '\n';
      code = exit_code_for(e) == kConfig ? kSolver : exit_code_for(e);
    }
    line("straight_line", path_length(straight_line_path(*a, *b, samples)));
    return code;
  }
};

struct FwCmd {
  std::string in, out;
  unsigned workers = 0;

  int run() const {
    try {
      const auto D = read_matrix(in);
      FloydWarshallOptions opt;
      opt.workers = workers;
      const auto S = floyd_warshall(D, opt);
      write_matrix(DistanceMatrix(S.dist.size(), S.dist.values(), D.labels()), out);
      std::cerr << "closed " << D.size() << "x" << D.size() << " matrix into " << out << '\n';
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }
    return kOk;
  }
};

struct ValidateCmd {
  std::string in;
  bool closure = false;

  int run() const {
    try {
      auto D = read_matrix(in);
      if (closure) D = floyd_warshall(D).dist;
      const auto r = validate_metricity(D);
      std::printf("size %zu\n", D.size());
      std::printf("triangle_violations %zu\n", r.triangle_violations);
      std::printf("max_triangle_violation %s\n", fmt(r.max_triangle_violation).c_str());
      std::printf("symmetry_defect %s\n", fmt(r.symmetry_defect).c_str());
      std::printf("identity_violations %zu\n", r.identity_violations);
      std::printf("zero_off_diagonal %zu\n", r.zero_off_diagonal);
      std::printf("metric %s\n", r.ok() ? "yes" : "no");
    } catch (const std::exception& e) {
      return fail(exit_code_for(e), e.what());
    }
    return kOk;
  }
};

// Plain keys in a --config file belong to the subcommand being run.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) return items;
    for (auto& it : items)
      if (it.parents.empty()) it.parents.push_back(subs.front()->get_name());
    return items;
  }

 private:
  const CLI::App* app_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture retrieval on statistical manifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));

  ExtractCmd extract;
  auto* ex = app.add_subcommand("extract", "extract DTCWT signatures for a dataset into a signature database");
  extract.data.add(ex, true);
  extract.model.add(ex);
  ex->add_option("--db", extract.db_path, "output database (JSON)")->required();
  ex->add_option("--workers", extract.workers, "worker threads (0 = all cores)");
  ex->add_flag("--skip-bad", extract.skip_bad, "leave out images that fail instead of exiting with code 3");

  EvaluateCmd evaluate;
  auto* ev = app.add_subcommand("evaluate", "rank every image against the database and report ARR and PR curves");
  ev->add_option("--db", evaluate.db_path, "signature database")->required();
  evaluate.data.add(ev, false);
  ev->add_option("--methods", evaluate.methods, "KLD, SKLD, GDSKLD, GDFloyd")->delimiter(',')->capture_default_str();
  ev->add_option("--K", evaluate.K, "retrieved items per query (default: N_R)");
  ev->add_flag("--exclude-query", evaluate.exclude_query, "leave the query out of its own ranking");
  ev->add_option("--family", evaluate.family, "expected family; mismatch exits with code 4");
  ev->add_option("--levels", evaluate.levels, "expected levels; mismatch exits with code 4");
  ev->add_option("--edge-weight", evaluate.edge_weight, "override the database graph edge weight");
  ev->add_option("--aggregation", evaluate.aggregation, "override the database subband aggregation");
  ev->add_option("--arr-csv", evaluate.arr_csv, "write method,K,ARR rows");
  ev->add_option("--pr-csv", evaluate.pr_csv, "write method,N,precision,recall rows");
  ev->add_option("--json", evaluate.json_out, "write reports with per-query hit counts");
  ev->add_option("--workers", evaluate.workers, "worker threads (0 = all cores)");

  SynthCmd synth;
  auto* sy = app.add_subcommand("synth", "write a seeded synthetic texture dataset");
  sy->add_option("--out", synth.out, "output directory")->required();
  sy->add_option("--classes", synth.classes)->capture_default_str();
  sy->add_option("--per-class", synth.per_class)->capture_default_str();
  sy->add_option("--size", synth.size, "image side in pixels")->capture_default_str();
  sy->add_option("--seed", synth.seed)->capture_default_str();
  sy->add_option("--preset", synth.preset, "separated or overlapping")->capture_default_str();

  GeoCmd geo;
  auto* ge = app.add_subcommand("geo", "divergences and distances between two parameter points");
  ge->add_option("--family", geo.family)->capture_default_str();
  ge->add_option("--p", geo.p, "first point: scale,shape")->delimiter(',')->expected(2)->required();
  ge->add_option("--q", geo.q, "second point: scale,shape")->delimiter(',')->expected(2)->required();
  ge->add_option("--steps", geo.steps, "integration steps for the geodesic")->capture_default_str();

  FwCmd fw;
  auto* f = app.add_subcommand("fw", "all-pairs shortest paths of a distance-matrix file");
  f->add_option("--in", fw.in, "matrix file (CSV or DMAT)")->required();
  f->add_option("--out", fw.out, "output matrix (.dmat/.bin for binary, CSV otherwise)")->required();
  f->add_option("--workers", fw.workers, "worker threads (0 = all cores)");

  ValidateCmd validate;
  auto* va = app.add_subcommand("validate", "metricity report for a distance-matrix file");
  va->add_option("--in", validate.in, "matrix file (CSV or DMAT)")->required();
  va->add_flag("--closure", validate.closure, "validate the Floyd-Warshall closure instead of the input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (ex->parsed()) return extract.run();
  if (ev->parsed()) return evaluate.run();
  if (sy->parsed()) return synth.run();
  if (ge->parsed()) return geo.run();
  if (f->parsed()) return fw.run();
  return validate.run();
}
