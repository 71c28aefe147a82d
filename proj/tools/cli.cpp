#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "circlecomm/bisect.hpp"
#include "circlecomm/community.hpp"
#include "circlecomm/detect.hpp"
#include "circlecomm/error.hpp"
#include "circlecomm/evaluation.hpp"
#include "circlecomm/graph.hpp"
#include "circlecomm/impulse.hpp"
#include "circlecomm/trace.hpp"

namespace circlecomm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown for problems with the data a command reads (exit code 2).
struct InputError : Error {
  using Error::Error;
};

const std::map<std::string, Likelihood> likelihood_names{{"bernoulli", Likelihood::bernoulli},
                                                         {"poisson", Likelihood::poisson}};
const std::map<std::string, ImpulseKind> kind_names{{"sequential", ImpulseKind::sequential},
                                                    {"instantaneous", ImpulseKind::instantaneous}};
const std::map<std::string, BroadcastEdges> broadcast_names{{"clique", BroadcastEdges::clique},
                                                            {"star", BroadcastEdges::star}};
const std::map<std::string, AdjacencyMode> mode_names{{"binary", AdjacencyMode::binary},
                                                      {"count", AdjacencyMode::count}};
const std::map<std::string, PairEstimator> estimator_names{
    {"conditional", PairEstimator::conditional_mean}, {"literal", PairEstimator::literal_sum}};
const std::map<std::string, PairEstimate> pair_estimate_names{
    {"mean", PairEstimate::posterior_mean}, {"final", PairEstimate::final_sample}};

template <class E>
std::string name_of(const std::map<std::string, E>& names, E value) {
  for (const auto& [k, v] : names)
    if (v == value) return k;
  return "?";
}

template <class E>
CLI::Option* add_choice(CLI::App* app, const std::string& flag, E& target,
                        const std::map<std::string, E>& names, const std::string& help) {
  return app->add_option(flag, target, help)
      ->transform(CLI::CheckedTransformer(names, CLI::ignore_case))
      ->default_str(name_of(names, target));
}

struct ModelOptions {
  ModelConfig model;
  McmcConfig mcmc;

  void add(CLI::App* app) {
    add_choice(app, "--likelihood", model.likelihood, likelihood_names,
               "Pair likelihood; poisson reads edge weights as counts");
    app->add_option("--lambda", model.lambda, "Poisson rate scale")->capture_default_str();
    app->add_option("--iterations", mcmc.iterations, "Sweeps per chain")->capture_default_str();
    app->add_option("--burn-in", mcmc.burn_in, "Sweeps discarded before sampling")
        ->capture_default_str();
    app->add_option("--thinning", mcmc.thinning, "Keep every n-th sweep after burn-in")
        ->capture_default_str();
    app->add_option("--step", mcmc.proposal_step, "Half-width of the local proposal, radians")
        ->capture_default_str();
    app->add_option("--jump-prob", mcmc.jump_probability, "Jump-move probability per sweep")
        ->capture_default_str();
  }

  json to_json() const {
    return {{"likelihood", name_of(likelihood_names, model.likelihood)},
            {"lambda", model.lambda},
            {"sharpness_k", model.sharpness_k},
            {"iterations", mcmc.iterations},
            {"burn_in", mcmc.burn_in},
            {"thinning", mcmc.thinning},
            {"step", mcmc.proposal_step},
            {"jump_prob", mcmc.jump_probability}};
  }
};

AdjacencyMode mode_for(Likelihood l) {
  return l == Likelihood::poisson ? AdjacencyMode::count : AdjacencyMode::binary;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  body(out);
  out.flush();
  if (!out) throw Error("error writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) {
  write_file(path, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
}

json graph_summary(const Graph& g) {
  return {{"n", g.size()}, {"edges", g.edge_count()}, {"mode", to_string(g.mode())}};
}

unsigned resolve_threads(unsigned threads) {
  if (threads) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- detect ---------------------------------------------------------------

struct DetectCommand {
  std::string input;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::optional<std::size_t> k;
  DetectConfig cfg;
  ModelOptions opts;

  void add(CLI::App* app) {
    app->add_option("input,--input", input, "Graph file (.gml, .json or edge list)")->required();
    app->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    app->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads, 0 for all cores")->capture_default_str();
    app->add_option("--impulses", cfg.n_impulses, "Number of simulated spreads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--size", cfg.target_size, "Spread size, 0 for max(8, ceil(n / communities))")
        ->capture_default_str();
    app->add_option("--communities", cfg.expected_communities,
                    "Expected number of communities for the default spread size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--steps-per-target", cfg.steps_per_target,
                    "Walk-step cap per spread, as a multiple of its size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--k", k, "Cut the dendrogram at k communities instead of maximizing Q")
        ->check(CLI::PositiveNumber);
    app->add_option("--sharpness-k", opts.model.sharpness_k, "Link exponent")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_choice(app, "--estimator", cfg.estimator, estimator_names, "Pair aggregation");
    add_choice(app, "--pair-estimate", cfg.pair_estimate, pair_estimate_names,
               "Per-chain pair probability");
    opts.add(app);
  }

  int run(std::ostream& out, std::ostream& err) {
    cfg.model = opts.model;
    cfg.mcmc = opts.mcmc;
    cfg.forced_k = k;
    const Graph g = read_graph(input, mode_for(cfg.model.likelihood));
    const fs::path dir(out_dir);
    prepare_dir(dir);

    const DetectResult r = detect_communities(g, cfg, resolve_threads(threads));
    const double unsupported = r.pairs.unsupported_fraction();
    if (unsupported > 0.10)
      err << "warning: " << static_cast<int>(unsupported * 100 + 0.5)
          << "% of vertex pairs never shared a spread; raise --impulses or --size\n";

    write_json(dir / "partition.json", to_json(r.partition, &g, r.modularity));
    write_file(dir / "dendrogram.nwk", [&](std::ostream& o) { write_newick(o, r.tree, g); });
    write_file(dir / "dendrogram.dot", [&](std::ostream& o) { write_dendrogram_dot(o, r.tree, g); });
    write_file(dir / "pairs.csv", [&](std::ostream& o) { write_pair_csv(o, r.pairs, g, cfg.estimator); });

    json params = opts.to_json();
    params["impulses"] = cfg.n_impulses;
    params["size"] = cfg.resolved_target_size(g.size());
    params["communities"] = cfg.expected_communities;
    params["steps_per_target"] = cfg.steps_per_target;
    params["estimator"] = name_of(estimator_names, cfg.estimator);
    params["pair_estimate"] = name_of(pair_estimate_names, cfg.pair_estimate);
    params["k"] = k ? json(*k) : json(nullptr);
    json result{{"k", r.partition.k},
                {"modularity", r.modularity},
                {"best_k", r.best.partition.k},
                {"best_modularity", r.best.modularity},
                {"modularity_scan", r.best.scan},
                {"unsupported_fraction", unsupported},
                {"mean_acceptance", r.mean_acceptance},
                {"mean_jump_acceptance", r.mean_jump_acceptance}};
    write_json(dir / "manifest.json",
               {{"command", "detect"},
                {"input", input},
                {"graph", graph_summary(g)},
                {"seed", cfg.seed},
                {"parameters", params},
                {"result", result},
                {"outputs", {"partition.json", "dendrogram.nwk", "dendrogram.dot", "pairs.csv"}}});
    out << json{{"k", r.partition.k}, {"modularity", r.modularity}}.dump() << '\n';
    return ok;
  }
};

// ---- bisect ---------------------------------------------------------------

struct BisectCommand {
  std::string input;
  std::string out_dir = ".";
  BisectConfig cfg;
  ModelOptions opts;

  void add(CLI::App* app) {
    app->add_option("input,--input", input, "Graph file (.gml, .json or edge list)")->required();
    app->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    app->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app->add_option("--sharpness-k", cfg.sharpness_k, "Link exponent of every level's chain")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-group-size", cfg.max_group_size, "Groups this small are not split")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    app->add_option("--steps-per-vertex", cfg.steps_per_vertex,
                    "Walk-step cap of a level's spread, per group vertex")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    opts.add(app);
  }

  int run(std::ostream& out, std::ostream&) {
    cfg.likelihood = opts.model.likelihood;
    cfg.lambda = opts.model.lambda;
    cfg.mcmc = opts.mcmc;
    const Graph g = read_graph(input, mode_for(cfg.likelihood));
    const fs::path dir(out_dir);
    prepare_dir(dir);

    const BisectResult r = recursive_bisect(g, cfg);
    json part = to_json(r.leaves, &g, 0.0);
    std::optional<double> q;
    if (g.total_weight() > 0) q = modularity(g, r.leaves);
    part["modularity"] = q ? json(*q) : json(nullptr);
    write_json(dir / "partition.json", part);
    write_file(dir / "dendrogram.nwk", [&](std::ostream& o) { write_newick(o, r.tree, g); });
    write_file(dir / "dendrogram.dot", [&](std::ostream& o) { write_dendrogram_dot(o, r.tree, g); });

    json params = opts.to_json();
    params["sharpness_k"] = cfg.sharpness_k;
    params["max_group_size"] = cfg.max_group_size;
    params["steps_per_vertex"] = cfg.steps_per_vertex;
    write_json(dir / "manifest.json",
               {{"command", "bisect"},
                {"input", input},
                {"graph", graph_summary(g)},
                {"seed", cfg.seed},
                {"parameters", params},
                {"result",
                 {{"k", r.leaves.k}, {"modularity", part["modularity"]}, {"acceptance", r.acceptance}}},
                {"outputs", {"partition.json", "dendrogram.nwk", "dendrogram.dot"}}});
    out << json{{"k", r.leaves.k}, {"modularity", part["modularity"]}}.dump() << '\n';
    return ok;
  }
};

// ---- synth ----------------------------------------------------------------

struct SynthCommand {
  std::string out_path;
  std::string truth_path;
  std::string traces_path;
  int clusters = 4;
  int size = 3;
  std::vector<int> sizes;
  std::vector<double> centers;
  SynthesisConfig cfg;
  ModelConfig model;

  void add(CLI::App* app) {
    app->add_option("-o,--out", out_path, "Graph file; .gml, .json or edge list by extension")
        ->required();
    app->add_option("--truth", truth_path,
                    "Ground-truth partition file (default <out>.truth.json for edge lists)");
    app->add_option("--traces", traces_path, "Also write the impulse traces as JSON lines");
    app->add_option("--clusters", clusters, "Number of equally spaced clusters")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--size", size, "Vertices per cluster")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--sizes", sizes, "Per-cluster sizes, overriding --clusters/--size")
        ->check(CLI::PositiveNumber);
    app->add_option("--centers", centers, "Cluster angles in radians (default equally spaced)");
    add_choice(app, "--kind", cfg.kind, kind_names, "Impulse kind");
    app->add_option("--impulses", cfg.n_impulses, "Number of impulses N")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--steps", cfg.steps, "Contacts per sequential impulse T")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_choice(app, "--broadcast", cfg.broadcast, broadcast_names,
               "Edges of an instantaneous impulse");
    add_choice(app, "--mode", cfg.output_mode, mode_names, "Adjacency of the output graph");
    app->add_option("--sharpness-k", model.sharpness_k, "Link exponent of the generator")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) {
    std::vector<std::size_t> sz;
    if (!sizes.empty())
      sz.assign(sizes.begin(), sizes.end());
    else
      sz.assign(static_cast<std::size_t>(clusters), static_cast<std::size_t>(size));
    std::vector<double> c = centers;
    if (c.empty())
      for (std::size_t i = 0; i < sz.size(); ++i)
        c.push_back(two_pi * static_cast<double>(i) / static_cast<double>(sz.size()));
    if (c.size() != sz.size()) throw std::invalid_argument("--centers needs one angle per cluster");

    const PlantedClusters planted = planted_clusters(c, sz);
    const auto traces = simulate_impulses(planted.state, cfg, model);
    Graph g = graph_from_impulses(traces, planted.state.size(), cfg.output_mode, cfg.broadcast);
    g.set_ground_truth(planted.truth);

    const fs::path path(out_path);
    if (path.has_parent_path()) prepare_dir(path.parent_path());
    const std::string ext = path.extension().string();
    if (ext == ".gml") {
      write_file(path, [&](std::ostream& o) { write_gml(o, g); });
    } else if (ext == ".json") {
      write_json(path, to_json(g));
    } else {
      write_file(path, [&](std::ostream& o) { write_edge_list(o, g); });
      if (truth_path.empty()) truth_path = out_path + ".truth.json";
    }
    if (!truth_path.empty()) {
      json truth = to_json(Partition::from_labels(planted.truth), &g);
      truth.erase("modularity");
      write_json(truth_path, truth);
    }
    if (!traces_path.empty())
      write_file(traces_path, [&](std::ostream& o) { write_traces(o, traces); });
    out << json{{"n", g.size()}, {"edges", g.edge_count()}}.dump() << '\n';
    return ok;
  }
};

// ---- eval -----------------------------------------------------------------

struct Labeled {
  Partition partition;
  std::vector<std::string> labels;  // empty when the source has none
};

Labeled read_partition(const fs::path& path) {
  const json doc = read_json(path);
  Labeled out{partition_from_json(doc), {}};
  if (doc.contains("labels") && !doc["labels"].is_null()) {
    try {
      out.labels = doc["labels"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw InputError("'" + path.string() + "': " + e.what());
    }
    if (out.labels.size() != out.partition.size())
      throw InputError("'" + path.string() + "': labels and assignment differ in length");
  }
  return out;
}

Labeled labeled_of(const Graph& g, const Partition& p) {
  Labeled out{p, {}};
  for (Vertex v = 0; v < g.size(); ++v) out.labels.push_back(g.label(v));
  return out;
}

// Reorders `b` to the vertex order given by `n` and `labels`; the vertex sets
// must agree. Without labels on either side the order is positional.
Partition align(std::size_t n, const std::vector<std::string>& labels, const Labeled& b) {
  if (n != b.partition.size()) throw InputError("partitions cover different vertex sets");
  if (labels.empty() || b.labels.empty()) return b.partition;
  std::map<std::string, int> where;
  for (std::size_t i = 0; i < b.labels.size(); ++i) where[b.labels[i]] = b.partition.assignment[i];
  if (where.size() != b.labels.size()) throw InputError("duplicate vertex labels");
  std::vector<int> out;
  for (const auto& l : labels) {
    auto it = where.find(l);
    if (it == where.end()) throw InputError("partitions cover different vertex sets");
    out.push_back(it->second);
  }
  return Partition::from_labels(out);
}

struct EvalCommand {
  std::string first;
  std::string second;
  std::string graph_path;

  void add(CLI::App* app) {
    app->add_option("partition", first, "Partition JSON")->required();
    app->add_option("reference", second, "Reference partition JSON (default: graph ground truth)");
    app->add_option("-g,--graph", graph_path, "Graph for modularity and ground truth");
  }

  int run(std::ostream& out, std::ostream& err) {
    const Labeled a = read_partition(first);
    std::optional<Graph> g;
    if (!graph_path.empty()) g = read_graph(graph_path);
    Labeled ref;
    if (!second.empty()) {
      ref = read_partition(second);
    } else {
      if (!g) throw std::invalid_argument("eval needs a reference partition or --graph");
      if (!g->ground_truth()) throw InputError("'" + graph_path + "' has no ground truth");
      ref = labeled_of(*g, ground_truth_partition(*g));
    }
    const Partition b = align(a.partition.size(), a.labels, ref);
    json result{{"rand", rand_index(a.partition, b)}, {"ari", adjusted_rand_index(a.partition, b)}};
    const auto n = static_cast<int>(b.size());
    if ((a.partition.k == 1 && b.k == 1) || (a.partition.k == n && b.k == n))
      err << "warning: adjusted Rand index undefined for two identical trivial partitions; reported as 0\n";
    if (g) {
      std::vector<std::string> labels;
      for (Vertex v = 0; v < g->size(); ++v) labels.push_back(g->label(v));
      const Partition on_graph = align(g->size(), labels, a);
      result["modularity"] = modularity(*g, on_graph);
    }
    out << result.dump() << '\n';
    return ok;
  }
};

// Splices config-file tokens in right after the subcommand name, so explicit
// command-line options (parsed later, last value wins) override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    auto t = config_tokens(in);
    from_file.insert(from_file.end(), t.begin(), t.end());
  }
  if (rest.size() < 2) return rest;
  std::vector<std::string> out{rest[0], rest[1]};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin() + 2, rest.end());
  return out;
}

}  // namespace

std::vector<std::string> config_tokens(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", number);
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community detection with circular latent positions and simulated spreads",
               "circlecomm"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.footer("A --config FILE of key = value lines may follow the subcommand; "
             "command-line options override it.");

  DetectCommand detect;
  BisectCommand bisect;
  SynthCommand synth;
  EvalCommand eval;
  detect.add(app.add_subcommand("detect", "Spread/chain/aggregate detection with a modularity cut"));
  bisect.add(app.add_subcommand("bisect", "Recursive binary splitting with the sharpened link"));
  synth.add(app.add_subcommand("synth", "Simulate impulses on planted clusters"));
  eval.add(app.add_subcommand("eval", "Rand index, adjusted Rand index and modularity"));

  try {
    std::vector<std::string> args = expand_config(raw);
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? ok : usage;
    }
    if (app.got_subcommand("detect")) return detect.run(out, err);
    if (app.got_subcommand("bisect")) return bisect.run(out, err);
    if (app.got_subcommand("synth")) return synth.run(out, err);
    return eval.run(out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return input;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return input;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime;
  }
}

}  // namespace circlecomm::cli
