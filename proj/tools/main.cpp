// Command-line front end: build sketches from edge streams, merge them,
// report estimates, detect communities, reconstruct edges, and generate
// reference data.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esk/community.hpp"
#include "esk/estimators.hpp"
#include "esk/graphgen.hpp"
#include "esk/io.hpp"
#include "esk/reconstruction.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

std::vector<double> parse_t_grid(const std::string& spec) {
  std::vector<double> grid;
  std::string token;
  std::istringstream in(spec);
  while (std::getline(in, token, ',')) {
    const double pct = std::strtod(token.c_str(), nullptr);
    if (!(pct > 0.0) || pct > 100.0) {
      throw esk::invalid_config_error("--t-grid entries must be percentages in (0, 100]");
    }
    grid.push_back(pct);
  }
  if (grid.empty()) {
    throw esk::invalid_config_error("--t-grid must not be empty");
  }
  return grid;
}

int run(int argc, char** argv) {
  CLI::App app{"edge-stream sketching and sketch-only graph analysis"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "build a sketch file from an edge stream");
  std::string build_in;
  std::string build_out;
  std::uint32_t build_m = 100;
  std::uint64_t build_salt = 0;
  std::uint32_t build_shards = 1;
  bool build_parallel = false;
  bool build_compact = false;
  build->add_option("--in", build_in, "edge stream file")->required();
  build->add_option("--out", build_out, "output sketch file")->required();
  build->add_option("--m", build_m, "sketch size (>= 3)")->check(CLI::Range(3u, 1u << 24));
  build->add_option("--salt", build_salt, "hash salt");
  build->add_option("--shards", build_shards, "parallel shard count")->check(CLI::PositiveNumber);
  build->add_flag("--parallel-edges", build_parallel, "tag repeated edges as parallel edges");
  build->add_flag("--compact", build_compact, "drop tag words in the output file");

  // merge
  auto* merge = app.add_subcommand("merge", "merge two sketch files");
  std::string merge_a;
  std::string merge_b;
  std::string merge_out;
  bool merge_compact = false;
  merge->add_option("a", merge_a, "first sketch file")->required();
  merge->add_option("b", merge_b, "second sketch file")->required();
  merge->add_option("--out", merge_out, "output sketch file")->required();
  merge->add_flag("--compact", merge_compact, "drop tag words in the output file");

  // stats
  auto* stats = app.add_subcommand("stats", "degree / volume / density estimates");
  std::string stats_in;
  std::string stats_nodes;
  std::uint64_t stats_universe = 0;
  stats->add_option("--in", stats_in, "sketch file")->required();
  stats->add_option("--nodes", stats_nodes, "comma-separated node ids, or 'all'");
  stats->add_option("--universe", stats_universe,
                    "node universe size for density (default: nodes in the sketch)");

  // louvain
  auto* louv = app.add_subcommand("louvain", "community detection on the sketch");
  std::string louv_in;
  std::string louv_out;
  std::uint64_t louv_seed = 0;
  bool louv_split = false;
  louv->add_option("--in", louv_in, "sketch file")->required();
  louv->add_option("--out", louv_out, "output partition file")->required();
  louv->add_option("--seed", louv_seed, "sweep-order seed");
  louv->add_flag("--split-half", louv_split, "selection-bias corrected estimate");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "score node pairs and evaluate precision");
  std::string rec_in;
  std::string rec_out;
  std::string rec_truth;
  std::string rec_tgrid = "10,20,30,40,50,60,70,80,90,100";
  std::uint32_t rec_k = 4;
  double rec_alpha = 0.2;
  bool rec_all_pairs = false;
  bool rec_s_only = false;
  std::uint32_t rec_threads = 1;
  rec->add_option("--in", rec_in, "sketch file")->required();
  rec->add_option("--out", rec_out, "scored-pairs TSV output")->required();
  rec->add_option("--truth", rec_truth, "true edge stream for precision");
  rec->add_option("--t-grid", rec_tgrid, "precision grid, percent of |E|");
  rec->add_option("--k", rec_k, "maximum neighborhood radius");
  rec->add_option("--alpha", rec_alpha, "radius decay factor");
  rec->add_flag("--all-pairs", rec_all_pairs, "score every pair (desk scale only)");
  rec->add_flag("--s-only", rec_s_only, "values-only baseline: no pinned edges");
  rec->add_option("--threads", rec_threads, "scoring threads")->check(CLI::PositiveNumber);

  // sbm-gen
  auto* sbm = app.add_subcommand("sbm-gen", "generate a stochastic block model stream");
  std::string sbm_out;
  std::string sbm_labels;
  esk::sbm_config cfg;
  sbm->add_option("--out", sbm_out, "output edge stream file")->required();
  sbm->add_option("--labels", sbm_labels, "block label sidecar file");
  sbm->add_option("--n", cfg.n, "node count")->required();
  sbm->add_option("--b", cfg.b, "block count")->required();
  sbm->add_option("--p", cfg.p, "within-block edge probability")->required();
  sbm->add_option("--q", cfg.q, "cross-block edge probability")->required();
  sbm->add_option("--seed", cfg.seed, "generator seed");
  bool sbm_unit = false;
  sbm->add_flag("--unit-weights", sbm_unit, "unit weights instead of Exp(1)");

  // corate
  auto* corate = app.add_subcommand("corate", "item-item co-rating stream from bipartite ratings");
  std::string corate_in;
  std::string corate_out;
  std::string corate_mode = "aggregate";
  corate->add_option("--in", corate_in, "bipartite ratings: 'user item' lines, grouped by user")
      ->required();
  corate->add_option("--out", corate_out, "output edge stream file")->required();
  corate->add_option("--mode", corate_mode, "aggregate | tags")
      ->check(CLI::IsMember({"aggregate", "tags"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (build->parsed()) {
    const auto stream = esk::io::read_edge_stream(build_in);
    if (stream.any_tags && !build_parallel) {
      throw esk::invalid_config_error("input carries tags; pass --parallel-edges");
    }
    const auto store = esk::io::build_store(stream, build_m, build_salt, build_parallel, build_shards);
    esk::io::write_sketch_file(build_out, store, build_compact);
    std::cerr << "built " << store.node_count() << " node sketches from " << stream.edges.size()
              << " edges (m=" << build_m << ", shards=" << build_shards << ")\n";
    return 0;
  }

  if (merge->parsed()) {
    const auto a = esk::io::read_sketch_file(merge_a);
    const auto b = esk::io::read_sketch_file(merge_b);
    esk::io::write_sketch_file(merge_out, esk::sketch_store::merge(a, b), merge_compact);
    return 0;
  }

  if (stats->parsed()) {
    const auto store = esk::io::read_sketch_file(stats_in);
    if (store.node_count() == 0) {
      std::cout << "no data: the sketch file contains no nodes\n";
      return 0;
    }
    std::vector<esk::node_id> nodes;
    if (stats_nodes.empty() || stats_nodes == "all") {
      for (const auto& [id, sk] : store.sketches()) {
        (void)sk;
        nodes.push_back(id);
      }
    } else {
      std::istringstream in(stats_nodes);
      std::string token;
      while (std::getline(in, token, ',')) {
        nodes.push_back(std::strtoull(token.c_str(), nullptr, 10));
      }
    }
    std::map<int, std::uint64_t> histogram;  // by floor(log2(degree estimate))
    for (esk::node_id id : nodes) {
      const auto est = esk::estimate_degree(store.at(id));
      std::printf("node %llu\tdeg_est %.6g\trel_se %.6g\n", static_cast<unsigned long long>(id),
                  est.value, est.std_error_bound);
      ++histogram[static_cast<int>(std::floor(std::log2(std::max(est.value, 1e-300))))];
    }
    if (store.mode() == esk::stream_mode::undirected) {
      const auto vol = esk::estimate_volume(store);
      std::printf("volume %.6g\trel_se %.6g\n", vol.value, vol.std_error_bound);
      if (!store.has_self_loops()) {
        const auto edges = esk::estimate_edge_count(store);
        std::printf("edge_weight %.6g\trel_se %.6g\n", edges.value, edges.std_error_bound);
        const std::uint64_t n = stats_universe != 0 ? stats_universe : store.node_count();
        if (n >= 2) {
          const auto dens = esk::estimate_density(store, n);
          std::printf("density %.6g\trel_se %.6g\t(universe %llu)\n", dens.value,
                      dens.std_error_bound, static_cast<unsigned long long>(n));
        }
      }
    } else {
      std::printf("directed store: per-node values are out-degree estimates\n");
    }
    std::printf("degree histogram (log2 buckets):\n");
    for (const auto& [bucket, count] : histogram) {
      std::printf("  2^%d..2^%d\t%llu\n", bucket, bucket + 1,
                  static_cast<unsigned long long>(count));
    }
    return 0;
  }

  if (louv->parsed()) {
    const auto store = esk::io::read_sketch_file(louv_in);
    esk::louvain_config lcfg;
    lcfg.seed = louv_seed;
    const auto start = clock_type::now();
    if (louv_split) {
      const auto res = esk::split_half_modularity(store, lcfg);
      esk::io::write_partition_file(louv_out, res.part, res.estimate);
      std::cerr << "split-half estimate " << res.estimate << " ("
                << res.part.community_count() << " communities, " << ms_since(start) << " ms)\n";
    } else {
      const auto res = esk::louvain(store, lcfg);
      esk::io::write_partition_file(louv_out, res.part, res.mod.value);
      for (const auto& lvl : res.levels) {
        std::cerr << "level " << lvl.level << ": " << lvl.moves << " moves in " << lvl.sweeps
                  << " sweeps, " << lvl.communities << " communities\n";
      }
      std::cerr << "estimate " << res.mod.value << " (" << res.part.community_count()
                << " communities, " << ms_since(start) << " ms)\n";
    }
    return 0;
  }

  if (rec->parsed()) {
    if (rec->count("--t-grid") != 0 && rec_truth.empty()) {
      std::cerr << "error: --t-grid requires --truth\n";
      return 1;
    }
    const auto store = esk::io::read_sketch_file(rec_in);
    esk::score_options opt;
    opt.max_radius = rec_k;
    opt.alpha = rec_alpha;
    opt.policy = rec_all_pairs ? esk::candidate_policy::all_pairs : esk::candidate_policy::khop;
    opt.use_pinning = !rec_s_only;
    opt.threads = rec_threads;
    const auto scored = esk::score_pairs(store, opt);

    std::ofstream out(rec_out);
    if (!out) {
      throw esk::parse_error("cannot open output file: " + rec_out);
    }
    char buf[64];
    for (const auto& sp : scored) {
      std::snprintf(buf, sizeof buf, "%.17g", sp.score);
      out << sp.u << '\t' << sp.v << '\t' << buf << '\n';
    }

    if (!rec_truth.empty()) {
      const auto truth_stream = esk::io::read_edge_stream(rec_truth);
      std::vector<std::pair<esk::node_id, esk::node_id>> truth;
      truth.reserve(truth_stream.edges.size());
      for (const auto& e : truth_stream.edges) {
        truth.emplace_back(e.u, e.v);
      }
      for (double pct : parse_t_grid(rec_tgrid)) {
        const auto t = static_cast<std::uint64_t>(
            std::max(1.0, std::round(pct / 100.0 * static_cast<double>(truth.size()))));
        const auto pr = esk::precision_at(scored, truth, t);
        std::printf("P_t@%g%% (t=%llu) = %.6g%s\n", pct, static_cast<unsigned long long>(t),
                    pr.value, pr.truncated ? " (truncated)" : "");
      }
    }
    return 0;
  }

  if (sbm->parsed()) {
    cfg.unit_weights = sbm_unit;
    const auto out = esk::sbm_generate(cfg);
    esk::io::write_edge_stream(sbm_out, esk::stream_mode::undirected, out.stream);
    if (!sbm_labels.empty()) {
      std::ofstream lf(sbm_labels);
      for (esk::node_id u = 1; u <= cfg.n; ++u) {
        lf << u << '\t' << out.graph.block_label[u] << '\n';
      }
    }
    std::cerr << "generated " << out.stream.size() << " edges (expected "
              << esk::expected_sbm_edges(cfg) << ")\n";
    return 0;
  }

  if (corate->parsed()) {
    std::ifstream in(corate_in);
    if (!in) {
      throw esk::parse_error("cannot open ratings file: " + corate_in);
    }
    std::vector<esk::rating> ratings;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') {
        continue;
      }
      std::istringstream ls(line);
      esk::rating r;
      if (!(ls >> r.user >> r.item)) {
        throw esk::parse_error(corate_in + ":" + std::to_string(line_no) +
                               ": expected 'user item'");
      }
      ratings.push_back(r);
    }
    const auto edges = corate_mode == "tags" ? esk::corate_tagged(ratings)
                                             : esk::corate_aggregate(ratings);
    esk::io::write_edge_stream(corate_out, esk::stream_mode::undirected, edges);
    std::cerr << "emitted " << edges.size() << " item-pair edges (" << corate_mode << " mode)\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const esk::incompatible_sketch_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const esk::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
