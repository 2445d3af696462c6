#include "commands.hpp"

#include "facegen/facegen.hpp"
#include "facegen/io/container.hpp"
#include "facegen/io/obj.hpp"
#include "facegen/io/ppm.hpp"
#include "facegen/io/serialize.hpp"
#include "facegen/io/text.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace facegen::cli {

namespace fs = std::filesystem;

namespace {

std::string padded(std::size_t i, int width = 3) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

fs::path out_dir(const RunConfig& config) {
  fs::path dir(config.out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

io::ModelContainer open_model(const RunConfig& config) {
  if (!fs::exists(config.model)) throw ConfigError("model", "missing model container: " + config.model);
  return io::ModelContainer::load(config.model);
}

const std::string& require(const io::ModelContainer& c, std::string_view section, const char* producer) {
  if (!c.has(section)) {
    fail(ErrorCode::kFormat, "missing section '" + std::string(section) + "' (run " + producer + " first)");
  }
  return c.section(section);
}

SyntheticFamily load_family(const io::ModelContainer& c) {
  SyntheticFamily family = io::decode_family(require(c, io::kFamilySection, "gen-data"));
  family.identities = io::decode_meshes(require(c, io::kCorpusSection, "gen-data"), family.topology);
  return family;
}

FaceModel load_face_model(const io::ModelContainer& c) {
  return io::decode_face_model(require(c, io::kPcaSection, "fit-pca"));
}

RenderSettings render_settings(const RunConfig& config, const SyntheticFamily& family) {
  RenderSettings r;
  r.width = r.height = config.render_size;
  r.framing = family.framing;
  return r;
}

RenderSettings export_settings(const RunConfig& config, const std::optional<Framing>& framing) {
  RenderSettings r;
  r.width = r.height = config.export_size;
  r.framing = framing;
  return r;
}

// Sections computed from the PCA or the attribute catalog go stale when
// their inputs are refitted.
void drop_sections(io::ModelContainer& c, std::initializer_list<std::string_view> names, std::ostream& log) {
  io::ModelContainer kept;
  for (const auto& name : c.names()) {
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      log << "dropping stale section '" << name << "'\n";
    } else {
      kept.put(name, c.section(name));
    }
  }
  c = std::move(kept);
}

void gen_data(const RunConfig& config, std::ostream& log) {
  FamilySpec spec;
  spec.identities = config.identities;
  spec.seed = config.data_seed;
  const SyntheticFamily family = generate_family(spec);

  io::ModelContainer container;
  container.put(std::string(io::kFamilySection), io::encode_family(family));
  container.put(std::string(io::kCorpusSection), io::encode_meshes(family.identities));
  container.save(config.model);

  const fs::path dir = out_dir(config) / "data";
  fs::create_directories(dir);
  const RenderSettings render = export_settings(config, family.framing);
  const auto labels = planted_labels(family, std::nullopt);
  std::ostringstream manifest;
  manifest << "identity,obj,ppm";
  for (ImpressionType t : kAllImpressions) manifest << ",label_" << impression_name(t);
  for (const auto& attr : family.catalog) manifest << ",strength_" << attr.name;
  manifest << "\n";
  for (std::size_t i = 0; i < family.identities.size(); ++i) {
    const std::string stem = "identity_" + padded(i);
    io::write_obj(dir / (stem + ".obj"), family.identities[i]);
    io::write_ppm(dir / (stem + ".ppm"), render_frontal(family.identities[i], render));
    manifest << i << "," << stem << ".obj," << stem << ".ppm";
    for (ImpressionType t : kAllImpressions) manifest << "," << labels[static_cast<std::size_t>(index_of(t))][i];
    for (Eigen::Index a = 0; a < family.strengths.cols(); ++a) {
      manifest << "," << io::format_double(family.strengths(static_cast<Eigen::Index>(i), a));
    }
    manifest << "\n";
  }
  write_text(dir / "manifest.csv", manifest.str());
  log << "generated " << family.identities.size() << " identities (" << family.spec.vertex_count()
      << " vertices) into " << config.model << " and " << dir.string() << "\n";
}

void fit_pca(const RunConfig& config, std::ostream& log) {
  io::ModelContainer container = open_model(config);
  const SyntheticFamily family = load_family(container);
  const FaceModel model = fit_region_pca(family.identities, family.regions, config.components);
  drop_sections(container, {io::kAttributesSection, io::kPriorsSection}, log);
  container.put(std::string(io::kPcaSection), io::encode_face_model(model));
  container.save(config.model);

  std::ostringstream csv;
  csv << "region,component,geometry_variance,texture_variance\n";
  for (int r = 1; r <= kRegionCount; ++r) {
    const RegionPCA& pca = model.region(r);
    for (int k = 0; k < pca.components(); ++k) {
      csv << region_name(r) << "," << k << "," << io::format_double(pca.geo_variances(k)) << ","
          << io::format_double(pca.tex_variances(k)) << "\n";
    }
  }
  write_text(out_dir(config) / "pca_variances.csv", csv.str());
  log << "fitted " << model.components() << " components per region on " << family.identities.size()
      << " identities\n";
}

void learn_attrs(const RunConfig& config, std::ostream& log) {
  io::ModelContainer container = open_model(config);
  const SyntheticFamily family = load_family(container);
  const FaceModel model = load_face_model(container);
  const AttributeCatalog catalog = learn_family_attributes(family, model, config.examples);
  drop_sections(container, {io::kPriorsSection}, log);
  container.put(std::string(io::kAttributesSection), io::encode_catalog(catalog));
  container.save(config.model);

  std::ostringstream csv;
  csv << "index,name,region,geometry_norm,texture_norm\n";
  for (std::size_t a = 0; a < catalog.size(); ++a) {
    csv << a << "," << catalog[a].name << "," << region_name(catalog[a].region_id) << ","
        << io::format_double(catalog[a].delta_geometry.norm()) << ","
        << io::format_double(catalog[a].delta_texture.norm()) << "\n";
  }
  write_text(out_dir(config) / "attributes.csv", csv.str());
  log << "learned " << catalog.size() << " attributes from " << config.examples << " exemplars each\n";
}

void train_scorer_cmd(const RunConfig& config, std::ostream& log) {
  io::ModelContainer container = open_model(config);
  const SyntheticFamily family = load_family(container);
  AnnotationOptions annotation;
  annotation.render = render_settings(config, family);
  const LabeledImageSet all = annotate_impressions(family, annotation);
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < all.images.size(); ++i) (i % 10 < 7 ? train_idx : test_idx).push_back(i);
  const LabeledImageSet train = all.subset(train_idx);
  const LabeledImageSet test = all.subset(test_idx);

  ScorerTrainOptions options;
  options.seed = config.data_seed;
  options.descent.max_steps = config.scorer_steps;
  const ScorerTrainReport report = train_scorer(train, kAllImpressions, options);
  container.put(std::string(io::kScorerSection), io::encode_scorer(report.model));
  container.save(config.model);

  std::ostringstream csv;
  csv << "impression,train_accuracy,test_accuracy\n";
  log << "impression     train   test\n";
  for (ImpressionType t : kAllImpressions) {
    const double train_acc = *report.train_accuracy[static_cast<std::size_t>(index_of(t))];
    const double test_acc = test.images.empty() ? 0.0 : evaluate_scorer(report.model, test, t);
    csv << impression_name(t) << "," << io::format_double(train_acc) << "," << io::format_double(test_acc) << "\n";
    log << std::left << std::setw(13) << impression_name(t) << std::right << std::fixed << std::setprecision(3)
        << std::setw(7) << train_acc << std::setw(7) << test_acc << "\n";
  }
  log.unsetf(std::ios::floatfield);
  write_text(out_dir(config) / "scorer_report.csv", csv.str());
  log << "trained on " << train.images.size() << " images, tested on " << test.images.size() << "; final loss "
      << report.loss_history.back() << "\n";
}

void train_sim(const RunConfig& config, std::ostream& log) {
  io::ModelContainer container = open_model(config);
  const SyntheticFamily family = load_family(container);
  PairOptions pairs_options;
  pairs_options.pairs = config.pairs;
  pairs_options.seed = config.data_seed;
  pairs_options.render = render_settings(config, family);
  const std::vector<FacePair> pairs = make_similarity_pairs(family, pairs_options);

  EmbeddingTrainOptions options;
  options.seed = config.data_seed;
  options.descent.max_steps = config.embedding_steps;
  const EmbeddingTrainReport report = train_embedding(pairs, options);
  container.put(std::string(io::kEmbeddingSection), io::encode_embedding(report.model));
  container.save(config.model);

  const PairProblem problem = make_pair_problem(report.model, pairs);
  const Eigen::MatrixXd emb = report.model.embed_rows(problem.inputs);
  std::vector<double> distances(pairs.size());
  double top = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    distances[i] = (emb.row(2 * r) - emb.row(2 * r + 1)).norm();
    top = std::max(top, distances[i]);
  }
  constexpr int kBins = 20;
  const double width = top > 0.0 ? top / kBins : 1.0;
  std::vector<int> same(kBins, 0), diff(kBins, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int bin = std::min(kBins - 1, static_cast<int>(distances[i] / width));
    (pairs[i].label == 1 ? same : diff)[static_cast<std::size_t>(bin)]++;
  }
  std::ostringstream csv;
  csv << "bin_start,bin_end,same,different\n";
  for (int b = 0; b < kBins; ++b) {
    csv << io::format_double(b * width) << "," << io::format_double((b + 1) * width) << ","
        << same[static_cast<std::size_t>(b)] << "," << diff[static_cast<std::size_t>(b)] << "\n";
  }
  write_text(out_dir(config) / "similarity_hist.csv", csv.str());
  log << "trained embedding on " << pairs.size() << " pairs: mean same distance " << report.mean_same_distance
      << ", mean different distance " << report.mean_diff_distance << "\n";
}

void fit_priors(const RunConfig& config, std::ostream& log) {
  io::ModelContainer container = open_model(config);
  const SyntheticFamily family = load_family(container);
  const FaceModel model = load_face_model(container);
  const AttributeCatalog catalog = io::decode_catalog(require(container, io::kAttributesSection, "learn-attrs"));
  ArtistEditOptions edits;
  edits.artists = config.artists;
  edits.base_faces = config.base_faces;
  edits.noise = config.edit_noise;
  edits.seed = config.data_seed;
  const ImpressionKnowledge knowledge = fit_family_knowledge(family, model, catalog, edits);
  container.put(std::string(io::kPriorsSection), io::encode_knowledge(knowledge));
  container.save(config.model);

  std::ostringstream csv;
  csv << "impression";
  log << std::left << std::setw(13) << "impression" << std::right;
  for (int r = 1; r <= kRegionCount; ++r) {
    const auto name = region_name(r);
    csv << "," << name;
    log << std::setw(10) << name;
  }
  csv << "\n";
  log << "\n";
  for (ImpressionType t : kAllImpressions) {
    const RegionWeights& w = knowledge.region_weights(t);
    csv << impression_name(t);
    log << std::left << std::setw(13) << impression_name(t) << std::right << std::fixed << std::setprecision(4);
    for (double p : w.probabilities) {
      csv << "," << io::format_double(p);
      log << std::setw(10) << p;
    }
    csv << "\n";
    log << "\n";
  }
  log.unsetf(std::ios::floatfield);
  write_text(out_dir(config) / "region_weights.csv", csv.str());
}

// Everything a chain needs, loaded once.
struct ChainWorld {
  SyntheticFamily family;
  FaceModel model;
  AttributeCatalog catalog;
  ScorerModel scorer_model;
  EmbeddingModel embedding;
  ImpressionKnowledge knowledge;
  RenderSettings render;
  std::vector<Image> corpus;
};

ChainWorld load_chain_world(const RunConfig& config) {
  const io::ModelContainer c = open_model(config);
  ChainWorld w;
  w.family = load_family(c);
  w.model = load_face_model(c);
  w.catalog = io::decode_catalog(require(c, io::kAttributesSection, "learn-attrs"));
  w.scorer_model = io::decode_scorer(require(c, io::kScorerSection, "train-scorer"));
  w.embedding = io::decode_embedding(require(c, io::kEmbeddingSection, "train-sim"));
  w.knowledge = io::decode_knowledge(require(c, io::kPriorsSection, "fit-priors"));
  w.render = render_settings(config, w.family);
  w.corpus = render_corpus(w.family.identities, w.render);
  return w;
}

FaceMesh chain_input(const RunConfig& config, const ChainWorld& w, std::size_t identity) {
  if (!config.input.empty()) {
    if (!fs::exists(config.input)) throw ConfigError("input", "no such file: " + config.input);
    return io::read_obj(fs::path(config.input), w.family.topology);
  }
  if (identity >= w.family.identities.size()) {
    throw ConfigError("identity", std::to_string(identity) + " is out of range for " +
                                      std::to_string(w.family.identities.size()) + " identities");
  }
  return w.family.identities[identity];
}

SynthesisResult run_chain(const RunConfig& config, const ChainWorld& w, const FaceMesh& input, std::uint64_t seed) {
  const LearnedImpressionScorer scorer(w.scorer_model);
  const SynthesisResources resources{w.model, w.catalog, scorer, w.embedding, w.corpus, w.knowledge, w.render};
  SynthesisTask task;
  task.input = input;
  task.targets = config.impressions;
  task.config = config.optimizer;
  task.config.seed = seed;
  return config.baseline ? baseline_synthesize(task, resources) : synthesize(task, resources);
}

void write_chain_outputs(const fs::path& dir, const std::string& stem, const std::string& trace_name,
                         const SynthesisResult& r, const RenderSettings& render) {
  io::write_obj(dir / (stem + ".obj"), r.mesh);
  io::write_ppm(dir / (stem + ".ppm"), render_frontal(r.mesh, render));
  std::ofstream trace(dir / trace_name, std::ios::binary);
  write_trace_csv(trace, r.trace);
  if (!trace) fail(ErrorCode::kIo, "cannot write " + (dir / trace_name).string());
}

std::string summary_line(const SynthesisResult& r) {
  std::ostringstream s;
  s << "initial cost " << r.initial.total << " (impression " << r.initial.impression << "), best cost " << r.best.total
    << " (impression " << r.best.impression << ", similarity " << r.best.similarity << ") after " << r.trace.size()
    << " iterations, " << r.accepted_count << " accepted" << (r.terminated_early ? ", converged" : "");
  return s.str();
}

void synthesize_cmd(const RunConfig& config, std::ostream& log) {
  const ChainWorld w = load_chain_world(config);
  const std::size_t identity = config.identity < 0 ? 0 : static_cast<std::size_t>(config.identity);
  const FaceMesh input = chain_input(config, w, identity);
  const SynthesisResult r = run_chain(config, w, input, config.optimizer.seed);

  const fs::path dir = out_dir(config);
  const RenderSettings exported = export_settings(config, w.family.framing);
  io::write_ppm(dir / "input.ppm", render_frontal(input, exported));
  write_chain_outputs(dir, "result", "trace.csv", r, exported);
  write_text(dir / "run.cfg", config_text(config));
  log << summary_line(r) << "\n";
}

void batch_cmd(const RunConfig& config, std::ostream& log) {
  const ChainWorld w = load_chain_world(config);
  const auto count = static_cast<std::size_t>(config.count);
  std::vector<std::uint64_t> seeds(count);
  std::vector<FaceMesh> inputs(count);
  std::vector<std::size_t> input_ids(count);
  for (std::size_t i = 0; i < count; ++i) {
    seeds[i] = derive_seed(config.optimizer.seed, i);
    input_ids[i] = config.identity >= 0 ? static_cast<std::size_t>(config.identity)
                                        : static_cast<std::size_t>(seeds[i] % w.family.identities.size());
    inputs[i] = chain_input(config, w, input_ids[i]);
  }

  const fs::path dir = out_dir(config);
  std::vector<SynthesisResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const RenderSettings exported = export_settings(config, w.family.framing);
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = run_chain(config, w, inputs[i], seeds[i]);
        write_chain_outputs(dir, "face_" + padded(i), "trace_" + padded(i) + ".csv", results[i], exported);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = std::min<std::size_t>(count, config.threads > 0 ? static_cast<std::size_t>(config.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "chain,seed,input,initial_cost,best_cost,best_impression,best_similarity,iterations,accepted\n";
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = results[i];
    csv << i << "," << seeds[i] << "," << (config.input.empty() ? "identity_" + padded(input_ids[i]) : config.input)
        << "," << io::format_double(r.initial.total) << "," << io::format_double(r.best.total) << ","
        << io::format_double(r.best.impression) << "," << io::format_double(r.best.similarity) << ","
        << r.trace.size() << "," << r.accepted_count << "\n";
    log << "chain " << i << ": " << summary_line(r) << "\n";
  }
  write_text(dir / "batch.csv", csv.str());
  write_text(dir / "run.cfg", config_text(config));
}

void render_cmd(const RunConfig& config, std::ostream& log) {
  if (config.input.empty()) throw ConfigError("input", "render needs an input OBJ");
  if (!fs::exists(config.input)) throw ConfigError("input", "no such file: " + config.input);
  RenderSettings render = export_settings(config, std::nullopt);
  FaceMesh mesh;
  if (fs::exists(config.model)) {
    const io::ModelContainer c = io::ModelContainer::load(config.model);
    if (c.has(io::kFamilySection)) {
      const SyntheticFamily family = io::decode_family(c.section(io::kFamilySection));
      render.framing = family.framing;
      mesh = io::read_obj(fs::path(config.input), family.topology);
    }
  }
  if (!mesh.topology()) mesh = io::read_obj(fs::path(config.input));
  const fs::path target = out_dir(config) / (fs::path(config.input).stem().string() + ".ppm");
  io::write_ppm(target, render_frontal(mesh, render));
  log << "rendered " << config.input << " to " << target.string() << "\n";
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"gen-data", "generate the synthetic face family, renders and manifest"},
      {"fit-pca", "fit the region-wise PCA face model"},
      {"learn-attrs", "learn facial attributes from exemplar faces"},
      {"train-scorer", "train the impression scorer (70/30 split)"},
      {"train-sim", "train the face similarity embedding"},
      {"fit-priors", "fit coefficient priors and region weights"},
      {"synthesize", "synthesize one face for the target impressions"},
      {"batch", "synthesize a crowd of faces concurrently"},
      {"render", "render an OBJ mesh to PPM"},
  };
  return list;
}

void run_command(const std::string& name, const RunConfig& config, std::ostream& log) {
  if (name == "gen-data") return gen_data(config, log);
  if (name == "fit-pca") return fit_pca(config, log);
  if (name == "learn-attrs") return learn_attrs(config, log);
  if (name == "train-scorer") return train_scorer_cmd(config, log);
  if (name == "train-sim") return train_sim(config, log);
  if (name == "fit-priors") return fit_priors(config, log);
  if (name == "synthesize") return synthesize_cmd(config, log);
  if (name == "batch") return batch_cmd(config, log);
  if (name == "render") return render_cmd(config, log);
  throw ConfigError("command", "unknown subcommand " + name);
}

}  // namespace facegen::cli
