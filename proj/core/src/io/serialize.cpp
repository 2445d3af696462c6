#include "facegen/io/serialize.hpp"

#include "facegen/error.hpp"
#include "facegen/io/binary.hpp"

namespace facegen::io {

namespace {

void put_topology(ByteWriter& w, const Topology& t) {
  w.i32(t.vertex_count);
  w.u64(t.triangles.size());
  for (const auto& tri : t.triangles) {
    for (int v : tri) w.i32(v);
  }
}

TopologyPtr get_topology(ByteReader& r) {
  auto t = std::make_shared<Topology>();
  t->vertex_count = r.i32();
  const std::uint64_t count = r.u64();
  if (count > (1u << 26)) fail(ErrorCode::kFormat, "format error: triangle count");
  t->triangles.resize(count);
  for (auto& tri : t->triangles) {
    for (int& v : tri) {
      v = r.i32();
      if (v < 0 || v >= t->vertex_count) fail(ErrorCode::kFormat, "format error: triangle index out of range");
    }
  }
  return t;
}

void put_labels(ByteWriter& w, const RegionLayout& layout) {
  const auto labels = layout.labels();
  w.u64(labels.size());
  for (int l : labels) w.u8(static_cast<std::uint8_t>(l));
}

RegionLayout get_labels(ByteReader& r) {
  const std::uint64_t n = r.u64();
  std::vector<int> labels(n);
  for (auto& l : labels) l = r.u8();
  return RegionLayout::from_labels(labels);
}

void put_standardizer(ByteWriter& w, const Standardizer& s) {
  w.vec(s.mean);
  w.vec(s.inv_std);
}

Standardizer get_standardizer(ByteReader& r) {
  Standardizer s;
  s.mean = r.vec();
  s.inv_std = r.vec();
  return s;
}

void put_dense(ByteWriter& w, const DenseLayer& d) {
  w.mat(d.weight);
  w.vec(d.bias);
}

DenseLayer get_dense(ByteReader& r) {
  DenseLayer d;
  d.weight = r.mat();
  d.bias = r.vec();
  return d;
}

void put_attribute(ByteWriter& w, const FacialAttribute& a) {
  w.str(a.name);
  w.i32(a.region_id);
  w.vec(a.delta_geometry);
  w.vec(a.delta_texture);
}

FacialAttribute get_attribute(ByteReader& r) {
  FacialAttribute a;
  a.name = r.str();
  a.region_id = r.i32();
  a.delta_geometry = r.vec();
  a.delta_texture = r.vec();
  return a;
}

void finish(const ByteReader& r, std::string_view what) {
  if (!r.done()) fail(ErrorCode::kFormat, "format error: trailing bytes in " + std::string(what));
}

}  // namespace

std::string encode_family(const SyntheticFamily& family) {
  ByteWriter w;
  const FamilySpec& s = family.spec;
  w.i32(s.rows);
  w.i32(s.cols);
  w.i32(s.identities);
  w.i32(s.identity_params);
  w.f64(s.vertex_noise);
  w.u64(s.seed);
  for (const auto& rule : s.rules) {
    w.u32(static_cast<std::uint32_t>(rule.size()));
    for (const auto& term : rule) {
      w.u64(term.attribute);
      w.f64(term.weight);
    }
  }
  put_topology(w, *family.topology);
  put_labels(w, family.regions);
  w.f64(family.framing.center_x);
  w.f64(family.framing.center_y);
  w.f64(family.framing.half_width);
  w.f64(family.framing.half_height);
  w.mat(family.strengths);
  w.u32(static_cast<std::uint32_t>(family.catalog.size()));
  for (const auto& a : family.catalog) put_attribute(w, a);
  return w.take();
}

SyntheticFamily decode_family(std::string_view bytes) {
  ByteReader r(bytes);
  SyntheticFamily f;
  FamilySpec& s = f.spec;
  s.rows = r.i32();
  s.cols = r.i32();
  s.identities = r.i32();
  s.identity_params = r.i32();
  s.vertex_noise = r.f64();
  s.seed = r.u64();
  for (auto& rule : s.rules) {
    rule.resize(r.u32());
    for (auto& term : rule) {
      term.attribute = r.u64();
      term.weight = r.f64();
    }
  }
  f.topology = get_topology(r);
  f.regions = get_labels(r);
  f.framing.center_x = r.f64();
  f.framing.center_y = r.f64();
  f.framing.half_width = r.f64();
  f.framing.half_height = r.f64();
  f.strengths = r.mat();
  f.catalog.resize(r.u32());
  for (auto& a : f.catalog) a = get_attribute(r);
  finish(r, "family section");
  return f;
}

std::string encode_meshes(const std::vector<FaceMesh>& meshes) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(meshes.size()));
  for (const auto& m : meshes) {
    w.vec(m.geometry());
    w.vec(m.texture());
  }
  return w.take();
}

std::vector<FaceMesh> decode_meshes(std::string_view bytes, const TopologyPtr& topology) {
  ByteReader r(bytes);
  std::vector<FaceMesh> out(r.u32());
  for (auto& m : out) {
    Eigen::VectorXd g = r.vec();
    Eigen::VectorXd t = r.vec();
    m = FaceMesh(topology, std::move(g), std::move(t));
  }
  finish(r, "mesh section");
  return out;
}

std::string encode_face_model(const FaceModel& model) {
  ByteWriter w;
  put_topology(w, *model.topology);
  put_labels(w, model.regions);
  for (const auto& p : model.pca) {
    w.i32(p.region_id);
    w.vec(p.mean_geometry);
    w.vec(p.mean_texture);
    w.mat(p.geo_basis);
    w.mat(p.tex_basis);
    w.vec(p.geo_variances);
    w.vec(p.tex_variances);
  }
  return w.take();
}

FaceModel decode_face_model(std::string_view bytes) {
  ByteReader r(bytes);
  FaceModel model;
  model.topology = get_topology(r);
  model.regions = get_labels(r);
  for (auto& p : model.pca) {
    p.region_id = r.i32();
    p.mean_geometry = r.vec();
    p.mean_texture = r.vec();
    p.geo_basis = r.mat();
    p.tex_basis = r.mat();
    p.geo_variances = r.vec();
    p.tex_variances = r.vec();
  }
  finish(r, "pca section");
  return model;
}

std::string encode_catalog(const AttributeCatalog& catalog) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(catalog.size()));
  for (const auto& a : catalog) put_attribute(w, a);
  return w.take();
}

AttributeCatalog decode_catalog(std::string_view bytes) {
  ByteReader r(bytes);
  AttributeCatalog catalog(r.u32());
  for (auto& a : catalog) a = get_attribute(r);
  finish(r, "attributes section");
  return catalog;
}

std::string encode_scorer(const ScorerModel& model) {
  ByteWriter w;
  w.i32(model.grid);
  put_standardizer(w, model.input_norm);
  put_dense(w, model.hidden);
  for (const auto& h : model.heads) w.mat(h);
  return w.take();
}

ScorerModel decode_scorer(std::string_view bytes) {
  ByteReader r(bytes);
  ScorerModel model;
  model.grid = r.i32();
  model.input_norm = get_standardizer(r);
  model.hidden = get_dense(r);
  for (auto& h : model.heads) h = r.mat();
  finish(r, "scorer section");
  return model;
}

std::string encode_embedding(const EmbeddingModel& model) {
  ByteWriter w;
  w.i32(model.grid);
  put_standardizer(w, model.input_norm);
  put_dense(w, model.hidden);
  put_dense(w, model.output);
  w.f64(model.margin);
  return w.take();
}

EmbeddingModel decode_embedding(std::string_view bytes) {
  ByteReader r(bytes);
  EmbeddingModel model;
  model.grid = r.i32();
  model.input_norm = get_standardizer(r);
  model.hidden = get_dense(r);
  model.output = get_dense(r);
  model.margin = r.f64();
  finish(r, "embedding section");
  return model;
}

std::string encode_knowledge(const ImpressionKnowledge& knowledge) {
  ByteWriter w;
  for (const auto& p : knowledge.priors) {
    w.u8(p ? 1 : 0);
    if (!p) continue;
    w.i32(index_of(p->impression));
    w.mat(p->mean);
    w.mat(p->stddev);
  }
  for (const auto& rw : knowledge.weights) {
    w.u8(rw ? 1 : 0);
    if (!rw) continue;
    w.i32(index_of(rw->impression));
    for (double v : rw->geometry_sums) w.f64(v);
    for (double v : rw->texture_sums) w.f64(v);
    for (double v : rw->probabilities) w.f64(v);
  }
  return w.take();
}

namespace {
ImpressionType get_impression(ByteReader& r) {
  const int idx = r.i32();
  if (idx < 0 || idx >= kImpressionCount) fail(ErrorCode::kFormat, "format error: impression index");
  return kAllImpressions[static_cast<std::size_t>(idx)];
}
}  // namespace

ImpressionKnowledge decode_knowledge(std::string_view bytes) {
  ByteReader r(bytes);
  ImpressionKnowledge k;
  for (auto& p : k.priors) {
    if (r.u8() == 0) continue;
    ImpressionPrior prior;
    prior.impression = get_impression(r);
    prior.mean = r.mat();
    prior.stddev = r.mat();
    p = std::move(prior);
  }
  for (auto& rw : k.weights) {
    if (r.u8() == 0) continue;
    RegionWeights weights;
    weights.impression = get_impression(r);
    for (double& v : weights.geometry_sums) v = r.f64();
    for (double& v : weights.texture_sums) v = r.f64();
    for (double& v : weights.probabilities) v = r.f64();
    rw = weights;
  }
  finish(r, "priors section");
  return k;
}

}  // namespace facegen::io
