#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpca/features.hpp"
#include "lgpca/filterbank.hpp"
#include "lgpca/metrics.hpp"
#include "lgpca/normalize.hpp"
#include "lgpca/subspace.hpp"

namespace lgpca {

// ---------------------------------------------------------------------------
// Manifests: CSV with header path,label,set,lx,ly,rx,ry,cx,cy (chin optional)
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string image_path;
  std::string label;
  std::string set_tag;
  Landmarks landmarks;
};

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  bool header = true;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.back() == '\r') {
      if (!line.empty()) line.pop_back();
      if (line.empty()) continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (header) {
      header = false;
      if (!f.empty() && f[0] == "path") continue;  // header row optional
    }
    if (f.size() != 7 && f.size() != 9)
      throw std::runtime_error("read_manifest: line " + std::to_string(lineno) +
                               ": expected 7 or 9 fields");
    ManifestEntry e;
    e.image_path = f[0];
    e.label = f[1];
    e.set_tag = f[2];
    try {
      e.landmarks.left_eye = {std::stod(f[3]), std::stod(f[4])};
      e.landmarks.right_eye = {std::stod(f[5]), std::stod(f[6])};
      if (f.size() == 9) e.landmarks.chin = Point{std::stod(f[7]), std::stod(f[8])};
    } catch (const std::exception&) {
      throw std::runtime_error("read_manifest: line " + std::to_string(lineno) +
                               ": bad coordinate");
    }
    if (e.label.empty())
      throw std::runtime_error("read_manifest: line " + std::to_string(lineno) + ": empty label");
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<ManifestEntry> filter_set(const std::vector<ManifestEntry>& all,
                                             const std::string& set_tag) {
  std::vector<ManifestEntry> out;
  for (const auto& e : all)
    if (e.set_tag == set_tag) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline configuration
// ---------------------------------------------------------------------------

enum class FeatureMode { LogGabor, Grayscale };

struct PipelineConfig {
  NormMethod normalization = NormMethod::TwoPoint;
  FeatureMode feature_mode = FeatureMode::LogGabor;
  FilterParams filter;
  WindowSpec window;
  bool use_mask = true;
  int pca_components = 900;  // clamped to the trained rank
  std::optional<double> tau;
};

// Flat key=value file; unknown keys are an error, missing keys keep defaults.
inline PipelineConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_config: cannot open " + path);
  PipelineConfig c;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("read_config: line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "normalization") {
        if (val == "3pt") c.normalization = NormMethod::ThreePoint;
        else if (val == "2pt") c.normalization = NormMethod::TwoPoint;
        else throw std::runtime_error("bad normalization");
      } else if (key == "feature_mode") {
        if (val == "log_gabor") c.feature_mode = FeatureMode::LogGabor;
        else if (val == "grayscale") c.feature_mode = FeatureMode::Grayscale;
        else throw std::runtime_error("bad feature_mode");
      } else if (key == "lambda0") c.filter.lambda0 = std::stod(val);
      else if (key == "scale_factor") c.filter.scale_factor = std::stod(val);
      else if (key == "sigma_on_f") c.filter.sigma_on_f = std::stod(val);
      else if (key == "num_scales") c.filter.num_scales = std::stoi(val);
      else if (key == "num_orients") c.filter.num_orients = std::stoi(val);
      else if (key == "theta_scale") c.filter.theta_scale = std::stod(val);
      else if (key == "window_size") c.window.size = std::stoi(val);
      else if (key == "window_step") c.window.step = std::stoi(val);
      else if (key == "use_mask") c.use_mask = std::stoi(val) != 0;
      else if (key == "pca_components") c.pca_components = std::stoi(val);
      else if (key == "tau") c.tau = std::stod(val);
      else throw std::runtime_error("unknown key");
    } catch (const std::exception& e) {
      throw std::runtime_error("read_config: line " + std::to_string(lineno) + " (" + key +
                               "): " + e.what());
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Feature pipeline
// ---------------------------------------------------------------------------

inline FeatureVector compute_features(const GrayImage& img, const Landmarks& lm,
                                      const PipelineConfig& cfg, const FilterBank& bank) {
  NormalizedFace face = normalize(img, lm, cfg.normalization);
  if (cfg.feature_mode == FeatureMode::Grayscale) return grayscale_features(face);
  MagnitudeStack stack = filter_magnitude(face, bank);
  FeatureLocations locs = select_locations(stack, cfg.window, cfg.use_mask);
  return extract_features(stack, locs, cfg.window, cfg.use_mask);
}

// The bank depends only on the image size after normalization (always
// 128x128), so one bank serves every image of a run.
inline FilterBank make_bank(const PipelineConfig& cfg) {
  if (cfg.feature_mode == FeatureMode::Grayscale) return {};
  return build_bank(facegeom::kOutSize, facegeom::kOutSize, cfg.filter);
}

// ---------------------------------------------------------------------------
// Model container
// ---------------------------------------------------------------------------

struct ModelContainer {
  uint32_t version = 1;
  PipelineConfig config;
  SubspaceModel model;
  Gallery gallery;
};

namespace io {

constexpr char kMagic[8] = {'L', 'G', 'P', 'C', 'A', 'M', 'C', '\0'};

inline void put_u32(std::ostream& o, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  o.write(reinterpret_cast<char*>(b), 4);
}
inline void put_u64(std::ostream& o, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  o.write(reinterpret_cast<char*>(b), 8);
}
inline void put_f64(std::ostream& o, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(o, bits);
}
inline void put_str(std::ostream& o, const std::string& s) {
  put_u32(o, static_cast<uint32_t>(s.size()));
  o.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("container: truncated file");
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("container: truncated file");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline double get_f64(std::istream& in) {
  uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
inline std::string get_str(std::istream& in) {
  uint32_t n = get_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("container: truncated file");
  return s;
}

}  // namespace io

inline void save_container(const ModelContainer& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_container: cannot open " + path);
  out.write(io::kMagic, 8);
  io::put_u32(out, c.version);

  const PipelineConfig& cfg = c.config;
  io::put_u32(out, cfg.normalization == NormMethod::ThreePoint ? 3 : 2);
  io::put_u32(out, cfg.feature_mode == FeatureMode::LogGabor ? 0 : 1);
  io::put_f64(out, cfg.filter.lambda0);
  io::put_f64(out, cfg.filter.scale_factor);
  io::put_f64(out, cfg.filter.sigma_on_f);
  io::put_u32(out, static_cast<uint32_t>(cfg.filter.num_scales));
  io::put_u32(out, static_cast<uint32_t>(cfg.filter.num_orients));
  io::put_f64(out, cfg.filter.theta_scale);
  io::put_u32(out, static_cast<uint32_t>(cfg.window.size));
  io::put_u32(out, static_cast<uint32_t>(cfg.window.step));
  io::put_u32(out, cfg.use_mask ? 1 : 0);
  io::put_u32(out, static_cast<uint32_t>(cfg.pca_components));
  io::put_u32(out, cfg.tau ? 1 : 0);
  io::put_f64(out, cfg.tau.value_or(0.0));

  io::put_str(out, c.model.layout);
  const auto N = static_cast<uint64_t>(c.model.dimension());
  const auto q = static_cast<uint64_t>(c.model.components());
  io::put_u64(out, N);
  io::put_u64(out, q);
  io::put_u32(out, static_cast<uint32_t>(c.model.trained_on));
  for (uint64_t i = 0; i < N; ++i) io::put_f64(out, c.model.mean(static_cast<Eigen::Index>(i)));
  for (uint64_t k = 0; k < q; ++k)
    io::put_f64(out, c.model.eigenvalues(static_cast<Eigen::Index>(k)));
  for (uint64_t k = 0; k < q; ++k)
    for (uint64_t i = 0; i < N; ++i)
      io::put_f64(out, c.model.basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)));

  io::put_u64(out, c.gallery.entries.size());
  for (const auto& e : c.gallery.entries) {
    io::put_str(out, e.label);
    io::put_u64(out, static_cast<uint64_t>(e.projection.coords.size()));
    for (Eigen::Index i = 0; i < e.projection.coords.size(); ++i)
      io::put_f64(out, e.projection.coords(i));
  }
  if (!out) throw std::runtime_error("save_container: write failed: " + path);
}

inline ModelContainer load_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_container: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, io::kMagic, 8) != 0)
    throw std::runtime_error("load_container: bad magic string");
  ModelContainer c;
  c.version = io::get_u32(in);
  if (c.version != 1) throw std::runtime_error("load_container: unsupported version");

  uint32_t norm = io::get_u32(in);
  if (norm != 2 && norm != 3) throw std::runtime_error("load_container: bad normalization tag");
  c.config.normalization = norm == 3 ? NormMethod::ThreePoint : NormMethod::TwoPoint;
  uint32_t fm = io::get_u32(in);
  if (fm > 1) throw std::runtime_error("load_container: bad feature mode");
  c.config.feature_mode = fm == 0 ? FeatureMode::LogGabor : FeatureMode::Grayscale;
  c.config.filter.lambda0 = io::get_f64(in);
  c.config.filter.scale_factor = io::get_f64(in);
  c.config.filter.sigma_on_f = io::get_f64(in);
  c.config.filter.num_scales = static_cast<int>(io::get_u32(in));
  c.config.filter.num_orients = static_cast<int>(io::get_u32(in));
  c.config.filter.theta_scale = io::get_f64(in);
  c.config.window.size = static_cast<int>(io::get_u32(in));
  c.config.window.step = static_cast<int>(io::get_u32(in));
  c.config.use_mask = io::get_u32(in) != 0;
  c.config.pca_components = static_cast<int>(io::get_u32(in));
  bool has_tau = io::get_u32(in) != 0;
  double tau = io::get_f64(in);
  if (has_tau) c.config.tau = tau;

  c.model.layout = io::get_str(in);
  uint64_t N = io::get_u64(in);
  uint64_t q = io::get_u64(in);
  c.model.trained_on = static_cast<int>(io::get_u32(in));
  if (N == 0 || q == 0 || q > N) throw std::runtime_error("load_container: bad dimensions");
  c.model.mean.resize(static_cast<Eigen::Index>(N));
  for (uint64_t i = 0; i < N; ++i) c.model.mean(static_cast<Eigen::Index>(i)) = io::get_f64(in);
  c.model.eigenvalues.resize(static_cast<Eigen::Index>(q));
  for (uint64_t k = 0; k < q; ++k)
    c.model.eigenvalues(static_cast<Eigen::Index>(k)) = io::get_f64(in);
  c.model.basis.resize(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(N));
  for (uint64_t k = 0; k < q; ++k)
    for (uint64_t i = 0; i < N; ++i)
      c.model.basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = io::get_f64(in);

  // invariant checks: sorted positive eigenvalues, near-orthonormal basis
  for (Eigen::Index k = 0; k < c.model.eigenvalues.size(); ++k) {
    if (c.model.eigenvalues(k) <= 0.0)
      throw std::runtime_error("load_container: non-positive eigenvalue");
    if (k > 0 && c.model.eigenvalues(k) > c.model.eigenvalues(k - 1))
      throw std::runtime_error("load_container: eigenvalues not sorted");
  }
  for (Eigen::Index k = 0; k < c.model.basis.rows(); ++k)
    if (std::abs(c.model.basis.row(k).norm() - 1.0) > 1e-8)
      throw std::runtime_error("load_container: basis row not unit norm");

  uint64_t g = io::get_u64(in);
  c.gallery.layout = c.model.layout;
  for (uint64_t i = 0; i < g; ++i) {
    GalleryEntry e;
    e.label = io::get_str(in);
    if (e.label.empty()) throw std::runtime_error("load_container: empty gallery label");
    uint64_t n = io::get_u64(in);
    e.projection.coords.resize(static_cast<Eigen::Index>(n));
    for (uint64_t j = 0; j < n; ++j)
      e.projection.coords(static_cast<Eigen::Index>(j)) = io::get_f64(in);
    if (i > 0 && e.projection.coords.size() != c.gallery.entries[0].projection.coords.size())
      throw std::runtime_error("load_container: inconsistent projection lengths");
    c.gallery.entries.push_back(std::move(e));
  }
  // must be at end of file
  in.peek();
  if (!in.eof()) throw std::runtime_error("load_container: trailing data");
  return c;
}

// ---------------------------------------------------------------------------
// Experiment orchestration
// ---------------------------------------------------------------------------

inline int effective_components(const PipelineConfig& cfg, const SubspaceModel& model) {
  return std::min(cfg.pca_components, model.components());
}

// Normalizes and extracts features for every gallery entry, trains the PCA
// model and enrolls the whitened projections.
inline ModelContainer run_train_enroll(const std::vector<ManifestEntry>& gallery_entries,
                                       const PipelineConfig& cfg) {
  if (gallery_entries.size() < 2)
    throw std::runtime_error("run_train_enroll: need at least 2 gallery entries");
  std::set<std::string> seen;
  for (const auto& e : gallery_entries) {
    std::string key = e.image_path + "|" + e.label + "|" + e.set_tag;
    if (!seen.insert(key).second)
      throw std::runtime_error("run_train_enroll: duplicate manifest row: " + key);
  }
  FilterBank bank = make_bank(cfg);
  std::vector<FeatureVector> features;
  features.reserve(gallery_entries.size());
  for (const auto& e : gallery_entries) {
    GrayImage img = read_pgm(e.image_path);
    features.push_back(compute_features(img, e.landmarks, cfg, bank));
  }
  ModelContainer c;
  c.config = cfg;
  c.model = train(features);
  int n = effective_components(cfg, c.model);
  c.gallery.layout = c.model.layout;
  for (size_t i = 0; i < gallery_entries.size(); ++i)
    c.gallery.entries.push_back({gallery_entries[i].label, project(c.model, features[i], n)});
  return c;
}

// Per-probe scores against a unique-label gallery.
struct ProbeOutcome {
  RankingResult ranking;
  double genuine = 0.0;
  std::vector<double> impostor;
};

namespace detail {

inline ProbeOutcome score_probe(const ModelContainer& c, const std::string& label,
                                const Projection& z) {
  IdentifyResult idr = identify(c.gallery, z);
  ProbeOutcome out;
  out.ranking.probe_label = label;
  bool genuine_found = false;
  for (const auto& [dist, idx] : idr.sorted_distances) {
    const std::string& gl = c.gallery.entries[idx].label;
    out.ranking.ordered_gallery_labels.push_back(gl);
    if (gl == label) {
      out.genuine = dist;
      genuine_found = true;
    } else {
      out.impostor.push_back(dist);
    }
  }
  if (!genuine_found)
    throw std::runtime_error("probe identity '" + label + "' not enrolled (closed-set evaluation)");
  return out;
}

inline EvalReport aggregate(const std::vector<ProbeOutcome>& outcomes) {
  std::vector<RankingResult> rankings;
  ScoreSet scores;
  for (const auto& o : outcomes) {
    rankings.push_back(o.ranking);
    scores.genuine.push_back(o.genuine);
    scores.impostor.insert(scores.impostor.end(), o.impostor.begin(), o.impostor.end());
  }
  EvalReport cmc = cmc_curve(rankings);
  EvalReport roc = roc_curve(scores);
  cmc.eer = roc.eer;
  cmc.roca = roc.roca;
  cmc.roc = roc.roc;
  return cmc;
}

inline void require_unique_gallery_labels(const ModelContainer& c) {
  std::set<std::string> labels;
  for (const auto& e : c.gallery.entries)
    if (!labels.insert(e.label).second)
      throw std::runtime_error("gallery label enrolled more than once: " + e.label);
}

}  // namespace detail

inline EvalReport run_identify_evaluate(const ModelContainer& c,
                                        const std::vector<ManifestEntry>& probes) {
  if (probes.empty()) throw std::runtime_error("run_identify_evaluate: no probes");
  detail::require_unique_gallery_labels(c);
  FilterBank bank = make_bank(c.config);
  int n = effective_components(c.config, c.model);
  std::vector<ProbeOutcome> outcomes;
  outcomes.reserve(probes.size());
  for (const auto& e : probes) {
    GrayImage img = read_pgm(e.image_path);
    FeatureVector fv = compute_features(img, e.landmarks, c.config, bank);
    outcomes.push_back(detail::score_probe(c, e.label, project(c.model, fv, n)));
  }
  return detail::aggregate(outcomes);
}

enum class ShiftedEye { Left, Right };

struct ShiftRow {
  double shift_percent = 0.0;
  double first1 = 0.0;
  double first1_delta = 0.0;
  double eer = 0.0;
  double eer_delta = 0.0;
};

// Eye-marker perturbation: the chosen eye is displaced by
// shift% * interocular distance along each image axis direction; the four
// per-direction results are averaged and compared against the 0% baseline.
inline std::vector<ShiftRow> run_shift_experiment(
    const ModelContainer& c, const std::vector<ManifestEntry>& probes,
    const std::vector<double>& shifts = {0, 2, 4, 6, 8, 10, 12},
    ShiftedEye eye = ShiftedEye::Left) {
  if (c.config.normalization != NormMethod::TwoPoint)
    throw std::runtime_error("run_shift_experiment: requires 2-point normalization");
  if (probes.empty()) throw std::runtime_error("run_shift_experiment: no probes");
  detail::require_unique_gallery_labels(c);
  FilterBank bank = make_bank(c.config);
  int n = effective_components(c.config, c.model);

  struct Cached {
    GrayImage img;
    ManifestEntry entry;
  };
  std::vector<Cached> cache;
  cache.reserve(probes.size());
  for (const auto& e : probes) cache.push_back({read_pgm(e.image_path), e});

  auto evaluate_direction = [&](double dx, double dy) {
    std::vector<ProbeOutcome> outcomes;
    outcomes.reserve(cache.size());
    for (const auto& p : cache) {
      Landmarks lm = p.entry.landmarks;
      double iod = std::hypot(lm.right_eye.x - lm.left_eye.x, lm.right_eye.y - lm.left_eye.y);
      Point& target = (eye == ShiftedEye::Left) ? lm.left_eye : lm.right_eye;
      target.x += dx * iod / 100.0;
      target.y += dy * iod / 100.0;
      if (target.x < 0 || target.y < 0 || target.x > p.img.width - 1 || target.y > p.img.height - 1)
        throw std::runtime_error("run_shift_experiment: shifted landmark outside image");
      FeatureVector fv = compute_features(p.img, lm, c.config, bank);
      outcomes.push_back(detail::score_probe(c, p.entry.label, project(c.model, fv, n)));
    }
    return detail::aggregate(outcomes);
  };

  std::vector<ShiftRow> table;
  double base_first1 = 0.0, base_eer = 0.0;
  for (double s : shifts) {
    const double dirs[4][2] = {{s, 0}, {0, s}, {-s, 0}, {0, -s}};
    double f1 = 0.0, eer = 0.0;
    if (s == 0.0) {
      EvalReport rep = evaluate_direction(0, 0);
      f1 = rep.first1;
      eer = rep.eer;
    } else {
      for (const auto& d : dirs) {
        EvalReport rep = evaluate_direction(d[0], d[1]);
        f1 += rep.first1 / 4.0;
        eer += rep.eer / 4.0;
      }
    }
    if (table.empty()) {
      base_first1 = f1;
      base_eer = eer;
    }
    table.push_back({s, f1, std::abs(f1 - base_first1), eer, std::abs(eer - base_eer)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Report export: flat key/value text plus CSV curve tables
// ---------------------------------------------------------------------------

inline std::string format_report(const EvalReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "first1=" << rep.first1 << "\n";
  for (const auto& [p, rank] : rep.rank_to_reach) os << "rank_to_reach_" << p << "=" << rank << "\n";
  os << "cum100=" << rep.cum100 << "\n";
  os << "cmca=" << rep.cmca << "\n";
  os << "eer=" << rep.eer << "\n";
  os << "roca=" << rep.roca << "\n";
  return os.str();
}

inline void write_report(const EvalReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << format_report(rep);
}

inline void write_cmc_csv(const EvalReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_cmc_csv: cannot open " + path);
  out.precision(17);
  out << "rank,cmc\n";
  for (size_t k = 0; k < rep.cmc.size(); ++k) out << (k + 1) << "," << rep.cmc[k] << "\n";
}

inline void write_roc_csv(const EvalReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_roc_csv: cannot open " + path);
  out.precision(17);
  out << "far,frr\n";
  for (const auto& p : rep.roc) out << p.far << "," << p.frr << "\n";
}

}  // namespace lgpca
