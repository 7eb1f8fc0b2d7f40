// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Self-contained oracles; deterministic seeds throughout.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "lgpca/lgpca.hpp"
#include "test_support.hpp"

using namespace lgpca;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail = "") {
  std::cout << "criterion " << index << " [" << name << "]: " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++failures;
}

// ---------------------------------------------------------------------------
// 1. Mask-geometry anchors
// ---------------------------------------------------------------------------
void criterion1() {
  size_t c3 = elliptical_mask(128, 128, {64.5, 45.5}, 120, 160).unmasked_count();
  size_t c2 = elliptical_mask(130, 150, {65.5, 50.5}, 128, 236).unmasked_count();
  size_t cr = detail::resized_two_point_mask().unmasked_count();
  std::ostringstream d;
  d << "3pt=" << c3 << " 2pt=" << c2 << " resized=" << cr;
  report(1, "mask-geometry anchors", c3 == 12646 && c2 == 17237 && cr == 14454, d.str());
}

// ---------------------------------------------------------------------------
// 2. Feature-count anchors
// ---------------------------------------------------------------------------
void criterion2() {
  GrayImage img = testsupport::synthetic_face(11);
  Landmarks lm = testsupport::canonical_landmarks();
  FilterBank bank = build_bank(128, 128, FilterParams{});

  NormalizedFace face3 = normalize_3pt(img, lm);
  MagnitudeStack stack3 = filter_magnitude(face3, bank);
  Landmarks lm2 = lm;
  lm2.chin.reset();
  NormalizedFace face2 = normalize_2pt(img, lm2);
  MagnitudeStack stack2 = filter_magnitude(face2, bank);

  WindowSpec w86{8, 6}, w44{4, 4};
  size_t unmasked = extract_features(stack3, select_locations(stack3, w86, false), w86, false)
                        .values.size();
  size_t masked3 = extract_features(stack3, select_locations(stack3, w86, true), w86, true)
                       .values.size();
  size_t masked2 = extract_features(stack2, select_locations(stack2, w86, true), w86, true)
                       .values.size();
  size_t fine3 = extract_features(stack3, select_locations(stack3, w44, true), w44, true)
                     .values.size();
  std::ostringstream d;
  d << "unmasked=" << unmasked << " masked3pt=" << masked3 << " masked2pt=" << masked2
    << " masked4x4=" << fine3;
  report(2, "feature-count anchors",
         unmasked == 10584 && masked3 == 9240 && masked2 == 10008 && fine3 == 19704, d.str());
}

// ---------------------------------------------------------------------------
// 3. Filter correctness
// ---------------------------------------------------------------------------
void criterion3() {
  bool ok = true;
  FilterParams p;
  // width 100: f0 = 1/5 on bin 20, sigma_f * f0 = 0.15 on bin 15
  FrequencyFilter horiz = build_filter(100, 100, 1, 1, p);
  ok = ok && std::abs(horiz.transfer[20] - 1.0) <= 1e-12;
  ok = ok && std::abs(horiz.transfer[15] - std::exp(-0.5)) <= 1e-12;
  FrequencyFilter vert = build_filter(100, 100, 1, 4, p);
  ok = ok && std::abs(vert.transfer[static_cast<size_t>(20) * 100] - 1.0) <= 1e-12;
  ok = ok && std::abs(vert.transfer[static_cast<size_t>(15) * 100] - std::exp(-0.5)) <= 1e-12;

  NormalizedFace face;
  face.image = GrayImage(64, 64, 200.0);
  face.mask = BinaryMask(64, 64, true);
  MagnitudeStack stack = filter_magnitude(face, build_bank(64, 64, p));
  ok = ok && stack.magnitudes.size() == 24;
  double worst = 0.0;
  for (const auto& m : stack.magnitudes)
    for (double v : m.pixels) worst = std::max(worst, std::abs(v));
  ok = ok && worst < 1e-9;
  std::ostringstream d;
  d << "constant-image max response " << worst;
  report(3, "filter correctness", ok, d.str());
}

// ---------------------------------------------------------------------------
// 4. FFT-filtering oracle (direct O(N^4) DFT on 32x32)
// ---------------------------------------------------------------------------
void criterion4() {
  bool ok = true;
  double worst = 0.0;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  FilterParams p;
  FilterBank bank = build_bank(32, 32, p);
  for (int trial = 0; trial < 20 && ok; ++trial) {
    NormalizedFace face;
    face.image = GrayImage(32, 32);
    for (auto& v : face.image.pixels) v = pix(rng);
    face.mask = BinaryMask(32, 32, true);
    const FrequencyFilter& filt = bank[static_cast<size_t>(trial) % bank.size()];
    MagnitudeStack stack = filter_magnitude(face, FilterBank{filt});
    const GrayImage& fast_mag = stack.raster(filt.orient_index, filt.scale_index);

    // direct forward DFT, transfer multiply, direct inverse DFT
    const int n = 32;
    std::vector<cplx> spec(static_cast<size_t>(n) * n);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u) {
        cplx acc(0.0);
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            double ang = -2.0 * std::numbers::pi * (static_cast<double>(u * x) / n +
                                                    static_cast<double>(v * y) / n);
            acc += face.image.at(x, y) * cplx(std::cos(ang), std::sin(ang));
          }
        spec[static_cast<size_t>(v) * n + u] = acc * filt.transfer[static_cast<size_t>(v) * n + u];
      }
    double scale = 0.0;
    for (const auto& m : fast_mag.pixels) scale = std::max(scale, std::abs(m));
    for (int y = 0; y < n && ok; ++y)
      for (int x = 0; x < n && ok; ++x) {
        cplx acc(0.0);
        for (int v = 0; v < n; ++v)
          for (int u = 0; u < n; ++u) {
            double ang = 2.0 * std::numbers::pi * (static_cast<double>(u * x) / n +
                                                   static_cast<double>(v * y) / n);
            acc += spec[static_cast<size_t>(v) * n + u] * cplx(std::cos(ang), std::sin(ang));
          }
        double direct = std::abs(acc) / (n * n);
        double err = std::abs(fast_mag.at(x, y) - direct) / std::max(1.0, scale);
        worst = std::max(worst, err);
        if (err > 1e-9) ok = false;
      }
  }
  std::ostringstream d;
  d << "worst relative error " << worst;
  report(4, "FFT-filtering oracle", ok, d.str());
}

// ---------------------------------------------------------------------------
// 5. Sliding-window oracle
// ---------------------------------------------------------------------------
void criterion5() {
  bool ok = true;
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> dim(4, 32);
  std::uniform_real_distribution<double> val(0.0, 50.0);
  std::uniform_real_distribution<double> keep(0.1, 1.0);
  for (int trial = 0; trial < 200 && ok; ++trial) {
    int w = dim(rng), h = dim(rng);
    std::uniform_int_distribution<int> szd(1, std::min({8, w, h}));
    int size = szd(rng);
    std::uniform_int_distribution<int> std_(1, size);
    WindowSpec spec{size, std_(rng)};
    bool use_mask = trial % 2 == 0;
    double pk = keep(rng);
    std::bernoulli_distribution b(pk);

    MagnitudeStack s;
    s.width = w;
    s.height = h;
    s.num_orients = 1;
    s.num_scales = 1;
    s.mask = BinaryMask(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) s.mask.set(x, y, b(rng));
    s.magnitudes.assign(1, GrayImage(w, h));
    for (auto& v : s.magnitudes[0].pixels) v = val(rng);

    FeatureLocations locs = select_locations(s, spec, use_mask);

    // brute force
    std::vector<Coord> oracle;
    const double c = (spec.size - 1) / 2.0;
    for (int wy = 0; wy + spec.size <= h; wy += spec.step)
      for (int wx = 0; wx + spec.size <= w; wx += spec.step) {
        bool found = false;
        Coord bc{};
        double bv = 0.0, bd = 0.0;
        for (int dy = 0; dy < spec.size; ++dy)
          for (int dx = 0; dx < spec.size; ++dx) {
            int x = wx + dx, y = wy + dy;
            if (use_mask && !s.mask.at(x, y)) continue;
            double v = s.magnitudes[0].at(x, y);
            double d2 = (dx - c) * (dx - c) + (dy - c) * (dy - c);
            if (!found || v > bv || (v == bv && d2 < bd)) {
              found = true;
              bv = v;
              bd = d2;
              bc = {x, y};
            }
          }
        if (found) oracle.push_back(bc);
      }
    if (locs.per_orientation[0].size() != oracle.size()) {
      ok = false;
      break;
    }
    for (size_t i = 0; i < oracle.size(); ++i)
      if (!(locs.per_orientation[0][i] == oracle[i])) {
        ok = false;
        break;
      }
  }
  report(5, "sliding-window oracle", ok, "200 randomized trials");
}

// ---------------------------------------------------------------------------
// 6. PCA suite
// ---------------------------------------------------------------------------
void criterion6() {
  bool ok = true;
  std::ostringstream d;
  std::mt19937 rng(31);
  std::normal_distribution<double> g(0.0, 5.0);

  auto make_vectors = [&](size_t r, size_t n) {
    std::vector<FeatureVector> out;
    for (size_t j = 0; j < r; ++j) {
      std::vector<double> v(n);
      for (auto& x : v) x = g(rng);
      out.push_back(FeatureVector{std::move(v), "acc"});
    }
    return out;
  };

  {  // whitening identity + reconstruction
    auto vectors = make_vectors(12, 60);
    SubspaceModel model = train(vectors);
    int q = model.components();
    Eigen::MatrixXd Y(q, 12);
    for (int j = 0; j < 12; ++j)
      Y.col(j) = project(model, vectors[static_cast<size_t>(j)], q).coords;
    Eigen::MatrixXd cov = (Y * Y.transpose()) / 12.0;
    double werr = (cov - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff();
    ok = ok && werr < 1e-6;
    d << "whitening err " << werr;

    double rerr = 0.0;
    for (const auto& v : vectors) {
      Eigen::Map<const Eigen::VectorXd> x(v.values.data(), model.dimension());
      Eigen::VectorXd recon = model.mean + model.basis.transpose() * (model.basis * (x - model.mean));
      rerr = std::max(rerr, (recon - x).cwiseAbs().maxCoeff());
    }
    ok = ok && rerr < 1e-6;
    d << ", reconstruction err " << rerr;
  }

  {  // Gram vs direct, 50 random instances
    std::uniform_int_distribution<int> rr(3, 15), nn(20, 100);
    double everr = 0.0, averr = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      size_t r = static_cast<size_t>(rr(rng)), n = static_cast<size_t>(nn(rng));
      auto vectors = make_vectors(r, n);
      SubspaceModel model = train(vectors);  // snapshot path (r < n)

      Eigen::MatrixXd D(n, r);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (size_t j = 0; j < r; ++j)
        mean += Eigen::Map<const Eigen::VectorXd>(vectors[j].values.data(),
                                                  static_cast<Eigen::Index>(n));
      mean /= static_cast<double>(r);
      for (size_t j = 0; j < r; ++j)
        D.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXd>(vectors[j].values.data(),
                                              static_cast<Eigen::Index>(n)) -
            mean;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((D * D.transpose()) /
                                                        static_cast<double>(r));
      Eigen::VectorXd dvals = es.eigenvalues().reverse();
      Eigen::MatrixXd dvecs = es.eigenvectors().rowwise().reverse();
      for (int k = 0; k < model.components(); ++k) {
        double rel = std::abs(model.eigenvalues(k) - dvals(k)) / std::max(1e-300, dvals(k));
        everr = std::max(rel, everr);
        double cosang = std::abs(model.basis.row(k).dot(dvecs.col(k)));
        averr = std::max(averr, std::abs(1.0 - cosang));
      }
    }
    ok = ok && everr < 1e-8 && averr < 1e-6;
    d << ", gram-vs-direct eig err " << everr << ", angle err " << averr;
  }
  report(6, "PCA suite", ok, d.str());
}

// ---------------------------------------------------------------------------
// 7. Metrics oracle
// ---------------------------------------------------------------------------
double envelope_eer_oracle(const ScoreSet& s) {
  std::vector<double> all = s.genuine;
  all.insert(all.end(), s.impostor.begin(), s.impostor.end());
  std::sort(all.begin(), all.end());
  std::vector<double> taus{all.front() - 0.5, all.back() + 0.5};
  for (size_t i = 0; i < all.size(); ++i) {
    taus.push_back(all[i]);
    if (i + 1 < all.size()) taus.push_back((all[i] + all[i + 1]) / 2.0);
  }
  std::vector<std::pair<double, double>> pts;
  for (double t : taus) pts.emplace_back(detail::far_at(s, t), detail::frr_at(s, t));
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> env;
  for (const auto& p : pts)
    if (env.empty() || p.first != env.back().first) env.push_back(p);
  for (size_t i = 0; i + 1 < env.size(); ++i) {
    double d1 = env[i].second - env[i].first;
    double d2 = env[i + 1].second - env[i + 1].first;
    if (d1 == 0.0) return env[i].first;
    if (d1 > 0.0 && d2 <= 0.0)
      return env[i].first + d1 / (d1 - d2) * (env[i + 1].first - env[i].first);
  }
  return env.back().first;
}

void criterion7() {
  bool ok = true;
  std::ostringstream d;

  {  // CMC worked example
    std::vector<RankingResult> rs;
    rs.push_back({"p1", {"p1", "g2", "g3", "g4"}});
    rs.push_back({"p2", {"g2", "g3", "p2", "g4"}});
    EvalReport rep = cmc_curve(rs);
    ok = ok && rep.cmc == std::vector<double>{50, 50, 100, 100};
    ok = ok && rep.first1 == 50.0 && rep.cum100 == 75.0 && rep.cmca == 2500.0;
  }
  {  // ROC worked examples
    EvalReport perfect = roc_curve(ScoreSet{{0.1, 0.2}, {0.5, 0.6}});
    ok = ok && std::abs(perfect.eer) < 1e-12 && std::abs(perfect.roca) < 1e-12;
    EvalReport same = roc_curve(ScoreSet{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}});
    ok = ok && std::abs(same.eer - 50.0) < 1e-9;
    EvalReport worked = roc_curve(ScoreSet{{0.1, 0.4}, {0.3, 0.6}});
    ok = ok && std::abs(worked.eer - 25.0) < 1e-9;
  }
  {  // EER vs brute force on 100 random sets
    std::mt19937 rng(37);
    std::normal_distribution<double> gen(-0.3, 0.4), imp(0.3, 0.4);
    std::uniform_int_distribution<int> ng(2, 30), ni(2, 60);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      ScoreSet s;
      int gcount = ng(rng), icount = ni(rng);
      for (int k = 0; k < gcount; ++k) s.genuine.push_back(gen(rng));
      for (int k = 0; k < icount; ++k) s.impostor.push_back(imp(rng));
      double tol = 100.0 / static_cast<double>(gcount + icount);
      double diff = std::abs(roc_curve(s).eer - envelope_eer_oracle(s));
      worst = std::max(worst, diff - tol);
      if (diff > tol + 1e-9) ok = false;
    }
    d << "worst margin beyond tolerance " << worst;
  }
  report(7, "metrics oracle", ok, d.str());
}

// ---------------------------------------------------------------------------
// 8. End-to-end synthetic experiment
// ---------------------------------------------------------------------------
struct PipelineOutcome {
  double first1_clean = 0.0;
  double first1_base = 0.0;
  double first1_shift12 = 0.0;
};

PipelineOutcome run_pipeline(const std::vector<ManifestEntry>& gallery,
                             const std::vector<ManifestEntry>& probes,
                             const PipelineConfig& cfg) {
  ModelContainer c = run_train_enroll(gallery, cfg);
  PipelineOutcome out;
  out.first1_clean = run_identify_evaluate(c, probes).first1;
  auto table = run_shift_experiment(c, probes, {0.0, 12.0});
  out.first1_base = table[0].first1;
  out.first1_shift12 = table[1].first1;
  return out;
}

void criterion8() {
  auto t0 = std::chrono::steady_clock::now();
  auto dir = testsupport::scratch_dir() / "acceptance";
  fs::create_directories(dir);

  constexpr int kIdentities = 40;
  Landmarks lm = testsupport::canonical_landmarks();
  lm.chin.reset();
  std::vector<ManifestEntry> gallery, probes;
  for (int id = 0; id < kIdentities; ++id) {
    GrayImage face = testsupport::synthetic_face(9000 + static_cast<unsigned>(id));
    std::string label = "id" + std::to_string(id);
    auto gpath = dir / (label + "_g.pgm");
    write_pgm(face, gpath.string());
    gallery.push_back({gpath.string(), label, "gallery", lm});

    GrayImage noisy = testsupport::add_noise(face, 10.0, 500 + static_cast<unsigned>(id));
    auto ppath = dir / (label + "_p.pgm");
    write_pgm(noisy, ppath.string());
    Landmarks plm = testsupport::jitter_landmarks(lm, 2.0, 700 + static_cast<unsigned>(id));
    probes.push_back({ppath.string(), label, "probe", plm});
  }

  PipelineConfig lg;
  lg.normalization = NormMethod::TwoPoint;
  lg.feature_mode = FeatureMode::LogGabor;
  PipelineConfig gray = lg;
  gray.feature_mode = FeatureMode::Grayscale;

  PipelineOutcome lg_out = run_pipeline(gallery, probes, lg);
  PipelineOutcome gray_out = run_pipeline(gallery, probes, gray);

  double lg_deg = lg_out.first1_base - lg_out.first1_shift12;
  double gray_deg = gray_out.first1_base - gray_out.first1_shift12;
  bool cond_a = lg_out.first1_clean >= gray_out.first1_clean;
  bool cond_b = lg_deg < gray_deg;
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() -
                                                               t0);
  bool in_budget = secs.count() < 300;

  std::ostringstream d;
  d << "LG first1 " << lg_out.first1_clean << " vs gray " << gray_out.first1_clean
    << "; 0->12% degradation LG " << lg_deg << " vs gray " << gray_deg << "; " << secs.count()
    << " s";
  report(8, "end-to-end synthetic experiment", cond_a && cond_b && in_budget, d.str());
}

// ---------------------------------------------------------------------------
// 9. Persistence and determinism
// ---------------------------------------------------------------------------
std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9() {
  auto dir = testsupport::scratch_dir() / "acceptance9";
  fs::create_directories(dir);
  Landmarks lm = testsupport::canonical_landmarks();
  std::vector<ManifestEntry> gallery, probes;
  for (int id = 0; id < 4; ++id) {
    GrayImage face = testsupport::synthetic_face(300 + static_cast<unsigned>(id));
    std::string label = "p" + std::to_string(id);
    auto path = dir / (label + ".pgm");
    write_pgm(face, path.string());
    gallery.push_back({path.string(), label, "gallery", lm});
    probes.push_back({path.string(), label, "probe", lm});
  }
  PipelineConfig cfg;
  cfg.normalization = NormMethod::ThreePoint;
  cfg.feature_mode = FeatureMode::LogGabor;

  ModelContainer c1 = run_train_enroll(gallery, cfg);
  save_container(c1, (dir / "m1.bin").string());
  ModelContainer c2 = load_container((dir / "m1.bin").string());
  save_container(c2, (dir / "m2.bin").string());
  bool bytes_ok = file_bytes(dir / "m1.bin") == file_bytes(dir / "m2.bin");

  std::string r1 = format_report(run_identify_evaluate(c1, probes));
  ModelContainer c3 = run_train_enroll(gallery, cfg);
  std::string r2 = format_report(run_identify_evaluate(c3, probes));
  bool report_ok = r1 == r2;

  report(9, "persistence and determinism", bytes_ok && report_ok,
         bytes_ok ? (report_ok ? "byte-identical" : "report mismatch") : "container mismatch");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
