#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "lgpca/lgpca.hpp"

namespace fs = std::filesystem;
using namespace lgpca;

namespace {

struct GlobalOpts {
  std::string config_path;
};

PipelineConfig load_cfg(const GlobalOpts& g) {
  return g.config_path.empty() ? PipelineConfig{} : read_config(g.config_path);
}

Landmarks parse_landmarks(const std::vector<double>& eyes, const std::vector<double>& chin) {
  Landmarks lm;
  lm.left_eye = {eyes[0], eyes[1]};
  lm.right_eye = {eyes[2], eyes[3]};
  if (!chin.empty()) lm.chin = Point{chin[0], chin[1]};
  return lm;
}

void print_shift_table(const std::vector<ShiftRow>& table, std::ostream& os) {
  os << "shift_percent,first1,first1d,eer,eerd\n";
  os.precision(17);
  for (const auto& r : table)
    os << r.shift_percent << "," << r.first1 << "," << r.first1_delta << "," << r.eer << ","
       << r.eer_delta << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-Gabor PCA face identification pipeline"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("-c,--config", g.config_path, "flat key=value pipeline config");

  // mask-stats: unmasked pixel counts of the reference mask geometries
  auto* sc_mask = app.add_subcommand("mask-stats", "print unmasked pixel counts");

  // normalize
  auto* sc_norm = app.add_subcommand("normalize", "normalize one face image");
  std::string norm_in, norm_out, norm_mask_out;
  std::vector<double> norm_eyes, norm_chin;
  sc_norm->add_option("--image", norm_in, "input P5 PGM")->required();
  sc_norm->add_option("--eyes", norm_eyes, "lx ly rx ry")->expected(4)->required();
  sc_norm->add_option("--chin", norm_chin, "cx cy")->expected(2);
  sc_norm->add_option("--out", norm_out, "output normalized PGM")->required();
  sc_norm->add_option("--mask-out", norm_mask_out, "output mask PGM");

  // build-bank
  auto* sc_bank = app.add_subcommand("build-bank", "export filter transfer functions as PGM");
  std::string bank_dir;
  int bank_w = facegeom::kOutSize, bank_h = facegeom::kOutSize;
  sc_bank->add_option("--out-dir", bank_dir, "output directory")->required();
  sc_bank->add_option("--width", bank_w);
  sc_bank->add_option("--height", bank_h);

  // train
  auto* sc_train = app.add_subcommand("train", "train PCA model and enroll gallery");
  std::string train_manifest, train_set = "gallery", train_out;
  sc_train->add_option("--manifest", train_manifest)->required();
  sc_train->add_option("--set", train_set, "manifest set tag (default gallery)");
  sc_train->add_option("--out", train_out, "output model container")->required();

  // evaluate
  auto* sc_eval = app.add_subcommand("evaluate", "closed-set identification evaluation");
  std::string eval_model, eval_manifest, eval_set = "probe", eval_report;
  sc_eval->add_option("--model", eval_model)->required();
  sc_eval->add_option("--manifest", eval_manifest)->required();
  sc_eval->add_option("--set", eval_set, "manifest set tag (default probe)");
  sc_eval->add_option("--report", eval_report, "write key=value report here");

  // shift-exp
  auto* sc_shift = app.add_subcommand("shift-exp", "eye-marker shift perturbation experiment");
  std::string shift_model, shift_manifest, shift_set = "probe", shift_eye = "left", shift_out;
  std::vector<double> shift_list = {0, 2, 4, 6, 8, 10, 12};
  sc_shift->add_option("--model", shift_model)->required();
  sc_shift->add_option("--manifest", shift_manifest)->required();
  sc_shift->add_option("--set", shift_set);
  sc_shift->add_option("--eye", shift_eye, "left|right");
  sc_shift->add_option("--shifts", shift_list, "shift percentages");
  sc_shift->add_option("--out", shift_out, "write CSV table here");

  // export-report
  auto* sc_export = app.add_subcommand("export-report", "evaluate and write report + curve CSVs");
  std::string exp_model, exp_manifest, exp_set = "probe", exp_dir;
  sc_export->add_option("--model", exp_model)->required();
  sc_export->add_option("--manifest", exp_manifest)->required();
  sc_export->add_option("--set", exp_set);
  sc_export->add_option("--out-dir", exp_dir)->required();

  try {
    app.parse(argc, argv);

    if (*sc_mask) {
      auto m3 = elliptical_mask(128, 128, {64.5, 45.5}, 120, 160);
      auto m2 = elliptical_mask(130, 150, {65.5, 50.5}, 128, 236);
      auto mr = detail::resized_two_point_mask();
      std::cout << "three_point_128=" << m3.unmasked_count() << "\n"
                << "two_point_130x150=" << m2.unmasked_count() << "\n"
                << "two_point_resized_128=" << mr.unmasked_count() << "\n";
    } else if (*sc_norm) {
      PipelineConfig cfg = load_cfg(g);
      GrayImage img = read_pgm(norm_in);
      Landmarks lm = parse_landmarks(norm_eyes, norm_chin);
      NormalizedFace face = normalize(img, lm, cfg.normalization);
      write_pgm(face.image, norm_out);
      if (!norm_mask_out.empty()) {
        GrayImage m(face.mask.width, face.mask.height);
        for (size_t i = 0; i < m.pixels.size(); ++i) m.pixels[i] = face.mask.bits[i] ? 255.0 : 0.0;
        write_pgm(m, norm_mask_out);
      }
    } else if (*sc_bank) {
      PipelineConfig cfg = load_cfg(g);
      fs::create_directories(bank_dir);
      FilterBank bank = build_bank(bank_w, bank_h, cfg.filter);
      for (const auto& f : bank) {
        GrayImage t(f.width, f.height);
        t.pixels = f.transfer;
        std::string name = "filter_o" + std::to_string(f.orient_index) + "_s" +
                           std::to_string(f.scale_index) + ".pgm";
        write_pgm(rescale_for_export(t), (fs::path(bank_dir) / name).string());
      }
      std::cout << "wrote " << bank.size() << " filters to " << bank_dir << "\n";
    } else if (*sc_train) {
      PipelineConfig cfg = load_cfg(g);
      auto entries = filter_set(read_manifest(train_manifest), train_set);
      ModelContainer c = run_train_enroll(entries, cfg);
      save_container(c, train_out);
      std::cout << "trained on " << c.model.trained_on << " images, " << c.model.components()
                << " components, feature length " << c.model.dimension() << "\n";
    } else if (*sc_eval) {
      ModelContainer c = load_container(eval_model);
      auto probes = filter_set(read_manifest(eval_manifest), eval_set);
      EvalReport rep = run_identify_evaluate(c, probes);
      std::cout << format_report(rep);
      if (!eval_report.empty()) write_report(rep, eval_report);
    } else if (*sc_shift) {
      ModelContainer c = load_container(shift_model);
      auto probes = filter_set(read_manifest(shift_manifest), shift_set);
      ShiftedEye eye = shift_eye == "right" ? ShiftedEye::Right : ShiftedEye::Left;
      auto table = run_shift_experiment(c, probes, shift_list, eye);
      print_shift_table(table, std::cout);
      if (!shift_out.empty()) {
        std::ofstream out(shift_out);
        print_shift_table(table, out);
      }
    } else if (*sc_export) {
      ModelContainer c = load_container(exp_model);
      auto probes = filter_set(read_manifest(exp_manifest), exp_set);
      EvalReport rep = run_identify_evaluate(c, probes);
      fs::create_directories(exp_dir);
      write_report(rep, (fs::path(exp_dir) / "report.txt").string());
      write_cmc_csv(rep, (fs::path(exp_dir) / "cmc.csv").string());
      write_roc_csv(rep, (fs::path(exp_dir) / "roc.csv").string());
      std::cout << "wrote report to " << exp_dir << "\n";
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
