#pragma once

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssdcnn/recognize.hpp"
#include "ssdcnn/service.hpp"
#include "ssdcnn/ssdcnn.hpp"

namespace ssdcnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace fs = std::filesystem;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::vector<std::uint8_t> read_binary(const fs::path& path) {
  const std::string bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

inline int cmd_synth(int classes, int train, int test, std::uint64_t seed, const fs::path& out_dir, Streams io) {
  if (classes < 2 || train < 0 || test < 0) {
    io.err << "synth: --classes must be >= 2 and counts >= 0\n";
    return kExitUsage;
  }
  const auto [tr, te] = synth_dataset(classes, train, test, seed);
  fs::create_directories(out_dir);
  save_dataset(tr, out_dir / "train.ink");
  save_dataset(te, out_dir / "test.ink");
  io.out << "wrote " << tr.samples.size() << " training and " << te.samples.size() << " test samples to "
         << out_dir.string() << "\n";
  return kExitOk;
}

inline int cmd_import_pot(const std::vector<std::string>& inputs, const fs::path& out, Streams io) {
  Dataset all;
  for (const auto& in : inputs) {
    const auto bytes = read_binary(in);
    merge_into(all, import_pot(bytes));
  }
  save_dataset(all, out);
  io.out << "imported " << all.samples.size() << " samples, " << all.alphabet.size() << " labels\n";
  return kExitOk;
}

/// One line per sample: the 512 eight-directional values, space-separated.
inline void write_dir_dump(std::ostream& os, const Dataset& data, const FeatureConfig& fc) {
  const auto feats = featurize_dataset(data, ModelKind::NN8, fc);
  std::string line;
  for (const auto& f : feats) {
    line.clear();
    for (std::size_t i = 0; i < f.dir.size(); ++i) {
      if (i) line += ' ';
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), f.dir[i], std::chars_format::fixed);
      line.append(buf, ec == std::errc() ? end : buf);
    }
    os << line << '\n';
  }
}

inline int cmd_featurize(const fs::path& data_path, std::size_t index, const FeatureConfig& fc, const fs::path& pgm_dir,
                         const fs::path& dump_path, Streams io) {
  const Dataset data = load_dataset(data_path);
  if (!dump_path.empty()) {
    std::ofstream dump(dump_path);
    if (!dump) throw Error(ErrorCode::Io, "cannot write " + dump_path.string());
    write_dir_dump(dump, data, fc);
    io.out << "wrote " << data.samples.size() << " eight-directional vectors to " << dump_path.string() << "\n";
    if (pgm_dir.empty()) return kExitOk;
  }
  if (index >= data.samples.size()) {
    io.err << "featurize: sample " << index << " out of range (" << data.samples.size() << " samples)\n";
    return kExitData;
  }
  const auto& ink = data.samples[index];
  const InkCharacter grid = prepare_for_grid(ink, fc.map_size, fc.preprocess);
  const StrokeMapStack stack = build_stack(grid, fc.stack_depth, fc.map_size);
  const auto dir = extract(ink, fc.eightdir);
  int populated = 0;
  for (int d = 0; d < stack.depth; ++d) populated += stack.map(d).popcount() > 0 ? 1 : 0;
  double dir_sum = 0.0;
  for (double v : dir) dir_sum += v;
  io.out << "sample " << index << ": " << ink.strokes.size() << " strokes, " << ink.point_count() << " points\n"
         << "stack " << stack.depth << "x" << stack.size << "x" << stack.size << ", " << populated
         << " populated maps\n"
         << "eight-dir " << dir.size() << " values, sum " << dir_sum << "\n";
  if (!pgm_dir.empty()) {
    fs::create_directories(pgm_dir);
    for (int d = 0; d < stack.depth; ++d) {
      std::ostringstream name;
      name << "map_" << std::setw(2) << std::setfill('0') << d << ".pgm";
      write_pgm(stack.map(d), pgm_dir / name.str());
    }
    write_pgm(to_static_image(grid, fc.map_size), pgm_dir / "static.pgm");
    io.out << "wrote " << stack.depth + 1 << " PGM files to " << pgm_dir.string() << "\n";
  }
  return kExitOk;
}

struct TrainArgs {
  std::string variant = "ssdcnn";
  fs::path train_path, val_path, out_path, trace_path;
  TrainConfig config;
  FeatureConfig features;
  std::uint64_t init_seed = 1;
};

inline int cmd_train(const TrainArgs& a, Streams io) {
  const ModelKind kind = model_kind_from_string(a.variant);
  const Dataset train = load_dataset(a.train_path);
  const int classes = train.alphabet.size();
  if (classes < 2) {
    io.err << "train: the training set must name at least two classes\n";
    return kExitData;
  }
  Checkpoint ck{build_model<float>(kind, classes, a.init_seed), train.alphabet, a.features};
  ck.features = feature_config_for(ck.model, a.features);

  const LabeledSet tr = make_labeled(train, kind, ck.features);
  Dataset val_data;
  LabeledSet val;
  if (!a.val_path.empty()) {
    val_data = load_dataset(a.val_path);
    if (val_data.alphabet.entries() != train.alphabet.entries()) {
      io.err << "train: validation alphabet differs from the training alphabet\n";
      return kExitData;
    }
    val = make_labeled(val_data, kind, ck.features);
  }
  const auto result = train_two_phase(ck.model, tr, a.val_path.empty() ? nullptr : &val, a.config,
                                      [&](int phase, int epoch, double p1) {
                                        io.out << "phase " << phase << " epoch " << epoch;
                                        if (!std::isnan(p1)) io.out << " val P@1 " << p1;
                                        io.out << "\n" << std::flush;
                                      });
  save_checkpoint(ck, a.out_path);
  if (!a.trace_path.empty()) {
    std::ofstream trace(a.trace_path);
    if (!trace) throw Error(ErrorCode::Io, "cannot write " + a.trace_path.string());
    write_trace_csv(trace, result.trace);
  }
  io.out << "saved " << to_string(kind) << " checkpoint to " << a.out_path.string() << " (" << result.phase1_epochs_run
         << "+" << result.phase2_epochs_run << " epochs)\n";
  return kExitOk;
}

inline int cmd_eval(const fs::path& model_path, const fs::path& data_path, std::vector<int> ks, int threads,
                    Streams io) {
  const Checkpoint ck = load_checkpoint(model_path);
  const Dataset data = load_dataset(data_path);
  for (int k : ks) {
    if (k < 1) {
      io.err << "eval: --topk values must be >= 1\n";
      return kExitUsage;
    }
  }
  const auto report = evaluate(ck.model, data, ck.features, ks, threads);
  io.out << "N_T = " << report.total << "\n";
  for (const auto& [k, p] : report.precision) {
    io.out << "P@" << k << "\t" << std::fixed << std::setprecision(4) << p << "\t(" << report.correct.at(k) << ")\n";
  }
  io.out.unsetf(std::ios::floatfield);
  return kExitOk;
}

inline int cmd_recognize(const fs::path& model_path, const fs::path& ink_path, std::size_t index,
                         const fs::path& request_path, int k, Streams io) {
  const std::string bytes = read_file_bytes(model_path);
  const Recognizer rec(decode_checkpoint(bytes), checkpoint_hash(bytes));
  InkCharacter ink;
  if (!request_path.empty()) {
    RecognizeRequest req;
    if (auto err = parse_request(read_file_bytes(request_path), req)) {
      io.err << "recognize: " << err->field << ": " << err->message << "\n";
      return kExitData;
    }
    ink = std::move(req.ink);
    k = req.k;
  } else {
    const Dataset data = load_dataset(ink_path);
    if (index >= data.samples.size()) {
      io.err << "recognize: sample " << index << " out of range\n";
      return kExitData;
    }
    ink = data.samples[index];
  }
  io.out << rec.to_json(rec.recognize(ink, k)).dump() << "\n";
  return kExitOk;
}

inline std::atomic<Service*> g_running_service{nullptr};

inline int cmd_serve(const fs::path& model_path, const std::string& host, int port, const fs::path& static_dir,
                     Streams io) {
  const std::string bytes = read_file_bytes(model_path);
  auto rec = std::make_shared<const Recognizer>(decode_checkpoint(bytes), checkpoint_hash(bytes));
  Service service(rec, static_dir);
  const int bound = service.bind(host, port);
  io.out << "serving " << to_string(rec->checkpoint().model.kind) << " on http://" << host << ":" << bound << "\n"
         << std::flush;
  g_running_service = &service;
  auto on_signal = [](int) {
    if (Service* s = g_running_service.load()) s->stop();
  };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.run();
  g_running_service = nullptr;
  return kExitOk;
}

inline void add_feature_options(CLI::App* cmd, FeatureConfig& fc, std::string& interp) {
  cmd->add_option("--interp", interp, "interpolation: none, linear or spline")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "linear", "spline"}, CLI::ignore_case));
  cmd->add_option("--max-gap", fc.preprocess.max_gap, "largest gap between interpolated points, in cells")
      ->capture_default_str();
}

/// Runs one command line; returns the process exit code.
inline int run(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Stroke-sequence handwriting recognition toolkit", "ssdcnn"};
  app.require_subcommand(1);

  int classes = 10, n_train = 200, n_test = 50;
  std::uint64_t seed = 42;
  std::string out, data, model, ink, request, pgm, dump, host = "127.0.0.1", static_dir, interp = "linear";
  std::vector<std::string> inputs;
  std::vector<int> ks{1, 2, 3, 10};
  std::size_t index = 0;
  int k = kDefaultTopK, port = 8080, threads = 1;
  TrainArgs ta;
  std::string train_path, val_path, trace_path;
  FeatureConfig fc;

  auto* synth = app.add_subcommand("synth", "generate a synthetic train/test pair");
  synth->add_option("--classes", classes, "number of classes")->capture_default_str();
  synth->add_option("--train", n_train, "training samples per class")->capture_default_str();
  synth->add_option("--test", n_test, "test samples per class")->capture_default_str();
  synth->add_option("--seed", seed, "generator seed")->capture_default_str();
  synth->add_option("--out", out, "output directory")->required();

  auto* pot = app.add_subcommand("import-pot", "convert POT files to the canonical ink format");
  pot->add_option("inputs", inputs, "POT files")->required()->check(CLI::ExistingFile);
  pot->add_option("--out", out, "canonical ink file to write")->required();

  auto* feat = app.add_subcommand("featurize", "show the features of one sample");
  feat->add_option("--data", data, "canonical ink file")->required();
  feat->add_option("--index", index, "sample index")->capture_default_str();
  feat->add_option("--pgm", pgm, "directory for PGM dumps of the stroke maps");
  feat->add_option("--dir-out", dump, "write every sample's 512-vector, one line per sample");
  add_feature_options(feat, fc, interp);

  auto* train = app.add_subcommand("train", "two-phase training");
  train->add_option("--variant", ta.variant, "imdcnn, ssdcnn8, nn8 or ssdcnn")
      ->capture_default_str()
      ->check(CLI::IsMember({"imdcnn", "ssdcnn8", "ssdcnn-8", "nn8", "ssdcnn"}, CLI::ignore_case));
  train->add_option("--train", train_path, "training ink file")->required();
  train->add_option("--val", val_path, "validation ink file");
  train->add_option("--out", out, "checkpoint to write")->required();
  train->add_option("--trace", trace_path, "loss trace CSV to write");
  train->add_option("--phase1", ta.config.phase1_epochs, "phase I epochs")->capture_default_str();
  train->add_option("--phase2", ta.config.phase2_epochs, "phase II epochs")->capture_default_str();
  train->add_option("--batch", ta.config.batch_size, "mini-batch size")->capture_default_str();
  train->add_option("--eta", ta.config.eta, "AdaGrad learning rate")->capture_default_str();
  train->add_option("--patience", ta.config.patience, "epochs without validation gain before stopping (0 = off)")
      ->capture_default_str();
  train->add_option("--drop", ta.config.drop_prob, "point-drop augmentation probability")->capture_default_str();
  train->add_option("--seed", ta.config.seed, "shuffle and augmentation seed")->capture_default_str();
  train->add_option("--init-seed", ta.init_seed, "weight initialization seed")->capture_default_str();
  train->add_option("--threads", ta.config.threads, "worker threads")->capture_default_str();
  add_feature_options(train, fc, interp);

  auto* eval = app.add_subcommand("eval", "P@k on a labeled ink file");
  eval->add_option("--model", model, "checkpoint")->required();
  eval->add_option("--data", data, "canonical ink file")->required();
  eval->add_option("--topk", ks, "comma-separated k values")->delimiter(',')->capture_default_str();
  eval->add_option("--threads", threads, "worker threads")->capture_default_str();

  auto* recog = app.add_subcommand("recognize", "top-k candidates for one ink, as JSON");
  recog->add_option("--model", model, "checkpoint")->required();
  auto* ink_opt = recog->add_option("--ink", ink, "canonical ink file");
  recog->add_option("--index", index, "sample index within --ink")->capture_default_str();
  auto* req_opt = recog->add_option("--request", request, "JSON request body file");
  recog->add_option("-k,--k", k, "number of candidates")->capture_default_str()->check(CLI::PositiveNumber);
  ink_opt->excludes(req_opt);

  auto* serve = app.add_subcommand("serve", "HTTP recognition service");
  serve->add_option("--model", model, "checkpoint")->required();
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--port", port, "port (0 picks a free one)")->capture_default_str();
  serve->add_option("--static", static_dir, "directory of static files to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    io.err << sub->help();
    return kExitUsage;
  }

  try {
    fc.preprocess.method = interpolation_from_string(interp);
    fc.preprocess.check();
    if (synth->parsed()) return cmd_synth(classes, n_train, n_test, seed, out, io);
    if (pot->parsed()) return cmd_import_pot(inputs, out, io);
    if (feat->parsed()) return cmd_featurize(data, index, fc, pgm, dump, io);
    if (train->parsed()) {
      ta.train_path = train_path;
      ta.val_path = val_path;
      ta.out_path = out;
      ta.trace_path = trace_path;
      ta.features = fc;
      return cmd_train(ta, io);
    }
    if (eval->parsed()) return cmd_eval(model, data, ks, threads, io);
    if (recog->parsed()) {
      if (ink.empty() && request.empty()) {
        io.err << "recognize: one of --ink or --request is required\n\n" << recog->help();
        return kExitUsage;
      }
      return cmd_recognize(model, ink, index, request, k, io);
    }
    if (serve->parsed()) return cmd_serve(model, host, port, static_dir, io);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ssdcnn::cli
