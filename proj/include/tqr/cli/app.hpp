#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqr/cli/manifest.hpp"
#include "tqr/corpus/dataset.hpp"
#include "tqr/corpus/split.hpp"
#include "tqr/corpus/stats.hpp"
#include "tqr/corpus/synthetic.hpp"
#include "tqr/corpus/timex2.hpp"
#include "tqr/error.hpp"
#include "tqr/evaluation/ablation.hpp"
#include "tqr/evaluation/metrics.hpp"
#include "tqr/log.hpp"
#include "tqr/reader/model.hpp"
#include "tqr/text/pipeline.hpp"
#include "tqr/training/config.hpp"
#include "tqr/training/model_io.hpp"
#include "tqr/training/train.hpp"

namespace tqr::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

namespace detail {

inline std::vector<fs::path> files_with_extension(const fs::path& dir, std::initializer_list<const char*> exts) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = text::to_lower(entry.path().extension().string());
    for (const char* e : exts) {
      if (ext == e) out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Appends the line number to messages that report a byte position.
inline std::string with_line(const std::string& message, std::string_view content) {
  auto at = message.find("at byte ");
  if (at == std::string::npos) return message;
  std::size_t byte = 0;
  const char* p = message.data() + at + 8;
  auto res = std::from_chars(p, message.data() + message.size(), byte);
  if (res.ec != std::errc() || byte > content.size()) return message;
  auto line = 1 + std::count(content.begin(), content.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
  return message + " (line " + std::to_string(line) + ")";
}

inline std::vector<corpus::Document> load_timex2_dir(const std::vector<fs::path>& files) {
  std::vector<corpus::Document> docs;
  for (const auto& f : files) {
    std::string xml = corpus::read_file(f);
    try {
      docs.push_back(corpus::parse_timex2_document(xml, f.stem().string()));
    } catch (const InputError& e) {
      throw InputError(f.string() + ": " + with_line(e.what(), xml));
    }
  }
  return docs;
}

inline std::vector<corpus::QAExample> load_jsonl_files(const std::vector<fs::path>& files) {
  std::vector<corpus::QAExample> all;
  for (const auto& f : files) {
    auto part = corpus::load_dataset(f);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

inline std::string paragraphs_jsonl(const std::vector<corpus::Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    for (const auto& p : d.paragraphs) {
      nlohmann::ordered_json r;
      r["doc_id"] = p.doc_id;
      r["para_id"] = p.para_id;
      r["paragraph_text"] = p.text;
      auto spans = nlohmann::ordered_json::array();
      for (const auto& s : p.timexes) {
        nlohmann::ordered_json t;
        t["start"] = s.char_start;
        t["end"] = s.char_end;
        t["text"] = s.text;
        if (s.val) t["val"] = *s.val;
        spans.push_back(std::move(t));
      }
      r["timexes"] = std::move(spans);
      out += r.dump() + "\n";
    }
  }
  return out;
}

inline training::TrainConfig load_config(const std::string& path) {
  if (path.empty()) return training::TrainConfig{};
  return training::parse_config(corpus::read_file(path), path);
}

inline std::string read_text_or_file(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && arg.size() < 4096 && fs::is_regular_file(arg, ec)) return corpus::read_file(arg);
  return arg;
}

inline void print_report(std::ostream& out, const std::string& label, const evaluation::MetricsReport& r) {
  out << label << ": start_acc=" << evaluation::format_fixed(r.start_acc, 2)
      << " end_acc=" << evaluation::format_fixed(r.end_acc, 2) << " mean=" << evaluation::format_fixed(r.mean, 2)
      << " exact_match=" << evaluation::format_fixed(r.exact_match, 2) << " n=" << r.n_examples << "\n";
}

}  // namespace detail

struct PrepareOptions {
  std::string input;
  std::size_t synthetic = 0;
  std::string out;
  std::uint64_t seed = 7;
};

inline int cmd_prepare(const PrepareOptions& o, std::ostream& out) {
  if (o.input.empty() == (o.synthetic == 0)) throw InputError("prepare needs exactly one of --input or --synthetic N (N >= 1)");
  if (o.out.empty()) throw InputError("prepare needs --out");
  std::vector<corpus::QAExample> examples;
  std::vector<fs::path> sources;
  if (!o.input.empty()) {
    if (!fs::is_directory(o.input)) throw InputError("input directory '" + o.input + "' does not exist");
    sources = detail::files_with_extension(o.input, {".jsonl"});
    if (sources.empty()) {
      auto xml = detail::files_with_extension(o.input, {".xml", ".sgm", ".tml"});
      if (xml.empty()) throw InputError("no .jsonl or TIMEX2 .xml files in '" + o.input + "'");
      auto docs = detail::load_timex2_dir(xml);
      auto stats = corpus::corpus_stats(docs);
      fs::create_directories(o.out);
      corpus::write_file(fs::path(o.out) / "paragraphs.jsonl", detail::paragraphs_jsonl(docs));
      RunManifest m;
      m.command = "prepare";
      m.seed = o.seed;
      m.datasets = xml;
      m.artifacts["paragraphs"] = "paragraphs.jsonl";
      m.write(fs::path(o.out) / "run_manifest.json");
      out << corpus::format_stats(stats) << "\n";
      out << "no question-answer records found: wrote paragraph skeletons, no split\n";
      return kExitOk;
    }
    examples = detail::load_jsonl_files(sources);
  } else {
    examples = corpus::generate_synthetic(o.synthetic, o.seed);
  }
  auto split = corpus::split_dataset(examples, o.seed);
  const fs::path dir(o.out);
  corpus::write_split(split, dir);
  RunManifest m;
  m.command = "prepare";
  m.seed = o.seed;
  m.config["source"] = o.input.empty() ? "synthetic" : "input";
  if (o.synthetic) m.config["synthetic_paragraphs"] = o.synthetic;
  m.datasets = sources;
  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "split_manifest.json"}) {
    m.artifacts[name] = name;
  }
  m.write(dir / "run_manifest.json");
  out << corpus::format_stats(corpus::corpus_stats(examples)) << "\n";
  for (const auto& [name, part] : {std::pair<const char*, const std::vector<corpus::QAExample>*>{"train", &split.train},
                                   {"dev", &split.dev}, {"test", &split.test}}) {
    out << name << ": paragraphs=" << corpus::distinct_paragraphs(*part).size() << " examples=" << part->size() << "\n";
  }
  return kExitOk;
}

struct TrainOptions {
  std::string data;
  std::string config;
  std::string out;
};

inline int cmd_train(const TrainOptions& o, std::ostream& out) {
  if (o.data.empty() || o.out.empty()) throw InputError("train needs --data and --out");
  auto cfg = detail::load_config(o.config);
  auto split = corpus::read_split(o.data);
  const fs::path dir(o.out);
  fs::create_directories(dir);

  RunManifest m;
  m.command = "train";
  m.seed = cfg.seed;
  m.config["text"] = training::dump_config(cfg);
  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl"}) {
    if (fs::exists(fs::path(o.data) / name)) m.datasets.push_back(fs::path(o.data) / name);
  }
  if (!o.config.empty()) m.datasets.push_back(o.config);
  m.artifacts["checkpoint"] = training::kCheckpointFile;
  m.artifacts["final_checkpoint"] = "final.ckpt";
  m.artifacts["loss_log"] = "loss.csv";
  m.write(dir / "run_manifest.json");

  auto data = training::prepare_data(split, cfg);
  training::TrainHooks hooks;
  hooks.on_epoch = [&](const training::EpochLog& e) {
    out << "epoch " << e.epoch << " train_loss=" << evaluation::format_number(e.train_loss);
    if (e.dev) out << " dev_mean=" << evaluation::format_fixed(e.dev->mean, 2) << " dev_exact=" << evaluation::format_fixed(e.dev->exact_match, 2);
    out << "\n";
  };
  hooks.on_checkpoint = [&](std::size_t epoch, const nn::ParameterStore<float>& params) {
    fs::create_directories(dir / "checkpoints");
    nlohmann::ordered_json extra;
    extra["epoch"] = epoch;
    training::save_model_checkpoint(dir / "checkpoints" / ("epoch-" + std::to_string(epoch) + ".ckpt"), params, cfg.model, extra);
  };
  auto result = training::train(data.train, data.dev, cfg, hooks);

  training::TrainedModel model{cfg.model, result.best_params, data.embeddings, data.df};
  nlohmann::ordered_json extra;
  extra["epoch"] = result.best_epoch;
  extra["seed"] = cfg.seed;
  training::save_model(dir, model, extra);
  extra["epoch"] = cfg.epochs;
  training::save_model_checkpoint(dir / "final.ckpt", result.final_params, cfg.model, extra);
  corpus::write_file(dir / "loss.csv", training::loss_log_csv(result.log));
  out << "best epoch " << result.best_epoch << " -> " << (dir / training::kCheckpointFile).string() << "\n";
  return kExitOk;
}

struct EvalOptions {
  std::string data;
  std::string ckpt;
  std::string split = "dev";
  std::string decode = "raw";
  std::string csv;
};

inline int cmd_eval(const EvalOptions& o, std::ostream& out) {
  if (o.split != "dev" && o.split != "test" && o.split != "train") throw InputError("--split must be train, dev or test");
  const auto primary = reader::parse_decode_mode(o.decode);
  auto model = training::load_model(o.ckpt);
  auto examples = corpus::load_dataset(fs::path(o.data) / (o.split + ".jsonl"));
  auto inputs = training::prepare_inputs(examples, model.embeddings, model.df);
  const auto secondary = primary == reader::DecodeMode::raw_argmax ? reader::DecodeMode::constrained : reader::DecodeMode::raw_argmax;
  std::vector<std::pair<std::string, evaluation::MetricsReport>> rows;
  for (auto mode : {primary, secondary}) {
    rows.emplace_back(o.split + "/" + std::string(reader::to_string(mode)), evaluation::evaluate(inputs, model.params, model.config, mode));
  }
  detail::print_report(out, rows[0].first, rows[0].second);
  out << evaluation::format_table(rows, "split/decode");
  std::string csv = evaluation::csv_header("split_decode");
  for (const auto& [label, r] : rows) csv += evaluation::csv_row(label, r);
  fs::path csv_path = o.csv.empty() ? fs::path(o.ckpt).parent_path() / ("eval_" + o.split + ".csv") : fs::path(o.csv);
  corpus::write_file(csv_path, csv);
  return kExitOk;
}

struct AblateOptions {
  std::string data;
  std::string config;
  std::string specs = "presets";
  std::string out;
};

inline int cmd_ablate(const AblateOptions& o, std::ostream& out) {
  auto specs = o.specs == "presets" ? evaluation::preset_specs()
                                   : evaluation::parse_specs(corpus::read_file(o.specs), o.specs);
  auto cfg = detail::load_config(o.config);
  auto split = corpus::read_split(o.data);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    RunManifest m;
    m.command = "ablate";
    m.seed = cfg.seed;
    m.config["text"] = training::dump_config(cfg);
    m.config["specs"] = evaluation::format_specs(specs);
    for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl"}) {
      if (fs::exists(fs::path(o.data) / name)) m.datasets.push_back(fs::path(o.data) / name);
    }
    m.artifacts["table"] = "ablation.txt";
    m.artifacts["csv"] = "ablation.csv";
    m.write(fs::path(o.out) / "run_manifest.json");
  }
  auto data = training::prepare_data(split, cfg);
  out << "evaluating on " << (data.dev.empty() ? "train" : "dev") << " split\n";
  auto results = evaluation::run_ablation(data, cfg, specs, [&](const evaluation::AblationResult& r) {
    out << "done: " << r.spec.name << " exact_match=" << evaluation::format_fixed(r.report.exact_match, 2) << "\n";
  });
  const std::string table = evaluation::format_ablation_table(results);
  out << table;
  if (!o.out.empty()) {
    corpus::write_file(fs::path(o.out) / "ablation.txt", table);
    corpus::write_file(fs::path(o.out) / "ablation.csv", evaluation::ablation_csv(results));
  }
  return kExitOk;
}

struct AskOptions {
  std::string ckpt;
  std::string paragraph;
  std::string question;
  std::string decode = "constrained";
};

inline int cmd_ask(const AskOptions& o, std::ostream& out) {
  const auto mode = reader::parse_decode_mode(o.decode);
  const std::string paragraph = detail::read_text_or_file(o.paragraph);
  auto p_tokens = text::tokenize_and_annotate(paragraph);
  auto q_tokens = text::tokenize_and_annotate(o.question);
  if (p_tokens.empty()) throw InputError("empty paragraph");
  if (q_tokens.empty()) throw InputError("empty question");
  auto model = training::load_model(o.ckpt);
  text::apply_tfidf(p_tokens, model.df);
  auto inputs = reader::make_inputs(p_tokens, q_tokens, model.embeddings);
  auto result = reader::predict(model.params, inputs, model.config, mode);
  const auto& s = result.span;
  if (s.start <= s.end) {
    out << "answer: " << text::detokenize(paragraph, p_tokens, s.start, s.end) << "\n";
  } else {
    out << "answer: (none: end token precedes start token)\n";
  }
  out << "span: [" << s.start << ", " << s.end << "] (" << p_tokens[s.start].text << " .. " << p_tokens[s.end].text << ")\n";
  out << "start_prob: " << evaluation::format_fixed(s.start_prob, 6) << "\n";
  out << "end_prob: " << evaluation::format_fixed(s.end_prob, 6) << "\n";
  out << "decode: " << reader::to_string(mode) << "\n";
  return kExitOk;
}

struct StatsOptions {
  std::string data;
  std::string input;
};

inline int cmd_stats(const StatsOptions& o, std::ostream& out) {
  if (o.data.empty() == o.input.empty()) throw InputError("stats needs exactly one of --data or --input");
  if (!o.input.empty()) {
    if (!fs::is_directory(o.input)) throw InputError("input directory '" + o.input + "' does not exist");
    auto xml = detail::files_with_extension(o.input, {".xml", ".sgm", ".tml"});
    if (xml.empty()) throw InputError("no TIMEX2 .xml files in '" + o.input + "'");
    out << corpus::format_stats(corpus::corpus_stats(detail::load_timex2_dir(xml))) << "\n";
    return kExitOk;
  }
  if (!fs::is_directory(o.data)) throw InputError("data directory '" + o.data + "' does not exist");
  auto files = detail::files_with_extension(o.data, {".jsonl"});
  if (files.empty()) throw InputError("no .jsonl files in '" + o.data + "'");
  for (const auto& f : files) {
    out << f.filename().string() << ": " << corpus::format_stats(corpus::corpus_stats(corpus::load_dataset(f))) << "\n";
  }
  return kExitOk;
}

// Entry point shared by the tqr binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  auto previous = set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
  struct Restore {
    WarningSink sink;
    ~Restore() { set_warning_sink(std::move(sink)); }
  } restore{std::move(previous)};

  CLI::App app{"Extractive temporal question answering toolkit"};
  app.set_version_flag("--version", kToolVersion);
  bool print_config = false;
  std::string print_config_file;
  app.add_flag("--print-config", print_config, "Print the training configuration with every default and exit");
  app.add_option("--config", print_config_file, "Configuration file merged into --print-config output");

  PrepareOptions prep;
  auto* c_prep = app.add_subcommand("prepare", "Build train/dev/test splits from TIMEX2/JSONL input or a synthetic corpus");
  c_prep->add_option("--input", prep.input, "Directory of dataset .jsonl files or TIMEX2 .xml files");
  c_prep->add_option("--synthetic", prep.synthetic, "Generate N synthetic paragraphs");
  c_prep->add_option("--out", prep.out, "Output directory")->required();
  c_prep->add_option("--seed", prep.seed, "Seed for generation and splitting");

  TrainOptions tr;
  auto* c_train = app.add_subcommand("train", "Train a reader on a prepared split");
  c_train->add_option("--data", tr.data, "Prepared split directory")->required();
  c_train->add_option("--config", tr.config, "Configuration file (key = value)");
  c_train->add_option("--out", tr.out, "Output directory")->required();

  EvalOptions ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  c_eval->add_option("--data", ev.data, "Prepared split directory")->required();
  c_eval->add_option("--ckpt", ev.ckpt, "Checkpoint file (model.ckpt)")->required();
  c_eval->add_option("--split", ev.split, "dev or test");
  c_eval->add_option("--decode", ev.decode, "raw or constrained");
  c_eval->add_option("--csv", ev.csv, "CSV output path (default: next to the checkpoint)");

  AblateOptions ab;
  auto* c_ablate = app.add_subcommand("ablate", "Run the feature ablation protocol");
  c_ablate->add_option("--data", ab.data, "Prepared split directory")->required();
  c_ablate->add_option("--config", ab.config, "Configuration file (key = value)");
  c_ablate->add_option("--specs", ab.specs, "'presets' or a spec file (name<TAB>feature groups)");
  c_ablate->add_option("--out", ab.out, "Directory for the table and CSV");

  AskOptions ask;
  auto* c_ask = app.add_subcommand("ask", "Answer one question about one paragraph");
  c_ask->add_option("--ckpt", ask.ckpt, "Checkpoint file (model.ckpt)")->required();
  c_ask->add_option("--paragraph", ask.paragraph, "Paragraph text, or a file holding it")->required();
  c_ask->add_option("--question", ask.question, "Question text")->required();
  c_ask->add_option("--decode", ask.decode, "raw or constrained");

  StatsOptions st;
  auto* c_stats = app.add_subcommand("stats", "Print corpus statistics");
  c_stats->add_option("--data", st.data, "Directory of dataset .jsonl files");
  c_stats->add_option("--input", st.input, "Directory of TIMEX2 .xml files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (print_config) {
      out << training::dump_config(detail::load_config(print_config_file));
      return kExitOk;
    }
    if (c_prep->parsed()) return cmd_prepare(prep, out);
    if (c_train->parsed()) return cmd_train(tr, out);
    if (c_eval->parsed()) return cmd_eval(ev, out);
    if (c_ablate->parsed()) return cmd_ablate(ab, out);
    if (c_ask->parsed()) return cmd_ask(ask, out);
    if (c_stats->parsed()) return cmd_stats(st, out);
    out << app.help();
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace tqr::cli
