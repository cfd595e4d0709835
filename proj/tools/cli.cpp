#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "depscan/cesd.hpp"
#include "depscan/corpus.hpp"
#include "depscan/error.hpp"
#include "depscan/eval.hpp"
#include "depscan/features.hpp"
#include "depscan/hash.hpp"
#include "depscan/lexicon.hpp"
#include "depscan/naive_bayes.hpp"
#include "depscan/patterns.hpp"
#include "depscan/text.hpp"
#include "json.hpp"

namespace depscan::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
auto in_file(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  } catch (const json::exception& e) {
    throw DataError(path + ": corrupt-payload: " + e.what());
  }
}

// Input files read so far, with their content hashes.
class Inputs {
 public:
  std::string read(const std::string& role, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    record_[role] = json{{"path", path}, {"sha256", sha256_hex(content)}};
    return content;
  }

  json to_json() const { return record_; }

 private:
  json record_ = json::object();
};

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn fn) {
  std::vector<T> out(n);
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<Document> read_corpus(Inputs& inputs, const std::string& role,
                                  const std::string& path) {
  const std::string content = inputs.read(role, path);
  return in_file(path, [&] {
    std::istringstream in(content);
    return load_corpus(in).documents;
  });
}

json read_json(Inputs& inputs, const std::string& role, const std::string& path) {
  const std::string content = inputs.read(role, path);
  return in_file(path, [&] { return json::parse(content); });
}

LexiconBundle read_lexicon(Inputs& inputs, const std::string& path) {
  if (path.empty()) return build_bundle(default_seed_config(), nullptr);
  const json doc = read_json(inputs, "lexicon", path);
  return in_file(path, [&] { return lexicon_from_json(doc); });
}

std::pair<int, int> parse_ngram(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int lo = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string rest = text.substr(colon + 1);
    const int hi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    if (lo < 1 || lo > hi) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--ngram expects MIN:MAX with 1 <= MIN <= MAX, got '" + text + "'");
  }
}

struct ThresholdSpec {
  bool calibrated = false;
  double value = kDefaultFixedThreshold;
  std::string path;
};

ThresholdSpec parse_threshold(const std::string& text) {
  ThresholdSpec spec;
  if (text.rfind("fixed:", 0) == 0) {
    const std::string v = text.substr(6);
    try {
      std::size_t used = 0;
      spec.value = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::logic_error&) {
      throw UsageError("--threshold fixed:<value> needs a number, got '" + v + "'");
    }
    return spec;
  }
  if (text.rfind("calibrated:", 0) == 0 && text.size() > 11) {
    spec.calibrated = true;
    spec.path = text.substr(11);
    return spec;
  }
  throw UsageError("--threshold expects fixed:<value> or calibrated:<path>, got '" + text + "'");
}

std::map<std::string, std::vector<CommentText>> comments_by_video(
    std::span<const Document> docs) {
  std::map<std::string, std::vector<CommentText>> out;
  for (const auto& d : docs) {
    if (d.kind == DocumentKind::comment) {
      out[*d.video_id].push_back({d.id, tokenize(d.text)});
    }
  }
  return out;
}

// Mean video score of the depressive-labeled transcripts in a corpus file,
// computed over their comments.
CesdThreshold resolve_threshold(const ThresholdSpec& spec, Inputs& inputs,
                                const LexiconBundle& bundle, AggregateMode mode,
                                Counting counting) {
  if (!spec.calibrated) {
    try {
      return fixed_threshold(spec.value);
    } catch (const Error& e) {
      throw UsageError(std::string("--threshold: ") + e.what());
    }
  }
  const auto docs = read_corpus(inputs, "calibration", spec.path);
  const auto comments = comments_by_video(docs);
  std::vector<CesdReport> reports;
  for (const auto& d : docs) {
    if (d.kind != DocumentKind::transcript || d.label != Label::depressive) continue;
    const auto it = comments.find(d.id);
    if (it == comments.end()) continue;
    reports.push_back(video_cesd(d.id, it->second, bundle, mode, counting));
  }
  return in_file(spec.path, [&] { return calibrate_threshold(reports); });
}

std::string now_utc() {
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
  return format_timestamp(now);
}

json header(std::string_view kind, std::string_view command, json config,
            const Inputs& inputs) {
  return json{{"version", kSchemaVersion},
              {"kind", kind},
              {"run", {{"command", command}, {"config", std::move(config)},
                       {"inputs", inputs.to_json()}}}};
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  write_atomically(path, text);
  const json meta{{"output", path},
                  {"sha256", sha256_hex(text)},
                  {"generated_at", now_utc()}};
  write_atomically(path + ".meta.json", meta.dump(2) + "\n");
}

struct LoadedModel {
  FeatureSpace space;
  NbModel model;
  std::vector<std::string> train_ids;
};

LoadedModel read_model(Inputs& inputs, const std::string& path) {
  const json doc = read_json(inputs, "model", path);
  return in_file(path, [&] {
    if (!doc.is_object() || doc.value("kind", "") != "model_bundle") {
      throw Error(ErrorKind::corrupt_payload, "not a model bundle");
    }
    if (doc.value("version", 0) != kSchemaVersion) {
      throw Error(ErrorKind::version_unsupported, "unsupported model bundle version");
    }
    LoadedModel loaded{feature_space_from_json(doc.at("feature_space")),
                       model_from_json(doc.at("model")),
                       doc.at("training").at("train_ids").get<std::vector<std::string>>()};
    check_compatible(loaded.model, loaded.space);
    return loaded;
  });
}

Prediction classify_text(const LoadedModel& m, const TokenStream& tokens) {
  return predict(m.model, m.space.vectorize(tokens));
}

json prediction_json(const std::string& id, const Prediction& p) {
  return json{{"id", id},
              {"label", to_string(p.label)},
              {"posterior_depressive", p.posterior[0]},
              {"posterior_non_depressive", p.posterior[1]}};
}

// Options shared across subcommands.
struct Options {
  std::string output;
  int jobs = 1;

  std::string seeds;
  std::string embeddings;
  std::optional<int> top_k;
  std::optional<double> min_sim;

  std::string lexicon;
  std::string corpus;
  std::string comments;
  std::string videos;
  std::string model;
  std::string history;
  std::string rules;
  bool default_rules = false;
  std::string labeled_out;
  std::string plot_data;

  std::string features = "tfidf+empath";
  std::string ngram = "2:3";
  std::size_t max_features = 5000;
  double alpha = 1.0;
  double test_fraction = 0.3;
  std::uint64_t seed = 0;

  std::string counting = "presence";
  std::string aggregate = "connotation_weighted";
  std::string threshold;

  int window_days = 24;
  int overlap_days = 10;
  std::size_t decline_min_windows = 3;
  double decline_slope = 0.05;
  std::size_t rumination_min_run = 5;
  double frequency_threshold = 0.5;
  std::size_t frequency_min_events = 5;
};

Counting counting_of(const Options& o) {
  try {
    return parse_counting(o.counting);
  } catch (const Error& e) {
    throw UsageError(std::string("--counting: ") + e.what());
  }
}

AggregateMode aggregate_of(const Options& o) {
  try {
    return parse_aggregate_mode(o.aggregate);
  } catch (const Error& e) {
    throw UsageError(std::string("--aggregate: ") + e.what());
  }
}

int cmd_lexicon_expand(const Options& o, std::ostream& out) {
  Inputs inputs;
  SeedConfig config = default_seed_config();
  if (!o.seeds.empty()) {
    const json doc = read_json(inputs, "seeds", o.seeds);
    config = in_file(o.seeds, [&] { return seed_config_from_json(doc); });
  }
  if (o.top_k) config.expansion.top_k = *o.top_k;
  if (o.min_sim) config.expansion.min_sim = *o.min_sim;
  std::optional<EmbeddingTable> table;
  if (!o.embeddings.empty()) {
    const std::string content = inputs.read("embeddings", o.embeddings);
    table = in_file(o.embeddings, [&] {
      std::istringstream in(content);
      return load_embeddings(in);
    });
  }
  const auto bundle = in_file(o.embeddings.empty() ? o.seeds : o.embeddings, [&] {
    return build_bundle(config, table ? &*table : nullptr);
  });
  json doc = to_json(bundle);
  const json run_config{{"top_k", config.expansion.top_k},
                        {"min_sim", config.expansion.min_sim},
                        {"embeddings", !o.embeddings.empty()}};
  doc["run"] = header("lexicon", "lexicon expand", run_config, inputs)["run"];
  doc["content_hash"] = bundle.content_hash();
  emit(doc, o.output, out);
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  Inputs inputs;
  const auto counting = counting_of(o);
  const auto mode = aggregate_of(o);
  const std::optional<ThresholdSpec> spec =
      o.threshold.empty() ? std::nullopt : std::optional(parse_threshold(o.threshold));
  const auto bundle = read_lexicon(inputs, o.lexicon);
  const auto docs = read_corpus(inputs, "comments", o.comments);
  const auto grouped = comments_by_video(docs);
  const std::vector<std::pair<std::string, std::vector<CommentText>>> videos(grouped.begin(),
                                                                            grouped.end());
  const auto reports = parallel_map<CesdReport>(videos.size(), o.jobs, [&](std::size_t i) {
    return video_cesd(videos[i].first, videos[i].second, bundle, mode, counting);
  });
  json config{{"counting", o.counting}, {"aggregate", o.aggregate},
              {"threshold", o.threshold.empty() ? json(nullptr) : json(o.threshold)}};
  json doc = header("cesd_scores", "score", config, inputs);
  doc["lexicon_hash"] = bundle.content_hash();
  json items = json::array();
  std::optional<CesdThreshold> threshold;
  if (spec) threshold = resolve_threshold(*spec, inputs, bundle, mode, counting);
  for (const auto& r : reports) {
    json item = to_json(r);
    if (threshold) item["label"] = to_string(label_by_threshold(r, *threshold));
    items.push_back(std::move(item));
  }
  doc["run"]["inputs"] = inputs.to_json();
  doc["threshold"] = threshold ? to_json(*threshold) : json(nullptr);
  doc["reports"] = std::move(items);
  emit(doc, o.output, out);
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  Inputs inputs;
  const auto [n_min, n_max] = parse_ngram(o.ngram);
  FeatureConfig fc;
  try {
    fc.mode = parse_feature_mode(o.features);
  } catch (const Error& e) {
    throw UsageError(std::string("--features: ") + e.what());
  }
  fc.n_min = n_min;
  fc.n_max = n_max;
  fc.max_features = o.max_features;
  if (!(o.test_fraction >= 0.0 && o.test_fraction < 1.0)) {
    throw UsageError("--test-fraction must lie in [0, 1)");
  }
  if (!(o.alpha > 0.0)) throw UsageError("--alpha must be positive");

  const auto bundle = read_lexicon(inputs, o.lexicon);
  const auto docs = read_corpus(inputs, "corpus", o.corpus);
  std::vector<Document> labeled;
  for (const auto& d : docs) {
    if (d.kind == DocumentKind::transcript && d.label) labeled.push_back(d);
  }
  std::sort(labeled.begin(), labeled.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });

  std::vector<Document> train_docs = labeled;
  std::vector<Document> test_docs;
  if (o.test_fraction > 0.0) {
    auto parts = in_file(o.corpus, [&] { return split(labeled, o.test_fraction, o.seed); });
    train_docs = std::move(parts.train);
    test_docs = std::move(parts.test);
  }
  const auto tokenize_all = [&](const std::vector<Document>& ds) {
    return parallel_map<TokenStream>(ds.size(), o.jobs,
                                     [&](std::size_t i) { return tokenize(ds[i].text); });
  };
  const auto train_tokens = tokenize_all(train_docs);
  const auto space =
      in_file(o.corpus, [&] { return FeatureSpace::fit(fc, bundle, train_tokens); });
  const auto vectors = parallel_map<FeatureVector>(
      train_tokens.size(), o.jobs, [&](std::size_t i) { return space.vectorize(train_tokens[i]); });
  std::vector<Label> labels;
  for (const auto& d : train_docs) labels.push_back(*d.label);
  const auto model =
      in_file(o.corpus, [&] { return train(vectors, labels, o.alpha, space.config_hash()); });

  json holdout = nullptr;
  if (!test_docs.empty()) {
    const auto test_tokens = tokenize_all(test_docs);
    const auto predicted = parallel_map<Label>(test_tokens.size(), o.jobs, [&](std::size_t i) {
      return predict(model, space.vectorize(test_tokens[i])).label;
    });
    std::vector<Label> reference;
    for (const auto& d : test_docs) reference.push_back(*d.label);
    holdout = to_json(confusion(predicted, reference));
  }
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  for (const auto& d : train_docs) train_ids.push_back(d.id);
  for (const auto& d : test_docs) test_ids.push_back(d.id);

  const json config{{"features", to_string(fc.mode)},
                    {"ngram", {fc.n_min, fc.n_max}},
                    {"max_features", fc.max_features},
                    {"alpha", o.alpha},
                    {"test_fraction", o.test_fraction},
                    {"seed", o.seed}};
  json doc = header("model_bundle", "train", config, inputs);
  doc["feature_space"] = to_json(space);
  doc["model"] = to_json(model);
  doc["training"] = {{"train_ids", train_ids}, {"test_ids", test_ids}, {"holdout", holdout}};
  emit(doc, o.output, out);
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  Inputs inputs;
  const auto loaded = read_model(inputs, o.model);
  const auto docs = read_corpus(inputs, "corpus", o.corpus);
  std::vector<const Document*> transcripts;
  for (const auto& d : docs) {
    if (d.kind == DocumentKind::transcript) transcripts.push_back(&d);
  }
  std::sort(transcripts.begin(), transcripts.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });
  const auto predictions = parallel_map<Prediction>(
      transcripts.size(), o.jobs,
      [&](std::size_t i) { return classify_text(loaded, tokenize(transcripts[i]->text)); });
  json items = json::array();
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    items.push_back(prediction_json(transcripts[i]->id, predictions[i]));
  }
  json doc = header("predictions", "classify", json::object(), inputs);
  doc["predictions"] = std::move(items);
  emit(doc, o.output, out);
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  Inputs inputs;
  const auto counting = counting_of(o);
  const auto mode = aggregate_of(o);
  const std::string threshold_text =
      o.threshold.empty() ? "fixed:" + json(kDefaultFixedThreshold).dump() : o.threshold;
  const auto spec = parse_threshold(threshold_text);
  const auto loaded = read_model(inputs, o.model);
  const auto bundle = o.lexicon.empty() ? loaded.space.bundle() : read_lexicon(inputs, o.lexicon);
  const auto video_docs = read_corpus(inputs, "videos", o.videos);
  const auto comment_docs = o.comments.empty() ? video_docs
                                               : read_corpus(inputs, "comments", o.comments);
  const auto threshold = resolve_threshold(spec, inputs, bundle, mode, counting);

  auto comments = comments_by_video(comment_docs);
  std::vector<const Document*> transcripts;
  for (const auto& d : video_docs) {
    if (d.kind == DocumentKind::transcript) transcripts.push_back(&d);
  }
  std::sort(transcripts.begin(), transcripts.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });
  const auto samples = parallel_map<VideoSample>(transcripts.size(), o.jobs, [&](std::size_t i) {
    const auto it = comments.find(transcripts[i]->id);
    return VideoSample{transcripts[i]->id, tokenize(transcripts[i]->text),
                       it == comments.end() ? std::vector<CommentText>{} : it->second};
  });
  const auto evaluation = in_file(o.videos, [&] {
    return proxy_evaluate(loaded.model, loaded.space, samples, bundle, threshold,
                          {mode, counting});
  });

  std::map<std::string, CategoryGroup> groups;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (samples[i].comments.empty()) continue;
    const auto* d = transcripts[i];
    const std::string category = d->category  ? *d->category
                                 : d->label   ? std::string(to_string(*d->label))
                                              : std::string("uncategorized");
    auto& group = groups[category];
    group.category = category;
    group.reports.push_back(video_cesd(d->id, samples[i].comments, bundle, mode, counting));
  }
  std::vector<CategoryGroup> group_list;
  for (auto& [name, g] : groups) group_list.push_back(std::move(g));
  json stats = json::array();
  if (!group_list.empty()) {
    for (const auto& s : category_stats(group_list)) stats.push_back(to_json(s));
  }
  if (!o.plot_data.empty()) write_atomically(o.plot_data, plot_table(group_list));

  const std::set<std::string> trained(loaded.train_ids.begin(), loaded.train_ids.end());
  json overlap = json::array();
  for (const auto* d : transcripts) {
    if (trained.count(d->id)) overlap.push_back(d->id);
  }
  const json config{{"counting", o.counting},
                    {"aggregate", o.aggregate},
                    {"threshold", threshold_text},
                    {"plot_data", o.plot_data.empty() ? json(nullptr) : json(o.plot_data)}};
  json doc = header("evaluation", "evaluate", config, inputs);
  doc["threshold"] = to_json(threshold);
  doc["evaluation"] = to_json(evaluation);
  doc["category_stats"] = std::move(stats);
  doc["training_overlap"] = std::move(overlap);
  emit(doc, o.output, out);
  return kExitOk;
}

std::vector<WatchEvent> read_history(Inputs& inputs, const Options& o) {
  const std::string content = inputs.read("history", o.history);
  std::optional<LoadedModel> loaded;
  std::map<std::string, std::string> transcripts;
  auto need_model = [&]() -> const LoadedModel& {
    if (!loaded) {
      if (o.model.empty()) {
        throw UsageError("history events without a label need --model for classification");
      }
      loaded = read_model(inputs, o.model);
      if (!o.videos.empty()) {
        for (const auto& d : read_corpus(inputs, "videos", o.videos)) {
          if (d.kind == DocumentKind::transcript) transcripts[d.id] = d.text;
        }
      }
    }
    return *loaded;
  };

  std::vector<WatchEvent> events;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fail = [&](const std::string& msg) {
      throw DataError(o.history + ": parse-error at line " + std::to_string(line_no) + ": " + msg);
    };
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception&) {
      fail("invalid JSON");
    }
    if (!record.is_object() || !record.contains("video_id") || !record["video_id"].is_string() ||
        !record.contains("timestamp") || !record["timestamp"].is_string()) {
      fail("record needs string fields video_id and timestamp");
    }
    WatchEvent event;
    event.video_id = record["video_id"].get<std::string>();
    try {
      event.timestamp = parse_timestamp(record["timestamp"].get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
    if (record.contains("score") && record["score"].is_number()) {
      event.score = record["score"].get<double>();
    }
    if (record.contains("label") && !record["label"].is_null()) {
      const auto label = record["label"].is_string()
                             ? parse_label(record["label"].get<std::string>())
                             : std::nullopt;
      if (!label) fail("unknown label");
      event.label = *label;
    } else {
      const auto& m = need_model();
      std::string text;
      if (record.contains("text") && record["text"].is_string()) {
        text = record["text"].get<std::string>();
      } else if (const auto it = transcripts.find(event.video_id); it != transcripts.end()) {
        text = it->second;
      } else {
        fail("no label, text or transcript for video '" + event.video_id + "'");
      }
      const auto p = classify_text(m, tokenize(text));
      event.label = p.label;
      if (!event.score) event.score = p.posterior[0];
    }
    events.push_back(std::move(event));
  }
  return events;
}

int cmd_patterns(const Options& o, std::ostream& out) {
  Inputs inputs;
  if (o.rumination_min_run < 2) throw UsageError("--rumination-min-run must be at least 2");
  if (!(o.frequency_threshold >= 0.0 && o.frequency_threshold <= 1.0)) {
    throw UsageError("--frequency-threshold must lie in [0, 1]");
  }
  const WindowParams wp{o.window_days, o.overlap_days};
  if (wp.overlap_days < 0 || wp.window_days <= wp.overlap_days) {
    throw UsageError("--window-days must exceed --overlap-days >= 0");
  }
  auto history = read_history(inputs, o);
  const auto series = in_file(o.history, [&] { return windows(history, wp); });
  const std::vector<PatternDetection> detections{
      detect_decline(series, {o.decline_min_windows, o.decline_slope}),
      detect_rumination(history, {o.rumination_min_run}),
      detect_high_frequency(series, {o.frequency_threshold, o.frequency_min_events}),
  };
  const json config{{"window_days", o.window_days},
                    {"overlap_days", o.overlap_days},
                    {"decline_min_windows", o.decline_min_windows},
                    {"decline_slope", o.decline_slope},
                    {"rumination_min_run", o.rumination_min_run},
                    {"frequency_threshold", o.frequency_threshold},
                    {"frequency_min_events", o.frequency_min_events}};
  json doc = header("pattern_report", "patterns", config, inputs);
  doc["n_events"] = history.size();
  json ws = json::array();
  for (const auto& w : series) ws.push_back(to_json(w));
  json ds = json::array();
  for (const auto& d : detections) ds.push_back(to_json(d));
  doc["windows"] = std::move(ws);
  doc["detections"] = std::move(ds);
  emit(doc, o.output, out);
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  Inputs inputs;
  if (!o.rules.empty() && o.default_rules) {
    throw UsageError("--rules and --default-rules are mutually exclusive");
  }
  auto docs = read_corpus(inputs, "corpus", o.corpus);
  std::optional<std::vector<KeywordRule>> rules;
  if (o.default_rules) rules = default_keyword_rules();
  if (!o.rules.empty()) {
    const json doc = read_json(inputs, "rules", o.rules);
    rules = in_file(o.rules, [&] { return keyword_rules_from_json(doc); });
  }
  std::size_t relabeled = 0;
  if (rules) {
    for (auto& d : docs) {
      auto labeled = keyword_label(d, *rules);
      relabeled += !(labeled == d);
      d = std::move(labeled);
    }
  }
  if (!o.labeled_out.empty()) {
    std::ostringstream buf;
    write_corpus(docs, buf);
    write_atomically(o.labeled_out, buf.str());
  }
  const json config{{"rules", o.default_rules ? json("default") : o.rules.empty() ? json(nullptr)
                                                                                : json(o.rules)},
                    {"labeled_out", o.labeled_out.empty() ? json(nullptr) : json(o.labeled_out)}};
  json doc = header("corpus_stats", "stats", config, inputs);
  doc["stats"] = to_json(corpus_stats(docs));
  doc["keyword_labeled"] = rules ? json(relabeled) : json(nullptr);
  emit(doc, o.output, out);
  return kExitOk;
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("-o,--output", o.output, "Output path (stdout when omitted)");
}

void add_jobs(CLI::App* cmd, Options& o) {
  cmd->add_option("--jobs", o.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
}

void add_scoring(CLI::App* cmd, Options& o) {
  cmd->add_option("--counting", o.counting, "presence | occurrence")
      ->capture_default_str();
  cmd->add_option("--aggregate", o.aggregate, "connotation_weighted | density_only")
      ->capture_default_str();
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw DataError(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw DataError(path + ": rename failed: " + ec.message());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Depression screening analytics for video transcripts and comments", "depscan"};
  app.require_subcommand(1);

  auto* lexicon = app.add_subcommand("lexicon", "Lexicon operations");
  lexicon->require_subcommand(1);
  auto* expand = lexicon->add_subcommand("expand", "Expand seed terms into a lexicon bundle");
  expand->add_option("--seeds", o.seeds, "Seed configuration (built-in defaults when omitted)");
  expand->add_option("--embeddings", o.embeddings, "Word-vector file (seeds only when omitted)");
  expand->add_option("--top-k", o.top_k, "Neighbours per seed")->check(CLI::NonNegativeNumber);
  expand->add_option("--min-sim", o.min_sim, "Minimum cosine similarity");
  add_output(expand, o);

  auto* score = app.add_subcommand("score", "CES-D scores for the comments of each video");
  score->add_option("--comments", o.comments, "Corpus holding comment records")->required();
  score->add_option("--lexicon", o.lexicon, "Lexicon bundle (built-in seeds when omitted)");
  score->add_option("--threshold", o.threshold, "fixed:<value> | calibrated:<corpus>");
  add_scoring(score, o);
  add_jobs(score, o);
  add_output(score, o);

  auto* train_cmd = app.add_subcommand("train", "Train a Naive Bayes transcript classifier");
  train_cmd->add_option("--corpus", o.corpus, "Labeled transcript corpus")->required();
  train_cmd->add_option("--lexicon", o.lexicon, "Lexicon bundle (built-in seeds when omitted)");
  train_cmd->add_option("--features", o.features, "empath | tfidf+empath")->capture_default_str();
  train_cmd->add_option("--ngram", o.ngram, "N-gram range MIN:MAX")->capture_default_str();
  train_cmd->add_option("--max-features", o.max_features, "TF-IDF vocabulary size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--alpha", o.alpha, "Laplace smoothing")->capture_default_str();
  train_cmd->add_option("--test-fraction", o.test_fraction, "Held-out share; 0 trains on all")
      ->capture_default_str();
  train_cmd->add_option("--seed", o.seed, "Split seed")->capture_default_str();
  add_jobs(train_cmd, o);
  add_output(train_cmd, o);

  auto* classify = app.add_subcommand("classify", "Classify transcripts with a trained model");
  classify->add_option("--model", o.model, "Model bundle from train")->required();
  classify->add_option("--corpus", o.corpus, "Transcript corpus")->required();
  add_jobs(classify, o);
  add_output(classify, o);

  auto* evaluate = app.add_subcommand("evaluate", "Proxy evaluation against comment CES-D labels");
  evaluate->add_option("--model", o.model, "Model bundle from train")->required();
  evaluate->add_option("--videos", o.videos, "Transcript corpus")->required();
  evaluate->add_option("--comments", o.comments, "Comment corpus (defaults to --videos)");
  evaluate->add_option("--lexicon", o.lexicon, "Scoring lexicon (model lexicon when omitted)");
  evaluate->add_option("--threshold", o.threshold, "fixed:<value> | calibrated:<corpus>");
  evaluate->add_option("--plot-data", o.plot_data, "Per-video score table for plotting");
  add_scoring(evaluate, o);
  add_jobs(evaluate, o);
  add_output(evaluate, o);

  auto* patterns = app.add_subcommand("patterns", "Viewing-pattern detection over a watch history");
  patterns->add_option("--history", o.history, "Watch history records")->required();
  patterns->add_option("--model", o.model, "Model for events without a label");
  patterns->add_option("--videos", o.videos, "Transcripts referenced by unlabeled events");
  patterns->add_option("--window-days", o.window_days)->capture_default_str();
  patterns->add_option("--overlap-days", o.overlap_days)->capture_default_str();
  patterns->add_option("--decline-min-windows", o.decline_min_windows)->capture_default_str();
  patterns->add_option("--decline-slope", o.decline_slope)->capture_default_str();
  patterns->add_option("--rumination-min-run", o.rumination_min_run)->capture_default_str();
  patterns->add_option("--frequency-threshold", o.frequency_threshold)->capture_default_str();
  patterns->add_option("--frequency-min-events", o.frequency_min_events)->capture_default_str();
  add_output(patterns, o);

  auto* stats = app.add_subcommand("stats", "Corpus statistics, optionally after keyword labeling");
  stats->add_option("--corpus", o.corpus, "Corpus file")->required();
  stats->add_option("--rules", o.rules, "Keyword rules file");
  stats->add_flag("--default-rules", o.default_rules, "Apply the built-in keyword rules");
  stats->add_option("--labeled-out", o.labeled_out, "Write the labeled corpus here");
  add_output(stats, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "depscan: " << e.what() << "\n";
    const auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    if (!failing->get_subcommands().empty()) failing = failing->get_subcommands().front();
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (expand->parsed()) return cmd_lexicon_expand(o, out);
    if (score->parsed()) return cmd_score(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (classify->parsed()) return cmd_classify(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (patterns->parsed()) return cmd_patterns(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
  } catch (const UsageError& e) {
    err << "depscan: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "depscan: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "depscan: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace depscan::cli
